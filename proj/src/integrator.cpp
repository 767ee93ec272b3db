#include "radshoot/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace radshoot {

namespace {

// Dormand-Prince 5(4) coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// y1 - yhat1 weights
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output weights
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

constexpr double kBlowupThreshold = 1e12;

}  // namespace

bool is_wall_hit(const ShotOutcome& o) {
    return std::holds_alternative<WallHit>(o);
}
bool is_no_hit(const ShotOutcome& o) {
    return std::holds_alternative<NoHitUpTo>(o);
}
bool is_blowup(const ShotOutcome& o) {
    return std::holds_alternative<Blowup>(o);
}
const char* outcome_name(const ShotOutcome& o) {
    if (std::holds_alternative<WallHit>(o)) return "wall_hit";
    if (std::holds_alternative<NoHitUpTo>(o)) return "no_hit";
    if (std::holds_alternative<Blowup>(o)) return "blowup";
    return "step_limit";
}

// --- Trajectory ---------------------------------------------------------------

void Trajectory::eval_series(double r, std::span<double> u, std::span<double> du,
                             std::span<double> d2u) const {
    for (int i = 0; i < dim_; ++i) {
        double s = series_slope_[static_cast<std::size_t>(i)];
        if (!u.empty()) u[static_cast<std::size_t>(i)] = alpha_[static_cast<std::size_t>(i)] - 0.5 * s * r * r;
        if (!du.empty()) du[static_cast<std::size_t>(i)] = -s * r;
        if (!d2u.empty()) d2u[static_cast<std::size_t>(i)] = -s;
    }
}

const Trajectory::Segment* Trajectory::find_segment(double r) const {
    if (segments_.empty()) return nullptr;
    // binary search for the segment containing r
    std::size_t lo = 0, hi = segments_.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (segments_[mid].r0 + segments_[mid].h < r)
            lo = mid + 1;
        else
            hi = mid;
    }
    return &segments_[lo];
}

void Trajectory::eval(double r, std::span<double> u, std::span<double> du,
                      std::span<double> d2u) const {
    r = std::clamp(r, 0.0, r_end_);
    if (r <= eps_ || segments_.empty()) {
        eval_series(r, u, du, d2u);
        return;
    }
    const Segment* seg = find_segment(r);
    const double h = seg->h;
    const double th = (r - seg->r0) / h;
    const double th1 = 1.0 - th;
    const std::size_t m = static_cast<std::size_t>(2 * dim_);
    const double* r1 = seg->rcont.data();
    const double* r2 = r1 + m;
    const double* r3 = r2 + m;
    const double* r4 = r3 + m;
    const double* r5 = r4 + m;
    // cont(th)   = r1 + th*r2 + th*th1*r3 + th^2*th1*r4 + th^2*th1^2*r5
    // cont'(th)  = r2 + (1-2th)*r3 + (2th-3th^2)*r4 + (2th-6th^2+4th^3)*r5
    const double w2 = th, w3 = th * th1, w4 = th * th * th1,
                 w5 = th * th * th1 * th1;
    const double v3 = 1.0 - 2.0 * th, v4 = th * (2.0 - 3.0 * th),
                 v5 = 2.0 * th - 6.0 * th * th + 4.0 * th * th * th;
    for (int i = 0; i < dim_; ++i) {
        const std::size_t iu = static_cast<std::size_t>(i);
        const std::size_t iw = static_cast<std::size_t>(dim_ + i);
        if (!u.empty())
            u[iu] = r1[iu] + w2 * r2[iu] + w3 * r3[iu] + w4 * r4[iu] + w5 * r5[iu];
        if (!du.empty())
            du[iu] = r1[iw] + w2 * r2[iw] + w3 * r3[iw] + w4 * r4[iw] + w5 * r5[iw];
        if (!d2u.empty())
            // d/dr of the interpolated u' component
            d2u[iu] = (r2[iw] + v3 * r3[iw] + v4 * r4[iw] + v5 * r5[iw]) / h;
    }
}

std::vector<double> Trajectory::value(double r) const {
    std::vector<double> u(static_cast<std::size_t>(dim_));
    eval(r, u, {}, {});
    return u;
}

std::vector<double> Trajectory::deriv(double r) const {
    std::vector<double> du(static_cast<std::size_t>(dim_));
    eval(r, {}, du, {});
    return du;
}

std::vector<double> Trajectory::second_deriv(double r) const {
    std::vector<double> d2u(static_cast<std::size_t>(dim_));
    eval(r, {}, {}, d2u);
    return d2u;
}

// --- integration ----------------------------------------------------------------

std::pair<std::vector<double>, std::vector<double>> taylor_start(
    const SystemSpec& spec, std::span<const double> alpha, double eps) {
    if (eps <= 0) throw InvalidInput("series handoff radius must be positive");
    auto fa = spec.eval_f(alpha);
    const int L = spec.L;
    std::vector<double> u(static_cast<std::size_t>(L)), du(static_cast<std::size_t>(L));
    for (int i = 0; i < L; ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        u[k] = alpha[k] - fa[k] * eps * eps / (2.0 * spec.n);
        du[k] = -fa[k] * eps / spec.n;
    }
    return {std::move(u), std::move(du)};
}

// All integration state for one shot; exists so Trajectory can friend it.
class ShotIntegrator {
public:
    ShotIntegrator(const SystemSpec& spec, std::span<const double> alpha,
                   const ShotConfig& cfg)
        : spec_(spec), cfg_(cfg), L_(spec.L), m_(2 * spec.L) {
        alpha_.assign(alpha.begin(), alpha.end());
    }

    ShotResult run();

private:
    const SystemSpec& spec_;
    const ShotConfig& cfg_;
    const int L_;
    const int m_;
    std::vector<double> alpha_;
    long nfev_ = 0;

    void rhs(double r, const std::vector<double>& y, std::vector<double>& dy) {
        ++nfev_;
        std::span<const double> u(y.data(), static_cast<std::size_t>(L_));
        std::span<double> fout(dy.data(), static_cast<std::size_t>(L_));
        // dy holds f(u) in its first half for a moment, then is rearranged
        spec_.eval_f_projected(u, fout);
        for (int i = 0; i < L_; ++i) {
            const std::size_t iu = static_cast<std::size_t>(i);
            const std::size_t iw = static_cast<std::size_t>(L_ + i);
            double fi = dy[iu];
            dy[iu] = y[iw];
            dy[iw] = -fi - (spec_.n - 1) / r * y[iw];
        }
    }

    double error_norm(const std::vector<double>& y0, const std::vector<double>& y1,
                      const std::vector<double>& err) const {
        double sum = 0.0;
        for (int i = 0; i < m_; ++i) {
            const std::size_t k = static_cast<std::size_t>(i);
            double sk = cfg_.abs_tol +
                        cfg_.rel_tol * std::max(std::fabs(y0[k]), std::fabs(y1[k]));
            double q = err[k] / sk;
            sum += q * q;
        }
        return std::sqrt(sum / m_);
    }

    double initial_step(double r, const std::vector<double>& y,
                        const std::vector<double>& f0) {
        auto scaled_norm = [&](const std::vector<double>& v,
                               const std::vector<double>& ref) {
            double sum = 0.0;
            for (int i = 0; i < m_; ++i) {
                const std::size_t k = static_cast<std::size_t>(i);
                double sk = cfg_.abs_tol + cfg_.rel_tol * std::fabs(ref[k]);
                double q = v[k] / sk;
                sum += q * q;
            }
            return std::sqrt(sum / m_);
        };
        double d0 = scaled_norm(y, y);
        double d1 = scaled_norm(f0, y);
        double h0 = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, cfg_.r_max - r);
        std::vector<double> y1(y), f1(static_cast<std::size_t>(m_));
        for (int i = 0; i < m_; ++i)
            y1[static_cast<std::size_t>(i)] += h0 * f0[static_cast<std::size_t>(i)];
        rhs(r + h0, y1, f1);
        double d2 = 0.0;
        {
            std::vector<double> diff(static_cast<std::size_t>(m_));
            for (int i = 0; i < m_; ++i)
                diff[static_cast<std::size_t>(i)] =
                    f1[static_cast<std::size_t>(i)] - f0[static_cast<std::size_t>(i)];
            d2 = scaled_norm(diff, y) / h0;
        }
        double dm = std::max(d1, d2);
        double h1 = dm > 1e-15 ? std::pow(0.01 / dm, 0.2) : std::max(1e-6, h0 * 1e-3);
        return std::min({100.0 * h0, h1, cfg_.r_max - r});
    }

    // smallest component of the interpolated state at parameter th
    static double min_component(const Trajectory::Segment& seg, int L, double th) {
        const std::size_t m = seg.rcont.size() / 5;
        const double th1 = 1.0 - th;
        const double w2 = th, w3 = th * th1, w4 = th * th * th1,
                     w5 = th * th * th1 * th1;
        const double* r1 = seg.rcont.data();
        const double* r2 = r1 + m;
        const double* r3 = r2 + m;
        const double* r4 = r3 + m;
        const double* r5 = r4 + m;
        double gmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < L; ++i) {
            const std::size_t k = static_cast<std::size_t>(i);
            double v = r1[k] + w2 * r2[k] + w3 * r3[k] + w4 * r4[k] + w5 * r5[k];
            gmin = std::min(gmin, v);
        }
        return gmin;
    }
};

ShotResult ShotIntegrator::run() {
    ShotResult result;
    Trajectory& traj = result.trajectory;
    traj.dim_ = L_;
    traj.n_ = spec_.n;
    traj.alpha_ = alpha_;

    if (static_cast<int>(alpha_.size()) != L_)
        throw InvalidInput("initial value size does not match component count");
    for (double a : alpha_)
        if (!(a >= 0.0)) throw InvalidInput("initial value must be componentwise >= 0");

    // boundary starts: the shot begins on the wall
    double amin = *std::min_element(alpha_.begin(), alpha_.end());
    if (amin <= cfg_.wall_tol) {
        WallHit hit;
        hit.r_alpha = 0.0;
        for (int i = 0; i < L_; ++i)
            if (alpha_[static_cast<std::size_t>(i)] <= cfg_.wall_tol)
                hit.hit_set.push_back(i);
        hit.u_end = alpha_;
        hit.du_end.assign(static_cast<std::size_t>(L_), 0.0);
        traj.eps_ = 0.0;
        traj.r_end_ = 0.0;
        traj.series_slope_.assign(static_cast<std::size_t>(L_), 0.0);
        traj.nodes_.push_back({0.0, alpha_, hit.du_end});
        result.outcome = hit;
        return result;
    }

    // series start on [0, eps]
    const double eps = cfg_.eps_start;
    auto fa = spec_.eval_f(alpha_);
    traj.eps_ = eps;
    traj.series_slope_.resize(static_cast<std::size_t>(L_));
    for (int i = 0; i < L_; ++i)
        traj.series_slope_[static_cast<std::size_t>(i)] =
            fa[static_cast<std::size_t>(i)] / spec_.n;
    auto [u0, du0] = taylor_start(spec_, alpha_, eps);

    traj.nodes_.push_back(
        {0.0, alpha_, std::vector<double>(static_cast<std::size_t>(L_), 0.0)});

    // freak case: the series already leaves the orthant before eps
    {
        double m0 = *std::min_element(u0.begin(), u0.end());
        if (m0 <= 0.0) {
            // u_i(r) = alpha_i - s_i r^2 / 2 crosses zero at sqrt(2 alpha_i / s_i)
            double r_hit = eps;
            for (int i = 0; i < L_; ++i) {
                double s = traj.series_slope_[static_cast<std::size_t>(i)];
                if (s > 0.0) {
                    double rc = std::sqrt(2.0 * alpha_[static_cast<std::size_t>(i)] / s);
                    r_hit = std::min(r_hit, rc);
                }
            }
            WallHit hit;
            hit.r_alpha = r_hit;
            hit.u_end.resize(static_cast<std::size_t>(L_));
            hit.du_end.resize(static_cast<std::size_t>(L_));
            traj.r_end_ = r_hit;
            traj.eval(r_hit, hit.u_end, hit.du_end);
            for (int i = 0; i < L_; ++i)
                if (hit.u_end[static_cast<std::size_t>(i)] <= cfg_.wall_tol)
                    hit.hit_set.push_back(i);
            traj.nodes_.push_back({r_hit, hit.u_end, hit.du_end});
            result.outcome = hit;
            return result;
        }
    }

    // state vector y = (u, u')
    std::vector<double> y(static_cast<std::size_t>(m_));
    std::copy(u0.begin(), u0.end(), y.begin());
    std::copy(du0.begin(), du0.end(), y.begin() + L_);
    double r = eps;
    traj.nodes_.push_back({r, u0, du0});
    traj.r_end_ = r;

    std::vector<double> k1(static_cast<std::size_t>(m_)), k2(k1), k3(k1), k4(k1),
        k5(k1), k6(k1), k7(k1), ytmp(k1), ynew(k1), errv(k1);
    rhs(r, y, k1);
    double h = initial_step(r, y, k1);
    bool just_rejected = false;

    auto stage = [&](const std::vector<double>& base, double hh,
                     std::initializer_list<std::pair<double, const std::vector<double>*>> terms,
                     std::vector<double>& out) {
        for (int i = 0; i < m_; ++i) {
            const std::size_t k = static_cast<std::size_t>(i);
            double acc = base[k];
            for (const auto& [w, v] : terms) acc += hh * w * (*v)[k];
            out[k] = acc;
        }
    };

    while (true) {
        if (r >= cfg_.r_max * (1.0 - 1e-14)) {
            result.outcome = NoHitUpTo{r};
            result.rhs_evals = nfev_;
            return result;
        }
        if (result.steps_accepted + result.steps_rejected >= cfg_.max_steps) {
            result.outcome = StepLimit{r};
            result.rhs_evals = nfev_;
            return result;
        }
        h = std::min(h, cfg_.r_max - r);
        if (!(h > 0) || r + h == r) {
            result.outcome = StepLimit{r};
            result.rhs_evals = nfev_;
            return result;
        }

        stage(y, h, {{a21, &k1}}, ytmp);
        rhs(r + c2 * h, ytmp, k2);
        stage(y, h, {{a31, &k1}, {a32, &k2}}, ytmp);
        rhs(r + c3 * h, ytmp, k3);
        stage(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, ytmp);
        rhs(r + c4 * h, ytmp, k4);
        stage(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, ytmp);
        rhs(r + c5 * h, ytmp, k5);
        stage(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}},
              ytmp);
        rhs(r + h, ytmp, k6);
        stage(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}},
              ynew);
        rhs(r + h, ynew, k7);

        for (int i = 0; i < m_; ++i) {
            const std::size_t k = static_cast<std::size_t>(i);
            errv[k] = h * (e1 * k1[k] + e3 * k3[k] + e4 * k4[k] + e5 * k5[k] +
                           e6 * k6[k] + e7 * k7[k]);
        }
        double err = error_norm(y, ynew, errv);

        if (err > 1.0) {
            ++result.steps_rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            just_rejected = true;
            continue;
        }

        // accepted: build the dense segment
        Trajectory::Segment seg;
        seg.r0 = r;
        seg.h = h;
        seg.rcont.resize(5 * static_cast<std::size_t>(m_));
        double* r1 = seg.rcont.data();
        double* r2 = r1 + m_;
        double* r3 = r2 + m_;
        double* r4 = r3 + m_;
        double* r5 = r4 + m_;
        for (int i = 0; i < m_; ++i) {
            const std::size_t k = static_cast<std::size_t>(i);
            double ydiff = ynew[k] - y[k];
            double bspl = h * k1[k] - ydiff;
            r1[k] = y[k];
            r2[k] = ydiff;
            r3[k] = bspl;
            r4[k] = ydiff - h * k7[k] - bspl;
            r5[k] = h * (d1 * k1[k] + d3 * k3[k] + d4 * k4[k] + d5 * k5[k] +
                         d6 * k6[k] + d7 * k7[k]);
        }
        traj.segments_.push_back(std::move(seg));
        ++result.steps_accepted;
        const Trajectory::Segment& cur = traj.segments_.back();

        // wall-hit scan over the fresh segment
        constexpr int kScan = 8;
        double prev_th = 0.0;
        double cross_th = -1.0;
        for (int j = 1; j <= kScan; ++j) {
            double th = static_cast<double>(j) / kScan;
            if (min_component(cur, L_, th) <= 0.0) {
                cross_th = th;
                break;
            }
            prev_th = th;
        }
        if (cross_th > 0.0) {
            // bisect to the first crossing
            double lo = prev_th, hi = cross_th;
            const double width_target = cfg_.wall_tol * std::max(1.0, r) / h;
            for (int it = 0; it < 300; ++it) {
                if (hi - lo <= width_target &&
                    std::fabs(min_component(cur, L_, hi)) <= cfg_.wall_tol)
                    break;
                double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;  // parameter resolution hit
                if (min_component(cur, L_, mid) <= 0.0)
                    hi = mid;
                else
                    lo = mid;
            }
            double r_alpha = r + hi * h;
            WallHit hit;
            hit.r_alpha = r_alpha;
            hit.u_end.resize(static_cast<std::size_t>(L_));
            hit.du_end.resize(static_cast<std::size_t>(L_));
            traj.r_end_ = r_alpha;
            traj.eval(r_alpha, hit.u_end, hit.du_end);
            for (int i = 0; i < L_; ++i)
                if (hit.u_end[static_cast<std::size_t>(i)] <= cfg_.wall_tol)
                    hit.hit_set.push_back(i);
            if (!traj.nodes_.empty() && traj.nodes_.back().r >= r_alpha)
                traj.nodes_.pop_back();
            traj.nodes_.push_back({r_alpha, hit.u_end, hit.du_end});
            result.outcome = hit;
            result.rhs_evals = nfev_;
            return result;
        }

        // no event: advance
        y.swap(ynew);
        k1.swap(k7);  // FSAL
        r += h;
        traj.r_end_ = r;

        // blow-up / health check
        bool bad = false;
        double umax = 0.0;
        for (int i = 0; i < m_; ++i) {
            const std::size_t k = static_cast<std::size_t>(i);
            if (!std::isfinite(y[k])) bad = true;
            if (i < L_) umax = std::max(umax, std::fabs(y[k]));
        }
        if (bad || umax >= kBlowupThreshold) {
            std::vector<double> uu(y.begin(), y.begin() + L_);
            std::vector<double> ww(y.begin() + L_, y.end());
            traj.nodes_.push_back({r, uu, ww});
            result.outcome = Blowup{r};
            result.rhs_evals = nfev_;
            return result;
        }

        {
            std::vector<double> uu(y.begin(), y.begin() + L_);
            std::vector<double> ww(y.begin() + L_, y.end());
            traj.nodes_.push_back({r, std::move(uu), std::move(ww)});
        }

        double fac = 0.9 * std::pow(std::max(err, 1e-16), -0.2);
        fac = std::min(just_rejected ? 1.0 : 5.0, std::max(0.2, fac));
        h *= fac;
        just_rejected = false;
    }
}

ShotResult integrate(const SystemSpec& spec, std::span<const double> alpha,
                     const ShotConfig& cfg) {
    ShotIntegrator engine(spec, alpha, cfg);
    auto result = engine.run();
    return result;
}

double residual(const Trajectory& traj, const SystemSpec& spec,
                int probe_count) {
    if (probe_count < 1) throw InvalidInput("need at least one probe");
    const int L = traj.components();
    const double r_end = traj.r_end();
    if (r_end <= 0.0) return 0.0;
    const double lo = std::max(2.0 * std::max(traj.eps(), 1e-12), 0.005 * r_end);
    if (lo >= r_end) return 0.0;

    std::vector<double> u(static_cast<std::size_t>(L)), fu(u);
    std::vector<double> dm2(u), dm1(u), dp1(u), dp2(u), du(u);
    double worst = 0.0;
    for (int j = 0; j < probe_count; ++j) {
        double r = lo + (j + 0.5) * (r_end - lo) / probe_count;
        double h = std::min({1e-3 * std::max(1.0, r), 0.25 * r, 0.45 * (r_end - r)});
        if (h <= 0.0) continue;
        traj.eval(r, u, du);
        traj.eval(r - 2 * h, {}, dm2);
        traj.eval(r - h, {}, dm1);
        traj.eval(r + h, {}, dp1);
        traj.eval(r + 2 * h, {}, dp2);
        spec.eval_f_projected(u, fu);
        for (int i = 0; i < L; ++i) {
            const std::size_t k = static_cast<std::size_t>(i);
            double d2 = (-dp2[k] + 8.0 * dp1[k] - 8.0 * dm1[k] + dm2[k]) / (12.0 * h);
            double defect = d2 + (spec.n - 1) / r * du[k] + fu[k];
            worst = std::max(worst, std::fabs(defect));
        }
    }
    return worst;
}

}  // namespace radshoot
