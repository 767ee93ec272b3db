#include "radshoot/pohozaev.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "radshoot/sampling.hpp"

namespace radshoot {

namespace {

// 10-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr double kGlx[5] = {0.1488743389816312108848260, 0.4333953941292471907992659,
                            0.6794095682990244062343274, 0.8650633666889845107320967,
                            0.9739065285171717200779640};
constexpr double kGlw[5] = {0.2955242247147528701738930, 0.2692667193099963550912269,
                            0.2190863625159820439955349, 0.1494513491505805931457763,
                            0.0666713443086881375935688};

double gl10(const std::function<double(double)>& g, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) {
        double dx = half * kGlx[i];
        sum += kGlw[i] * (g(mid - dx) + g(mid + dx));
    }
    return half * sum;
}

void adaptive_gl(const std::function<double(double)>& g, double a, double b,
                 double whole, double tol, int depth, double& total,
                 double& err_total) {
    const double mid = 0.5 * (a + b);
    const double left = gl10(g, a, mid);
    const double right = gl10(g, mid, b);
    const double delta = left + right - whole;
    if (std::fabs(delta) <= tol || depth >= 30) {
        if (depth >= 30 && std::fabs(delta) > tol)
            throw QuadratureFailure(std::fabs(delta),
                                    "quadrature failed to converge");
        total += left + right;
        err_total += std::fabs(delta);
        return;
    }
    adaptive_gl(g, a, mid, left, 0.5 * tol, depth + 1, total, err_total);
    adaptive_gl(g, mid, b, right, 0.5 * tol, depth + 1, total, err_total);
}

}  // namespace

double sphere_area(int n) {
    if (n < 1) throw InvalidInput("dimension must be positive");
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double radial_integral(const std::function<double(double)>& g, int n, double R,
                       double rel_tol, double* err_est) {
    if (R < 0) throw InvalidInput("radius must be nonnegative");
    const double sigma = sphere_area(n);
    if (R == 0) {
        if (err_est) *err_est = 0.0;
        return 0.0;
    }
    auto weighted = [&](double r) { return g(r) * std::pow(r, n - 1); };
    double coarse = gl10(weighted, 0.0, R);
    double scale = std::max(1.0, std::fabs(coarse));
    double total = 0.0, err = 0.0;
    adaptive_gl(weighted, 0.0, R, coarse, rel_tol * scale, 0, total, err);
    if (err_est) *err_est = sigma * err;
    return sigma * total;
}

// --- profiles -----------------------------------------------------------------

void RadialProfile::eval(double r, std::span<double> u, std::span<double> du,
                         std::span<double> d2u) const {
    if (!traj) throw InvalidInput("empty profile");
    traj->eval(arg_scale * r, u, du, d2u);
    for (double& x : u) x *= value_scale;
    const double ds = value_scale * arg_scale;
    for (double& x : du) x *= ds;
    const double ds2 = ds * arg_scale;
    for (double& x : d2u) x *= ds2;
}

std::vector<double> RadialProfile::value(double r) const {
    std::vector<double> u(static_cast<std::size_t>(components()));
    eval(r, u, {});
    return u;
}

std::vector<double> RadialProfile::deriv(double r) const {
    std::vector<double> du(static_cast<std::size_t>(components()));
    eval(r, {}, du);
    return du;
}

std::vector<double> BallSolution::boundary_deriv() const {
    return profile.deriv(R);
}

std::vector<double> BallSolution::knots() const {
    std::vector<double> out;
    out.push_back(0.0);
    for (const auto& node : profile.traj->nodes()) {
        double r = node.r / profile.arg_scale;
        if (r > 0.0 && r < R) out.push_back(r);
    }
    out.push_back(R);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double ball_residual(const BallSolution& sol, const SystemSpec& spec,
                     int probe_count) {
    if (probe_count < 1) throw InvalidInput("need at least one probe");
    const int L = sol.L;
    const double R = sol.R;
    const double lo = 0.005 * R;
    std::vector<double> u(static_cast<std::size_t>(L)), du(u), fu(u);
    std::vector<double> dm2(u), dm1(u), dp1(u), dp2(u);
    double worst = 0.0;
    for (int j = 0; j < probe_count; ++j) {
        double r = lo + (j + 0.5) * (R - lo) / probe_count;
        double h = std::min({1e-3 * std::max(1.0, r), 0.25 * r, 0.45 * (R - r)});
        if (h <= 0.0) continue;
        sol.profile.eval(r, u, du);
        sol.profile.eval(r - 2 * h, {}, dm2);
        sol.profile.eval(r - h, {}, dm1);
        sol.profile.eval(r + h, {}, dp1);
        sol.profile.eval(r + 2 * h, {}, dp2);
        spec.eval_f_projected(u, fu);
        for (int i = 0; i < L; ++i) {
            const std::size_t k = static_cast<std::size_t>(i);
            double d2 = (-dp2[k] + 8.0 * dp1[k] - 8.0 * dm1[k] + dm2[k]) / (12.0 * h);
            worst = std::max(worst,
                             std::fabs(d2 + (spec.n - 1) / r * du[k] + fu[k]));
        }
    }
    return worst;
}

// --- identities ------------------------------------------------------------------

namespace {

// composite GL10 aligned to the profile's knots; integrand already includes
// the r^(n-1) weight
double knotted_integral(const BallSolution& sol,
                        const std::function<double(double)>& g,
                        double* err_est = nullptr) {
    auto ks = sol.knots();
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
        double a = ks[i], b = ks[i + 1];
        double whole = gl10(g, a, b);
        // one refinement level as the error gauge
        double mid = 0.5 * (a + b);
        double fine = gl10(g, a, mid) + gl10(g, mid, b);
        total += fine;
        err += std::fabs(fine - whole);
    }
    if (err_est) *err_est = err;
    return total;
}

double rel_residual(double lhs, double rhs) {
    return std::fabs(lhs - rhs) /
           std::max({std::fabs(lhs), std::fabs(rhs), 1e-30});
}

struct ProfileEval {
    std::vector<double> u, du, d2u;
    explicit ProfileEval(int L)
        : u(static_cast<std::size_t>(L)),
          du(static_cast<std::size_t>(L)),
          d2u(static_cast<std::size_t>(L)) {}
};

}  // namespace

IdentityReport verify_rellich_identity(const BallSolution& sol, int component) {
    if (component < 0 || component >= sol.L)
        throw InvalidInput("component out of range");
    const int n = sol.n;
    const double sigma = sphere_area(n);
    const std::size_t c = static_cast<std::size_t>(component);

    ProfileEval pe(sol.L);
    auto integrand = [&](double r) {
        sol.profile.eval(r, pe.u, pe.du, pe.d2u);
        double lap = pe.d2u[c] + (n - 1) / std::max(r, 1e-300) * pe.du[c];
        double term = lap * r * pe.du[c] - 0.5 * (n - 2) * pe.du[c] * pe.du[c];
        return term * std::pow(r, n - 1);
    };
    IdentityReport rep;
    rep.identity = "rellich_single";
    rep.lhs = sigma * knotted_integral(sol, integrand, &rep.quadrature_error);
    double dR = sol.boundary_deriv()[c];
    rep.rhs = 0.5 * sigma * std::pow(sol.R, n) * dR * dR;
    rep.rel_residual = rel_residual(rep.lhs, rep.rhs);
    return rep;
}

IdentityReport verify_cross_identity(const BallSolution& sol) {
    if (sol.L < 2)
        throw InvalidInput("cross identity needs two components");
    const int n = sol.n;
    const double sigma = sphere_area(n);

    ProfileEval pe(sol.L);
    auto integrand = [&](double r) {
        sol.profile.eval(r, pe.u, pe.du, pe.d2u);
        double inv_r = 1.0 / std::max(r, 1e-300);
        double lap_u = pe.d2u[0] + (n - 1) * inv_r * pe.du[0];
        double lap_v = pe.d2u[1] + (n - 1) * inv_r * pe.du[1];
        double term = lap_u * r * pe.du[1] + lap_v * r * pe.du[0] -
                      (n - 2) * pe.du[0] * pe.du[1];
        return term * std::pow(r, n - 1);
    };
    IdentityReport rep;
    rep.identity = "cross";
    rep.lhs = sigma * knotted_integral(sol, integrand, &rep.quadrature_error);
    auto dR = sol.boundary_deriv();
    rep.rhs = sigma * std::pow(sol.R, n) * dR[0] * dR[1];
    rep.rel_residual = rel_residual(rep.lhs, rep.rhs);
    return rep;
}

IdentityReport verify_scalar_identity(const BallSolution& sol, double p,
                                      bool enforce_residual) {
    if (sol.L != 1) throw InvalidInput("scalar identity needs one component");
    const int n = sol.n;
    if (enforce_residual) {
        SystemSpec check = builtin("lane_emden_scalar",
                                   {{"p", p}, {"n", static_cast<double>(n)}});
        double res = ball_residual(sol, check);
        if (res > 1e-4)
            throw NotADirichletSolution(
                "profile does not solve the scalar power equation (residual " +
                std::to_string(res) + ")");
    }
    const double sigma = sphere_area(n);
    const double coef = static_cast<double>(n) / (p + 1) - 0.5 * (n - 2);

    ProfileEval pe(sol.L);
    auto integrand = [&](double r) {
        sol.profile.eval(r, pe.u, pe.du);
        return std::pow(std::max(pe.u[0], 0.0), p + 1) * std::pow(r, n - 1);
    };
    IdentityReport rep;
    rep.identity = "scalar_merged";
    rep.lhs = sigma * coef * knotted_integral(sol, integrand, &rep.quadrature_error);
    double dR = sol.boundary_deriv()[0];
    rep.rhs = 0.5 * sigma * std::pow(sol.R, n) * dR * dR;
    rep.rel_residual = rel_residual(rep.lhs, rep.rhs);
    return rep;
}

IdentityReport verify_merged_identity(const BallSolution& sol, double p,
                                      std::optional<double> q,
                                      bool enforce_residual) {
    if (sol.L != 2) throw InvalidInput("merged identity needs two components");
    const int n = sol.n;
    if (enforce_residual) {
        SystemSpec check =
            q ? builtin("sign_changing_pq",
                        {{"p", p}, {"q", *q}, {"n", static_cast<double>(n)}})
              : builtin("sign_changing",
                        {{"p", p}, {"n", static_cast<double>(n)}});
        double res = ball_residual(sol, check);
        if (res > 1e-4)
            throw NotADirichletSolution(
                "profile does not solve the sign-changing system (residual " +
                std::to_string(res) + ")");
    }
    const double sigma = sphere_area(n);
    const double cp = static_cast<double>(n) / (p + 1) - 0.5 * (n - 2);

    ProfileEval pe(sol.L);
    double err_p = 0.0, err_q = 0.0;
    auto integrand_p = [&](double r) {
        sol.profile.eval(r, pe.u, pe.du);
        double up = std::pow(std::max(pe.u[0], 0.0), p + 1);
        double vp = std::pow(std::max(pe.u[1], 0.0), p + 1);
        return (up + vp) * std::pow(r, n - 1);
    };
    IdentityReport rep;
    rep.identity = q ? "merged_two_exponent" : "merged";
    rep.lhs = sigma * cp * knotted_integral(sol, integrand_p, &err_p);
    if (q) {
        const double cq = static_cast<double>(n) / (*q + 1) - 0.5 * (n - 2);
        auto integrand_q = [&](double r) {
            sol.profile.eval(r, pe.u, pe.du);
            return std::pow(std::max(pe.u[1], 0.0), *q + 1) * std::pow(r, n - 1);
        };
        rep.lhs += sigma * cq * knotted_integral(sol, integrand_q, &err_q);
    }
    rep.quadrature_error = err_p + err_q;
    auto dR = sol.boundary_deriv();
    // the merge eliminates the coupling term of the first equation with the
    // second, so the surviving quadratic boundary term is the one in v
    rep.rhs = sigma * std::pow(sol.R, n) * (0.5 * dR[1] * dR[1] + dR[0] * dR[1]);
    rep.rel_residual = rel_residual(rep.lhs, rep.rhs);
    return rep;
}

// --- certificates -----------------------------------------------------------------

namespace {

std::string fmt_num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string describe_params(const SystemSpec& spec) {
    std::ostringstream os;
    os << spec.name << "(";
    bool first = true;
    for (const auto& [k, v] : spec.params) {
        if (!first) os << ", ";
        os << k << "=" << fmt_num(v);
        first = false;
    }
    os << ")";
    return os.str();
}

Certificate coefficient_certificate(const SystemSpec& spec,
                                    const std::string& lemma,
                                    const std::vector<double>& exponents) {
    const int n = spec.n;
    Certificate cert;
    cert.lemma = lemma;
    double worst_coef = -std::numeric_limits<double>::infinity();
    std::ostringstream coefs;
    for (double s : exponents) {
        double c = static_cast<double>(n) / (s + 1) - 0.5 * (n - 2);
        worst_coef = std::max(worst_coef, c);
        if (coefs.tellp() > 0) coefs << ", ";
        coefs << "n/(" << fmt_num(s) << "+1) - (n-2)/2 = " << fmt_num(c);
    }
    cert.margin = -worst_coef + 0.0;  // normalize -0
    cert.certified = worst_coef <= 1e-12;
    std::ostringstream os;
    if (cert.certified) {
        os << "Certified -- Lemma: " << lemma << "\n"
           << "  system: " << describe_params(spec) << "\n"
           << "  coefficients: " << coefs.str() << "\n"
           << "  every source coefficient is <= 0 while the boundary flux term\n"
           << "  is strictly positive, so no positive radial solution vanishes\n"
           << "  on the boundary of any ball.\n";
        cert.reason = "all merged-identity coefficients nonpositive";
    } else {
        os << "Inconclusive -- " << lemma << " does not decide\n"
           << "  system: " << describe_params(spec) << "\n"
           << "  coefficients: " << coefs.str() << "\n"
           << "  a positive coefficient leaves both signs possible.\n";
        cert.reason = "a merged-identity coefficient is positive";
    }
    cert.text = os.str();
    return cert;
}

Certificate potential_certificate(const SystemSpec& spec,
                                  const std::string& lemma, bool gate_ok,
                                  const std::string& gate_desc, double box_max,
                                  long samples, std::uint64_t seed) {
    const int n = spec.n;
    const int L = spec.L;
    Certificate cert;
    cert.lemma = lemma;

    // quantity required to be strictly positive away from the origin:
    //   (n-2)/2 * <u, grad F> - n F   (with the cross pairing for type II)
    auto quantity = [&](std::span<const double> u) {
        auto fv = spec.eval_f(u);
        double uf = 0.0;
        if (spec.potential_kind == PotentialKind::TypeII) {
            uf = u[0] * fv[1] + u[1] * fv[0];
        } else {
            for (int i = 0; i < L; ++i)
                uf += u[static_cast<std::size_t>(i)] * fv[static_cast<std::size_t>(i)];
        }
        return 0.5 * (n - 2) * uf - n * spec.eval_potential(u);
    };

    double min_val = std::numeric_limits<double>::infinity();
    std::vector<double> min_at;
    long count = 0;
    Halton interior(L, seed);
    std::vector<double> x(static_cast<std::size_t>(L));
    for (long i = 0; i < samples; ++i) {
        interior.next_into(x);
        for (double& v : x) v *= box_max;
        double val = quantity(x);
        ++count;
        if (val < min_val) {
            min_val = val;
            min_at = x;
        }
    }
    // boundary faces (single zero coordinate) catch sign problems hidden by
    // strictly interior sampling
    for (int z = 0; z < L && L > 1; ++z) {
        Halton face(L, seed + 31 * (static_cast<std::uint64_t>(z) + 1));
        long face_samples = std::max<long>(64, samples / (4 * L));
        for (long i = 0; i < face_samples; ++i) {
            face.next_into(x);
            for (double& v : x) v *= box_max;
            x[static_cast<std::size_t>(z)] = 0.0;
            double val = quantity(x);
            ++count;
            if (val < min_val) {
                min_val = val;
                min_at = x;
            }
        }
    }
    cert.sample_count = count;
    cert.margin = min_val;
    cert.certified = gate_ok && min_val > 0.0;

    std::ostringstream os;
    if (cert.certified) {
        os << "Certified -- Lemma: " << lemma << "\n"
           << "  system: " << describe_params(spec) << "\n"
           << "  (n-2)/2 <u, f-pairing> - n F sampled strictly positive on\n"
           << "  [0," << fmt_num(box_max) << "]^" << L << " minus the origin ("
           << count << " samples, min " << fmt_num(min_val) << ")";
        if (!gate_desc.empty()) os << "\n  exponent gate: " << gate_desc;
        os << "\n";
        cert.reason = "variational positivity condition holds on all samples";
    } else {
        os << "Inconclusive -- " << lemma << " not established\n"
           << "  system: " << describe_params(spec) << "\n";
        if (!gate_ok) {
            os << "  exponent gate failed: " << gate_desc << "\n";
            cert.reason = "exponent gate failed";
        } else {
            os << "  minimum sampled value " << fmt_num(min_val) << " at (";
            for (std::size_t i = 0; i < min_at.size(); ++i)
                os << (i ? ", " : "") << fmt_num(min_at[i]);
            os << ") is not strictly positive.\n";
            cert.reason = "sampled positivity failed";
        }
    }
    cert.text = os.str();
    return cert;
}

}  // namespace

Certificate nonexistence_certificate(const SystemSpec& spec, double box_max,
                                     long samples, std::uint64_t seed) {
    const int n = spec.n;
    const double potential_gate = 2.0 * n / (n - 2);

    switch (spec.kind) {
        case SystemKind::LaneEmdenScalar:
            return coefficient_certificate(spec, "scalar merged identity",
                                           {spec.param("p")});
        case SystemKind::SignChanging:
            return coefficient_certificate(spec, "sign-changing merged identity",
                                           {spec.param("p")});
        case SystemKind::SignChangingPq:
            return coefficient_certificate(
                spec, "sign-changing merged identity (two exponents)",
                {spec.param("p"), spec.param("q")});
        case SystemKind::PotentialType1: {
            double p = spec.param("p");
            bool gate = p >= potential_gate - 1e-12;
            char desc[128];
            std::snprintf(desc, sizeof(desc), "p = %g vs 2n/(n-2) = %g", p,
                          potential_gate);
            return potential_certificate(spec,
                                         "variational potential condition (type I)",
                                         gate, desc, box_max, samples, seed);
        }
        case SystemKind::PotentialType2: {
            double p = spec.param("p");
            bool gate = p >= potential_gate - 1e-12;
            char desc[128];
            std::snprintf(desc, sizeof(desc), "p = %g vs 2n/(n-2) = %g", p,
                          potential_gate);
            return potential_certificate(
                spec, "variational potential condition (type II)", gate, desc,
                box_max, samples, seed);
        }
        case SystemKind::Zero:
        case SystemKind::Hls: {
            Certificate cert;
            cert.certified = false;
            cert.reason = "no applicable nonexistence identity for this system";
            cert.text = "Inconclusive -- no applicable nonexistence identity\n"
                        "  system: " +
                        describe_params(spec) + "\n";
            return cert;
        }
        case SystemKind::Custom: {
            if (spec.potential_kind == PotentialKind::None)
                throw UnsupportedSystem(
                    "no nonexistence certificate for unstructured systems");
            const char* lemma =
                spec.potential_kind == PotentialKind::TypeI
                    ? "variational potential condition (type I)"
                    : "variational potential condition (type II)";
            return potential_certificate(spec, lemma, true, "", box_max, samples,
                                         seed);
        }
    }
    throw UnsupportedSystem("unrecognized system kind");
}

}  // namespace radshoot
