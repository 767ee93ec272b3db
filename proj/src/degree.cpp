#include "radshoot/degree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace radshoot {

SimplexMap phi_map(const SystemSpec& spec, const ShotConfig& cfg) {
    return [&spec, cfg](const SimplexPoint& p) { return phi(spec, p, cfg); };
}

const char* degree_method_name(DegreeMethod m) {
    switch (m) {
        case DegreeMethod::IntervalSignCount: return "interval_sign_count";
        case DegreeMethod::BoundaryWinding: return "boundary_winding";
        case DegreeMethod::HeuristicPreimage: return "heuristic_preimage";
    }
    return "?";
}

namespace {

int sign_of(double x) { return x >= 0.0 ? 1 : -1; }

double max_norm_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::fabs(a[i] - b[i]));
    return d;
}

// --- two components: signed crossings of the first image coordinate --------

DegreeReport degree_interval(const SimplexMap& map, double a, int k,
                             const SimplexPoint& target, ExecPolicy policy) {
    DegreeReport report;
    report.method = DegreeMethod::IntervalSignCount;
    report.resolution = k;
    report.target = target.alpha;

    const double cell = a / k;
    const int count = k + 1;  // includes both boundary points
    std::vector<std::optional<SimplexPoint>> images(
        static_cast<std::size_t>(count));
    parallel_for(
        static_cast<std::size_t>(count),
        [&](std::size_t j) {
            double t = a * static_cast<double>(j) / k;
            images[j] = map(SimplexPoint::create({t, a - t}, a));
        },
        policy);
    report.map_evals = count;

    // boundary guard: the target must sit well away from both endpoint images
    for (std::size_t j : {std::size_t(0), static_cast<std::size_t>(k)}) {
        if (!images[j])
            throw GridTooCoarse("map is undefined on a boundary point");
        if (max_norm_dist(images[j]->alpha, target.alpha) < 2.0 * cell)
            throw TargetOnBoundaryImage(
                "target is within two cells of a boundary image");
    }

    // each sign change of the first image coordinate against the target is
    // one signed crossing: rising crossings count +1, falling ones -1
    int total = 0;
    bool have_prev = false;
    int prev_sign = 0;
    for (std::size_t j = 0; j < images.size(); ++j) {
        if (!images[j]) {
            ++report.excluded;
            continue;
        }
        int s = sign_of(images[j]->alpha[0] - target.alpha[0]);
        if (have_prev && s != prev_sign) total += (s > 0) ? 1 : -1;
        prev_sign = s;
        have_prev = true;
    }
    report.degree = total;
    report.certified = true;
    return report;
}

// --- three components: winding number of the boundary image -----------------

struct PathEval {
    double s;  // position along the closed boundary path, in [0, 3)
    double wx, wy;
    bool operator<(const PathEval& other) const { return s < other.s; }
};

class WindingAccumulator {
public:
    WindingAccumulator(const SimplexMap& map, double a, double cell,
                       const SimplexPoint& target)
        : map_(map), a_(a), cell_(cell), target_(target) {}

    PathEval eval(double s) {
        SimplexPoint p = path_point(s);
        auto img = map_(p);
        ++evals_;
        if (!img)
            throw GridTooCoarse("map is undefined on the boundary path");
        if (max_norm_dist(img->alpha, target_.alpha) < 2.0 * cell_)
            throw TargetOnBoundaryImage(
                "target is within two cells of a boundary image");
        return {s, img->alpha[0] - target_.alpha[0],
                img->alpha[1] - target_.alpha[1]};
    }

    double segment(const PathEval& p0, const PathEval& p1, int depth) {
        double cross = p0.wx * p1.wy - p0.wy * p1.wx;
        double dot = p0.wx * p1.wx + p0.wy * p1.wy;
        double dth = std::atan2(cross, dot);
        if (std::fabs(dth) <= std::numbers::pi / 2) return dth;
        if (depth >= 40)
            throw GridTooCoarse("boundary image turns too fast to resolve");
        PathEval mid = eval(0.5 * (p0.s + p1.s));
        return segment(p0, mid, depth + 1) + segment(mid, p1, depth + 1);
    }

    long evals() const { return evals_; }

private:
    SimplexPoint path_point(double s) const {
        // vertices of the level set, visited in the orientation that makes
        // the identity map wind once counterclockwise in the chart
        static const double V[3][3] = {
            {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        int e = static_cast<int>(std::floor(s)) % 3;
        double t = s - std::floor(s);
        std::vector<double> alpha(3);
        const double* v0 = V[e];
        const double* v1 = V[(e + 1) % 3];
        for (int i = 0; i < 3; ++i)
            alpha[static_cast<std::size_t>(i)] =
                a_ * ((1.0 - t) * v0[i] + t * v1[i]);
        return SimplexPoint::create(std::move(alpha), a_);
    }

    const SimplexMap& map_;
    double a_, cell_;
    const SimplexPoint& target_;
    long evals_ = 0;
};

DegreeReport degree_winding(const SimplexMap& map, double a, int k,
                            const SimplexPoint& target, ExecPolicy policy) {
    (void)policy;  // refinement is data-dependent; keep this path serial
    DegreeReport report;
    report.method = DegreeMethod::BoundaryWinding;
    report.resolution = k;
    report.target = target.alpha;

    const double cell = a / k;
    WindingAccumulator acc(map, a, cell, target);
    std::vector<PathEval> path;
    path.reserve(static_cast<std::size_t>(3 * k + 1));
    for (int j = 0; j < 3 * k; ++j)
        path.push_back(acc.eval(static_cast<double>(j) / k));
    path.push_back(path.front());
    path.back().s = 3.0;

    double total = 0.0;
    for (std::size_t j = 0; j + 1 < path.size(); ++j)
        total += acc.segment(path[j], path[j + 1], 0);

    report.map_evals = acc.evals();
    double turns = total / (2.0 * std::numbers::pi);
    report.degree = static_cast<int>(std::lround(turns));
    if (std::fabs(turns - report.degree) > 0.05)
        throw GridTooCoarse("winding number did not settle near an integer");
    report.certified = true;
    return report;
}

// --- four or more components: flagged preimage-counting heuristic -----------

int det_sign(std::vector<std::vector<double>> m) {
    const std::size_t d = m.size();
    int sign = 1;
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t piv = col;
        for (std::size_t row = col + 1; row < d; ++row)
            if (std::fabs(m[row][col]) > std::fabs(m[piv][col])) piv = row;
        if (std::fabs(m[piv][col]) < 1e-14) return 0;
        if (piv != col) {
            std::swap(m[piv], m[col]);
            sign = -sign;
        }
        for (std::size_t row = col + 1; row < d; ++row) {
            double f = m[row][col] / m[col][col];
            for (std::size_t c2 = col; c2 < d; ++c2) m[row][c2] -= f * m[col][c2];
        }
        if (m[col][col] < 0) sign = -sign;
    }
    return sign;
}

DegreeReport degree_heuristic(const SimplexMap& map, const SimplexGrid& grid,
                              const SimplexPoint& target, ExecPolicy policy) {
    DegreeReport report;
    report.method = DegreeMethod::HeuristicPreimage;
    report.resolution = grid.resolution;
    report.target = target.alpha;
    report.certified = false;

    const int L = grid.L;
    const double cell = grid.cell();

    std::vector<std::optional<SimplexPoint>> images(grid.size());
    parallel_for(
        grid.size(), [&](std::size_t i) { images[i] = map(grid.points[i]); },
        policy);
    report.map_evals = static_cast<long>(grid.size());

    std::vector<double> res(grid.size(),
                            std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!images[i]) {
            ++report.excluded;
            continue;
        }
        res[i] = max_norm_dist(images[i]->alpha, target.alpha);
        if (grid.boundary[i] && res[i] < 2.0 * cell)
            throw TargetOnBoundaryImage(
                "target is within two cells of a boundary image");
    }

    // index lattice points by their composition vector
    std::map<std::vector<int>, std::size_t> by_comp;
    std::vector<std::vector<int>> comps(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<int> m(static_cast<std::size_t>(L));
        for (int d = 0; d < L; ++d)
            m[static_cast<std::size_t>(d)] = static_cast<int>(
                std::lround(grid.points[i].alpha[static_cast<std::size_t>(d)] / cell));
        by_comp[m] = i;
        comps[i] = std::move(m);
    }

    // local minima of the residual with residual below one cell
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.boundary[i] || !images[i] || res[i] >= cell) continue;
        bool is_min = true;
        for (int s = 0; s < L && is_min; ++s) {
            for (int d = 0; d < L && is_min; ++d) {
                if (s == d) continue;
                std::vector<int> m = comps[i];
                if (m[static_cast<std::size_t>(s)] == 0) continue;
                m[static_cast<std::size_t>(s)] -= 1;
                m[static_cast<std::size_t>(d)] += 1;
                auto it = by_comp.find(m);
                if (it != by_comp.end() && res[it->second] < res[i]) is_min = false;
            }
        }
        if (is_min) candidates.push_back(i);
    }

    // suppress duplicates that describe the same preimage
    std::sort(candidates.begin(), candidates.end(),
              [&](std::size_t x, std::size_t y) { return res[x] < res[y]; });
    std::vector<std::size_t> kept;
    for (std::size_t c : candidates) {
        bool near = false;
        for (std::size_t k2 : kept)
            if (max_norm_dist(grid.points[c].alpha, grid.points[k2].alpha) <
                3.0 * cell) {
                near = true;
                break;
            }
        if (!near) kept.push_back(c);
    }

    // orientation of each preimage from a finite-difference Jacobian in the
    // chart that drops the last coordinate
    const double h = cell / 8.0;
    for (std::size_t c : kept) {
        const SimplexPoint& p = grid.points[c];
        std::vector<std::vector<double>> J(
            static_cast<std::size_t>(L - 1),
            std::vector<double>(static_cast<std::size_t>(L - 1), 0.0));
        bool usable = true;
        for (int q = 0; q < L - 1 && usable; ++q) {
            std::vector<double> ap = p.alpha, am = p.alpha;
            ap[static_cast<std::size_t>(q)] += h;
            ap[static_cast<std::size_t>(L - 1)] -= h;
            am[static_cast<std::size_t>(q)] -= h;
            am[static_cast<std::size_t>(L - 1)] += h;
            if (am[static_cast<std::size_t>(q)] <= 0 ||
                ap[static_cast<std::size_t>(L - 1)] <= 0) {
                usable = false;
                break;
            }
            auto ip = map(SimplexPoint::create(std::move(ap), grid.a));
            auto im = map(SimplexPoint::create(std::move(am), grid.a));
            report.map_evals += 2;
            if (!ip || !im) {
                usable = false;
                break;
            }
            for (int row = 0; row < L - 1; ++row)
                J[static_cast<std::size_t>(row)][static_cast<std::size_t>(q)] =
                    (ip->alpha[static_cast<std::size_t>(row)] -
                     im->alpha[static_cast<std::size_t>(row)]) /
                    (2.0 * h);
        }
        if (usable) report.degree += det_sign(std::move(J));
    }
    return report;
}

}  // namespace

DegreeReport degree(const SimplexMap& map, const SimplexGrid& grid,
                    const SimplexPoint& target, ExecPolicy policy) {
    if (target.dim() != grid.L)
        throw InvalidInput("target dimension does not match the grid");
    if (std::fabs(target.a - grid.a) > 1e-9 * std::max(1.0, grid.a))
        throw InvalidInput("target level does not match the grid");
    for (double v : target.alpha)
        if (v <= 0.0)
            throw InvalidInput("degree target must be interior to the level set");

    // the boundary-distance precondition tightens as the grid refines, so a
    // failing check is retried on a finer grid before giving up
    const int attempts = 3;
    for (int attempt = 0;; ++attempt) {
        int k = grid.resolution << attempt;
        try {
            if (grid.L == 2) return degree_interval(map, grid.a, k, target, policy);
            if (grid.L == 3) return degree_winding(map, grid.a, k, target, policy);
            SimplexGrid g =
                attempt == 0 ? grid : SimplexGrid::create(grid.a, grid.L, k);
            return degree_heuristic(map, g, target, policy);
        } catch (const TargetOnBoundaryImage&) {
            if (attempt + 1 >= attempts) throw;
        }
    }
}

// --- searches --------------------------------------------------------------------

namespace {

// shared shot counter wrapper
struct ShotCounter {
    const SystemSpec& spec;
    const ShotConfig& cfg;
    int shots = 0;

    TargetResult operator()(const SimplexPoint& p) {
        ++shots;
        return psi(spec, p, cfg);
    }
};

double sum_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

SolutionCandidate find_zero_bisect(const SystemSpec& spec, double a,
                                   const ShotConfig& cfg, int budget) {
    ShotCounter shoot{spec, cfg};
    auto at = [&](double t) {
        return shoot(SimplexPoint::create({t, a - t}, a));
    };
    auto no_hit_candidate = [&](double t) {
        SolutionCandidate c;
        c.alpha0 = SimplexPoint::create({t, a - t}, a);
        c.achieved_r = cfg.r_max;
        c.score = 0.0;
        c.no_hit = true;
        c.shots = shoot.shots;
        c.bracket_lo = t;
        c.bracket_hi = t;
        return c;
    };

    // coarse scan for a switch of the first-hit index
    const int m = std::max(4, std::min(32, budget / 4));
    std::vector<double> ts(static_cast<std::size_t>(m));
    std::vector<int> hits(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        double t = a * (j + 1) / (m + 1);
        ts[static_cast<std::size_t>(j)] = t;
        TargetResult res = at(t);
        if (res.no_hit()) return no_hit_candidate(t);
        hits[static_cast<std::size_t>(j)] = res.hit_set.front();
    }
    int lo_j = -1;
    for (int j = 0; j + 1 < m; ++j)
        if (hits[static_cast<std::size_t>(j)] !=
            hits[static_cast<std::size_t>(j + 1)]) {
            lo_j = j;
            break;
        }
    if (lo_j < 0)
        throw NoSwitchFound(
            "first-hit index is constant across the level set scan");

    double t_lo = ts[static_cast<std::size_t>(lo_j)];
    double t_hi = ts[static_cast<std::size_t>(lo_j + 1)];
    const int h_lo = hits[static_cast<std::size_t>(lo_j)];

    SolutionCandidate cand;
    bool saw_no_hit = false;
    double t_nh = 0.0;
    int iter = 0;
    while (t_hi - t_lo > 1e-10 * a && shoot.shots < budget) {
        double t_mid = 0.5 * (t_lo + t_hi);
        TargetResult res = at(t_mid);
        if (res.no_hit()) {
            // The shot survived to r_max, so the midpoint sits inside the
            // narrow basin around the separating point.  Recenter the bracket
            // on it and keep halving; any later midpoint that does hit the
            // wall still classifies cleanly against h_lo.
            saw_no_hit = true;
            t_nh = t_mid;
            cand.trace.push_back({iter, t_lo, t_hi, t_mid,
                                  std::numeric_limits<double>::infinity(), -1});
            double w4 = 0.25 * (t_hi - t_lo);
            t_lo = t_mid - w4;
            t_hi = t_mid + w4;
        } else {
            int h = res.hit_set.front();
            cand.trace.push_back({iter, t_lo, t_hi, t_mid, res.r_alpha, h});
            if (h == h_lo)
                t_lo = t_mid;
            else
                t_hi = t_mid;
        }
        ++iter;
    }

    if (saw_no_hit) {
        cand.alpha0 = SimplexPoint::create({t_nh, a - t_nh}, a);
        cand.no_hit = true;
        cand.achieved_r = cfg.r_max;
        cand.score = 0.0;
    } else {
        double t_best = 0.5 * (t_lo + t_hi);
        TargetResult res = at(t_best);
        cand.alpha0 = SimplexPoint::create({t_best, a - t_best}, a);
        if (res.no_hit()) {
            cand.no_hit = true;
            cand.achieved_r = cfg.r_max;
            cand.score = 0.0;
        } else {
            cand.achieved_r = res.r_alpha;
            cand.score = sum_of(*res.value);
        }
    }
    cand.bracket_lo = t_lo;
    cand.bracket_hi = t_hi;
    cand.shots = shoot.shots;
    return cand;
}

SolutionCandidate find_zero_multistart(const SystemSpec& spec, double a,
                                       const ShotConfig& cfg, int budget) {
    const int L = spec.L;
    ShotCounter shoot{spec, cfg};

    // coarse interior lattice sized to roughly a third of the budget
    int k = L + 1;
    auto interior_count = [&](int kk) {
        // compositions of kk into L positive parts
        long c = 1;
        for (int i = 1; i < L; ++i) c = c * (kk - i) / i;
        return c;
    };
    while (k < 40 && interior_count(k + 1) <= budget / 3) ++k;
    SimplexGrid grid = SimplexGrid::create(a, L, k);

    struct Scored {
        SimplexPoint p;
        double score;
        double r;
    };
    std::vector<Scored> scored;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.boundary[i]) continue;
        if (shoot.shots >= budget / 2) break;
        TargetResult res = shoot(grid.points[i]);
        if (res.no_hit()) {
            SolutionCandidate c;
            c.alpha0 = grid.points[i];
            c.achieved_r = cfg.r_max;
            c.no_hit = true;
            c.shots = shoot.shots;
            return c;
        }
        scored.push_back({grid.points[i], sum_of(*res.value), res.r_alpha});
    }
    if (scored.empty()) throw InvalidInput("search budget too small for the grid");
    std::sort(scored.begin(), scored.end(),
              [](const Scored& x, const Scored& y) { return x.score < y.score; });

    SolutionCandidate best;
    best.score = std::numeric_limits<double>::infinity();
    const int starts = std::min<std::size_t>(3, scored.size());
    for (int s = 0; s < starts; ++s) {
        SimplexPoint cur = scored[static_cast<std::size_t>(s)].p;
        double cur_score = scored[static_cast<std::size_t>(s)].score;
        double cur_r = scored[static_cast<std::size_t>(s)].r;
        double step = 0.5 * grid.cell();
        const int limit = budget * (s + 2) / (starts + 2);
        while (step > 1e-11 * a && shoot.shots < limit) {
            bool improved = false;
            for (int i = 0; i < L && !improved; ++i) {
                for (int j = 0; j < L && !improved; ++j) {
                    if (i == j) continue;
                    std::vector<double> alpha = cur.alpha;
                    alpha[static_cast<std::size_t>(i)] += step;
                    alpha[static_cast<std::size_t>(j)] -= step;
                    if (alpha[static_cast<std::size_t>(j)] <= 0) continue;
                    SimplexPoint cand = SimplexPoint::create(std::move(alpha), a);
                    TargetResult res = shoot(cand);
                    if (res.no_hit()) {
                        SolutionCandidate c;
                        c.alpha0 = cand;
                        c.achieved_r = cfg.r_max;
                        c.no_hit = true;
                        c.shots = shoot.shots;
                        return c;
                    }
                    double sc = sum_of(*res.value);
                    if (sc < cur_score) {
                        cur = cand;
                        cur_score = sc;
                        cur_r = res.r_alpha;
                        improved = true;
                    }
                    if (shoot.shots >= limit) break;
                }
            }
            if (!improved) step *= 0.5;
        }
        if (cur_score < best.score) {
            best.alpha0 = cur;
            best.score = cur_score;
            best.achieved_r = cur_r;
        }
    }
    best.shots = shoot.shots;
    return best;
}

}  // namespace

SolutionCandidate find_zero(const SystemSpec& spec, double a,
                            const ShotConfig& cfg, int budget) {
    if (a <= 0) throw InvalidInput("level must be positive");
    if (budget < 8) throw InvalidInput("search budget too small");
    if (spec.L == 1) {
        // one component: any interior start either hits or it does not
        ShotCounter shoot{spec, cfg};
        TargetResult res = shoot(SimplexPoint::create({a}, a));
        SolutionCandidate c;
        c.alpha0 = SimplexPoint::create({a}, a);
        c.shots = shoot.shots;
        if (res.no_hit()) {
            c.no_hit = true;
            c.achieved_r = cfg.r_max;
        } else {
            c.achieved_r = res.r_alpha;
            c.score = sum_of(*res.value);
        }
        return c;
    }
    if (spec.L == 2) return find_zero_bisect(spec, a, cfg, budget);
    return find_zero_multistart(spec, a, cfg, budget);
}

OntoResult onto_witness(const SystemSpec& spec, double a,
                        std::span<const double> target, const ShotConfig& cfg,
                        int budget) {
    const int L = spec.L;
    if (static_cast<int>(target.size()) != L)
        throw InvalidInput("target dimension does not match the system");
    double tsum = 0.0;
    double tmin = std::numeric_limits<double>::infinity();
    for (double v : target) {
        if (v < 0) throw InvalidInput("wall target has a negative coordinate");
        tsum += v;
        tmin = std::min(tmin, v);
    }
    if (tsum > a * (1 + 1e-9) + 1e-9)
        throw InvalidInput("wall target carries more mass than the level set");

    const double tol = 1e-4 * a;
    OntoResult out;

    // a target already on the level-set boundary is its own witness
    if (std::fabs(tsum - a) <= 1e-9 * std::max(1.0, a) && tmin <= cfg.wall_tol) {
        out.found = true;
        out.alpha = SimplexPoint::create({target.begin(), target.end()}, a);
        out.image = out.alpha.alpha;
        out.residual = 0.0;
        return out;
    }

    ShotCounter shoot{spec, cfg};
    std::vector<double> tvec(target.begin(), target.end());
    auto res_of = [&](const SimplexPoint& p) -> std::pair<double, std::vector<double>> {
        TargetResult t = shoot(p);
        if (t.no_hit()) return {std::numeric_limits<double>::infinity(), {}};
        return {max_norm_dist(*t.value, tvec), *t.value};
    };

    double best_res = std::numeric_limits<double>::infinity();
    SimplexPoint best_p;
    std::vector<double> best_img;

    if (L == 2) {
        const int m = std::max(8, std::min(48, budget / 3));
        double t_best = 0.0;
        for (int j = 0; j < m && shoot.shots < budget; ++j) {
            double t = a * (j + 1) / (m + 1);
            SimplexPoint p = SimplexPoint::create({t, a - t}, a);
            auto [r, img] = res_of(p);
            if (r < best_res) {
                best_res = r;
                best_p = p;
                best_img = img;
                t_best = t;
            }
        }
        double span = a / (m + 1);
        double lo = std::max(1e-9 * a, t_best - span);
        double hi = std::min(a - 1e-9 * a, t_best + span);
        while (best_res > tol && shoot.shots + 7 <= budget &&
               hi - lo > 1e-15 * a) {
            double width = hi - lo;
            double t_round = t_best;
            for (int j = 1; j <= 7; ++j) {
                double t = lo + width * j / 8.0;
                SimplexPoint p = SimplexPoint::create({t, a - t}, a);
                auto [r, img] = res_of(p);
                if (r < best_res) {
                    best_res = r;
                    best_p = p;
                    best_img = img;
                    t_round = t;
                }
            }
            lo = std::max(1e-9 * a, t_round - width / 8.0);
            hi = std::min(a - 1e-9 * a, t_round + width / 8.0);
            t_best = t_round;
        }
    } else {
        // coarse lattice then pattern search on the witness residual
        int k = L + 1;
        SimplexGrid grid = SimplexGrid::create(a, L, std::max(k, 6));
        for (std::size_t i = 0; i < grid.size() && shoot.shots < budget / 2; ++i) {
            if (grid.boundary[i]) continue;
            auto [r, img] = res_of(grid.points[i]);
            if (r < best_res) {
                best_res = r;
                best_p = grid.points[i];
                best_img = img;
            }
        }
        double step = 0.5 * grid.cell();
        while (best_res > tol && step > 1e-12 * a && shoot.shots < budget) {
            bool improved = false;
            for (int i = 0; i < L && !improved; ++i) {
                for (int j = 0; j < L && !improved; ++j) {
                    if (i == j) continue;
                    std::vector<double> alpha = best_p.alpha;
                    alpha[static_cast<std::size_t>(i)] += step;
                    alpha[static_cast<std::size_t>(j)] -= step;
                    if (alpha[static_cast<std::size_t>(j)] <= 0) continue;
                    SimplexPoint cand = SimplexPoint::create(std::move(alpha), a);
                    auto [r, img] = res_of(cand);
                    if (r < best_res) {
                        best_res = r;
                        best_p = cand;
                        best_img = img;
                        improved = true;
                    }
                    if (shoot.shots >= budget) break;
                }
            }
            if (!improved) step *= 0.5;
        }
    }

    out.found = best_res <= tol;
    out.alpha = best_p;
    out.image = best_img;
    out.residual = best_res;
    out.shots = shoot.shots;
    return out;
}

}  // namespace radshoot
