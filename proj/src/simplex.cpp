#include "radshoot/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace radshoot {

namespace {
// round-off slack when accepting "nonnegative" coordinates
constexpr double kTinyNegative = 1e-12;
}  // namespace

SimplexPoint SimplexPoint::create(std::vector<double> alpha) {
    double sum = 0.0;
    for (double v : alpha) {
        if (v < -kTinyNegative) throw InvalidInput("simplex point has a negative coordinate");
        sum += v;
    }
    SimplexPoint p;
    p.alpha = std::move(alpha);
    for (double& v : p.alpha) v = std::max(v, 0.0);
    p.a = sum;
    return p;
}

SimplexPoint SimplexPoint::create(std::vector<double> alpha, double a) {
    SimplexPoint p = create(std::move(alpha));
    if (std::fabs(p.a - a) > 1e-9 * std::max(1.0, a))
        throw InvalidInput("coordinates do not sum to the declared level");
    p.a = a;
    return p;
}

bool SimplexPoint::on_boundary(double tol) const {
    for (double v : alpha)
        if (v <= tol) return true;
    return false;
}

SimplexPoint pi_map(std::span<const double> beta, double a) {
    if (beta.empty()) throw InvalidInput("empty point");
    double sum = 0.0;
    for (double v : beta) {
        if (v < -kTinyNegative) throw InvalidInput("negative coordinate");
        sum += v;
    }
    if (sum > a * (1.0 + 1e-9) + 1e-9)
        throw InvalidInput("point mass exceeds the target level");
    const double shift = (a - sum) / static_cast<double>(beta.size());
    SimplexPoint p;
    p.alpha.resize(beta.size());
    for (std::size_t i = 0; i < beta.size(); ++i)
        p.alpha[i] = std::max(0.0, beta[i]) + shift;
    p.a = a;
    return p;
}

std::vector<double> pi_inverse(const SimplexPoint& p) {
    double mn = *std::min_element(p.alpha.begin(), p.alpha.end());
    std::vector<double> out(p.alpha.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = p.alpha[i] - mn;
    return out;
}

namespace {

void enumerate_rec(int remaining, int slot, std::vector<int>& m,
                   SimplexGrid& grid) {
    const int L = static_cast<int>(m.size());
    if (slot == L - 1) {
        m[static_cast<std::size_t>(slot)] = remaining;
        SimplexPoint p;
        p.a = grid.a;
        p.alpha.resize(m.size());
        bool on_bd = false;
        for (int i = 0; i < L; ++i) {
            p.alpha[static_cast<std::size_t>(i)] =
                grid.a * static_cast<double>(m[static_cast<std::size_t>(i)]) /
                grid.resolution;
            if (m[static_cast<std::size_t>(i)] == 0) on_bd = true;
        }
        grid.points.push_back(std::move(p));
        grid.boundary.push_back(on_bd);
        return;
    }
    for (int v = 0; v <= remaining; ++v) {
        m[static_cast<std::size_t>(slot)] = v;
        enumerate_rec(remaining - v, slot + 1, m, grid);
    }
}

}  // namespace

SimplexGrid SimplexGrid::create(double a, int L, int resolution) {
    if (a <= 0) throw InvalidInput("level must be positive");
    if (L < 1) throw InvalidInput("need at least one component");
    if (resolution < 1) throw InvalidInput("grid resolution must be >= 1");
    SimplexGrid grid;
    grid.a = a;
    grid.L = L;
    grid.resolution = resolution;
    std::vector<int> m(static_cast<std::size_t>(L), 0);
    enumerate_rec(resolution, 0, m, grid);
    return grid;
}

}  // namespace radshoot
