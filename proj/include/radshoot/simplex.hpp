#pragma once

#include <span>
#include <vector>

#include "radshoot/errors.hpp"

namespace radshoot {

// A point of the closed simplex level set { alpha >= 0, sum alpha_i = a }.
struct SimplexPoint {
    std::vector<double> alpha;
    double a = 0.0;  // the level (mass)

    static SimplexPoint create(std::vector<double> alpha);  // a := sum
    // validates |sum alpha - a| <= 1e-9 * max(1, a)
    static SimplexPoint create(std::vector<double> alpha, double a);

    int dim() const { return static_cast<int>(alpha.size()); }
    bool on_boundary(double tol) const;  // some alpha_i <= tol
    double operator[](int i) const { return alpha[static_cast<std::size_t>(i)]; }
};

// Projection of a boundary point beta (sum beta_i <= a) back onto the level
// set: adds the missing mass equally to every coordinate.
SimplexPoint pi_map(std::span<const double> beta, double a);

// Left inverse on the image: subtracts min_i p_i from every coordinate,
// landing on the orthant boundary.
std::vector<double> pi_inverse(const SimplexPoint& p);

// The standard lattice on the level set: points (a/k) * (m_1..m_L) with
// m_i >= 0 integers summing to k, enumerated lexicographically.
struct SimplexGrid {
    double a = 0.0;
    int L = 0;
    int resolution = 0;  // k
    std::vector<SimplexPoint> points;
    std::vector<bool> boundary;  // some m_i == 0

    static SimplexGrid create(double a, int L, int resolution);
    std::size_t size() const { return points.size(); }
    double cell() const { return a / resolution; }
};

}  // namespace radshoot
