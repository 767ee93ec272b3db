#pragma once

#include <cstdint>
#include <vector>

namespace radshoot {

// Van der Corput radical inverse of i in the given base, in [0, 1).
double radical_inverse(int base, std::uint64_t i);

// Deterministic low-discrepancy sequence in (0,1)^dim. The seed offsets the
// start index, so the same seed always reproduces the same point stream and
// different seeds give disjoint-looking streams. Index 0 (the all-zeros
// point) is skipped.
class Halton {
public:
    Halton(int dim, std::uint64_t seed);

    // Next point, components strictly inside (0,1).
    std::vector<double> next();

    // Fill an existing buffer of size dim().
    void next_into(std::vector<double>& out);

    // Random access: the k-th point of this stream (k >= 0). Lets parallel
    // samplers draw point i without sharing mutable state.
    std::vector<double> point(std::uint64_t k) const;
    void point_into(std::uint64_t k, std::vector<double>& out) const;

    int dim() const { return dim_; }

private:
    int dim_;
    std::uint64_t base_index_;
    std::uint64_t cursor_ = 0;
};

}  // namespace radshoot
