#include "radshoot/sampling.hpp"

#include <stdexcept>

namespace radshoot {

namespace {
constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                           31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
constexpr int kMaxDim = static_cast<int>(sizeof(kPrimes) / sizeof(kPrimes[0]));
}  // namespace

double radical_inverse(int base, std::uint64_t i) {
    double inv_base = 1.0 / base;
    double scale = inv_base;
    double value = 0.0;
    while (i != 0) {
        value += static_cast<double>(i % base) * scale;
        i /= base;
        scale *= inv_base;
    }
    return value;
}

Halton::Halton(int dim, std::uint64_t seed) : dim_(dim), base_index_(1 + seed) {
    if (dim < 1 || dim > kMaxDim)
        throw std::invalid_argument("Halton: dimension out of range");
}

std::vector<double> Halton::point(std::uint64_t k) const {
    std::vector<double> out(static_cast<std::size_t>(dim_));
    point_into(k, out);
    return out;
}

void Halton::point_into(std::uint64_t k, std::vector<double>& out) const {
    out.resize(static_cast<std::size_t>(dim_));
    const std::uint64_t idx = base_index_ + k;
    for (int d = 0; d < dim_; ++d) {
        double x = radical_inverse(kPrimes[d], idx);
        // keep strictly inside (0,1); radical_inverse can return 0 only for
        // idx == 0 which base_index_ >= 1 rules out, but guard anyway
        if (x <= 0.0) x = 0.5 / static_cast<double>(kPrimes[d]);
        out[static_cast<std::size_t>(d)] = x;
    }
}

std::vector<double> Halton::next() { return point(cursor_++); }

void Halton::next_into(std::vector<double>& out) { point_into(cursor_++, out); }

}  // namespace radshoot
