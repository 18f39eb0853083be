#pragma once
// Rectangular sampling windows in the (u, u1) plane. Checks that sweep a
// region use either an inclusive grid or a seeded, portable uniform sample so
// reports are reproducible bit for bit.

#include <array>
#include <random>
#include <vector>

#include "jetflow/errors.hpp"

namespace jetflow {

// 53-bit uniform in [0, 1) built directly from mt19937 words; identical
// output on every platform, unlike std::uniform_real_distribution.
inline double unit_uniform(std::mt19937& g) {
    double hi = static_cast<double>(g() >> 5);   // 27 bits
    double lo = static_cast<double>(g() >> 6);   // 26 bits
    return (hi * 67108864.0 + lo) * (1.0 / 9007199254740992.0);
}

struct Region {
    double u_min = 0.0;
    double u_max = 0.0;
    double u1_min = 0.0;
    double u1_max = 0.0;

    void validate() const {
        if (!(u_min <= u_max) || !(u1_min <= u1_max))
            throw EmptyRegion("bounds out of order");
        if (u1_min <= 0.0 && u1_max >= 0.0)
            throw DomainError("sampling region crosses u1 = 0");
    }

    bool contains(double u, double u1) const {
        return u >= u_min && u <= u_max && u1 >= u1_min && u1 <= u1_max;
    }

    std::vector<std::array<double, 2>> sample(int n, unsigned seed) const {
        validate();
        if (n <= 0) throw EmptyRegion("sample count must be positive");
        std::mt19937 rng(seed);
        std::vector<std::array<double, 2>> pts;
        pts.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            double a = unit_uniform(rng);
            double b = unit_uniform(rng);
            pts.push_back({u_min + a * (u_max - u_min), u1_min + b * (u1_max - u1_min)});
        }
        return pts;
    }

    // Inclusive grid; a single-count axis collapses to its lower bound.
    std::vector<std::array<double, 2>> grid(int nu, int nu1) const {
        validate();
        if (nu <= 0 || nu1 <= 0) throw EmptyRegion("grid counts must be positive");
        std::vector<std::array<double, 2>> pts;
        pts.reserve(static_cast<std::size_t>(nu) * static_cast<std::size_t>(nu1));
        for (int i = 0; i < nu; ++i) {
            double u = nu == 1 ? u_min : u_min + i * (u_max - u_min) / (nu - 1);
            for (int j = 0; j < nu1; ++j) {
                double u1 = nu1 == 1 ? u1_min : u1_min + j * (u1_max - u1_min) / (nu1 - 1);
                pts.push_back({u, u1});
            }
        }
        return pts;
    }
};

} // namespace jetflow
