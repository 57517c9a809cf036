#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace pdq {

/// Seedable random source with a fully pinned algorithm so that outputs are
/// bit-identical across platforms: the 64-bit Mersenne Twister (mt19937_64,
/// whose sequence is fixed by the C++ standard) feeding
///   - uniform doubles via the top 53 bits: (x >> 11) * 2^-53, in [0, 1)
///   - gaussians via the Box-Muller transform (pairs cached)
/// None of the std::*_distribution adaptors are used; their output is
/// implementation-defined and would break cross-platform reproducibility.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Normal with the given mean and standard deviation.
    double gaussian(double mean, double sd) {
        if (!have_spare_) {
            // u1 in (0, 1] keeps the log finite.
            const double u1 = 1.0 - uniform01();
            const double u2 = uniform01();
            const double r = std::sqrt(-2.0 * std::log(u1));
            const double theta = 2.0 * std::numbers::pi * u2;
            spare_ = r * std::sin(theta);
            have_spare_ = true;
            return mean + sd * r * std::cos(theta);
        }
        have_spare_ = false;
        return mean + sd * spare_;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace pdq
