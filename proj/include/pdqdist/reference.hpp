#pragma once

#include <cstdint>

#include "pdqdist/filtration.hpp"

namespace pdq {

/// The repository's fixed reference data: a one-circle cloud against a
/// two-circle cloud, in a clean and a noisy version, with their dimension-1
/// diagrams. All parameters are pinned here so every tool and test sees the
/// same instances. The clean pair gives 1-point vs 2-point diagrams; the
/// noisy pair gives 3-point vs 3-point diagrams (extra short-lived holes from
/// the perturbation). The geometry is deliberately small relative to the
/// penalty constant c = 0.2: it keeps the edge-weight spread of the noisy
/// matching graphs narrow enough that a one-layer schedule can shape the
/// measurement distribution, which is the regime the histogram comparisons
/// need.
struct ReferencePair {
    PointCloud one_circle;
    PointCloud two_circles;
    PersistenceDiagram dg_one; // H1 of one_circle
    PersistenceDiagram dg_two; // H1 of two_circles
    double max_scale = 0.0;
};

namespace refdata {
inline constexpr double kSmallRadius = 0.15;
inline constexpr double kLargeRadius = 0.30;
inline constexpr double kLargeCenterX = 1.2;
inline constexpr std::size_t kCount = 32;
inline constexpr double kNoiseSd = 0.024;
inline constexpr std::uint64_t kSeedOne = 11;
inline constexpr std::uint64_t kSeedTwoSmall = 12;
inline constexpr std::uint64_t kSeedTwoLarge = 13;
inline constexpr std::uint64_t kNoisySeedOne = 26;
inline constexpr std::uint64_t kNoisySeedTwoSmall = 1;
inline constexpr std::uint64_t kNoisySeedTwoLarge = 3;
inline constexpr double kMaxScale = 0.6;
} // namespace refdata

inline ReferencePair reference_pair(bool noisy) {
    using namespace refdata;
    ReferencePair ref;
    ref.max_scale = kMaxScale;
    const double sd = noisy ? kNoiseSd : 0.0;
    ref.one_circle = sample_circle({0.0, 0.0}, kSmallRadius, kCount, sd,
                                   noisy ? kNoisySeedOne : kSeedOne);
    ref.two_circles = sample_circle({0.0, 0.0}, kSmallRadius, kCount, sd,
                                    noisy ? kNoisySeedTwoSmall : kSeedTwoSmall);
    const PointCloud large = sample_circle({kLargeCenterX, 0.0}, kLargeRadius, kCount, sd,
                                           noisy ? kNoisySeedTwoLarge : kSeedTwoLarge);
    ref.two_circles.points.insert(ref.two_circles.points.end(), large.points.begin(),
                                  large.points.end());
    ref.dg_one = vietoris_rips_persistence(ref.one_circle, 1, kMaxScale).at(1);
    ref.dg_one.label = noisy ? "noisy one circle H1" : "one circle H1";
    ref.dg_two = vietoris_rips_persistence(ref.two_circles, 1, kMaxScale).at(1);
    ref.dg_two.label = noisy ? "noisy two circles H1" : "two circles H1";
    return ref;
}

} // namespace pdq
