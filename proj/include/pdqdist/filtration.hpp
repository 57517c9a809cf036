#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "pdqdist/diagram.hpp"
#include "pdqdist/errors.hpp"
#include "pdqdist/rng.hpp"

namespace pdq {

/// Planar point set used as filtration input. Kept deliberately small: the
/// triangle enumeration below is cubic in the number of points.
struct PointCloud {
    std::vector<std::array<double, 2>> points;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

inline constexpr std::size_t kDefaultCloudCap = 256;

/// count points at uniformly spaced angles starting at angle 0, each
/// coordinate perturbed by an independent N(0, noise_sd) offset drawn from
/// Rng(seed).
inline PointCloud sample_circle(std::array<double, 2> center, double radius, std::size_t count,
                                double noise_sd, std::uint64_t seed) {
    if (radius <= 0.0) throw parameter_error("circle radius must be positive");
    if (count == 0) throw parameter_error("sample count must be >= 1");
    if (noise_sd < 0.0) throw parameter_error("noise standard deviation must be >= 0");
    Rng rng(seed);
    PointCloud cloud;
    cloud.points.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
        double x = center[0] + radius * std::cos(angle);
        double y = center[1] + radius * std::sin(angle);
        if (noise_sd > 0.0) {
            x += rng.gaussian(0.0, noise_sd);
            y += rng.gaussian(0.0, noise_sd);
        }
        cloud.points.push_back({x, y});
    }
    return cloud;
}

namespace detail {

struct Simplex {
    double filt;
    int dim;
    std::array<int, 3> v; // ascending vertex ids, unused entries -1
};

inline bool simplex_order(const Simplex& a, const Simplex& b) {
    if (a.filt != b.filt) return a.filt < b.filt;
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.v < b.v;
}

} // namespace detail

/// Persistence of the Vietoris-Rips filtration restricted to scale <= max_scale,
/// over the two-element field, via the standard boundary-matrix column
/// reduction. Supports homology dimensions 0 and 1 only. Features still alive
/// at max_scale and zero-persistence pairs are dropped.
inline std::map<int, PersistenceDiagram> vietoris_rips_persistence(
    const PointCloud& cloud, int max_dim, double max_scale,
    std::size_t cloud_cap = kDefaultCloudCap) {
    if (max_dim < 0 || max_dim > 1) throw parameter_error("max_dim must be 0 or 1");
    if (!(max_scale > 0.0)) throw parameter_error("max_scale must be positive");
    if (cloud.empty()) throw parameter_error("point cloud is empty");
    if (cloud.size() > cloud_cap)
        throw capacity_error("point cloud has " + std::to_string(cloud.size()) +
                             " points, cap is " + std::to_string(cloud_cap));
    for (const auto& p : cloud.points)
        if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
            throw validation_error("non-finite point-cloud coordinate");

    const int n = static_cast<int>(cloud.size());
    std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0);
    auto d = [&](int i, int j) -> double& { return dist[static_cast<std::size_t>(i) * n + j]; };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double dx = cloud.points[i][0] - cloud.points[j][0];
            const double dy = cloud.points[i][1] - cloud.points[j][1];
            d(i, j) = d(j, i) = std::hypot(dx, dy);
        }

    std::vector<detail::Simplex> simplices;
    for (int i = 0; i < n; ++i) simplices.push_back({0.0, 0, {i, -1, -1}});
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (d(i, j) <= max_scale) simplices.push_back({d(i, j), 1, {i, j, -1}});
    if (max_dim >= 1) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                if (d(i, j) > max_scale) continue;
                for (int k = j + 1; k < n; ++k) {
                    const double diam = std::max({d(i, j), d(i, k), d(j, k)});
                    if (diam <= max_scale) simplices.push_back({diam, 2, {i, j, k}});
                }
            }
    }
    std::sort(simplices.begin(), simplices.end(), detail::simplex_order);

    // Face lookup by vertex ids.
    std::unordered_map<std::uint64_t, int> position;
    position.reserve(simplices.size());
    auto key = [n](int a, int b) {
        return static_cast<std::uint64_t>(a + 1) * static_cast<std::uint64_t>(n + 1) +
               static_cast<std::uint64_t>(b + 1);
    };
    for (int idx = 0; idx < static_cast<int>(simplices.size()); ++idx) {
        const auto& s = simplices[idx];
        if (s.dim <= 1) position[key(s.v[0], s.dim == 0 ? -1 : s.v[1])] = idx;
    }

    const int total = static_cast<int>(simplices.size());
    std::vector<std::vector<int>> columns(total);
    for (int idx = 0; idx < total; ++idx) {
        const auto& s = simplices[idx];
        if (s.dim == 1) {
            columns[idx] = {position.at(key(s.v[0], -1)), position.at(key(s.v[1], -1))};
        } else if (s.dim == 2) {
            columns[idx] = {position.at(key(s.v[0], s.v[1])), position.at(key(s.v[0], s.v[2])),
                            position.at(key(s.v[1], s.v[2]))};
        }
        std::sort(columns[idx].begin(), columns[idx].end());
    }

    // Standard reduction: repeatedly add the column owning the same lowest one.
    // low_owner[b] ends up as the column that kills simplex b.
    std::vector<int> low_owner(total, -1);
    std::vector<int> merged;
    for (int idx = 0; idx < total; ++idx) {
        auto& col = columns[idx];
        while (!col.empty()) {
            const int low = col.back();
            const int other = low_owner[low];
            if (other < 0) break;
            // symmetric difference of two sorted columns
            merged.clear();
            std::set_symmetric_difference(col.begin(), col.end(), columns[other].begin(),
                                          columns[other].end(), std::back_inserter(merged));
            col.swap(merged);
        }
        if (!col.empty()) low_owner[col.back()] = idx;
    }

    std::map<int, PersistenceDiagram> result;
    for (int dim = 0; dim <= max_dim; ++dim) result[dim] = {};
    for (int idx = 0; idx < total; ++idx) {
        if (low_owner[idx] < 0) continue; // essential feature, dropped
        const auto& creator = simplices[idx];
        if (creator.dim > max_dim) continue;
        const double birth = creator.filt;
        const double death = simplices[low_owner[idx]].filt;
        if (death > birth) result[creator.dim].points.push_back({birth, death});
    }
    for (auto& [dim, dg] : result)
        dg.label = "H" + std::to_string(dim);
    return result;
}

/// CSV reader for point clouds: "x,y" per line, optional "x,y" header.
inline PointCloud read_cloud_csv(std::istream& in) {
    PointCloud cloud;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        if (lineno == 1 && t == "x,y") continue;
        const auto comma = t.find(',');
        if (comma == std::string::npos) throw parse_error("expected 'x,y'", lineno);
        const double x = detail::parse_double(t.substr(0, comma), lineno);
        const double y = detail::parse_double(t.substr(comma + 1), lineno);
        if (!std::isfinite(x) || !std::isfinite(y))
            throw validation_error("non-finite coordinate (line " + std::to_string(lineno) + ")");
        cloud.points.push_back({x, y});
    }
    return cloud;
}

inline void write_cloud_csv(std::ostream& out, const PointCloud& cloud) {
    out << "x,y\n";
    char buf[64];
    for (const auto& p : cloud.points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p[0], p[1]);
        out << buf;
    }
}

} // namespace pdq
