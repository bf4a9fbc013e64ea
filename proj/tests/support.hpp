#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "rwhull/geometry.hpp"
#include "rwhull/rng.hpp"

namespace rwhull::testing {

inline bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Uniform points in [-scale, scale]^2.
inline std::vector<Point2> random_cloud(RngStream& rng, std::size_t count, double scale = 1.0) {
    std::vector<Point2> pts;
    for (std::size_t i = 0; i < count; ++i)
        pts.push_back({scale * (2.0 * rng.uniform() - 1.0), scale * (2.0 * rng.uniform() - 1.0)});
    return pts;
}

/// Points near an ellipse, so most of them end up on the hull.
inline std::vector<Point2> random_ring(RngStream& rng, std::size_t count) {
    const double a = 0.5 + rng.uniform();
    const double b = 0.5 + rng.uniform();
    const Point2 c{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
    std::vector<Point2> pts;
    for (std::size_t i = 0; i < count; ++i) {
        const double t = 2.0 * std::numbers::pi * rng.uniform();
        const double r = 1.0 - 0.01 * rng.uniform();
        pts.push_back(c + Point2{a * r * std::cos(t), b * r * std::sin(t)});
    }
    return pts;
}

/// A random hull with at most `max_vertices` vertices.
inline ConvexPolygon random_hull(RngStream& rng, std::size_t max_vertices = 200) {
    const std::size_t count = 3 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(max_vertices - 2));
    const bool ring = rng.uniform() < 0.5;
    auto pts = ring ? random_ring(rng, count) : random_cloud(rng, count);
    return convex_hull(pts);
}

}  // namespace rwhull::testing
