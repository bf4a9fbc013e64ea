#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "rwhull/point.hpp"

namespace rwhull {

/// Convex hull of a finite planar point set, stored as counterclockwise
/// vertices. Degenerate hulls are a single point or a segment (two distinct
/// vertices). With three or more vertices every consecutive triple turns
/// strictly left, so collinear boundary points never appear.
class ConvexPolygon {
public:
    /// Validates the invariants above and throws std::invalid_argument otherwise.
    static ConvexPolygon from_ccw_vertices(std::vector<Point2> vertices);

    std::span<const Point2> vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    bool is_point() const { return vertices_.size() == 1; }
    bool is_segment() const { return vertices_.size() == 2; }

    /// Homothety about the origin; factor must be positive.
    ConvexPolygon scaled(double factor) const;

    friend ConvexPolygon convex_hull(std::span<const Point2> points);

private:
    explicit ConvexPolygon(std::vector<Point2> v) : vertices_(std::move(v)) {}
    std::vector<Point2> vertices_;
};

/// Uniform angle grid theta_j = j * span / count, j = 0..count.
struct AngleGrid {
    std::size_t count = 2;
    double span = std::numbers::pi;

    double angle(std::size_t j) const { return span * static_cast<double>(j) / static_cast<double>(count); }
    double step() const { return span / static_cast<double>(count); }
};

struct Support {
    double max = 0.0;  ///< M(theta)
    double min = 0.0;  ///< m(theta)
};

/// Monotone chain. Throws std::domain_error on empty or non-finite input.
ConvexPolygon convex_hull(std::span<const Point2> points);

/// Edge-length sum; a segment counts twice its length and a point is 0,
/// which keeps the value equal to the Cauchy integral of the range function.
double perimeter(const ConvexPolygon& poly);

/// Rotating calipers over antipodal vertex pairs, linear in the vertex count.
double diameter(const ConvexPolygon& poly);

/// O(V^2) pairwise maximum. Kept as a reference for `diameter`.
double diameter_brute_force(const ConvexPolygon& poly);

double area(const ConvexPolygon& poly);

Support support(const ConvexPolygon& poly, double theta);

/// R(theta) = M(theta) - m(theta).
double range_fn(const ConvexPolygon& poly, double theta);

/// R evaluated at every node of the grid. Uses a two-pointer sweep over the
/// vertices, so the cost is O(V + count) instead of O(V * count).
std::vector<double> range_profile(const ConvexPolygon& poly, const AngleGrid& grid);

/// Composite Simpson approximation of the integral of R over [0, pi].
/// Odd panel counts close with a Simpson 3/8 rule on the last three panels.
double cauchy_perimeter(const ConvexPolygon& poly, const AngleGrid& grid);

/// Maximum of R over the grid; a lower bound on `diameter`.
double cauchy_diameter(const ConvexPolygon& poly, const AngleGrid& grid);

/// Euclidean distance from p to the polygon (0 inside or on the boundary).
double distance_to(const ConvexPolygon& poly, Point2 p);

/// Negative inside, positive outside. Magnitude is the distance to the boundary.
double signed_distance(const ConvexPolygon& poly, Point2 p);

/// Exact Hausdorff distance between two convex polygons. Each directed
/// supremum of a convex distance function is attained at a vertex.
double hausdorff(const ConvexPolygon& a, const ConvexPolygon& b);

}  // namespace rwhull
