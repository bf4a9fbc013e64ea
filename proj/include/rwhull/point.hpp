#pragma once

#include <cmath>

namespace rwhull {

/// Planar vector. Used for positions, walk increments and drift vectors alike.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr bool operator==(const Point2&, const Point2&) = default;
};

constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Point2 operator-(Point2 a) { return {-a.x, -a.y}; }
constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
constexpr Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
constexpr Point2& operator+=(Point2& a, Point2 b) { a.x += b.x; a.y += b.y; return a; }
constexpr Point2& operator-=(Point2& a, Point2 b) { a.x -= b.x; a.y -= b.y; return a; }

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
/// z-component of the 3D cross product; positive when b is counterclockwise of a.
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline bool is_finite(Point2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

/// Unit vector e_theta = (cos theta, sin theta).
inline Point2 unit_vector(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Rotation by +90 degrees.
constexpr Point2 perp(Point2 a) { return {-a.y, a.x}; }

inline Point2 rotate(Point2 a, double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return {c * a.x - s * a.y, s * a.x + c * a.y};
}

}  // namespace rwhull
