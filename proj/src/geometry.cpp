#include "rwhull/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rwhull {

namespace {

constexpr double kOrientationEps = 1e-12;

double l1(Point2 a) { return std::abs(a.x) + std::abs(a.y); }

// Orientation of (o, a, b) with a tolerance proportional to the coordinate
// magnitude and the lengths of the two legs; roughly the rounding error of
// forming the differences and the cross product.
bool strictly_left(Point2 o, Point2 a, Point2 b, double magnitude) {
    const Point2 u = a - o;
    const Point2 v = b - o;
    const double tol = kOrientationEps * magnitude * (l1(u) + l1(v));
    return cross(u, v) > tol;
}

double segment_distance(Point2 p, Point2 a, Point2 b) {
    const Point2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + t * ab);
}

double max_abs_coordinate(std::span<const Point2> pts) {
    double m = 0.0;
    for (const auto& p : pts) m = std::max({m, std::abs(p.x), std::abs(p.y)});
    return m;
}

}  // namespace

ConvexPolygon ConvexPolygon::from_ccw_vertices(std::vector<Point2> vertices) {
    if (vertices.empty()) throw std::invalid_argument("polygon needs at least one vertex");
    for (const auto& v : vertices)
        if (!is_finite(v)) throw std::invalid_argument("polygon vertex is not finite");
    if (vertices.size() == 2 && vertices[0] == vertices[1])
        throw std::invalid_argument("segment polygon has coincident endpoints");
    if (vertices.size() >= 3) {
        const std::size_t n = vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 a = vertices[i];
            const Point2 b = vertices[(i + 1) % n];
            const Point2 c = vertices[(i + 2) % n];
            if (!(cross(b - a, c - b) > 0.0))
                throw std::invalid_argument("vertices are not in strictly convex counterclockwise order");
        }
    }
    return ConvexPolygon(std::move(vertices));
}

ConvexPolygon ConvexPolygon::scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor))
        throw std::invalid_argument("scale factor must be positive and finite");
    std::vector<Point2> v;
    v.reserve(vertices_.size());
    for (const auto& p : vertices_) v.push_back(factor * p);
    return convex_hull(v);
}

ConvexPolygon convex_hull(std::span<const Point2> points) {
    if (points.empty()) throw std::domain_error("convex_hull: empty point set");
    for (const auto& p : points)
        if (!is_finite(p)) throw std::domain_error("convex_hull: non-finite coordinate");

    std::vector<Point2> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() == 1) return ConvexPolygon(std::move(pts));

    const double mag = max_abs_coordinate(pts);
    std::vector<Point2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && !strictly_left(hull[k - 2], hull[k - 1], p, mag)) --k;
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = pts.size() - 1; i-- > 0;) {
        const Point2 p = pts[i];
        while (k >= lower && !strictly_left(hull[k - 2], hull[k - 1], p, mag)) --k;
        hull[k++] = p;
    }
    hull.resize(k - 1);  // last point repeats the first
    return ConvexPolygon(std::move(hull));
}

double perimeter(const ConvexPolygon& poly) {
    const auto v = poly.vertices();
    if (v.size() == 1) return 0.0;
    if (v.size() == 2) return 2.0 * distance(v[0], v[1]);
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) sum += distance(v[i], v[(i + 1) % v.size()]);
    return sum;
}

double diameter(const ConvexPolygon& poly) {
    const auto v = poly.vertices();
    const std::size_t n = v.size();
    if (n == 1) return 0.0;
    if (n == 2) return distance(v[0], v[1]);

    auto next = [n](std::size_t i) { return (i + 1) % n; };
    double best = 0.0;
    std::size_t j = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 edge = v[next(i)] - v[i];
        // advance the antipodal pointer while the triangle area keeps growing
        for (std::size_t guard = 0; guard < n; ++guard) {
            if (cross(edge, v[next(j)] - v[j]) > 0.0) j = next(j);
            else break;
        }
        best = std::max({best, distance(v[i], v[j]), distance(v[next(i)], v[j]),
                         distance(v[i], v[next(j)]), distance(v[next(i)], v[next(j)])});
    }
    return best;
}

double diameter_brute_force(const ConvexPolygon& poly) {
    const auto v = poly.vertices();
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) best = std::max(best, distance(v[i], v[j]));
    return best;
}

double area(const ConvexPolygon& poly) {
    const auto v = poly.vertices();
    if (v.size() < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) twice += cross(v[i], v[(i + 1) % v.size()]);
    return 0.5 * twice;
}

Support support(const ConvexPolygon& poly, double theta) {
    const Point2 e = unit_vector(theta);
    const auto v = poly.vertices();
    Support s{dot(v[0], e), dot(v[0], e)};
    for (const auto& p : v.subspan(1)) {
        const double h = dot(p, e);
        s.max = std::max(s.max, h);
        s.min = std::min(s.min, h);
    }
    return s;
}

double range_fn(const ConvexPolygon& poly, double theta) {
    const Support s = support(poly, theta);
    return s.max - s.min;
}

std::vector<double> range_profile(const ConvexPolygon& poly, const AngleGrid& grid) {
    if (grid.count < 2) throw std::invalid_argument("angle grid needs at least 2 panels");
    std::vector<double> out(grid.count + 1);
    const auto v = poly.vertices();
    const std::size_t n = v.size();
    if (n < 3) {
        for (std::size_t j = 0; j <= grid.count; ++j) out[j] = range_fn(poly, grid.angle(j));
        return out;
    }

    auto next = [n](std::size_t i) { return (i + 1) % n; };
    Point2 e = unit_vector(grid.angle(0));
    std::size_t imax = 0;
    std::size_t imin = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (dot(v[i], e) > dot(v[imax], e)) imax = i;
        if (dot(v[i], e) < dot(v[imin], e)) imin = i;
    }
    for (std::size_t j = 0; j <= grid.count; ++j) {
        e = unit_vector(grid.angle(j));
        // both extremal vertices rotate counterclockwise as theta grows
        for (std::size_t guard = 0; guard < n && dot(v[next(imax)], e) > dot(v[imax], e); ++guard) imax = next(imax);
        for (std::size_t guard = 0; guard < n && dot(v[next(imin)], e) < dot(v[imin], e); ++guard) imin = next(imin);
        out[j] = dot(v[imax], e) - dot(v[imin], e);
    }
    return out;
}

double cauchy_perimeter(const ConvexPolygon& poly, const AngleGrid& grid) {
    const AngleGrid half{grid.count, std::numbers::pi};
    const std::vector<double> f = range_profile(poly, half);
    const std::size_t panels = half.count;
    const double h = half.step();

    const std::size_t simpson_panels = panels % 2 == 0 ? panels : panels - 3;
    double sum = 0.0;
    if (simpson_panels > 0) {
        double acc = f[0] + f[simpson_panels];
        for (std::size_t j = 1; j < simpson_panels; ++j) acc += (j % 2 == 1 ? 4.0 : 2.0) * f[j];
        sum += acc * h / 3.0;
    }
    if (simpson_panels != panels) {
        const std::size_t s = simpson_panels;
        sum += 3.0 * h / 8.0 * (f[s] + 3.0 * f[s + 1] + 3.0 * f[s + 2] + f[s + 3]);
    }
    return sum;
}

double cauchy_diameter(const ConvexPolygon& poly, const AngleGrid& grid) {
    const std::vector<double> f = range_profile(poly, AngleGrid{grid.count, std::numbers::pi});
    return *std::max_element(f.begin(), f.end());
}

double distance_to(const ConvexPolygon& poly, Point2 p) {
    const auto v = poly.vertices();
    const std::size_t n = v.size();
    if (n == 1) return distance(p, v[0]);
    if (n == 2) return segment_distance(p, v[0], v[1]);

    bool inside = true;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = v[i];
        const Point2 b = v[(i + 1) % n];
        if (cross(b - a, p - a) < 0.0) inside = false;
        best = std::min(best, segment_distance(p, a, b));
    }
    return inside ? 0.0 : best;
}

double signed_distance(const ConvexPolygon& poly, Point2 p) {
    const double d = distance_to(poly, p);
    if (d > 0.0 || poly.size() < 3) return d;
    const auto v = poly.vertices();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) best = std::min(best, segment_distance(p, v[i], v[(i + 1) % v.size()]));
    return -best;
}

double hausdorff(const ConvexPolygon& a, const ConvexPolygon& b) {
    double h = 0.0;
    for (const auto& p : a.vertices()) h = std::max(h, distance_to(b, p));
    for (const auto& p : b.vertices()) h = std::max(h, distance_to(a, p));
    return h;
}

}  // namespace rwhull
