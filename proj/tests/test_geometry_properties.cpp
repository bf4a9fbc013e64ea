#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "rwhull/geometry.hpp"
#include "support.hpp"

// Randomized invariants of the geometry kernels. Every trial draws from a
// fixed Philox stream, so failures are reproducible from the trial index.

using namespace rwhull;
using rwhull::testing::rel_close;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Point2> verts(const ConvexPolygon& p) { return {p.vertices().begin(), p.vertices().end()}; }

double bbox_scale(const std::vector<Point2>& pts) {
    double s = 0.0;
    for (const Point2 p : pts) s = std::max({s, std::abs(p.x), std::abs(p.y)});
    return std::max(s, 1.0);
}

}  // namespace

TEST_CASE("hull idempotence") {
    RngStream rng(101, {0, 0});
    for (int trial = 0; trial < 300; ++trial) {
        const auto h = rwhull::testing::random_hull(rng);
        const auto v = verts(h);
        CHECK(verts(convex_hull(v)) == v);
    }
}

TEST_CASE("hull contains every input point") {
    RngStream rng(102, {0, 0});
    for (int trial = 0; trial < 300; ++trial) {
        const double scale = std::pow(10.0, 6.0 * rng.uniform() - 3.0);
        auto pts = rng.uniform() < 0.5 ? rwhull::testing::random_cloud(rng, 100, scale)
                                       : rwhull::testing::random_ring(rng, 100);
        const auto h = convex_hull(pts);
        const double tol = 1e-9 * bbox_scale(pts);
        for (const Point2 p : pts) CHECK(signed_distance(h, p) <= tol);
        // strict left turns on the output
        const auto v = h.vertices();
        if (v.size() >= 3)
            for (std::size_t i = 0; i < v.size(); ++i)
                CHECK(cross(v[(i + 1) % v.size()] - v[i], v[(i + 2) % v.size()] - v[i]) > 0.0);
    }
}

TEST_CASE("adding points never shrinks the hull functionals") {
    RngStream rng(103, {0, 0});
    for (int trial = 0; trial < 200; ++trial) {
        auto pts = rwhull::testing::random_cloud(rng, 5 + trial % 40);
        auto before = convex_hull(pts);
        for (int k = 0; k < 10; ++k) {
            pts.push_back({3.0 * rng.uniform() - 1.5, 3.0 * rng.uniform() - 1.5});
            const auto after = convex_hull(pts);
            CHECK(perimeter(after) >= perimeter(before) * (1.0 - 1e-12));
            CHECK(diameter(after) >= diameter(before) * (1.0 - 1e-12));
            CHECK(area(after) >= area(before) * (1.0 - 1e-12));
            before = after;
        }
    }
}

TEST_CASE("rotating calipers equals brute force on 1000 hulls") {
    RngStream rng(104, {0, 0});
    for (int trial = 0; trial < 1000; ++trial) {
        const auto h = rwhull::testing::random_hull(rng);
        CHECK(rel_close(diameter(h), diameter_brute_force(h), 1e-12));
    }
}

TEST_CASE("degenerate inputs keep diameter and perimeter consistent") {
    RngStream rng(105, {0, 0});
    for (int trial = 0; trial < 100; ++trial) {
        // collinear points along a random direction
        const Point2 dir = unit_vector(2.0 * kPi * rng.uniform());
        std::vector<Point2> pts;
        for (int k = 0; k < 10; ++k) pts.push_back((4.0 * rng.uniform() - 2.0) * dir);
        const auto h = convex_hull(pts);
        CHECK(h.size() <= 2);
        if (h.is_segment()) CHECK(rel_close(perimeter(h), 2.0 * diameter(h), 1e-12));
    }
}

TEST_CASE("Cauchy quadrature converges under refinement") {
    RngStream rng(106, {0, 0});
    // a smooth many-vertex hull
    std::vector<Point2> pts;
    for (int k = 0; k < 4000; ++k) {
        const double t = 2.0 * kPi * k / 4000.0;
        pts.push_back({2.0 * std::cos(t), std::sin(t)});
    }
    const auto h = convex_hull(pts);
    const double exact = perimeter(h);
    // the ellipse's range function is smooth and periodic, so the error falls
    // fast until it reaches the polygon's own discretization level
    std::vector<double> errors;
    for (std::size_t count = 4; count <= 4096; count *= 2)
        errors.push_back(std::abs(cauchy_perimeter(h, AngleGrid{count}) - exact));
    for (std::size_t i = 1; i < errors.size(); ++i)
        if (errors[i - 1] > 1e-5) CHECK(errors[i] < 0.25 * errors[i - 1]);
    CHECK(errors.back() < 1e-6 * exact);

    std::vector<double> dgap;
    for (std::size_t count = 4; count <= 4096; count *= 4) dgap.push_back(diameter(h) - cauchy_diameter(h, AngleGrid{count}));
    for (std::size_t i = 1; i < dgap.size(); ++i) CHECK(dgap[i] <= dgap[i - 1]);
    CHECK(dgap.back() >= -1e-12);

    CHECK_THROWS_AS(cauchy_perimeter(h, AngleGrid{1}), std::invalid_argument);
}

TEST_CASE("hausdorff is a metric on random convex polygons") {
    RngStream rng(107, {0, 0});
    for (int trial = 0; trial < 300; ++trial) {
        const auto a = rwhull::testing::random_hull(rng, 40);
        const auto b = rwhull::testing::random_hull(rng, 40);
        const auto c = rwhull::testing::random_hull(rng, 40);
        CHECK(hausdorff(a, a) == 0.0);
        CHECK(hausdorff(a, b) == hausdorff(b, a));
        CHECK(hausdorff(a, b) >= 0.0);
        CHECK(hausdorff(a, c) <= hausdorff(a, b) + hausdorff(b, c) + 1e-9);
        if (verts(a) != verts(b)) CHECK(hausdorff(a, b) > 0.0);
    }
}

TEST_CASE("rigid motions leave the functionals unchanged") {
    RngStream rng(108, {0, 0});
    for (int trial = 0; trial < 200; ++trial) {
        const auto pa = rwhull::testing::random_cloud(rng, 50);
        const auto pb = rwhull::testing::random_cloud(rng, 50);
        const double phi = 2.0 * kPi * rng.uniform();
        const Point2 shift{10.0 * rng.uniform() - 5.0, 10.0 * rng.uniform() - 5.0};
        auto move = [&](const std::vector<Point2>& pts) {
            std::vector<Point2> out;
            for (const Point2 p : pts) out.push_back(rotate(p, phi) + shift);
            return out;
        };
        const auto a = convex_hull(pa);
        const auto b = convex_hull(pb);
        const auto ma = convex_hull(move(pa));
        const auto mb = convex_hull(move(pb));
        CHECK(ma.size() == a.size());
        CHECK(rel_close(perimeter(ma), perimeter(a), 1e-9));
        CHECK(rel_close(diameter(ma), diameter(a), 1e-9));
        CHECK(rel_close(area(ma), area(a), 1e-9));
        CHECK(rel_close(hausdorff(ma, mb), hausdorff(a, b), 1e-9));

        // pure rotation: M_rot(theta) = M(theta - phi)
        std::vector<Point2> rotated;
        for (const Point2 p : pa) rotated.push_back(rotate(p, phi));
        const auto ra = convex_hull(rotated);
        const double theta = 2.0 * kPi * rng.uniform();
        CHECK(rel_close(support(ra, theta).max, support(a, theta - phi).max, 1e-9));
        CHECK(rel_close(support(ra, theta).min, support(a, theta - phi).min, 1e-9));
    }
}

TEST_CASE("scaling multiplies perimeter and diameter") {
    RngStream rng(109, {0, 0});
    for (int trial = 0; trial < 300; ++trial) {
        const auto h = rwhull::testing::random_hull(rng);
        const double c = 0.01 + 100.0 * rng.uniform();
        const auto s = h.scaled(c);
        CHECK(rel_close(perimeter(s), c * perimeter(h), 1e-12));
        CHECK(rel_close(diameter(s), c * diameter(h), 1e-12));
        CHECK(rel_close(area(s), c * c * area(h), 1e-12));
    }
}
