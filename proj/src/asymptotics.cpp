#include "rwhull/asymptotics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace rwhull {

namespace {

constexpr double kZeroTol = 1e-9;
constexpr double kWarnTol = 1e-3;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double polar_angle(Point2 v) {
    double a = std::atan2(v.y, v.x);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;
    return a;
}

void require_two_walks(const Ensemble& ens) {
    if (ens.walks.size() != 2) throw std::invalid_argument("approximation sums are defined for two walks");
}

}  // namespace

std::string_view to_string(LongestSide s) {
    switch (s) {
        case LongestSide::walk1: return "mu1";
        case LongestSide::walk2: return "mu2";
        case LongestSide::difference: return "mu1-mu2";
        case LongestSide::tied: return "violated";
    }
    return "violated";
}

DriftGeometry drift_geometry(Point2 mu1, Point2 mu2) {
    if (!is_finite(mu1) || !is_finite(mu2)) throw std::invalid_argument("drift vectors must be finite");
    DriftGeometry g;
    g.mu1 = mu1;
    g.mu2 = mu2;

    const Point2 diff = mu1 - mu2;
    const std::array<double, 3> norms{norm(mu1), norm(mu2), norm(diff)};
    const double scale = *std::max_element(norms.begin(), norms.end());
    auto is_zero = [&](double v) { return v <= kZeroTol * scale; };

    g.theta1_defined = !is_zero(norms[0]);
    g.theta2_defined = !is_zero(norms[1]);
    g.theta1 = g.theta1_defined ? polar_angle(mu1) : 0.0;
    g.theta2 = g.theta2_defined ? polar_angle(mu2) : 0.0;
    if (!g.theta1_defined) g.warnings.push_back("mu1 is zero; theta1 set to 0 by convention");
    if (!g.theta2_defined) g.warnings.push_back("mu2 is zero; theta2 set to 0 by convention");

    g.a1_holds = scale > 0.0 && !is_zero(norms[0]) && !is_zero(norms[1]) && !is_zero(norms[2]);
    if (g.a1_holds) {
        const double smallest = *std::min_element(norms.begin(), norms.end());
        if (smallest <= kWarnTol * scale) g.warnings.push_back("near-degenerate: A1 almost violated");
    }

    g.theta0_defined = scale > 0.0 && !is_zero(norms[2]);
    if (g.theta0_defined) {
        const Point2 u = (1.0 / norms[2]) * diff;
        g.chord_direction = u;
        double t0 = polar_angle(perp(u));
        if (t0 >= std::numbers::pi) t0 -= std::numbers::pi;
        g.theta0 = t0;

        const double along1 = dot(u, g.e1());
        double sign = 1.0;
        if (std::abs(along1) <= 1e-12) {
            sign = dot(u, g.e2()) <= 0.0 ? 1.0 : -1.0;
            g.warnings.push_back("e_theta0_perp is orthogonal to e_theta1; sign fixed by e_theta0_perp . e_theta2 <= 0");
        } else if (along1 < 0.0) {
            sign = -1.0;
        }
        g.e_theta0_perp = sign * u;
    }

    // A2: unique maximum of the three side lengths, counted with multiplicity
    std::array<std::pair<double, LongestSide>, 3> sides{{{norms[0], LongestSide::walk1},
                                                         {norms[1], LongestSide::walk2},
                                                         {norms[2], LongestSide::difference}}};
    std::sort(sides.begin(), sides.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    const double top = sides[0].first;
    const double gap = top - sides[1].first;
    if (top > 0.0 && gap > kZeroTol * top) {
        g.longest = sides[0].second;
        if (gap <= kWarnTol * top) g.warnings.push_back("near-degenerate: A2 almost violated");
    } else {
        g.longest = LongestSide::tied;
    }
    return g;
}

LimitShape limit_shape(std::span<const Point2> drifts) {
    std::vector<Point2> pts{{0.0, 0.0}};
    pts.insert(pts.end(), drifts.begin(), drifts.end());
    ConvexPolygon poly = convex_hull(pts);
    const double per = perimeter(poly);
    const double diam = diameter(poly);
    return {std::move(poly), per, diam};
}

double sigma_L2(const StepDistribution& walk1, const StepDistribution& walk2, const DriftGeometry& g) {
    if (!g.a1_holds) throw AssumptionViolation("sigma_L2: assumption A1 is violated");
    const Point2 u = g.chord_direction;
    const Point2 e1 = g.e1();
    const Point2 e2 = g.e2();
    const Cov2& s1 = walk1.covariance();
    const Cov2& s2 = walk2.covariance();
    return s1.quad(e1) + s1.quad(u) + 2.0 * dot(s1.apply(e1), u)
         + s2.quad(e2) + s2.quad(u) - 2.0 * dot(s2.apply(e2), u);
}

double sigma_D2(const StepDistribution& walk1, const StepDistribution& walk2, const DriftGeometry& g) {
    if (!g.a1_holds) throw AssumptionViolation("sigma_D2: assumption A1 is violated");
    switch (g.longest) {
        case LongestSide::walk1: return walk1.covariance().quad(g.e1());
        case LongestSide::walk2: return walk2.covariance().quad(g.e2());
        case LongestSide::difference: return (walk1.covariance() + walk2.covariance()).quad(g.chord_direction);
        case LongestSide::tied: break;
    }
    throw AssumptionViolation("sigma_D2: assumption A2 is violated");
}

double approx_sum_perimeter(const Ensemble& ens, const DriftGeometry& g) {
    if (!g.a1_holds) throw AssumptionViolation("approx_sum_perimeter: assumption A1 is violated");
    require_two_walks(ens);
    const Point2 a = g.chord_direction + g.e1();
    const Point2 b = g.e2() - g.chord_direction;
    const auto& z1 = ens.walks[0].increments;
    const auto& z2 = ens.walks[1].increments;
    double sum = 0.0;
    for (std::size_t i = 0; i < z1.size(); ++i) sum += dot(z1[i] - g.mu1, a) + dot(z2[i] - g.mu2, b);
    return sum;
}

double approx_sum_diameter(const Ensemble& ens, const DriftGeometry& g) {
    if (!g.a1_holds) throw AssumptionViolation("approx_sum_diameter: assumption A1 is violated");
    require_two_walks(ens);
    const double n = static_cast<double>(ens.steps());
    const Point2 c1 = ens.walks[0].partial_sums.back() - n * g.mu1;
    const Point2 c2 = ens.walks[1].partial_sums.back() - n * g.mu2;
    switch (g.longest) {
        case LongestSide::walk1: return dot(c1, g.e1());
        case LongestSide::walk2: return dot(c2, g.e2());
        case LongestSide::difference: return dot(c1 - c2, g.chord_direction);
        case LongestSide::tied: break;
    }
    throw AssumptionViolation("approx_sum_diameter: assumption A2 is violated");
}

}  // namespace rwhull
