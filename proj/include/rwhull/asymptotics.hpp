#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rwhull/geometry.hpp"
#include "rwhull/walks.hpp"

namespace rwhull {

/// Raised when a limit constant is requested outside the regime in which it
/// is defined (zero drift, zero drift difference, or a tied longest side).
class AssumptionViolation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Which element of {|mu1|, |mu2|, |mu1 - mu2|} is the unique maximum.
enum class LongestSide { walk1, walk2, difference, tied };

std::string_view to_string(LongestSide s);

/// Angles and unit vectors derived from two drift vectors.
///
/// theta0 is the representative in [0, pi) of the direction along which both
/// drifts have equal projection. e_theta0_perp is the unit normal to that
/// direction with e_theta0_perp . e_theta1 >= 0 (ties broken toward
/// e_theta0_perp . e_theta2 <= 0). chord_direction is (mu1 - mu2)/|mu1 - mu2|;
/// the fluctuation formulas use it, and it equals e_theta0_perp unless the
/// triangle (0, mu1, mu2) is obtuse at mu1.
struct DriftGeometry {
    Point2 mu1;
    Point2 mu2;
    double theta1 = 0.0;  ///< polar angle of mu1 in [0, 2pi); 0 for the zero vector
    double theta2 = 0.0;
    bool theta1_defined = true;
    bool theta2_defined = true;
    double theta0 = 0.0;
    bool theta0_defined = false;
    Point2 e_theta0_perp;
    Point2 chord_direction;
    bool a1_holds = false;
    LongestSide longest = LongestSide::tied;
    std::vector<std::string> warnings;

    Point2 e1() const { return unit_vector(theta1); }
    Point2 e2() const { return unit_vector(theta2); }
    bool a2_holds() const { return longest != LongestSide::tied; }
};

/// Norm comparisons use a 1e-9 relative tolerance; gaps below 1e-3 relative
/// add a near-degenerate warning.
DriftGeometry drift_geometry(Point2 mu1, Point2 mu2);

struct LimitShape {
    ConvexPolygon polygon;
    double per = 0.0;
    double diam = 0.0;
};

/// chull({0} U drifts) with its perimeter and diameter.
LimitShape limit_shape(std::span<const Point2> drifts);

/// lim Var[L_n]/n. Throws AssumptionViolation when A1 fails.
double sigma_L2(const StepDistribution& walk1, const StepDistribution& walk2, const DriftGeometry& g);

/// lim Var[D_n]/n, dispatched on the longest side of the drift triangle.
/// Throws AssumptionViolation when A1 or A2 fails.
double sigma_D2(const StepDistribution& walk1, const StepDistribution& walk2, const DriftGeometry& g);

/// sum_i (Z1_i - mu1).(u + e1) + (Z2_i - mu2).(e2 - u), u = chord_direction.
/// Requires exactly two walks.
double approx_sum_perimeter(const Ensemble& ens, const DriftGeometry& g);

/// Centered projection of the walk (or walk difference) spanning the longest side.
double approx_sum_diameter(const Ensemble& ens, const DriftGeometry& g);

}  // namespace rwhull
