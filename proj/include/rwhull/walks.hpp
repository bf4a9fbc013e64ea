#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "rwhull/geometry.hpp"
#include "rwhull/point.hpp"
#include "rwhull/rng.hpp"

namespace rwhull {

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Cov2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    static constexpr Cov2 isotropic(double s) { return {s, 0.0, s}; }

    constexpr Point2 apply(Point2 e) const { return {xx * e.x + xy * e.y, xy * e.x + yy * e.y}; }
    /// e^T Sigma e
    constexpr double quad(Point2 e) const { return dot(e, apply(e)); }

    friend constexpr bool operator==(const Cov2&, const Cov2&) = default;
};

constexpr Cov2 operator+(Cov2 a, Cov2 b) { return {a.xx + b.xx, a.xy + b.xy, a.yy + b.yy}; }
constexpr Cov2 operator*(double s, Cov2 a) { return {s * a.xx, s * a.xy, s * a.yy}; }

/// Rotates the quadratic form: R Sigma R^T.
Cov2 rotate(const Cov2& c, double phi);

enum class StepFamily { gaussian, discrete };

struct WeightedStep {
    Point2 step;
    double probability = 0.0;
};

/// Law of one iid walk increment.
///
/// Gaussian increments are mean + A (n1, n2) with A A^T = covariance; A is
/// the Cholesky factor, or the symmetric square root when the covariance is
/// singular. Discrete increments are drawn by inverse CDF over the support
/// order; their mean and covariance are derived from the support.
class StepDistribution {
public:
    /// Throws std::invalid_argument unless the covariance is finite and PSD.
    static StepDistribution gaussian(Point2 mean, Cov2 covariance);
    /// Probabilities must be positive and sum to 1 within 1e-12.
    static StepDistribution discrete(std::vector<WeightedStep> support);
    /// Single-atom discrete law.
    static StepDistribution constant(Point2 step);

    StepFamily family() const { return family_; }
    Point2 mean() const { return mean_; }
    const Cov2& covariance() const { return cov_; }
    std::span<const WeightedStep> support() const { return support_; }
    bool is_deterministic() const;

    Point2 sample(RngStream& rng) const;

private:
    StepDistribution() = default;

    StepFamily family_ = StepFamily::gaussian;
    Point2 mean_;
    Cov2 cov_;
    // columns of the square-root factor
    Point2 col0_;
    Point2 col1_;
    std::vector<WeightedStep> support_;
    std::vector<double> cumulative_;
};

/// Z_1..Z_n and S_0 = 0, S_j = S_{j-1} + Z_j.
struct WalkPath {
    std::vector<Point2> increments;
    std::vector<Point2> partial_sums;

    std::size_t steps() const { return increments.size(); }
};

struct SeedLineage {
    std::uint64_t master_seed = 0;
    std::uint32_t replication = 0;
};

/// m independent walks of equal length.
struct Ensemble {
    std::vector<StepDistribution> laws;
    std::vector<WalkPath> walks;
    SeedLineage lineage;

    std::size_t steps() const { return walks.empty() ? 0 : walks.front().steps(); }
};

Point2 sample_step(const StepDistribution& dist, RngStream& rng);

WalkPath generate_walk(const StepDistribution& dist, std::size_t n, RngStream& rng);

/// Prefix sums of the given increments.
WalkPath walk_from_increments(std::vector<Point2> increments);

/// Walk k (0-based) draws from stream (seed, {replication, k}).
Ensemble generate_ensemble(std::span<const StepDistribution> laws, std::size_t n, std::uint64_t seed,
                           std::uint32_t replication);

/// Replaces increment i (1-based) of walk k by replacements[k]:
/// S'_j = S_j for j < i and S'_j = S_j - Z_i + Z~_i for j >= i.
Ensemble resample_with(const Ensemble& ens, std::size_t i, std::span<const Point2> replacements);

/// Draws fresh independent Z~_i for every walk from its own law and resamples.
/// Throws std::domain_error unless 1 <= i <= n.
Ensemble resample_at(const Ensemble& ens, std::size_t i, RngStream& rng);

/// Origin plus S_j^(k) for 1 <= j <= upto over every walk.
std::vector<Point2> ensemble_points(const Ensemble& ens, std::size_t upto);

/// Hull of ensemble_points. Throws std::domain_error when upto > n.
ConvexPolygon hull_of_ensemble(const Ensemble& ens, std::size_t upto);
ConvexPolygon hull_of_ensemble(const Ensemble& ens);

/// CSV with header `step,k,x,y`; k is 1-based, step 0 is the origin.
void write_walks_csv(std::ostream& out, const Ensemble& ens);

}  // namespace rwhull
