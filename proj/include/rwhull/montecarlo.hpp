#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "rwhull/parallel.hpp"
#include "rwhull/walks.hpp"

namespace rwhull {

struct ExperimentConfig {
    std::vector<StepDistribution> walks;
    std::size_t steps = 0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> n_grid;  ///< increasing step counts for convergence curves

    /// Throws std::invalid_argument on an empty walk list, zero steps or reps,
    /// or a non-increasing n_grid.
    void validate() const;
    std::vector<Point2> drifts() const;
};

struct SampleRecord {
    std::uint32_t rep = 0;
    double L = 0.0;
    double D = 0.0;
};

struct Summary {
    double mean = 0.0;
    double variance = 0.0;  ///< unbiased; 0 for a single sample
    double min = 0.0;
    double max = 0.0;
};

Summary summarize(std::span<const double> values);

struct SampleSet {
    ExperimentConfig config;
    std::vector<SampleRecord> records;
    Summary L;
    Summary D;

    std::vector<double> perimeters() const;
    std::vector<double> diameters() const;
};

enum class Functional { perimeter, diameter };

std::string_view to_string(Functional f);

/// Replications run in an OpenMP loop; replication r uses streams
/// (seed, {r, k}) so the output is bitwise identical for any worker count.
SampleSet run_experiment(const ExperimentConfig& cfg, Parallelism par = {});

/// Plain loop over replications, kept as the reference for run_experiment.
SampleSet run_experiment_serial(const ExperimentConfig& cfg);

struct SllnPoint {
    std::size_t n = 0;
    double median_hausdorff = 0.0;        ///< rho_H(hull / n, limit shape)
    double median_perimeter_error = 0.0;  ///< |L_n / n - Per(limit)|
    double median_diameter_error = 0.0;   ///< |D_n / n - diam(limit)|
};

struct SllnCurve {
    std::vector<SllnPoint> points;
    /// L and D never decreased along the n_grid on any trajectory.
    bool monotone = true;
};

/// Uses cfg.n_grid; every replication is one trajectory observed at each n.
SllnCurve slln_curve(const ExperimentConfig& cfg, Parallelism par = {});

struct VarianceRatio {
    double varL_over_n = 0.0;
    double varD_over_n = 0.0;
};

/// Throws std::invalid_argument for fewer than two replications.
VarianceRatio variance_ratio(const SampleSet& samples);

/// (x - sample mean) / sqrt(sigma2 * n). The sample mean stands in for E[X_n].
/// Throws std::domain_error unless sigma2 > 0.
std::vector<double> standardize(const SampleSet& samples, Functional f, double sigma2);

struct L2Point {
    std::size_t n = 0;
    double second_moment = 0.0;
};

/// Mean over replications of ((X_n - mean X_n) - (sum - mean sum))^2 / n at
/// each n of cfg.n_grid. Needs two walks; throws AssumptionViolation when the
/// drifts leave the Gaussian regime of the functional.
std::vector<L2Point> l2_error_curve(const ExperimentConfig& cfg, Functional f, Parallelism par = {});

struct ResamplingBoundCheck {
    double sup_range_change = 0.0;  ///< max over the grid of |R_n - R_n^(i)|
    double bound = 0.0;             ///< 2 sum_k (|Z_i^k| + |Z~_i^k|)
    double perimeter_change = 0.0;  ///< |L_n - L_n^(i)|
    bool sup_holds = false;
    bool integrated_holds = false;  ///< perimeter_change <= pi * bound

    bool passed() const { return sup_holds && integrated_holds; }
};

ResamplingBoundCheck resampling_bound_check(const Ensemble& ens, std::size_t i, const Ensemble& resampled,
                                         std::size_t angles = 4096);

/// Header `rep,n,L,D`.
void write_samples_csv(std::ostream& out, const SampleSet& samples);
std::vector<SampleRecord> read_samples_csv(std::istream& in);

/// Summary plus config echo; no timestamps, so equal inputs give equal text.
std::string summary_json(const SampleSet& samples);

}  // namespace rwhull
