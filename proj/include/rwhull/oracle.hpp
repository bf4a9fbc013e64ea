#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwhull/parallel.hpp"
#include "rwhull/walks.hpp"

namespace rwhull {

/// Finitely supported walks with a small horizon, so every quantity below is
/// an exact weighted sum over all step sequences.
struct DiscreteEnsembleSpec {
    std::vector<StepDistribution> walks;  ///< discrete family only
    std::size_t n = 0;
};

class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(const std::string& what, double requested, double limit)
        : std::runtime_error(what), requested_(requested), limit_(limit) {}
    double requested() const { return requested_; }
    double limit() const { return limit_; }

private:
    double requested_;
    double limit_;
};

inline constexpr double kOutcomeBudget = 1e6;
inline constexpr double kNestedBudget = 1e8;

struct ExactMoments {
    double mean_L = 0.0;
    double var_L = 0.0;
    double mean_D = 0.0;
    double var_D = 0.0;
    std::uint64_t outcomes = 0;
};

/// Outcome count prod_k |support_k|^n; throws std::invalid_argument for
/// non-discrete walks and BudgetExceeded above kOutcomeBudget.
std::uint64_t outcome_count(const DiscreteEnsembleSpec& spec);

/// Builds the ensemble of one outcome. Outcomes are ordered step-major:
/// step 1 is the most significant digit, and within a step the walk-1 support
/// index is the most significant.
Ensemble outcome_ensemble(const DiscreteEnsembleSpec& spec, std::uint64_t outcome);
double outcome_probability(const DiscreteEnsembleSpec& spec, std::uint64_t outcome);

ExactMoments enumerate_exact(const DiscreteEnsembleSpec& spec, Parallelism par = {});
/// Single-threaded reference for enumerate_exact.
ExactMoments enumerate_exact_serial(const DiscreteEnsembleSpec& spec);

/// Martingale-difference checks for one functional (perimeter or diameter).
struct MdsFunctionalReport {
    double mean = 0.0;
    double variance = 0.0;
    double sum_expected_squares = 0.0;     ///< sum_i E[X_{n,i}^2]
    double max_pointwise_error = 0.0;      ///< max_w |X - E X - sum_i X_{n,i}|
    double variance_relative_error = 0.0;
    double max_abs_mean = 0.0;             ///< max_i |E[X_{n,i}]|
    double max_abs_cross = 0.0;            ///< max_{i<j} |E[X_{n,i} X_{n,j}]|
    double max_resampling_cdf_gap = 0.0;   ///< max_i sup_x |F_resampled - F|
    bool passed = false;
};

struct MdsReport {
    std::uint64_t outcomes = 0;
    std::uint64_t nested_evaluations = 0;
    double tolerance = 1e-10;
    bool resampling_checked = false;
    MdsFunctionalReport perimeter;
    MdsFunctionalReport diameter;
    bool passed = false;
};

/// Computes X_{n,i} = E[X_n - X_n^{(i)} | F_i] for every outcome and step by
/// enumerating the resampled increment and the future, then checks the
/// telescoping identity pointwise, the variance identity, zero means and
/// orthogonality, and that resampling leaves the law of X_n unchanged.
MdsReport mds_check(const DiscreteEnsembleSpec& spec, Parallelism par = {});

}  // namespace rwhull
