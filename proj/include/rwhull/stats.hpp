#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rwhull/parallel.hpp"
#include "rwhull/point.hpp"

namespace rwhull {

/// A normality test was handed a sample with zero spread.
class DegenerateSample : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline constexpr double kPValueFloor = 1e-300;

double normal_cdf(double z);
/// log Phi(z), accurate far into the lower tail.
double log_normal_cdf(double z);

struct AndersonDarling {
    double a2 = 0.0;       ///< A^2 with estimated mean and variance
    double a2_star = 0.0;  ///< A^2 (1 + 0.75/n + 2.25/n^2)
    double p = 1.0;
};

/// Composite normality test. The p-value uses the piecewise exponential fit of
/// D'Agostino and Stephens (1986, table 4.9) and is clamped to [1e-300, 1].
/// Throws std::invalid_argument below 8 observations and DegenerateSample for
/// a constant sample.
AndersonDarling anderson_darling(std::span<const double> sample);

struct Lilliefors {
    double d = 0.0;  ///< Kolmogorov-Smirnov distance to the fitted normal
    double p = 1.0;
};

/// KS test against the fitted normal with the Dallal-Wilkinson p-value
/// approximation (the variant used by R's nortest). Sensitivity check only.
Lilliefors lilliefors(std::span<const double> sample);

enum class NormalityTest { anderson_darling, lilliefors };

std::string_view to_string(NormalityTest t);

double normality_pvalue(std::span<const double> sample, NormalityTest test = NormalityTest::anderson_darling);

/// -log(max(p, 1e-300)); at most about 690.8.
double neglog(double p);

struct GridSpec {
    std::vector<double> sigma_values{0.1, 0.5, 1, 5, 10, 50, 100, 500};
    std::size_t reps = 1000;
    std::size_t steps = 10000;
    std::size_t repeats = 5;
    std::uint64_t seed = 0;
    NormalityTest test = NormalityTest::anderson_darling;
    /// Default (false): average the p-values, then take -log. When true,
    /// neglog is the mean of -log p instead.
    bool mean_of_neglog = false;
};

struct GridCell {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    bool valid_L = true;
    bool valid_D = true;
    double avg_p_L = 0.0;
    double neglog_L = 0.0;
    double avg_p_D = 0.0;
    double neglog_D = 0.0;
    std::vector<double> p_L;  ///< one per repeat
    std::vector<double> p_D;
};

struct PValueGrid {
    GridSpec spec;
    Point2 mu1;
    Point2 mu2;
    std::vector<GridCell> cells;  ///< row-major: row = sigma1 index, column = sigma2 index

    std::size_t dim() const { return spec.sigma_values.size(); }
    const GridCell& cell(std::size_t row, std::size_t col) const { return cells[row * dim() + col]; }
};

/// Seed of one (sigma1, sigma2, repeat) experiment. Keyed by the sigma values
/// themselves, so a cell gives the same result inside any grid that contains it.
std::uint64_t cell_seed(std::uint64_t master, double sigma1, double sigma2, std::size_t repeat);

/// Every cell runs `repeats` experiments with covariances sigma1 I and sigma2 I
/// and tests the L and D samples for normality. A constant sample marks the
/// cell invalid for that functional instead of producing a p-value.
PValueGrid pvalue_grid(Point2 mu1, Point2 mu2, const GridSpec& spec, Parallelism par = {});

/// Header `sigma1,sigma2,avg_p_L,neglog_L,avg_p_D,neglog_D`; invalid entries are `NA`.
void write_grid_csv(std::ostream& out, const PValueGrid& grid);
std::vector<GridCell> read_grid_csv(std::istream& in);
std::string grid_json(const PValueGrid& grid);

}  // namespace rwhull
