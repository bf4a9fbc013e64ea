#include "rwhull/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace rwhull {

namespace {

struct Standardized {
    std::vector<double> z;  // sorted
};

Standardized standardize_sorted(std::span<const double> sample) {
    const std::size_t n = sample.size();
    if (n < 8) throw std::invalid_argument("normality test needs at least 8 observations");
    const double mean = compensated_sum(sample) / static_cast<double>(n);
    CompensatedSum sq;
    for (const double v : sample) sq.add((v - mean) * (v - mean));
    const double sd = std::sqrt(sq.value() / static_cast<double>(n - 1));
    const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
    if (*lo == *hi || !(sd > 0.0)) throw DegenerateSample("normality test: sample is constant");
    Standardized s;
    s.z.reserve(n);
    for (const double v : sample) s.z.push_back((v - mean) / sd);
    std::sort(s.z.begin(), s.z.end());
    return s;
}

// Piecewise fit of D'Agostino and Stephens for the composite normal case.
double ad_pvalue(double a) {
    // the upper-tail branch is a parabola in A* with its minimum here; beyond
    // it the fit would turn upward, so the floor is returned instead
    constexpr double kUpperBranchVertex = 5.709 / (2.0 * 0.0186);
    double p = 0.0;
    if (a < 0.2) p = 1.0 - std::exp(-13.436 + 101.14 * a - 223.73 * a * a);
    else if (a < 0.34) p = 1.0 - std::exp(-8.318 + 42.796 * a - 59.938 * a * a);
    else if (a < 0.6) p = std::exp(0.9177 - 4.279 * a - 1.38 * a * a);
    else if (a < kUpperBranchVertex) p = std::exp(1.2937 - 5.709 * a + 0.0186 * a * a);
    else p = 0.0;
    return std::clamp(p, kPValueFloor, 1.0);
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double log_normal_cdf(double z) {
    if (z > -30.0) return std::log(normal_cdf(z));
    // Mills-ratio expansion of the lower tail
    const double z2 = z * z;
    return -0.5 * z2 - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log1p(-1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2) + 105.0 / (z2 * z2 * z2 * z2));
}

AndersonDarling anderson_darling(std::span<const double> sample) {
    const Standardized s = standardize_sorted(sample);
    const std::size_t n = s.z.size();
    const double nd = static_cast<double>(n);
    CompensatedSum acc;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (2.0 * static_cast<double>(i + 1) - 1.0) / nd;
        acc.add(w * (log_normal_cdf(s.z[i]) + log_normal_cdf(-s.z[n - 1 - i])));
    }
    AndersonDarling r;
    r.a2 = -nd - acc.value();
    r.a2_star = r.a2 * (1.0 + 0.75 / nd + 2.25 / (nd * nd));
    r.p = ad_pvalue(r.a2_star);
    return r;
}

Lilliefors lilliefors(std::span<const double> sample) {
    const Standardized s = standardize_sorted(sample);
    const std::size_t n = s.z.size();
    const double nd = static_cast<double>(n);
    double dplus = 0.0;
    double dminus = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = normal_cdf(s.z[i]);
        dplus = std::max(dplus, static_cast<double>(i + 1) / nd - f);
        dminus = std::max(dminus, f - static_cast<double>(i) / nd);
    }
    Lilliefors r;
    r.d = std::max(dplus, dminus);

    double kd = r.d;
    double nn = nd;
    if (n > 100) {
        kd = r.d * std::pow(nd / 100.0, 0.49);
        nn = 100.0;
    }
    double p = std::exp(-7.01256 * kd * kd * (nn + 2.78019) + 2.99587 * kd * std::sqrt(nn + 2.78019) - 0.122119 +
                        0.974598 / std::sqrt(nn) + 1.67997 / nn);
    if (p > 0.1) {
        const double kk = (std::sqrt(nd) - 0.01 + 0.85 / std::sqrt(nd)) * r.d;
        if (kk <= 0.302) p = 1.0;
        else if (kk <= 0.5)
            p = 2.76773 - 19.828315 * kk + 80.709644 * kk * kk - 138.55152 * std::pow(kk, 3) + 81.218052 * std::pow(kk, 4);
        else if (kk <= 0.9)
            p = -4.901232 + 40.662806 * kk - 97.490286 * kk * kk + 94.029866 * std::pow(kk, 3) - 32.355711 * std::pow(kk, 4);
        else if (kk <= 1.31)
            p = 6.198765 - 19.69586 * kk + 23.554289 * kk * kk - 15.297591 * std::pow(kk, 3) + 3.515761 * std::pow(kk, 4);
        else p = 0.0;
    }
    r.p = std::clamp(p, kPValueFloor, 1.0);
    return r;
}

std::string_view to_string(NormalityTest t) {
    return t == NormalityTest::anderson_darling ? "anderson-darling" : "lilliefors";
}

double normality_pvalue(std::span<const double> sample, NormalityTest test) {
    return test == NormalityTest::anderson_darling ? anderson_darling(sample).p : lilliefors(sample).p;
}

double neglog(double p) { return -std::log(std::max(p, kPValueFloor)); }

}  // namespace rwhull
