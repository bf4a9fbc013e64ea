#include "rwhull/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace rwhull {

namespace {

constexpr double kResamplingAtomLimit = 4e6;
constexpr double kStoredDifferencesLimit = 1e7;

struct OptionTable {
    std::uint64_t per_step = 1;                 // K
    std::vector<std::vector<Point2>> steps;     // [option][walk]
    std::vector<double> probability;            // [option]
};

OptionTable build_options(const DiscreteEnsembleSpec& spec) {
    OptionTable t;
    for (const auto& w : spec.walks) t.per_step *= w.support().size();
    t.steps.resize(t.per_step);
    t.probability.resize(t.per_step);
    const std::size_t m = spec.walks.size();
    for (std::uint64_t o = 0; o < t.per_step; ++o) {
        std::vector<Point2> s(m);
        double p = 1.0;
        std::uint64_t d = o;
        for (std::size_t k = m; k-- > 0;) {
            const auto sup = spec.walks[k].support();
            const auto& atom = sup[d % sup.size()];
            d /= sup.size();
            s[k] = atom.step;
            p *= atom.probability;
        }
        t.steps[o] = std::move(s);
        t.probability[o] = p;
    }
    return t;
}

std::uint64_t ipow(std::uint64_t base, std::size_t e) {
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < e; ++i) r *= base;
    return r;
}

std::vector<std::uint64_t> digits_of(std::uint64_t outcome, std::uint64_t per_step, std::size_t n) {
    std::vector<std::uint64_t> d(n);
    for (std::size_t t = n; t-- > 0;) {
        d[t] = outcome % per_step;
        outcome /= per_step;
    }
    return d;
}

Ensemble build_ensemble(const DiscreteEnsembleSpec& spec, const OptionTable& t, std::uint64_t outcome) {
    const std::size_t m = spec.walks.size();
    const auto d = digits_of(outcome, t.per_step, spec.n);
    std::vector<std::vector<Point2>> inc(m, std::vector<Point2>(spec.n));
    for (std::size_t s = 0; s < spec.n; ++s)
        for (std::size_t k = 0; k < m; ++k) inc[k][s] = t.steps[d[s]][k];
    Ensemble ens;
    ens.laws = spec.walks;
    for (auto& z : inc) ens.walks.push_back(walk_from_increments(std::move(z)));
    return ens;
}

double probability_of(const OptionTable& t, std::uint64_t outcome, std::size_t n) {
    double p = 1.0;
    for (const auto d : digits_of(outcome, t.per_step, n)) p *= t.probability[d];
    return p;
}

struct Functionals {
    double L = 0.0;
    double D = 0.0;
};

Functionals evaluate(const Ensemble& ens) {
    const ConvexPolygon h = hull_of_ensemble(ens);
    return {perimeter(h), diameter(h)};
}

struct Table {
    std::vector<double> p;
    std::vector<double> L;
    std::vector<double> D;
};

Table tabulate(const DiscreteEnsembleSpec& spec, const OptionTable& t, std::uint64_t count, int workers) {
    Table tab{std::vector<double>(count), std::vector<double>(count), std::vector<double>(count)};
    const auto total = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static) num_threads(workers)
    for (std::int64_t w = 0; w < total; ++w) {
        const auto o = static_cast<std::uint64_t>(w);
        const Functionals f = evaluate(build_ensemble(spec, t, o));
        tab.p[o] = probability_of(t, o, spec.n);
        tab.L[o] = f.L;
        tab.D[o] = f.D;
    }
    return tab;
}

double weighted_mean(const std::vector<double>& p, const std::vector<double>& x) {
    CompensatedSum s;
    for (std::size_t i = 0; i < x.size(); ++i) s.add(p[i] * x[i]);
    return s.value();
}

double weighted_central_second(const std::vector<double>& p, const std::vector<double>& x, double mean) {
    CompensatedSum s;
    for (std::size_t i = 0; i < x.size(); ++i) s.add(p[i] * (x[i] - mean) * (x[i] - mean));
    return s.value();
}

ExactMoments moments_from(const Table& tab) {
    ExactMoments m;
    m.outcomes = tab.p.size();
    m.mean_L = weighted_mean(tab.p, tab.L);
    m.var_L = weighted_central_second(tab.p, tab.L, m.mean_L);
    m.mean_D = weighted_mean(tab.p, tab.D);
    m.var_D = weighted_central_second(tab.p, tab.D, m.mean_D);
    return m;
}

using Atoms = std::vector<std::pair<double, double>>;  // (value, weight)

// sup_x |F_a(x) - F_b(x)| after merging values closer than tol.
double cdf_gap(Atoms a, Atoms b, double tol) {
    Atoms all;
    all.reserve(a.size() + b.size());
    for (auto& [v, w] : a) all.emplace_back(v, w);
    for (auto& [v, w] : b) all.emplace_back(v, -w);
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    CompensatedSum running;
    double gap = 0.0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        running.add(all[i].second);
        const bool cluster_ends = i + 1 == all.size() || all[i + 1].first - all[i].first > tol;
        if (cluster_ends) gap = std::max(gap, std::abs(running.value()));
    }
    return gap;
}

double relative_error(double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

struct Accumulator {
    std::vector<std::vector<double>> diffs;  // [i][outcome]
    double max_cdf_gap = 0.0;
};

MdsFunctionalReport summarize(const std::vector<double>& p, const std::vector<double>& x, const Accumulator& acc,
                              double tol) {
    MdsFunctionalReport r;
    r.mean = weighted_mean(p, x);
    r.variance = weighted_central_second(p, x, r.mean);
    const std::size_t n = acc.diffs.size();
    double scale = std::abs(r.mean);
    for (const double v : x) scale = std::max(scale, std::abs(v));

    for (std::size_t w = 0; w < x.size(); ++w) {
        CompensatedSum s;
        for (std::size_t i = 0; i < n; ++i) s.add(acc.diffs[i][w]);
        r.max_pointwise_error = std::max(r.max_pointwise_error, std::abs(x[w] - r.mean - s.value()));
    }
    CompensatedSum squares;
    for (std::size_t i = 0; i < n; ++i) {
        r.max_abs_mean = std::max(r.max_abs_mean, std::abs(weighted_mean(p, acc.diffs[i])));
        CompensatedSum sq;
        for (std::size_t w = 0; w < x.size(); ++w) sq.add(p[w] * acc.diffs[i][w] * acc.diffs[i][w]);
        squares.add(sq.value());
        for (std::size_t j = i + 1; j < n; ++j) {
            CompensatedSum c;
            for (std::size_t w = 0; w < x.size(); ++w) c.add(p[w] * acc.diffs[i][w] * acc.diffs[j][w]);
            r.max_abs_cross = std::max(r.max_abs_cross, std::abs(c.value()));
        }
    }
    r.sum_expected_squares = squares.value();
    r.variance_relative_error = relative_error(r.variance, r.sum_expected_squares);
    r.max_resampling_cdf_gap = acc.max_cdf_gap;

    const double first = tol * std::max(scale, 1e-300);
    const double second = tol * std::max(scale * scale, 1e-300);
    r.passed = r.max_pointwise_error <= first && r.variance_relative_error <= tol && r.max_abs_mean <= first &&
               r.max_abs_cross <= second && r.max_resampling_cdf_gap <= tol;
    return r;
}

}  // namespace

std::uint64_t outcome_count(const DiscreteEnsembleSpec& spec) {
    if (spec.walks.empty()) throw std::invalid_argument("oracle: at least one walk is required");
    double count = 1.0;
    for (const auto& w : spec.walks) {
        if (w.family() != StepFamily::discrete) throw std::invalid_argument("oracle: walks must have discrete steps");
        count *= std::pow(static_cast<double>(w.support().size()), static_cast<double>(spec.n));
    }
    if (count > kOutcomeBudget)
        throw BudgetExceeded("oracle: " + std::to_string(count) + " outcomes exceed the budget of 1e6", count,
                             kOutcomeBudget);
    return static_cast<std::uint64_t>(std::llround(count));
}

Ensemble outcome_ensemble(const DiscreteEnsembleSpec& spec, std::uint64_t outcome) {
    return build_ensemble(spec, build_options(spec), outcome);
}

double outcome_probability(const DiscreteEnsembleSpec& spec, std::uint64_t outcome) {
    return probability_of(build_options(spec), outcome, spec.n);
}

ExactMoments enumerate_exact(const DiscreteEnsembleSpec& spec, Parallelism par) {
    const std::uint64_t count = outcome_count(spec);
    return moments_from(tabulate(spec, build_options(spec), count, par.resolved()));
}

ExactMoments enumerate_exact_serial(const DiscreteEnsembleSpec& spec) {
    const std::uint64_t count = outcome_count(spec);
    const OptionTable t = build_options(spec);
    Table tab;
    for (std::uint64_t o = 0; o < count; ++o) {
        const Functionals f = evaluate(build_ensemble(spec, t, o));
        tab.p.push_back(probability_of(t, o, spec.n));
        tab.L.push_back(f.L);
        tab.D.push_back(f.D);
    }
    return moments_from(tab);
}

MdsReport mds_check(const DiscreteEnsembleSpec& spec, Parallelism par) {
    const std::uint64_t count = outcome_count(spec);
    const OptionTable t = build_options(spec);
    const std::uint64_t K = t.per_step;
    const std::size_t n = spec.n;

    MdsReport report;
    report.outcomes = count;
    const double nested = static_cast<double>(n) * static_cast<double>(count) * static_cast<double>(K);
    if (nested > kNestedBudget)
        throw BudgetExceeded("oracle: " + std::to_string(nested) + " nested evaluations exceed the budget of 1e8",
                             nested, kNestedBudget);
    if (static_cast<double>(n) * static_cast<double>(count) > kStoredDifferencesLimit)
        throw BudgetExceeded("oracle: martingale difference table too large", static_cast<double>(n * count),
                             kStoredDifferencesLimit);
    report.nested_evaluations = static_cast<std::uint64_t>(nested);
    report.resampling_checked = static_cast<double>(count * K) <= kResamplingAtomLimit;

    const int workers = par.resolved();
    const Table tab = tabulate(spec, t, count, workers);

    double scale = 0.0;
    for (std::size_t w = 0; w < count; ++w) scale = std::max({scale, std::abs(tab.L[w]), std::abs(tab.D[w])});
    const double atom_tol = 1e-9 * std::max(scale, 1e-300);

    Accumulator accL;
    Accumulator accD;
    for (std::size_t i = 1; i <= n; ++i) {
        const std::uint64_t block = ipow(K, n - i);
        std::vector<double> gL(count), gD(count);
        std::vector<double> atomsL, atomsD;
        if (report.resampling_checked) {
            atomsL.resize(count * K);
            atomsD.resize(count * K);
        }
        const auto total = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static) num_threads(workers)
        for (std::int64_t sw = 0; sw < total; ++sw) {
            const auto w = static_cast<std::uint64_t>(sw);
            const Ensemble ens = build_ensemble(spec, t, w);
            CompensatedSum sL, sD;
            for (std::uint64_t o = 0; o < K; ++o) {
                const Functionals f = evaluate(resample_with(ens, i, t.steps[o]));
                sL.add(t.probability[o] * f.L);
                sD.add(t.probability[o] * f.D);
                if (!atomsL.empty()) {
                    atomsL[w * K + o] = f.L;
                    atomsD[w * K + o] = f.D;
                }
            }
            gL[w] = sL.value();
            gD[w] = sD.value();
        }

        std::vector<double> diffL(count), diffD(count);
        for (std::uint64_t q = 0; q < count / block; ++q) {
            CompensatedSum mass, eL, eD, rL, rD;
            for (std::uint64_t f = 0; f < block; ++f) {
                const std::uint64_t w = q * block + f;
                mass.add(tab.p[w]);
                eL.add(tab.p[w] * tab.L[w]);
                eD.add(tab.p[w] * tab.D[w]);
                rL.add(tab.p[w] * gL[w]);
                rD.add(tab.p[w] * gD[w]);
            }
            const double pq = mass.value();
            const double dL = (eL.value() - rL.value()) / pq;
            const double dD = (eD.value() - rD.value()) / pq;
            for (std::uint64_t f = 0; f < block; ++f) {
                diffL[q * block + f] = dL;
                diffD[q * block + f] = dD;
            }
        }
        accL.diffs.push_back(std::move(diffL));
        accD.diffs.push_back(std::move(diffD));

        if (report.resampling_checked) {
            Atoms origL, origD, resL, resD;
            for (std::uint64_t w = 0; w < count; ++w) {
                origL.emplace_back(tab.L[w], tab.p[w]);
                origD.emplace_back(tab.D[w], tab.p[w]);
                for (std::uint64_t o = 0; o < K; ++o) {
                    resL.emplace_back(atomsL[w * K + o], tab.p[w] * t.probability[o]);
                    resD.emplace_back(atomsD[w * K + o], tab.p[w] * t.probability[o]);
                }
            }
            accL.max_cdf_gap = std::max(accL.max_cdf_gap, cdf_gap(origL, resL, atom_tol));
            accD.max_cdf_gap = std::max(accD.max_cdf_gap, cdf_gap(origD, resD, atom_tol));
        }
    }

    report.perimeter = summarize(tab.p, tab.L, accL, report.tolerance);
    report.diameter = summarize(tab.p, tab.D, accD, report.tolerance);
    report.passed = report.perimeter.passed && report.diameter.passed;
    return report;
}

}  // namespace rwhull
