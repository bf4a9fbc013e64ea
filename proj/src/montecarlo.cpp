#include "rwhull/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "rwhull/asymptotics.hpp"
#include "rwhull/format.hpp"
#include "rwhull/geometry.hpp"

namespace rwhull {

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

nlohmann::json law_json(const StepDistribution& d) {
    nlohmann::json j;
    j["family"] = d.family() == StepFamily::gaussian ? "gaussian" : "discrete";
    j["mean"] = {d.mean().x, d.mean().y};
    j["covariance"] = {d.covariance().xx, d.covariance().xy, d.covariance().yy};
    if (d.family() == StepFamily::discrete) {
        nlohmann::json sup = nlohmann::json::array();
        for (const auto& w : d.support()) sup.push_back({{"step", {w.step.x, w.step.y}}, {"p", w.probability}});
        j["support"] = sup;
    }
    return j;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (walks.empty()) throw std::invalid_argument("experiment needs at least one walk");
    if (steps < 1) throw std::invalid_argument("steps must be at least 1");
    if (reps < 1) throw std::invalid_argument("reps must be at least 1");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1) throw std::invalid_argument("n_grid entries must be positive");
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw std::invalid_argument("n_grid must be increasing");
    }
}

std::vector<Point2> ExperimentConfig::drifts() const {
    std::vector<Point2> mu;
    for (const auto& w : walks) mu.push_back(w.mean());
    return mu;
}

Summary summarize(std::span<const double> values) {
    Summary s;
    if (values.empty()) return s;
    s.mean = compensated_sum(values) / static_cast<double>(values.size());
    CompensatedSum sq;
    for (const double v : values) sq.add((v - s.mean) * (v - s.mean));
    s.variance = values.size() > 1 ? sq.value() / static_cast<double>(values.size() - 1) : 0.0;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;
    return s;
}

std::vector<double> SampleSet::perimeters() const {
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records) v.push_back(r.L);
    return v;
}

std::vector<double> SampleSet::diameters() const {
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records) v.push_back(r.D);
    return v;
}

std::string_view to_string(Functional f) { return f == Functional::perimeter ? "perimeter" : "diameter"; }

SampleSet run_experiment(const ExperimentConfig& cfg, Parallelism par) {
    cfg.validate();
    SampleSet out;
    out.config = cfg;
    out.records.resize(cfg.reps);
    const auto reps = static_cast<std::int64_t>(cfg.reps);
#pragma omp parallel for schedule(dynamic) num_threads(par.resolved())
    for (std::int64_t r = 0; r < reps; ++r) {
        const auto rep = static_cast<std::uint32_t>(r);
        const Ensemble ens = generate_ensemble(cfg.walks, cfg.steps, cfg.seed, rep);
        const ConvexPolygon hull = hull_of_ensemble(ens);
        out.records[r] = {rep, perimeter(hull), diameter(hull)};
    }
    out.L = summarize(out.perimeters());
    out.D = summarize(out.diameters());
    return out;
}

SllnCurve slln_curve(const ExperimentConfig& cfg, Parallelism par) {
    cfg.validate();
    if (cfg.n_grid.empty()) throw std::invalid_argument("slln_curve needs a non-empty n_grid");
    const LimitShape limit = limit_shape(cfg.drifts());
    const std::size_t grid = cfg.n_grid.size();
    const std::size_t n_max = cfg.n_grid.back();

    std::vector<double> haus(cfg.reps * grid), per_err(cfg.reps * grid), diam_err(cfg.reps * grid);
    std::vector<char> monotone(cfg.reps, 1);
    const auto reps = static_cast<std::int64_t>(cfg.reps);
#pragma omp parallel for schedule(dynamic) num_threads(par.resolved())
    for (std::int64_t r = 0; r < reps; ++r) {
        const Ensemble ens = generate_ensemble(cfg.walks, n_max, cfg.seed, static_cast<std::uint32_t>(r));
        double prev_L = 0.0;
        double prev_D = 0.0;
        for (std::size_t g = 0; g < grid; ++g) {
            const std::size_t n = cfg.n_grid[g];
            const double inv = 1.0 / static_cast<double>(n);
            const ConvexPolygon hull = hull_of_ensemble(ens, n);
            const double L = perimeter(hull);
            const double D = diameter(hull);
            const std::size_t at = static_cast<std::size_t>(r) * grid + g;
            haus[at] = hausdorff(hull.scaled(inv), limit.polygon);
            per_err[at] = std::abs(L * inv - limit.per);
            diam_err[at] = std::abs(D * inv - limit.diam);
            const double slack = 1e-12 * std::max(L, 1.0);
            if (L + slack < prev_L || D + slack < prev_D) monotone[r] = 0;
            prev_L = L;
            prev_D = D;
        }
    }

    SllnCurve curve;
    curve.monotone = std::all_of(monotone.begin(), monotone.end(), [](char c) { return c != 0; });
    for (std::size_t g = 0; g < grid; ++g) {
        std::vector<double> h, p, d;
        for (std::size_t r = 0; r < cfg.reps; ++r) {
            h.push_back(haus[r * grid + g]);
            p.push_back(per_err[r * grid + g]);
            d.push_back(diam_err[r * grid + g]);
        }
        curve.points.push_back({cfg.n_grid[g], median(h), median(p), median(d)});
    }
    return curve;
}

VarianceRatio variance_ratio(const SampleSet& samples) {
    if (samples.records.size() < 2) throw std::invalid_argument("variance_ratio needs at least two replications");
    const double n = static_cast<double>(samples.config.steps);
    return {samples.L.variance / n, samples.D.variance / n};
}

std::vector<double> standardize(const SampleSet& samples, Functional f, double sigma2) {
    if (!(sigma2 > 0.0)) throw std::domain_error("standardize: sigma2 must be positive");
    const std::vector<double> x = f == Functional::perimeter ? samples.perimeters() : samples.diameters();
    const double mean = compensated_sum(x) / static_cast<double>(x.size());
    const double scale = std::sqrt(sigma2 * static_cast<double>(samples.config.steps));
    std::vector<double> z;
    z.reserve(x.size());
    for (const double v : x) z.push_back((v - mean) / scale);
    return z;
}

std::vector<L2Point> l2_error_curve(const ExperimentConfig& cfg, Functional f, Parallelism par) {
    cfg.validate();
    if (cfg.walks.size() != 2) throw std::invalid_argument("l2_error_curve needs exactly two walks");
    if (cfg.n_grid.empty()) throw std::invalid_argument("l2_error_curve needs a non-empty n_grid");
    const DriftGeometry g = drift_geometry(cfg.walks[0].mean(), cfg.walks[1].mean());
    if (!g.a1_holds) throw AssumptionViolation("l2_error_curve: assumption A1 is violated");
    if (f == Functional::diameter && !g.a2_holds())
        throw AssumptionViolation("l2_error_curve: assumption A2 is violated");

    std::vector<L2Point> out;
    for (const std::size_t n : cfg.n_grid) {
        std::vector<double> x(cfg.reps), approx(cfg.reps);
        const auto reps = static_cast<std::int64_t>(cfg.reps);
#pragma omp parallel for schedule(dynamic) num_threads(par.resolved())
        for (std::int64_t r = 0; r < reps; ++r) {
            const Ensemble ens = generate_ensemble(cfg.walks, n, cfg.seed, static_cast<std::uint32_t>(r));
            const ConvexPolygon hull = hull_of_ensemble(ens);
            if (f == Functional::perimeter) {
                x[r] = perimeter(hull);
                approx[r] = approx_sum_perimeter(ens, g);
            } else {
                x[r] = diameter(hull);
                approx[r] = approx_sum_diameter(ens, g);
            }
        }
        // both X_n and the sum are centered by their replication means; centering X_n
        // alone leaves the sum's sample mean behind, a floor of about sigma^2 / reps
        const double mean = compensated_sum(x) / static_cast<double>(cfg.reps);
        const double approx_mean = compensated_sum(approx) / static_cast<double>(cfg.reps);
        CompensatedSum sq;
        for (std::size_t r = 0; r < cfg.reps; ++r) {
            const double resid = (x[r] - mean) - (approx[r] - approx_mean);
            sq.add(resid * resid);
        }
        out.push_back({n, sq.value() / (static_cast<double>(cfg.reps) * static_cast<double>(n))});
    }
    return out;
}

ResamplingBoundCheck resampling_bound_check(const Ensemble& ens, std::size_t i, const Ensemble& resampled,
                                         std::size_t angles) {
    if (i < 1 || i > ens.steps() || resampled.steps() != ens.steps() || resampled.walks.size() != ens.walks.size())
        throw std::invalid_argument("resampling_bound_check: ensembles do not match");
    const ConvexPolygon h = hull_of_ensemble(ens);
    const ConvexPolygon hr = hull_of_ensemble(resampled);
    const AngleGrid grid{angles, std::numbers::pi};
    const std::vector<double> r0 = range_profile(h, grid);
    const std::vector<double> r1 = range_profile(hr, grid);

    ResamplingBoundCheck c;
    double scale = 0.0;
    for (std::size_t j = 0; j < r0.size(); ++j) {
        c.sup_range_change = std::max(c.sup_range_change, std::abs(r0[j] - r1[j]));
        scale = std::max({scale, r0[j], r1[j]});
    }
    for (std::size_t k = 0; k < ens.walks.size(); ++k)
        c.bound += norm(ens.walks[k].increments[i - 1]) + norm(resampled.walks[k].increments[i - 1]);
    c.bound *= 2.0;
    c.perimeter_change = std::abs(perimeter(h) - perimeter(hr));
    const double slack = 1e-12 * std::max(scale, 1.0);
    c.sup_holds = c.sup_range_change <= c.bound + slack;
    c.integrated_holds = c.perimeter_change <= std::numbers::pi * c.bound + slack;
    return c;
}

void write_samples_csv(std::ostream& out, const SampleSet& samples) {
    out << "rep,n,L,D\n";
    for (const auto& r : samples.records)
        out << r.rep << ',' << samples.config.steps << ',' << format_double(r.L) << ',' << format_double(r.D) << '\n';
}

std::vector<SampleRecord> read_samples_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("samples CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "rep,n,L,D") throw std::runtime_error("samples CSV: unexpected header '" + line + "'");
    std::vector<SampleRecord> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream ss(line);
        for (std::string item; std::getline(ss, item, ',');) f.push_back(item);
        if (f.size() != 4) throw std::runtime_error("samples CSV: line " + std::to_string(lineno) + " needs 4 fields");
        try {
            out.push_back({static_cast<std::uint32_t>(std::stoul(f[0])), std::stod(f[2]), std::stod(f[3])});
        } catch (const std::logic_error&) {
            throw std::runtime_error("samples CSV: line " + std::to_string(lineno) + " has a non-numeric field");
        }
    }
    return out;
}

std::string summary_json(const SampleSet& samples) {
    nlohmann::json j;
    const auto& cfg = samples.config;
    j["schema"] = "rwhull.summary/1";
    j["config"]["steps"] = cfg.steps;
    j["config"]["reps"] = cfg.reps;
    j["config"]["seed"] = cfg.seed;
    j["config"]["rng"] = RngStream::algorithm;
    for (const auto& w : cfg.walks) j["config"]["walks"].push_back(law_json(w));
    auto stats = [](const Summary& s) {
        return nlohmann::json{{"mean", s.mean}, {"variance", s.variance}, {"min", s.min}, {"max", s.max}};
    };
    j["L"] = stats(samples.L);
    j["D"] = stats(samples.D);
    if (samples.records.size() >= 2) {
        const VarianceRatio v = variance_ratio(samples);
        j["varL_over_n"] = v.varL_over_n;
        j["varD_over_n"] = v.varD_over_n;
    }
    return j.dump(2);
}

}  // namespace rwhull
