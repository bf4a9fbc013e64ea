#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "../support.hpp"
#include "rwhull/asymptotics.hpp"
#include "rwhull/cli.hpp"
#include "rwhull/format.hpp"
#include "rwhull/geometry.hpp"
#include "rwhull/montecarlo.hpp"
#include "rwhull/oracle.hpp"
#include "rwhull/rng.hpp"
#include "rwhull/stats.hpp"
#include "rwhull/walks.hpp"

using namespace rwhull;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kMaster = 20261016;

using Artifacts = std::map<std::string, std::string>;

struct Outcome {
    bool pass = false;
    std::string detail;
    Artifacts artifacts;
};

std::string fmt(double v) { return format_double(v); }

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

StepDistribution gauss(Point2 mu, double s = 1.0) { return StepDistribution::gaussian(mu, Cov2::isotropic(s)); }

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

std::string samples_text(const SampleSet& s) {
    std::ostringstream o;
    write_samples_csv(o, s);
    return o.str();
}

Outcome geometry_exactness(Parallelism par) {
    constexpr int count = 1000;
    std::vector<ConvexPolygon> hulls;
    RngStream rng(kMaster, {1, 0});
    for (int t = 0; t < count; ++t) hulls.push_back(testing::random_hull(rng));

    std::vector<double> diam(count), brute(count), per(count), cauchy(count);
#pragma omp parallel for num_threads(par.resolved()) schedule(dynamic)
    for (int t = 0; t < count; ++t) {
        diam[t] = diameter(hulls[t]);
        brute[t] = diameter_brute_force(hulls[t]);
        per[t] = perimeter(hulls[t]);
        cauchy[t] = cauchy_perimeter(hulls[t], AngleGrid{1 << 14});
    }

    double worst_diam = 0.0;
    double worst_per = 0.0;
    std::ostringstream csv;
    csv << "hull,vertices,diameter,diameter_brute,perimeter,perimeter_cauchy\n";
    for (int t = 0; t < count; ++t) {
        worst_diam = std::max(worst_diam, std::abs(diam[t] - brute[t]) / brute[t]);
        worst_per = std::max(worst_per, std::abs(cauchy[t] - per[t]) / per[t]);
        csv << t << ',' << hulls[t].size() << ',' << fmt(diam[t]) << ',' << fmt(brute[t]) << ',' << fmt(per[t]) << ','
            << fmt(cauchy[t]) << '\n';
    }
    Outcome o;
    o.pass = worst_diam <= 1e-12 && worst_per <= 1e-6;
    o.detail = "max rel diameter error " + short_num(worst_diam) + ", max rel Cauchy perimeter error " +
               short_num(worst_per);
    o.artifacts["c1_hulls.csv"] = csv.str();
    return o;
}

Outcome oracle_identities(Parallelism par) {
    RngStream rng(kMaster, {2, 0});
    auto two_point = [&rng] {
        const double p = 0.1 + 0.8 * rng.uniform();
        const Point2 a{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
        const Point2 b{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
        return StepDistribution::discrete({{a, p}, {b, 1.0 - p}});
    };

    json report = json::array();
    bool all = true;
    double worst_point = 0.0;
    double worst_var = 0.0;
    double worst_cross = 0.0;
    int cases = 0;
    for (std::size_t m = 1; m <= 3; ++m) {
        for (std::size_t n = 1; n <= 3; ++n) {
            for (int rep = 0; rep < 4; ++rep) {
                DiscreteEnsembleSpec spec;
                spec.n = n;
                for (std::size_t k = 0; k < m; ++k) spec.walks.push_back(two_point());
                const MdsReport r = mds_check(spec, par);
                all = all && r.passed;
                ++cases;
                json entry{{"walks", m}, {"n", n}, {"outcomes", r.outcomes}, {"passed", r.passed}};
                for (const auto& [name, f] : {std::pair{"L", &r.perimeter}, std::pair{"D", &r.diameter}}) {
                    const double scale = std::max(1.0, std::abs(f->mean));
                    worst_point = std::max(worst_point, f->max_pointwise_error / scale);
                    worst_var = std::max(worst_var, f->variance_relative_error);
                    worst_cross = std::max(worst_cross, f->max_abs_cross / std::max(1.0, f->variance));
                    entry[name] = {{"mean", fmt(f->mean)},
                                   {"variance", fmt(f->variance)},
                                   {"sum_expected_squares", fmt(f->sum_expected_squares)},
                                   {"max_pointwise_error", fmt(f->max_pointwise_error)},
                                   {"max_abs_cross", fmt(f->max_abs_cross)}};
                }
                report.push_back(entry);
            }
        }
    }
    Outcome o;
    o.pass = all && worst_point <= 1e-10 && worst_var <= 1e-10 && worst_cross <= 1e-10;
    o.detail = std::to_string(cases) + " ensembles, max pointwise " + short_num(worst_point) + ", variance " +
               short_num(worst_var) + ", cross moment " + short_num(worst_cross);
    o.artifacts["c2_oracle.json"] = report.dump(2) + "\n";
    return o;
}

ExperimentConfig right_angle(std::size_t steps, std::size_t reps, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.walks = {gauss({1, 0}), gauss({0, 1})};
    cfg.steps = steps;
    cfg.reps = reps;
    cfg.seed = seed;
    return cfg;
}

Outcome slln(Parallelism par) {
    ExperimentConfig cfg = right_angle(100000, 20, derive_seed(kMaster, {3}));
    cfg.n_grid = {1000, 10000, 100000};
    const SllnCurve curve = slln_curve(cfg, par);
    std::vector<double> h, l, d;
    std::ostringstream csv;
    csv << "n,median_hausdorff,median_perimeter_error,median_diameter_error\n";
    for (const auto& p : curve.points) {
        h.push_back(p.median_hausdorff);
        l.push_back(p.median_perimeter_error);
        d.push_back(p.median_diameter_error);
        csv << p.n << ',' << fmt(p.median_hausdorff) << ',' << fmt(p.median_perimeter_error) << ','
            << fmt(p.median_diameter_error) << '\n';
    }
    Outcome o;
    o.pass = strictly_decreasing(h) && strictly_decreasing(l) && strictly_decreasing(d) && h.back() < 0.02 &&
             l.back() < 0.02 && d.back() < 0.02;
    o.detail = "at n=1e5: Hausdorff " + short_num(h.back()) + ", |L/n - Per| " + short_num(l.back()) +
               ", |D/n - diam| " + short_num(d.back());
    o.artifacts["c3_slln.csv"] = csv.str();
    return o;
}

Outcome variance_asymptotics(Parallelism par) {
    const SampleSet a = run_experiment(right_angle(10000, 2000, derive_seed(kMaster, {4, 0})), par);
    const double target_L = 4.0 + 2.0 * std::sqrt(2.0);
    const double ratio_L = variance_ratio(a).varL_over_n / target_L;

    ExperimentConfig cfg;
    const double sigma = 2.0;
    cfg.walks = {gauss({3, 0}, sigma), gauss({1, 1})};
    cfg.steps = 10000;
    cfg.reps = 2000;
    cfg.seed = derive_seed(kMaster, {4, 1});
    const DriftGeometry g = drift_geometry({3, 0}, {1, 1});
    const double analytic_D = sigma_D2(cfg.walks[0], cfg.walks[1], g);
    const SampleSet b = run_experiment(cfg, par);
    const double ratio_D = variance_ratio(b).varD_over_n / sigma;

    Outcome o;
    o.pass = g.longest == LongestSide::walk1 && std::abs(analytic_D - sigma) < 1e-12 && ratio_L > 0.85 &&
             ratio_L < 1.15 && ratio_D > 0.85 && ratio_D < 1.15;
    o.detail = "Var[L]/n / (4+2 sqrt 2) = " + short_num(ratio_L) + ", Var[D]/n / sigma = " + short_num(ratio_D);
    o.artifacts["c4_perimeter_samples.csv"] = samples_text(a);
    o.artifacts["c4_perimeter_summary.json"] = summary_json(a);
    o.artifacts["c4_diameter_samples.csv"] = samples_text(b);
    o.artifacts["c4_diameter_summary.json"] = summary_json(b);
    return o;
}

Outcome clt(Parallelism par) {
    const Point2 mu1{2, 1};
    const Point2 mu2{-1, 1};
    const DriftGeometry g = drift_geometry(mu1, mu2);
    const auto w1 = gauss(mu1);
    const auto w2 = gauss(mu2);
    const double sL = sigma_L2(w1, w2, g);
    const double sD = sigma_D2(w1, w2, g);
    int good_L = 0;
    int good_D = 0;
    std::ostringstream csv;
    csv << "repeat,ad_p_L,ad_p_D,mean_zL,var_zL,mean_zD,var_zD\n";
    for (std::uint64_t r = 0; r < 5; ++r) {
        ExperimentConfig cfg;
        cfg.walks = {w1, w2};
        cfg.steps = 10000;
        cfg.reps = 1000;
        cfg.seed = derive_seed(kMaster, {5, r});
        const SampleSet s = run_experiment(cfg, par);
        const auto zL = standardize(s, Functional::perimeter, sL);
        const auto zD = standardize(s, Functional::diameter, sD);
        const double pL = anderson_darling(zL).p;
        const double pD = anderson_darling(zD).p;
        good_L += pL > 0.01;
        good_D += pD > 0.01;
        const Summary a = summarize(zL);
        const Summary b = summarize(zD);
        csv << r << ',' << fmt(pL) << ',' << fmt(pD) << ',' << fmt(a.mean) << ',' << fmt(a.variance) << ','
            << fmt(b.mean) << ',' << fmt(b.variance) << '\n';
    }
    Outcome o;
    o.pass = good_L >= 4 && good_D >= 4;
    o.detail = "AD p > 0.01 in " + std::to_string(good_L) + "/5 repeats for L, " + std::to_string(good_D) +
               "/5 for D";
    o.artifacts["c5_clt.csv"] = csv.str();
    return o;
}

Outcome l2_decay(Parallelism par) {
    ExperimentConfig cfg = right_angle(10000, 500, derive_seed(kMaster, {6}));
    cfg.n_grid = {100, 1000, 10000};
    std::ostringstream csv;
    csv << "functional,n,second_moment\n";
    bool pass = true;
    std::string detail;
    for (const Functional f : {Functional::perimeter, Functional::diameter}) {
        const auto curve = l2_error_curve(cfg, f, par);
        std::vector<double> m;
        for (const auto& p : curve) {
            m.push_back(p.second_moment);
            csv << to_string(f) << ',' << p.n << ',' << fmt(p.second_moment) << '\n';
        }
        pass = pass && strictly_decreasing(m);
        detail += std::string(to_string(f)) + " " + short_num(m.front()) + " -> " + short_num(m.back()) + "; ";
    }
    Outcome o;
    o.pass = pass;
    o.detail = detail.substr(0, detail.size() - 2);
    o.artifacts["c6_l2.csv"] = csv.str();
    return o;
}

Outcome resampling_bound(Parallelism par) {
    constexpr int count = 1000;
    constexpr std::size_t n = 100;
    std::vector<ResamplingBoundCheck> checks(count);
    std::vector<std::size_t> index(count);
#pragma omp parallel for num_threads(par.resolved()) schedule(dynamic)
    for (int t = 0; t < count; ++t) {
        RngStream rng(kMaster, {7, static_cast<std::uint32_t>(t)});
        const std::size_t m = 1 + static_cast<std::size_t>(3.0 * rng.uniform());
        std::vector<StepDistribution> laws;
        for (std::size_t k = 0; k < m; ++k) {
            const Point2 mu{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
            const double a = 3.0 * rng.uniform();
            const double b = 3.0 * rng.uniform();
            laws.push_back(StepDistribution::gaussian(mu, rotate(Cov2{a, 0.0, b}, 3.14159 * rng.uniform())));
        }
        const Ensemble ens = generate_ensemble(laws, n, derive_seed(kMaster, {7, static_cast<std::uint64_t>(t)}), 0);
        index[t] = 1 + std::min(n - 1, static_cast<std::size_t>(static_cast<double>(n) * rng.uniform()));
        checks[t] = resampling_bound_check(ens, index[t], resample_at(ens, index[t], rng), 4096);
    }
    int violations = 0;
    double tightest = 0.0;
    std::ostringstream csv;
    csv << "pair,i,sup_range_change,perimeter_change,bound,holds\n";
    for (int t = 0; t < count; ++t) {
        const auto& c = checks[t];
        violations += !c.passed();
        if (c.bound > 0.0) tightest = std::max(tightest, c.sup_range_change / c.bound);
        csv << t << ',' << index[t] << ',' << fmt(c.sup_range_change) << ',' << fmt(c.perimeter_change) << ','
            << fmt(c.bound) << ',' << (c.passed() ? 1 : 0) << '\n';
    }
    Outcome o;
    o.pass = violations == 0;
    o.detail = std::to_string(violations) + " violations in " + std::to_string(count) +
               " pairs, largest sup change / bound " + short_num(tightest);
    o.artifacts["c7_resampling.csv"] = csv.str();
    return o;
}

GridSpec desk_grid(std::uint64_t seed) {
    GridSpec spec;
    spec.sigma_values = {0.5, 5, 50, 500};
    spec.reps = 200;
    spec.steps = 2000;
    spec.repeats = 3;
    spec.seed = seed;
    return spec;
}

void add_grid_artifacts(Artifacts& a, const std::string& stem, const PValueGrid& g) {
    std::ostringstream csv;
    write_grid_csv(csv, g);
    a[stem + ".csv"] = csv.str();
    a[stem + ".json"] = grid_json(g) + "\n";
    a[stem + "_L.svg"] = cli::render_heatmap_svg(g.cells, 'L', stem);
}

Outcome heatmap_geography(Parallelism par) {
    const PValueGrid split = pvalue_grid({100, 0}, {0, 0}, desk_grid(derive_seed(kMaster, {8, 0})), par);
    const PValueGrid equal = pvalue_grid({100, 0}, {100, 0}, desk_grid(derive_seed(kMaster, {8, 1})), par);

    bool high_ok = true;
    bool low_ok = true;
    double weakest_high = 1e300;
    double strongest_low = 0.0;
    for (const auto& c : split.cells) {
        if (c.sigma2 >= 50 && c.sigma1 < 50) {
            high_ok = high_ok && c.valid_L && c.neglog_L > 2.0;
            weakest_high = std::min(weakest_high, c.neglog_L);
        }
        if (c.sigma1 >= c.sigma2) {
            low_ok = low_ok && c.valid_L && c.neglog_L <= 2.0;
            strongest_low = std::max(strongest_low, c.neglog_L);
        }
    }
    double equal_high = 0.0;
    for (const auto& c : equal.cells)
        if (c.sigma2 >= 50 && c.valid_L) equal_high = std::max(equal_high, c.neglog_L);

    Outcome o;
    o.pass = high_ok && low_ok && equal_high > 2.0;
    o.detail = "mu2=0: min over sigma2>=50>sigma1 " + short_num(weakest_high) + ", max over sigma1>=sigma2 " +
               short_num(strongest_low) + "; mu1=mu2: max over sigma2>=50 " + short_num(equal_high);
    add_grid_artifacts(o.artifacts, "c8_grid_split", split);
    add_grid_artifacts(o.artifacts, "c8_grid_equal", equal);
    return o;
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome(Parallelism)> run;
    double limit_seconds;  // 0 when the runtime is not part of the criterion
};

void write_artifacts(const fs::path& dir, const Artifacts& a) {
    fs::create_directories(dir);
    for (const auto& [name, text] : a) {
        std::ofstream f(dir / name, std::ios::binary);
        f << text;
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance suite"};
    std::string artifacts = "acceptance_artifacts";
    std::vector<int> only;
    app.add_option("--artifacts", artifacts, "Directory for CSV/JSON artifacts")->capture_default_str();
    app.add_option("--only", only, "Run only these criteria (1-8); criterion 9 then covers just them");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "geometry exactness", geometry_exactness, 30.0},
        {2, "oracle identities", oracle_identities, 60.0},
        {3, "strong law", slln, 0.0},
        {4, "variance asymptotics", variance_asymptotics, 0.0},
        {5, "central limit", clt, 0.0},
        {6, "L2 decay", l2_decay, 0.0},
        {7, "resampling bound", resampling_bound, 0.0},
        {8, "heatmap geography", heatmap_geography, 0.0},
    };
    auto selected = [&only](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

    fs::create_directories(artifacts);
    std::ofstream summary(fs::path(artifacts) / "summary.txt");
    auto report = [&summary](const std::string& line) {
        std::cout << line << std::endl;
        summary << line << '\n';
    };

    bool all = true;
    std::map<int, Artifacts> baseline;
    for (const auto& c : criteria) {
        if (!selected(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run(Parallelism{1});
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("error: ") + e.what();
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0.0 && seconds >= c.limit_seconds) {
            o.pass = false;
            o.detail += ", over the " + short_num(c.limit_seconds) + " s limit";
        }
        write_artifacts(fs::path(artifacts) / "workers-1", o.artifacts);
        baseline[c.id] = o.artifacts;
        all = all && o.pass;
        report("criterion " + std::to_string(c.id) + " (" + c.name + "): " + (o.pass ? "PASS" : "FAIL") + " - " +
               o.detail + " [" + short_num(seconds) + " s]");
    }

    const auto start = std::chrono::steady_clock::now();
    std::vector<std::string> mismatches;
    std::size_t compared = 0;
    for (const int workers : {4, 8}) {
        for (const auto& c : criteria) {
            if (!selected(c.id)) continue;
            Outcome o;
            try {
                o = c.run(Parallelism{workers});
            } catch (const std::exception& e) {
                mismatches.push_back("criterion " + std::to_string(c.id) + " threw at " + std::to_string(workers) +
                                     " workers: " + e.what());
                continue;
            }
            write_artifacts(fs::path(artifacts) / ("workers-" + std::to_string(workers)), o.artifacts);
            const Artifacts& ref = baseline[c.id];
            if (o.artifacts.size() != ref.size()) mismatches.push_back("criterion " + std::to_string(c.id));
            for (const auto& [name, text] : o.artifacts) {
                ++compared;
                const auto it = ref.find(name);
                if (it == ref.end() || it->second != text)
                    mismatches.push_back(name + " at " + std::to_string(workers) + " workers");
            }
        }
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool same = mismatches.empty() && compared > 0;
    all = all && same;
    std::string line = std::string("criterion 9 (determinism): ") + (same ? "PASS" : "FAIL") + " - " +
                       std::to_string(compared) + " artifacts compared at 4 and 8 workers against 1 worker";
    for (const auto& m : mismatches) line += "; differs: " + m;
    report(line + " [" + short_num(seconds) + " s]");
    return all ? 0 : 1;
}
