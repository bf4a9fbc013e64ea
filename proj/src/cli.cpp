#include "rwhull/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rwhull/asymptotics.hpp"
#include "rwhull/format.hpp"
#include "rwhull/geometry.hpp"
#include "rwhull/montecarlo.hpp"
#include "rwhull/oracle.hpp"

namespace rwhull::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string default_out_dir() {
    if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
    return "rwhull-out";
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

Point2 to_point(const std::vector<double>& v, const char* name) {
    if (v.size() != 2) throw UsageError(std::string("--") + name + " needs two values x,y");
    const Point2 p{v[0], v[1]};
    if (!is_finite(p)) throw UsageError(std::string("--") + name + " must be finite");
    return p;
}

/// Isotropic `sigma` unless a full covariance `xx,xy,yy` was given.
Cov2 to_cov(double sigma, const std::vector<double>& full, const char* name) {
    if (!full.empty()) {
        if (full.size() != 3) throw UsageError(std::string("--") + name + " needs three values xx,xy,yy");
        return {full[0], full[1], full[2]};
    }
    return Cov2::isotropic(sigma);
}

StepDistribution gaussian_law(Point2 mu, Cov2 cov, const char* which) {
    try {
        return StepDistribution::gaussian(mu, cov);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string(which) + ": " + e.what());
    }
}

json point_json(Point2 p) { return json::array({p.x, p.y}); }

json cov_json(const Cov2& c) { return json::array({c.xx, c.xy, c.yy}); }

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

/// Everything needed to rerun a command. `argv` excludes the output location,
/// so `replay` can redirect it.
struct Manifest {
    std::string command;
    json config;
    std::uint64_t seed = 0;
    std::vector<std::string> argv;
    std::vector<std::string> outputs;
    json schemas = json::object();
};

void write_manifest(const fs::path& path, const Manifest& m, const std::string& started, double seconds) {
    json j;
    j["schema"] = "rwhull.manifest/1";
    j["command"] = m.command;
    j["version"] = kVersion;
    j["config"] = m.config;
    j["seed"] = m.seed;
    j["rng"] = RngStream::algorithm;
    j["argv"] = m.argv;
    j["outputs"] = m.outputs;
    j["schemas"] = m.schemas;
    j["started_utc"] = started;
    j["wall_seconds"] = seconds;
    write_text(path, j.dump(2) + "\n");
}

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()), started_(utc_now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
    const std::string& started() const { return started_; }

private:
    std::chrono::steady_clock::time_point start_;
    std::string started_;
};

// ---- shared walk-pair options ----

struct PairOptions {
    std::vector<double> mu1{1.0, 0.0};
    std::vector<double> mu2{0.0, 1.0};
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    std::vector<double> cov1;
    std::vector<double> cov2;

    void add(CLI::App* app) {
        app->add_option("--mu1", mu1, "Drift of walk 1 as x,y")->delimiter(',')->expected(2)->capture_default_str();
        app->add_option("--mu2", mu2, "Drift of walk 2 as x,y")->delimiter(',')->expected(2)->capture_default_str();
        auto* s1 = app->add_option("--sigma1", sigma1, "Walk 1 covariance is sigma1 * I")->capture_default_str();
        auto* s2 = app->add_option("--sigma2", sigma2, "Walk 2 covariance is sigma2 * I")->capture_default_str();
        app->add_option("--cov1", cov1, "Full walk 1 covariance xx,xy,yy")->delimiter(',')->expected(3)->excludes(s1);
        app->add_option("--cov2", cov2, "Full walk 2 covariance xx,xy,yy")->delimiter(',')->expected(3)->excludes(s2);
    }

    Point2 m1() const { return to_point(mu1, "mu1"); }
    Point2 m2() const { return to_point(mu2, "mu2"); }
    Cov2 c1() const { return to_cov(sigma1, cov1, "cov1"); }
    Cov2 c2() const { return to_cov(sigma2, cov2, "cov2"); }

    std::vector<StepDistribution> laws() const {
        return {gaussian_law(m1(), c1(), "walk 1"), gaussian_law(m2(), c2(), "walk 2")};
    }

    json to_json() const {
        return {{"mu1", point_json(m1())}, {"mu2", point_json(m2())}, {"cov1", cov_json(c1())}, {"cov2", cov_json(c2())}};
    }

    std::vector<std::string> argv() const {
        const Cov2 a = c1();
        const Cov2 b = c2();
        return {"--mu1", join(mu1), "--mu2", join(mu2), "--cov1", join({a.xx, a.xy, a.yy}),
                "--cov2", join({b.xx, b.xy, b.yy})};
    }
};

// ---- hull ----

int cmd_hull(const std::string& input, std::ostream& out) {
    std::vector<Point2> pts;
    if (input.empty() || input == "-") {
        pts = parse_points(std::cin);
    } else {
        std::ifstream f(input);
        if (!f) throw std::runtime_error("cannot open " + input);
        pts = parse_points(f);
    }
    out << hull_report(pts) << '\n';
    return kExitOk;
}

// ---- simulate ----

struct SimulateOptions {
    PairOptions pair;
    std::size_t steps = 10000;
    std::size_t reps = 1000;
    std::uint64_t seed = 0;
    std::string out;
    int threads = 0;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
    const Timer timer;
    ExperimentConfig cfg;
    cfg.walks = o.pair.laws();
    cfg.steps = o.steps;
    cfg.reps = o.reps;
    cfg.seed = o.seed;
    if (o.reps > 0xffffffffULL) throw UsageError("--reps is too large");

    const SampleSet samples = run_experiment(cfg, Parallelism{o.threads});

    const fs::path dir(o.out);
    ensure_dir(dir);
    {
        std::ostringstream csv;
        write_samples_csv(csv, samples);
        write_text(dir / "samples.csv", csv.str());
    }
    write_text(dir / "summary.json", summary_json(samples) + "\n");

    Manifest m;
    m.command = "simulate";
    m.config = o.pair.to_json();
    m.config["steps"] = o.steps;
    m.config["reps"] = o.reps;
    m.config["seed"] = o.seed;
    m.config["threads"] = o.threads;
    m.config["out"] = o.out;
    m.seed = o.seed;
    m.argv = {"simulate"};
    for (auto& a : o.pair.argv()) m.argv.push_back(a);
    for (auto& a : std::vector<std::string>{"--steps", std::to_string(o.steps), "--reps", std::to_string(o.reps),
                                            "--seed", std::to_string(o.seed)})
        m.argv.push_back(a);
    m.outputs = {"samples.csv", "summary.json"};
    m.schemas = {{"samples.csv", "rwhull.samples/1 rep,n,L,D"}, {"summary.json", "rwhull.summary/1"}};
    write_manifest(dir / "manifest.json", m, timer.started(), timer.seconds());

    out << "wrote " << samples.records.size() << " replications to " << dir.string() << '\n';
    return kExitOk;
}

// ---- grid ----

struct GridOptions {
    std::vector<double> mu1{100.0, 0.0};
    std::vector<double> mu2{0.0, 0.0};
    std::vector<double> sigmas{0.1, 0.5, 1, 5, 10, 50, 100, 500};
    std::size_t reps = 1000;
    std::size_t steps = 10000;
    std::size_t repeats = 5;
    std::uint64_t seed = 0;
    std::string test = "ad";
    bool mean_of_neglog = false;
    bool svg = true;
    std::string out;
    int threads = 0;
};

int cmd_grid(const GridOptions& o, std::ostream& out) {
    const Timer timer;
    GridSpec spec;
    spec.sigma_values = o.sigmas;
    spec.reps = o.reps;
    spec.steps = o.steps;
    spec.repeats = o.repeats;
    spec.seed = o.seed;
    spec.test = o.test == "lilliefors" ? NormalityTest::lilliefors : NormalityTest::anderson_darling;
    spec.mean_of_neglog = o.mean_of_neglog;
    if (o.reps < 8) throw UsageError("--reps must be at least 8 for the normality test");
    for (const double s : o.sigmas)
        if (!(s >= 0.0) || !std::isfinite(s)) throw UsageError("--sigmas must be finite and non-negative");
    const Point2 mu1 = to_point(o.mu1, "mu1");
    const Point2 mu2 = to_point(o.mu2, "mu2");

    const PValueGrid grid = pvalue_grid(mu1, mu2, spec, Parallelism{o.threads});

    const fs::path dir(o.out);
    ensure_dir(dir);
    {
        std::ostringstream csv;
        write_grid_csv(csv, grid);
        write_text(dir / "grid.csv", csv.str());
    }
    write_text(dir / "grid.json", grid_json(grid) + "\n");

    Manifest m;
    m.command = "grid";
    m.outputs = {"grid.csv", "grid.json"};
    if (o.svg) {
        const std::string where = "mu1=(" + join(o.mu1) + ") mu2=(" + join(o.mu2) + ")";
        write_text(dir / "heatmap_L.svg", render_heatmap_svg(grid.cells, 'L', "perimeter, " + where));
        write_text(dir / "heatmap_D.svg", render_heatmap_svg(grid.cells, 'D', "diameter, " + where));
        m.outputs.push_back("heatmap_L.svg");
        m.outputs.push_back("heatmap_D.svg");
    }
    m.config = {{"mu1", point_json(mu1)},
                {"mu2", point_json(mu2)},
                {"sigmas", o.sigmas},
                {"reps", o.reps},
                {"steps", o.steps},
                {"repeats", o.repeats},
                {"seed", o.seed},
                {"test", to_string(spec.test)},
                {"mean_of_neglog", o.mean_of_neglog},
                {"svg", o.svg},
                {"threads", o.threads},
                {"out", o.out}};
    m.seed = o.seed;
    m.argv = {"grid",      "--mu1",   join(o.mu1),   "--mu2",    join(o.mu2),
              "--sigmas",  join(o.sigmas), "--reps", std::to_string(o.reps), "--steps",
              std::to_string(o.steps), "--repeats", std::to_string(o.repeats), "--seed", std::to_string(o.seed),
              "--test",    o.test == "lilliefors" ? "lilliefors" : "ad"};
    if (o.mean_of_neglog) m.argv.push_back("--mean-of-neglog");
    if (!o.svg) m.argv.push_back("--no-svg");
    m.schemas = {{"grid.csv", "rwhull.grid-csv/1 sigma1,sigma2,avg_p_L,neglog_L,avg_p_D,neglog_D"},
                 {"grid.json", "rwhull.grid/1"}};
    write_manifest(dir / "manifest.json", m, timer.started(), timer.seconds());

    out << "wrote " << grid.cells.size() << " cells to " << dir.string() << '\n';
    return kExitOk;
}

// ---- verify ----

json verify_report(const PairOptions& o) {
    const Point2 mu1 = o.m1();
    const Point2 mu2 = o.m2();
    const auto laws = o.laws();
    const DriftGeometry g = drift_geometry(mu1, mu2);

    json geom;
    geom["mu1"] = point_json(mu1);
    geom["mu2"] = point_json(mu2);
    geom["theta1"] = g.theta1_defined ? json(g.theta1) : json(nullptr);
    geom["theta2"] = g.theta2_defined ? json(g.theta2) : json(nullptr);
    geom["theta0"] = g.theta0_defined ? json(g.theta0) : json(nullptr);
    if (g.theta0_defined) {
        geom["e_theta0_perp"] = point_json(g.e_theta0_perp);
        geom["chord_direction"] = point_json(g.chord_direction);
    }
    geom["longest_side"] = to_string(g.longest);
    geom["warnings"] = g.warnings;

    const std::vector<Point2> drifts{mu1, mu2};
    const LimitShape shape = limit_shape(drifts);
    json limit;
    limit["vertices"] = json::array();
    for (const Point2 v : shape.polygon.vertices()) limit["vertices"].push_back(point_json(v));
    limit["perimeter"] = shape.per;
    limit["diameter"] = shape.diam;

    json j;
    j["geometry"] = geom;
    j["A1"] = g.a1_holds;
    j["A2"] = g.a2_holds();
    j["limit"] = limit;
    j["cov1"] = cov_json(o.c1());
    j["cov2"] = cov_json(o.c2());
    try {
        j["sigma_L2"] = sigma_L2(laws[0], laws[1], g);
    } catch (const AssumptionViolation& e) {
        j["sigma_L2_reason"] = e.what();
    }
    try {
        j["sigma_D2"] = sigma_D2(laws[0], laws[1], g);
    } catch (const AssumptionViolation& e) {
        j["sigma_D2_reason"] = e.what();
    }
    return j;
}

// ---- oracle ----

DiscreteEnsembleSpec parse_oracle_spec(const json& j) {
    DiscreteEnsembleSpec spec;
    if (!j.contains("n") || !j.contains("walks")) throw std::runtime_error("oracle spec needs \"n\" and \"walks\"");
    spec.n = j.at("n").get<std::size_t>();
    for (const auto& w : j.at("walks")) {
        std::vector<WeightedStep> support;
        for (const auto& s : w.at("support")) {
            const auto step = s.at("step").get<std::vector<double>>();
            if (step.size() != 2) throw std::runtime_error("oracle spec: each step needs two coordinates");
            support.push_back({{step[0], step[1]}, s.at("p").get<double>()});
        }
        spec.walks.push_back(StepDistribution::discrete(std::move(support)));
    }
    return spec;
}

json functional_json(const MdsFunctionalReport& r) {
    return {{"mean", r.mean},
            {"variance", r.variance},
            {"sum_expected_squares", r.sum_expected_squares},
            {"max_pointwise_error", r.max_pointwise_error},
            {"variance_relative_error", r.variance_relative_error},
            {"max_abs_mean", r.max_abs_mean},
            {"max_abs_cross", r.max_abs_cross},
            {"max_resampling_cdf_gap", r.max_resampling_cdf_gap},
            {"passed", r.passed}};
}

int cmd_oracle(const std::string& path, int threads, std::ostream& out) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    DiscreteEnsembleSpec spec;
    try {
        spec = parse_oracle_spec(j);
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    const Parallelism par{threads};
    const ExactMoments exact = enumerate_exact(spec, par);
    const MdsReport r = mds_check(spec, par);
    json o;
    o["n"] = spec.n;
    o["walks"] = spec.walks.size();
    o["outcomes"] = r.outcomes;
    o["nested_evaluations"] = r.nested_evaluations;
    o["tolerance"] = r.tolerance;
    o["resampling_checked"] = r.resampling_checked;
    o["exact"] = {{"mean_L", exact.mean_L}, {"var_L", exact.var_L}, {"mean_D", exact.mean_D}, {"var_D", exact.var_D}};
    o["perimeter"] = functional_json(r.perimeter);
    o["diameter"] = functional_json(r.diameter);
    o["passed"] = r.passed;
    out << o.dump(2) << '\n';
    return r.passed ? kExitOk : kExitFailure;
}

// ---- plot ----

int cmd_plot(const std::string& input, const std::string& functional, const std::string& out_path, std::ostream& out) {
    const Timer timer;
    std::ifstream f(input);
    if (!f) throw std::runtime_error("cannot open " + input);
    const std::vector<GridCell> cells = read_grid_csv(f);
    const std::string svg = render_heatmap_svg(cells, functional[0], functional == "L" ? "perimeter" : "diameter");
    if (out_path.empty() || out_path == "-") {
        out << svg;
        return kExitOk;
    }
    const fs::path p(out_path);
    if (p.has_parent_path()) ensure_dir(p.parent_path());
    write_text(p, svg);
    Manifest m;
    m.command = "plot";
    m.config = {{"input", input}, {"functional", functional}, {"out", out_path}};
    m.argv = {"plot", "--input", fs::absolute(input).string(), "--functional", functional};
    m.outputs = {p.filename().string()};
    m.schemas = {{"input", "rwhull.grid-csv/1"}};
    write_manifest(fs::path(out_path + ".manifest.json"), m, timer.started(), timer.seconds());
    return kExitOk;
}

// ---- walk ----

struct WalkOptions {
    PairOptions pair;
    std::size_t steps = 1000;
    std::uint64_t seed = 0;
    std::uint32_t rep = 0;
    std::string out;
};

int cmd_walk(const WalkOptions& o, std::ostream& out) {
    const Timer timer;
    const auto laws = o.pair.laws();
    const Ensemble ens = generate_ensemble(laws, o.steps, o.seed, o.rep);
    const fs::path dir(o.out);
    ensure_dir(dir);
    {
        std::ostringstream csv;
        write_walks_csv(csv, ens);
        write_text(dir / "walks.csv", csv.str());
    }
    Manifest m;
    m.command = "walk";
    m.config = o.pair.to_json();
    m.config["steps"] = o.steps;
    m.config["seed"] = o.seed;
    m.config["rep"] = o.rep;
    m.config["out"] = o.out;
    m.seed = o.seed;
    m.argv = {"walk"};
    for (auto& a : o.pair.argv()) m.argv.push_back(a);
    for (auto& a : std::vector<std::string>{"--steps", std::to_string(o.steps), "--seed", std::to_string(o.seed),
                                            "--rep", std::to_string(o.rep)})
        m.argv.push_back(a);
    m.outputs = {"walks.csv"};
    m.schemas = {{"walks.csv", "rwhull.walks/1 step,k,x,y"}};
    write_manifest(dir / "manifest.json", m, timer.started(), timer.seconds());
    out << "wrote " << laws.size() << " walks of " << o.steps << " steps to " << dir.string() << '\n';
    return kExitOk;
}

// ---- replay ----

std::vector<std::string> replay_args(const std::string& manifest_path, const std::string& out_override) {
    std::ifstream f(manifest_path);
    if (!f) throw std::runtime_error("cannot open " + manifest_path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(manifest_path + ": " + e.what());
    }
    if (j.value("schema", "") != "rwhull.manifest/1") throw std::runtime_error(manifest_path + ": not a run manifest");
    auto args = j.at("argv").get<std::vector<std::string>>();
    const std::string command = j.at("command").get<std::string>();
    if (args.empty() || args.front() != command) throw std::runtime_error(manifest_path + ": argv does not match command");
    args.push_back("--out");
    args.push_back(out_override.empty() ? j.at("config").at("out").get<std::string>() : out_override);
    return args;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth);

int run_parsed(CLI::App& app, std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        err << "run with --help for usage\n";
        return kExitUsage;
    }
    return -1;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth) {
    CLI::App app{"Monte-Carlo lab for the convex hull of planar random walks"};
    app.name("rwhull");
    app.require_subcommand(1);
    app.set_config("--config", "", "INI file; keys are long option names inside a [command] section");
    app.set_version_flag("--version", kVersion);

    std::string hull_input;
    auto* hull = app.add_subcommand("hull", "Hull of a point list (x y per line) read from a file or stdin");
    hull->add_option("input", hull_input, "Point file; '-' or absent reads stdin");

    SimulateOptions sim;
    sim.out = default_out_dir();
    auto* simulate = app.add_subcommand("simulate", "Replicated perimeter and diameter samples of two Gaussian walks");
    sim.pair.add(simulate);
    simulate->add_option("--steps", sim.steps, "Steps per walk")->check(CLI::PositiveNumber)->capture_default_str();
    simulate->add_option("--reps", sim.reps, "Replications")->check(CLI::PositiveNumber)->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
    simulate->add_option("--out", sim.out, std::string("Output directory (default from ") + kOutDirEnv + ")")
        ->capture_default_str();
    simulate->add_option("--threads", sim.threads, "Worker threads; 0 uses the OpenMP default")
        ->check(CLI::NonNegativeNumber);

    GridOptions grd;
    grd.out = default_out_dir();
    auto* grid = app.add_subcommand("grid", "Normality p-value grid over isotropic variance pairs");
    grid->add_option("--mu1", grd.mu1, "Drift of walk 1 as x,y")->delimiter(',')->expected(2)->capture_default_str();
    grid->add_option("--mu2", grd.mu2, "Drift of walk 2 as x,y")->delimiter(',')->expected(2)->capture_default_str();
    grid->add_option("--sigmas", grd.sigmas, "Comma-separated variance values")
        ->delimiter(',')
        ->expected(1, 1 << 20)
        ->capture_default_str();
    grid->add_option("--reps", grd.reps, "Replications per experiment")->check(CLI::PositiveNumber)->capture_default_str();
    grid->add_option("--steps", grd.steps, "Steps per walk")->check(CLI::PositiveNumber)->capture_default_str();
    grid->add_option("--repeats", grd.repeats, "Experiments per cell")->check(CLI::PositiveNumber)->capture_default_str();
    grid->add_option("--seed", grd.seed, "Master seed")->capture_default_str();
    grid->add_option("--test", grd.test, "Normality test")
        ->check(CLI::IsMember({"ad", "lilliefors"}))
        ->capture_default_str();
    grid->add_flag("--mean-of-neglog", grd.mean_of_neglog, "Average -log p instead of taking -log of the mean p");
    grid->add_flag("!--no-svg", grd.svg, "Skip the heatmaps");
    grid->add_option("--out", grd.out, "Output directory")->capture_default_str();
    grid->add_option("--threads", grd.threads, "Worker threads; 0 uses the OpenMP default")
        ->check(CLI::NonNegativeNumber);

    PairOptions ver;
    auto* verify = app.add_subcommand("verify", "Drift geometry, limit shape and limiting variances as JSON");
    ver.add(verify);

    std::string oracle_spec;
    int oracle_threads = 0;
    auto* oracle = app.add_subcommand("oracle", "Exact enumeration and martingale-difference checks for discrete walks");
    oracle->add_option("spec", oracle_spec, "JSON file {\"n\":..,\"walks\":[{\"support\":[{\"step\":[x,y],\"p\":..}]}]}")
        ->required();
    oracle->add_option("--threads", oracle_threads, "Worker threads")->check(CLI::NonNegativeNumber);

    std::string plot_input;
    std::string plot_functional = "L";
    std::string plot_out;
    auto* plot = app.add_subcommand("plot", "SVG heatmap from a grid CSV");
    plot->add_option("--input", plot_input, "Grid CSV")->required();
    plot->add_option("--functional", plot_functional, "L or D")->check(CLI::IsMember({"L", "D"}))->capture_default_str();
    plot->add_option("--out", plot_out, "SVG path; '-' or absent writes stdout");

    WalkOptions wlk;
    wlk.out = default_out_dir();
    auto* walk = app.add_subcommand("walk", "Export one replication's walk paths as CSV");
    wlk.pair.add(walk);
    walk->add_option("--steps", wlk.steps, "Steps per walk")->check(CLI::PositiveNumber)->capture_default_str();
    walk->add_option("--seed", wlk.seed, "Master seed")->capture_default_str();
    walk->add_option("--rep", wlk.rep, "Replication index")->capture_default_str();
    walk->add_option("--out", wlk.out, "Output directory")->capture_default_str();

    std::string replay_manifest;
    std::string replay_out;
    auto* replay = app.add_subcommand("replay", "Rerun the command recorded in a manifest");
    replay->add_option("manifest", replay_manifest, "manifest.json")->required();
    replay->add_option("--out", replay_out, "Output location (default: the recorded one)");

    if (const int code = run_parsed(app, args, out, err); code >= 0) return code;

    try {
        if (hull->parsed()) return cmd_hull(hull_input, out);
        if (simulate->parsed()) return cmd_simulate(sim, out);
        if (grid->parsed()) return cmd_grid(grd, out);
        if (verify->parsed()) {
            out << verify_report(ver).dump(2) << '\n';
            return kExitOk;
        }
        if (oracle->parsed()) return cmd_oracle(oracle_spec, oracle_threads, out);
        if (plot->parsed()) return cmd_plot(plot_input, plot_functional, plot_out, out);
        if (walk->parsed()) return cmd_walk(wlk, out);
        if (replay->parsed()) {
            if (depth > 0) throw std::runtime_error("a manifest cannot replay another manifest");
            return dispatch(replay_args(replay_manifest, replay_out), out, err, depth + 1);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

// ---- heatmap ----

struct Rgb {
    double r, g, b;
};

Rgb mix(Rgb a, Rgb b, double t) {
    t = std::clamp(t, 0.0, 1.0);
    return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

std::string hex(Rgb c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(c.r)),
                  static_cast<int>(std::lround(c.g)), static_cast<int>(std::lround(c.b)));
    return buf;
}

constexpr Rgb kCoolLow{222, 235, 247};
constexpr Rgb kCoolHigh{49, 130, 189};
constexpr Rgb kWarmLow{254, 217, 118};
constexpr Rgb kWarmHigh{189, 0, 38};
constexpr const char* kMissing = "#bdbdbd";
constexpr double kThreshold = 2.0;

double neglog_ceiling() { return neglog(0.0); }

std::string cell_color(double v) {
    if (v <= kThreshold) return hex(mix(kCoolLow, kCoolHigh, v / kThreshold));
    // warm shades on a log scale between the threshold and the largest possible value
    const double t = std::log(v / kThreshold) / std::log(neglog_ceiling() / kThreshold);
    return hex(mix(kWarmLow, kWarmHigh, t));
}

std::string escape_xml(const std::string& s) {
    std::string o;
    for (const char c : s) {
        switch (c) {
            case '&': o += "&amp;"; break;
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '"': o += "&quot;"; break;
            default: o += c;
        }
    }
    return o;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::vector<Point2> parse_points(std::istream& in) {
    std::vector<Point2> pts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string a;
        std::string b;
        std::string extra;
        if (!(ss >> a)) continue;
        if (!(ss >> b) || (ss >> extra))
            throw std::runtime_error("line " + std::to_string(lineno) + ": expected two numbers");
        Point2 p;
        try {
            std::size_t ia = 0;
            std::size_t ib = 0;
            p = {std::stod(a, &ia), std::stod(b, &ib)};
            if (ia != a.size() || ib != b.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::logic_error&) {
            throw std::runtime_error("line " + std::to_string(lineno) + ": not a number");
        }
        if (!is_finite(p)) throw std::runtime_error("line " + std::to_string(lineno) + ": non-finite coordinate");
        pts.push_back(p);
    }
    if (pts.empty()) throw std::runtime_error("no points in input");
    return pts;
}

std::string hull_report(const std::vector<Point2>& points) {
    const ConvexPolygon hull = convex_hull(points);
    json j;
    j["vertices"] = json::array();
    for (const Point2 v : hull.vertices()) j["vertices"].push_back(point_json(v));
    j["perimeter"] = perimeter(hull);
    j["diameter"] = diameter(hull);
    j["area"] = area(hull);
    return j.dump(2);
}

std::string render_heatmap_svg(const std::vector<GridCell>& cells, char functional, const std::string& title) {
    if (functional != 'L' && functional != 'D') throw std::invalid_argument("functional must be L or D");
    if (cells.empty()) throw std::runtime_error("grid has no cells");
    std::vector<double> rows;
    std::vector<double> cols;
    for (const auto& c : cells) {
        rows.push_back(c.sigma1);
        cols.push_back(c.sigma2);
    }
    for (auto* v : {&rows, &cols}) {
        std::sort(v->begin(), v->end());
        v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    std::map<std::pair<std::size_t, std::size_t>, const GridCell*> at;
    for (const auto& c : cells) {
        const auto i = static_cast<std::size_t>(std::lower_bound(rows.begin(), rows.end(), c.sigma1) - rows.begin());
        const auto j = static_cast<std::size_t>(std::lower_bound(cols.begin(), cols.end(), c.sigma2) - cols.begin());
        if (!at.emplace(std::pair{i, j}, &c).second)
            throw std::runtime_error("grid has two cells for sigma1=" + format_double(c.sigma1) +
                                     " sigma2=" + format_double(c.sigma2));
    }
    if (at.size() != rows.size() * cols.size()) throw std::runtime_error("grid is not a complete sigma1 x sigma2 table");

    constexpr int cell = 56;
    constexpr int left = 110;
    constexpr int top = 96;
    constexpr int legend_w = 150;
    const int width = left + static_cast<int>(cols.size()) * cell + 30 + legend_w;
    const int height = std::max(top + static_cast<int>(rows.size()) * cell + 40, top + 240);

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    s << "<text x=\"" << left << "\" y=\"24\" font-size=\"15\">-log p, " << (functional == 'L' ? "L" : "D");
    if (!title.empty()) s << " (" << escape_xml(title) << ')';
    s << "</text>\n";
    s << "<text x=\"" << left + static_cast<int>(cols.size()) * cell / 2
      << "\" y=\"50\" font-size=\"13\" text-anchor=\"middle\">sigma2</text>\n";
    s << "<text x=\"22\" y=\"" << top + static_cast<int>(rows.size()) * cell / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 22 "
      << top + static_cast<int>(rows.size()) * cell / 2 << ")\">sigma1</text>\n";
    for (std::size_t j = 0; j < cols.size(); ++j)
        s << "<text x=\"" << left + static_cast<int>(j) * cell + cell / 2 << "\" y=\"" << top - 8
          << "\" font-size=\"11\" text-anchor=\"middle\">" << format_double(cols[j]) << "</text>\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
        s << "<text x=\"" << left - 8 << "\" y=\"" << top + static_cast<int>(i) * cell + cell / 2 + 4
          << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(rows[i]) << "</text>\n";

    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const GridCell& c = *at.at({i, j});
            const bool valid = functional == 'L' ? c.valid_L : c.valid_D;
            const double v = functional == 'L' ? c.neglog_L : c.neglog_D;
            const int x = left + static_cast<int>(j) * cell;
            const int y = top + static_cast<int>(i) * cell;
            const std::string fill = valid ? cell_color(v) : kMissing;
            s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
              << fill << "\" stroke=\"#ffffff\" data-neglog=\"" << (valid ? format_double(v) : "NA") << "\"/>\n";
            s << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
              << "\" font-size=\"10\" text-anchor=\"middle\" fill=\"" << (valid && v > 60 ? "#ffffff" : "#000000")
              << "\">" << (valid ? fixed2(v) : "NA") << "</text>\n";
        }
    }

    // legend: a cool bar for [0, 2] above a warm bar for (2, max]
    const int lx = left + static_cast<int>(cols.size()) * cell + 30;
    constexpr int bar_h = 100;
    constexpr int steps = 20;
    s << "<text x=\"" << lx << "\" y=\"" << top - 8 << "\" font-size=\"11\">-log p</text>\n";
    for (int k = 0; k < steps; ++k) {
        const double t = (static_cast<double>(k) + 0.5) / steps;
        const double warm = kThreshold * std::pow(neglog_ceiling() / kThreshold, 1.0 - t);
        s << "<rect x=\"" << lx << "\" y=\"" << top + k * bar_h / steps << "\" width=\"18\" height=\"" << bar_h / steps
          << "\" fill=\"" << cell_color(warm) << "\"/>\n";
        const double cool = kThreshold * (1.0 - t);
        s << "<rect x=\"" << lx << "\" y=\"" << top + bar_h + k * bar_h / steps << "\" width=\"18\" height=\""
          << bar_h / steps << "\" fill=\"" << cell_color(cool) << "\"/>\n";
    }
    s << "<text x=\"" << lx + 24 << "\" y=\"" << top + 10 << "\" font-size=\"10\">" << fixed2(neglog_ceiling())
      << "</text>\n";
    s << "<text x=\"" << lx + 24 << "\" y=\"" << top + bar_h + 4 << "\" font-size=\"10\">2 (p = 0.135)</text>\n";
    s << "<text x=\"" << lx + 24 << "\" y=\"" << top + 2 * bar_h << "\" font-size=\"10\">0</text>\n";
    s << "<rect x=\"" << lx << "\" y=\"" << top + 2 * bar_h + 14 << "\" width=\"18\" height=\"12\" fill=\"" << kMissing
      << "\"/>\n";
    s << "<text x=\"" << lx + 24 << "\" y=\"" << top + 2 * bar_h + 24 << "\" font-size=\"10\">NA</text>\n";
    s << "</svg>\n";
    return s.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err, 0);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace rwhull::cli
