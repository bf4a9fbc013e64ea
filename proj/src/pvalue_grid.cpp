#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rwhull/format.hpp"
#include "rwhull/montecarlo.hpp"
#include "rwhull/rng.hpp"
#include "rwhull/stats.hpp"

namespace rwhull {

namespace {

struct Aggregate {
    bool valid = true;
    double avg_p = 0.0;
    double neglog = 0.0;
};

Aggregate aggregate(const std::vector<double>& p, bool valid, bool mean_of_neglog) {
    Aggregate a;
    a.valid = valid && !p.empty();
    if (!a.valid) return a;
    a.avg_p = compensated_sum(p) / static_cast<double>(p.size());
    if (mean_of_neglog) {
        CompensatedSum s;
        for (const double v : p) s.add(neglog(v));
        a.neglog = s.value() / static_cast<double>(p.size());
    } else {
        a.neglog = neglog(a.avg_p);
    }
    return a;
}

std::string field(bool valid, double v) { return valid ? format_double(v) : "NA"; }

double parse_field(const std::string& s, bool& valid) {
    if (s == "NA") {
        valid = false;
        return 0.0;
    }
    return std::stod(s);
}

}  // namespace

std::uint64_t cell_seed(std::uint64_t master, double sigma1, double sigma2, std::size_t repeat) {
    return derive_seed(master, {std::bit_cast<std::uint64_t>(sigma1), std::bit_cast<std::uint64_t>(sigma2), repeat});
}

PValueGrid pvalue_grid(Point2 mu1, Point2 mu2, const GridSpec& spec, Parallelism par) {
    if (spec.sigma_values.empty()) throw std::invalid_argument("grid needs at least one sigma value");
    if (spec.repeats < 1) throw std::invalid_argument("grid needs at least one repeat");
    for (const double s : spec.sigma_values)
        if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("sigma values must be finite and >= 0");

    PValueGrid grid;
    grid.spec = spec;
    grid.mu1 = mu1;
    grid.mu2 = mu2;
    for (const double s1 : spec.sigma_values) {
        for (const double s2 : spec.sigma_values) {
            GridCell cell;
            cell.sigma1 = s1;
            cell.sigma2 = s2;
            for (std::size_t r = 0; r < spec.repeats; ++r) {
                ExperimentConfig cfg;
                cfg.walks = {StepDistribution::gaussian(mu1, Cov2::isotropic(s1)),
                             StepDistribution::gaussian(mu2, Cov2::isotropic(s2))};
                cfg.steps = spec.steps;
                cfg.reps = spec.reps;
                cfg.seed = cell_seed(spec.seed, s1, s2, r);
                const SampleSet samples = run_experiment(cfg, par);
                try {
                    cell.p_L.push_back(normality_pvalue(samples.perimeters(), spec.test));
                } catch (const DegenerateSample&) {
                    cell.valid_L = false;
                }
                try {
                    cell.p_D.push_back(normality_pvalue(samples.diameters(), spec.test));
                } catch (const DegenerateSample&) {
                    cell.valid_D = false;
                }
            }
            const Aggregate aL = aggregate(cell.p_L, cell.valid_L, spec.mean_of_neglog);
            const Aggregate aD = aggregate(cell.p_D, cell.valid_D, spec.mean_of_neglog);
            cell.valid_L = aL.valid;
            cell.valid_D = aD.valid;
            cell.avg_p_L = aL.avg_p;
            cell.neglog_L = aL.neglog;
            cell.avg_p_D = aD.avg_p;
            cell.neglog_D = aD.neglog;
            grid.cells.push_back(std::move(cell));
        }
    }
    return grid;
}

void write_grid_csv(std::ostream& out, const PValueGrid& grid) {
    out << "sigma1,sigma2,avg_p_L,neglog_L,avg_p_D,neglog_D\n";
    for (const auto& c : grid.cells) {
        out << format_double(c.sigma1) << ',' << format_double(c.sigma2) << ',' << field(c.valid_L, c.avg_p_L) << ','
            << field(c.valid_L, c.neglog_L) << ',' << field(c.valid_D, c.avg_p_D) << ','
            << field(c.valid_D, c.neglog_D) << '\n';
    }
}

std::vector<GridCell> read_grid_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("grid CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "sigma1,sigma2,avg_p_L,neglog_L,avg_p_D,neglog_D")
        throw std::runtime_error("grid CSV: unexpected header '" + line + "'");
    std::vector<GridCell> cells;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string item; std::getline(ss, item, ',');) f.push_back(item);
        if (f.size() != 6) throw std::runtime_error("grid CSV: line " + std::to_string(lineno) + " needs 6 fields");
        GridCell c;
        try {
            c.sigma1 = std::stod(f[0]);
            c.sigma2 = std::stod(f[1]);
            c.avg_p_L = parse_field(f[2], c.valid_L);
            c.neglog_L = parse_field(f[3], c.valid_L);
            c.avg_p_D = parse_field(f[4], c.valid_D);
            c.neglog_D = parse_field(f[5], c.valid_D);
        } catch (const std::logic_error&) {
            throw std::runtime_error("grid CSV: line " + std::to_string(lineno) + " has a non-numeric field");
        }
        cells.push_back(c);
    }
    return cells;
}

std::string grid_json(const PValueGrid& grid) {
    nlohmann::json j;
    j["schema"] = "rwhull.grid/1";
    j["mu1"] = {grid.mu1.x, grid.mu1.y};
    j["mu2"] = {grid.mu2.x, grid.mu2.y};
    j["sigma_values"] = grid.spec.sigma_values;
    j["reps"] = grid.spec.reps;
    j["steps"] = grid.spec.steps;
    j["repeats"] = grid.spec.repeats;
    j["seed"] = grid.spec.seed;
    j["rng"] = RngStream::algorithm;
    j["test"] = to_string(grid.spec.test);
    j["averaging"] = grid.spec.mean_of_neglog ? "mean-of-neglog" : "neglog-of-mean-p";
    j["cells"] = nlohmann::json::array();
    for (const auto& c : grid.cells) {
        nlohmann::json cj{{"sigma1", c.sigma1}, {"sigma2", c.sigma2}, {"valid_L", c.valid_L}, {"valid_D", c.valid_D}};
        cj["p_L"] = c.p_L;
        cj["p_D"] = c.p_D;
        if (c.valid_L) {
            cj["avg_p_L"] = c.avg_p_L;
            cj["neglog_L"] = c.neglog_L;
        }
        if (c.valid_D) {
            cj["avg_p_D"] = c.avg_p_D;
            cj["neglog_D"] = c.neglog_D;
        }
        j["cells"].push_back(cj);
    }
    return j.dump(2);
}

}  // namespace rwhull
