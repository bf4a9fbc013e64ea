#include "rwhull/montecarlo.hpp"

namespace rwhull {

SampleSet run_experiment_serial(const ExperimentConfig& cfg) {
    cfg.validate();
    SampleSet out;
    out.config = cfg;
    for (std::uint32_t rep = 0; rep < cfg.reps; ++rep) {
        const Ensemble ens = generate_ensemble(cfg.walks, cfg.steps, cfg.seed, rep);
        const ConvexPolygon hull = hull_of_ensemble(ens);
        out.records.push_back({rep, perimeter(hull), diameter(hull)});
    }
    out.L = summarize(out.perimeters());
    out.D = summarize(out.diameters());
    return out;
}

}  // namespace rwhull
