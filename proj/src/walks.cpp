#include "rwhull/walks.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "rwhull/format.hpp"

namespace rwhull {

Cov2 rotate(const Cov2& c, double phi) {
    const double co = std::cos(phi);
    const double si = std::sin(phi);
    // R Sigma R^T with R = [[co, -si], [si, co]]
    const double a = c.xx, b = c.xy, d = c.yy;
    return {co * co * a - 2.0 * co * si * b + si * si * d,
            co * si * (a - d) + (co * co - si * si) * b,
            si * si * a + 2.0 * co * si * b + co * co * d};
}

StepDistribution StepDistribution::gaussian(Point2 mean, Cov2 c) {
    if (!is_finite(mean) || !std::isfinite(c.xx) || !std::isfinite(c.xy) || !std::isfinite(c.yy))
        throw std::invalid_argument("gaussian step: non-finite parameter");
    const double scale = std::max(std::abs(c.xx), std::abs(c.yy));
    const double det = c.xx * c.yy - c.xy * c.xy;
    if (c.xx < 0.0 || c.yy < 0.0 || det < -1e-12 * scale * scale)
        throw std::invalid_argument("gaussian step: covariance is not positive semidefinite");

    StepDistribution d;
    d.family_ = StepFamily::gaussian;
    d.mean_ = mean;
    d.cov_ = c;
    if (c.xx > 0.0 && det > 0.0) {
        const double l11 = std::sqrt(c.xx);
        const double l21 = c.xy / l11;
        const double l22 = std::sqrt(std::max(0.0, c.yy - l21 * l21));
        d.col0_ = {l11, l21};
        d.col1_ = {0.0, l22};
    } else {
        // singular: symmetric square root from the eigen-decomposition
        const double tr = c.xx + c.yy;
        const double disc = std::sqrt(std::max(0.0, 0.25 * (c.xx - c.yy) * (c.xx - c.yy) + c.xy * c.xy));
        const double l1 = std::max(0.0, 0.5 * tr + disc);
        const double l2 = std::max(0.0, 0.5 * tr - disc);
        Point2 v1{1.0, 0.0};
        if (c.xy != 0.0) v1 = Point2{l1 - c.yy, c.xy};
        else if (c.yy > c.xx) v1 = Point2{0.0, 1.0};
        v1 = (1.0 / norm(v1)) * v1;
        const Point2 v2 = perp(v1);
        const double s1 = std::sqrt(l1);
        const double s2 = std::sqrt(l2);
        // A = V diag(s) V^T
        d.col0_ = {s1 * v1.x * v1.x + s2 * v2.x * v2.x, s1 * v1.y * v1.x + s2 * v2.y * v2.x};
        d.col1_ = {s1 * v1.x * v1.y + s2 * v2.x * v2.y, s1 * v1.y * v1.y + s2 * v2.y * v2.y};
    }
    return d;
}

StepDistribution StepDistribution::discrete(std::vector<WeightedStep> support) {
    if (support.empty()) throw std::invalid_argument("discrete step: empty support");
    double total = 0.0;
    for (const auto& w : support) {
        if (!is_finite(w.step) || !std::isfinite(w.probability) || !(w.probability > 0.0))
            throw std::invalid_argument("discrete step: probabilities must be positive and finite");
        total += w.probability;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("discrete step: probabilities do not sum to 1");

    StepDistribution d;
    d.family_ = StepFamily::discrete;
    Point2 mean;
    for (const auto& w : support) mean += w.probability * w.step;
    Cov2 c;
    for (const auto& w : support) {
        const Point2 z = w.step - mean;
        c.xx += w.probability * z.x * z.x;
        c.xy += w.probability * z.x * z.y;
        c.yy += w.probability * z.y * z.y;
    }
    d.mean_ = mean;
    d.cov_ = c;
    double acc = 0.0;
    for (const auto& w : support) {
        acc += w.probability;
        d.cumulative_.push_back(acc);
    }
    d.support_ = std::move(support);
    return d;
}

StepDistribution StepDistribution::constant(Point2 step) {
    return discrete({{step, 1.0}});
}

bool StepDistribution::is_deterministic() const {
    if (family_ == StepFamily::discrete) return support_.size() == 1;
    return cov_.xx == 0.0 && cov_.xy == 0.0 && cov_.yy == 0.0;
}

Point2 StepDistribution::sample(RngStream& rng) const {
    if (family_ == StepFamily::gaussian) {
        const double n1 = rng.normal();
        const double n2 = rng.normal();
        return {mean_.x + col0_.x * n1 + col1_.x * n2, mean_.y + col0_.y * n1 + col1_.y * n2};
    }
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), support_.size() - 1);
    return support_[idx].step;
}

Point2 sample_step(const StepDistribution& dist, RngStream& rng) { return dist.sample(rng); }

WalkPath walk_from_increments(std::vector<Point2> increments) {
    WalkPath w;
    w.partial_sums.reserve(increments.size() + 1);
    w.partial_sums.push_back({0.0, 0.0});
    for (const auto& z : increments) w.partial_sums.push_back(w.partial_sums.back() + z);
    w.increments = std::move(increments);
    return w;
}

WalkPath generate_walk(const StepDistribution& dist, std::size_t n, RngStream& rng) {
    std::vector<Point2> z(n);
    for (auto& step : z) step = dist.sample(rng);
    return walk_from_increments(std::move(z));
}

Ensemble generate_ensemble(std::span<const StepDistribution> laws, std::size_t n, std::uint64_t seed,
                           std::uint32_t replication) {
    Ensemble ens;
    ens.laws.assign(laws.begin(), laws.end());
    ens.lineage = {seed, replication};
    ens.walks.reserve(laws.size());
    for (std::size_t k = 0; k < laws.size(); ++k) {
        RngStream rng(seed, {replication, static_cast<std::uint32_t>(k)});
        ens.walks.push_back(generate_walk(laws[k], n, rng));
    }
    return ens;
}

Ensemble resample_with(const Ensemble& ens, std::size_t i, std::span<const Point2> replacements) {
    const std::size_t n = ens.steps();
    if (i < 1 || i > n) throw std::domain_error("resample index out of range");
    if (replacements.size() != ens.walks.size())
        throw std::invalid_argument("one replacement increment per walk is required");
    Ensemble out = ens;
    for (std::size_t k = 0; k < out.walks.size(); ++k) {
        auto& w = out.walks[k];
        const Point2 shift = replacements[k] - w.increments[i - 1];
        w.increments[i - 1] = replacements[k];
        for (std::size_t j = i; j <= n; ++j) w.partial_sums[j] = ens.walks[k].partial_sums[j] + shift;
    }
    return out;
}

Ensemble resample_at(const Ensemble& ens, std::size_t i, RngStream& rng) {
    if (i < 1 || i > ens.steps()) throw std::domain_error("resample index out of range");
    std::vector<Point2> fresh;
    fresh.reserve(ens.laws.size());
    for (const auto& law : ens.laws) fresh.push_back(law.sample(rng));
    return resample_with(ens, i, fresh);
}

std::vector<Point2> ensemble_points(const Ensemble& ens, std::size_t upto) {
    if (upto > ens.steps()) throw std::domain_error("hull_of_ensemble: upto exceeds walk length");
    std::vector<Point2> pts;
    pts.reserve(1 + ens.walks.size() * upto);
    pts.push_back({0.0, 0.0});
    for (const auto& w : ens.walks)
        pts.insert(pts.end(), w.partial_sums.begin() + 1, w.partial_sums.begin() + 1 + static_cast<std::ptrdiff_t>(upto));
    return pts;
}

ConvexPolygon hull_of_ensemble(const Ensemble& ens, std::size_t upto) {
    return convex_hull(ensemble_points(ens, upto));
}

ConvexPolygon hull_of_ensemble(const Ensemble& ens) { return hull_of_ensemble(ens, ens.steps()); }

void write_walks_csv(std::ostream& out, const Ensemble& ens) {
    out << "step,k,x,y\n";
    for (std::size_t k = 0; k < ens.walks.size(); ++k) {
        const auto& s = ens.walks[k].partial_sums;
        for (std::size_t j = 0; j < s.size(); ++j)
            out << j << ',' << (k + 1) << ',' << format_double(s[j].x) << ',' << format_double(s[j].y) << '\n';
    }
}

}  // namespace rwhull
