#include "catmzi/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "catmzi/parallel.hpp"

namespace catmzi {

nlohmann::json to_json(const EstimateReport& r) {
    return nlohmann::json{{"estimates", r.estimates},
                          {"mean_estimate", r.mean_estimate},
                          {"sample_variance", r.sample_variance},
                          {"fisher_at_true", r.fisher_at_true},
                          {"crlb_variance", r.crlb_variance},
                          {"ratio", r.ratio}};
}

std::vector<std::pair<int, int>> sample_counts(const OutputDistribution& dist,
                                               long shots, CounterRng& rng) {
    if (shots < 1)
        throw ConfigError("sample_counts: shots must be at least 1");
    const int rows = static_cast<int>(dist.probs.rows());
    const int cols = static_cast<int>(dist.probs.cols());
    std::vector<double> cum(static_cast<std::size_t>(rows) * cols);
    double acc = 0.0;
    for (int n = 0; n < rows; ++n)
        for (int m = 0; m < cols; ++m) {
            acc += std::max(0.0, dist.probs(n, m));
            cum[static_cast<std::size_t>(n) * cols + m] = acc;
        }
    if (!(acc > 0))
        throw NumericalError("sample_counts: distribution has no mass");
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(shots));
    for (long s = 0; s < shots; ++s) {
        const double u = rng.next_double() * acc;
        const auto it = std::upper_bound(cum.begin(), cum.end(), u);
        const int idx = it == cum.end()
                            ? rows * cols - 1
                            : static_cast<int>(it - cum.begin());
        out.emplace_back(idx / cols, idx % cols);
    }
    return out;
}

LikelihoodScan::LikelihoodScan(const MziPropagator& prop, const ThetaGrid& grid,
                               double sigma, double p_floor)
    : grid_(grid) {
    if (grid.points < 2)
        throw ConfigError("theta grid: at least 2 points are required");
    if (!(grid.max > grid.min))
        throw ConfigError("theta grid: max must exceed min");
    if (sigma < 0)
        throw ConfigError("likelihood scan: sigma must be non-negative");
    const double neg_inf = -std::numeric_limits<double>::infinity();
    log_probs_.reserve(grid.points);
    for (int k = 0; k < grid.points; ++k) {
        OutputDistribution d = prop.distribution(grid.at(k));
        if (sigma > 0)
            d = blur_distribution(d, sigma);
        log_probs_.push_back(
            (d.probs > p_floor).select(d.probs.log(), neg_inf));
    }
    rows_ = static_cast<int>(log_probs_.front().rows());
    cols_ = static_cast<int>(log_probs_.front().cols());
}

double LikelihoodScan::estimate(
    const std::vector<std::pair<int, int>>& counts) const {
    if (counts.empty())
        throw ConfigError("ml_estimate: no observed counts");
    Eigen::ArrayXXd c = Eigen::ArrayXXd::Zero(rows_, cols_);
    for (const auto& [n, m] : counts) {
        if (n < 0 || n >= rows_ || m < 0 || m >= cols_)
            throw ConfigError("ml_estimate: observed count outside the table");
        c(n, m) += 1.0;
    }
    std::vector<std::pair<int, int>> cells;
    for (int j = 0; j < cols_; ++j)
        for (int i = 0; i < rows_; ++i)
            if (c(i, j) > 0)
                cells.emplace_back(i, j);
    const int npts = grid_.points;
    std::vector<double> like(npts);
    for (int k = 0; k < npts; ++k) {
        const auto& lp = log_probs_[k];
        double acc = 0.0;
        for (const auto& [n, m] : cells)
            acc += c(n, m) * lp(n, m);
        like[k] = acc;
    }
    // a -inf likelihood means some observed outcome is impossible there
    const double mid = 0.5 * (grid_.min + grid_.max);
    int best = -1;
    for (int k = 0; k < npts; ++k) {
        if (std::isinf(like[k]))
            continue;
        if (best < 0 || like[k] > like[best]) {
            best = k;
            continue;
        }
        if (like[k] == like[best] &&
            std::abs(grid_.at(k) - mid) < std::abs(grid_.at(best) - mid))
            best = k;
    }
    if (best < 0)
        throw NumericalError(
            "ml_estimate: no grid point explains every observed outcome");
    double est = grid_.at(best);
    if (best > 0 && best + 1 < npts && std::isfinite(like[best - 1]) &&
        std::isfinite(like[best + 1])) {
        const double d2 = like[best + 1] - 2.0 * like[best] + like[best - 1];
        if (d2 < 0) {
            est -= 0.5 * grid_.step() * (like[best + 1] - like[best - 1]) / d2;
            est = std::clamp(est, grid_.min, grid_.max);
        }
    }
    return est;
}

EstimateReport run_trials(const MziPropagator& prop,
                          const EstimationConfig& cfg) {
    if (cfg.trials < 2)
        throw ConfigError("run_trials: at least 2 trials are needed for a variance");
    if (cfg.shots < 1)
        throw ConfigError("run_trials: shots must be at least 1");
    const ThetaGrid& grid = cfg.theta_grid;
    if (grid.points < 3)
        throw ConfigError("run_trials: the theta grid needs at least 3 points");
    if (cfg.theta_true < grid.min || cfg.theta_true > grid.max)
        throw ConfigError("run_trials: theta_true must lie inside the grid");
    OutputDistribution truth = prop.distribution(cfg.theta_true);
    if (cfg.sigma > 0)
        truth = blur_distribution(truth, cfg.sigma);
    const LikelihoodScan scan(prop, grid, cfg.sigma, cfg.p_floor);
    EstimateReport rep;
    rep.estimates.assign(cfg.trials, 0.0);
    parallel_for(cfg.trials, [&](std::size_t i) {
        CounterRng rng = CounterRng::stream(cfg.seed, i);
        const auto counts = sample_counts(truth, cfg.shots, rng);
        rep.estimates[i] = scan.estimate(counts);
    });
    double mean = 0.0;
    for (double e : rep.estimates)
        mean += e;
    mean /= cfg.trials;
    double var = 0.0;
    for (double e : rep.estimates)
        var += (e - mean) * (e - mean);
    var /= cfg.trials - 1;
    rep.mean_estimate = mean;
    rep.sample_variance = var;
    CfiOptions copt;
    copt.sigma = cfg.sigma;
    copt.p_floor = cfg.p_floor;
    rep.fisher_at_true = cfi(prop, cfg.theta_true, copt);
    rep.crlb_variance = 1.0 / (static_cast<double>(cfg.shots) * rep.fisher_at_true);
    rep.ratio = rep.sample_variance / rep.crlb_variance;
    return rep;
}

EstimateReport run_trials(const InterferometerInput& input,
                          const EstimationConfig& cfg) {
    return run_trials(MziPropagator(input), cfg);
}

} // namespace catmzi
