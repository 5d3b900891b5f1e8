#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "catmzi/metrology.hpp"
#include "catmzi/rng.hpp"

namespace catmzi {

// Uniform candidate grid for the phase estimate, both ends inclusive.
struct ThetaGrid {
    double min = 0.0;
    double max = 0.25 * M_PI;
    int points = 512;

    double step() const { return (max - min) / (points - 1); }
    double at(int k) const { return min + k * step(); }
};

struct EstimationConfig {
    double theta_true = 0.05;
    long shots = 1000;   // photon-counting events per trial
    int trials = 200;    // independent repetitions of the experiment
    ThetaGrid theta_grid;
    std::uint64_t seed = 1;
    double sigma = 0.0;  // detector blur applied to every distribution
    double p_floor = 1e-14;
};

struct EstimateReport {
    std::vector<double> estimates;
    double mean_estimate = 0.0;
    double sample_variance = 0.0;
    double fisher_at_true = 0.0; // classical, at theta_true
    double crlb_variance = 0.0;  // 1 / (shots * fisher_at_true)
    double ratio = 0.0;          // sample_variance / crlb_variance
};

nlohmann::json to_json(const EstimateReport& r);

// Draws `shots` (n, m) outcomes by inverse transform over the
// flattened count table.
std::vector<std::pair<int, int>> sample_counts(const OutputDistribution& dist,
                                               long shots, CounterRng& rng);

// Log-probability tables across a theta grid, built once and shared
// by every trial.  Outcomes below p_floor get log p = -inf, which
// marks that theta invalid for any sample containing the outcome.
class LikelihoodScan {
public:
    LikelihoodScan(const MziPropagator& prop, const ThetaGrid& grid,
                   double sigma = 0.0, double p_floor = 1e-14);

    const ThetaGrid& grid() const { return grid_; }

    // Maximum-likelihood phase for the observed counts: argmax of the
    // log likelihood over the valid grid points (exact ties resolve
    // toward the grid midpoint), then one parabolic refinement step
    // through the two neighbors, clamped to the grid.  Throws
    // NumericalError when no grid point explains every outcome.
    double estimate(const std::vector<std::pair<int, int>>& counts) const;

private:
    ThetaGrid grid_;
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Eigen::ArrayXXd> log_probs_;
};

// Repeated-trial Monte Carlo of the maximum-likelihood estimator,
// with the trial index seeding an independent random stream so the
// result does not depend on scheduling.
EstimateReport run_trials(const MziPropagator& prop,
                          const EstimationConfig& cfg);
EstimateReport run_trials(const InterferometerInput& input,
                          const EstimationConfig& cfg);

} // namespace catmzi
