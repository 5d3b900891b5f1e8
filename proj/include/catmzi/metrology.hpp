#pragma once

#include <vector>

#include "catmzi/fock.hpp"
#include "catmzi/json_io.hpp"
#include "catmzi/jy.hpp"

namespace catmzi {

// Two-mode interferometer feed: the prepared light in port a, a
// coherent reference beta = beta0 e^{i phi_beta} in port b.
struct InterferometerInput {
    StateVariant port_a;
    cd beta = 0.0;
    int nb_cutoff = -1;  // <= 0 selects default_cutoff(|beta|^2)
    int dim_guard = 4096;
};

// Photon-counting statistics at the interferometer output.  After
// blurring the count axes extend beyond the state cutoffs.
struct OutputDistribution {
    double theta = 0.0;
    Eigen::ArrayXXd probs; // probs(n, m), n = port-a count
    bool blurred = false;
    double sigma = 0.0;
};

struct FisherReport {
    double theta = 0.0;
    double qfi = 0.0;
    double cfi = 0.0;
    long repetitions = 1;
    double crlb = 0.0; // 1 / sqrt(repetitions * qfi)
};

FisherReport make_fisher_report(double theta, double qfi, double cfi,
                                long repetitions);
nlohmann::json to_json(const FisherReport& r);

// Spectral form of the interferometer input: weights w_i and embedded
// two-mode eigenvectors v_i (x) |beta> of the port-a state, plus the
// J_y block eigensystem for the combined cutoffs.  Rotations and
// distributions for any theta reuse this decomposition.
class MziPropagator {
public:
    explicit MziPropagator(const InterferometerInput& input);

    int na() const { return na_; }
    int nb() const { return nb_; }
    const JyOperator& jy() const { return jy_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<FockVector>& vectors() const { return vectors_; }

    OutputDistribution distribution(double theta) const;
    // p and the analytic d p / d theta, both over the (n, m) table
    void distribution_and_derivative(double theta, Eigen::ArrayXXd& p,
                                     Eigen::ArrayXXd& dp) const;

private:
    int na_ = 0;
    int nb_ = 0;
    std::vector<double> weights_;
    std::vector<FockVector> vectors_;
    JyOperator jy_;
};

OutputDistribution output_distribution(const InterferometerInput& input,
                                       double theta);

// Gaussian detector-resolution blur: convolution of the count table
// with exp(-(dn^2 + dm^2) / 2 sigma^2), kernel truncated at
// ceil(6 sigma), count axes extended upward by the same amount,
// globally renormalized.  sigma = 0 returns the input unchanged.
OutputDistribution blur_distribution(const OutputDistribution& dist,
                                     double sigma);

struct CfiOptions {
    double sigma = 0.0;
    double p_floor = 1e-14; // outcomes below this are skipped
};

// Classical Fisher information of photon counting at phase theta,
// using the analytic derivative; with sigma > 0 both the distribution
// and its derivative pass through the blur (with the correct
// derivative of the global normalization).
double cfi(const MziPropagator& prop, double theta, const CfiOptions& = {});
double cfi(const InterferometerInput& input, double theta, const CfiOptions& = {});

// One anti-diagonal n + m = total of a count distribution, re-indexed
// by delta_n = n - m (photon-number difference at fixed total).
struct SliceRow {
    int total = 0;
    double theta = 0.0;
    std::vector<int> delta_n;
    std::vector<double> p;
};

SliceRow fixed_total_slice(const OutputDistribution& dist, int total);

} // namespace catmzi
