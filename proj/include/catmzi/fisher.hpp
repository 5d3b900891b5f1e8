#pragma once

#include "catmzi/metrology.hpp"

namespace catmzi {

// Quantum Fisher information for the phase generated by J_y.

// Pure two-mode probe: F = 4 Var(J_y).
double qfi_pure(const FockVector& psi, const JyOperator& jy);
double qfi_pure(const FockVector& psi);

// Spectral form over the eigenpairs {w_i, |i>} of the probe state:
//   F = sum_i 4 w_i <i|J^2|i> - sum_i 4 w_i <i|J|i>^2
//       - sum_{i!=j} 8 w_i w_j / (w_i + w_j) |<i|J|j>|^2
// restricted to the retained pairs; cross terms with
// w_i + w_j <= rank_tolerance are dropped.
double qfi_from_eigenpairs(const std::vector<double>& weights,
                           const std::vector<FockVector>& vectors,
                           const JyOperator& jy,
                           double rank_tolerance = 1e-12);

// Brute-force route through the full eigendecomposition of a two-mode
// density matrix.  Cubic in the dimension; meant for small cutoffs
// and cross-checks.
double qfi_mixed(const DensityMatrix& rho, double rank_tolerance = 1e-12);

// Production route: the propagator already holds the probe in
// spectral form.
double qfi(const MziPropagator& prop, double rank_tolerance = 1e-12);
double qfi(const InterferometerInput& input, double rank_tolerance = 1e-12);

// Closed-form benchmarks for the cat (x) coherent probe with mean
// occupations n_alpha and n_beta and preparation phase u = u0*t.
enum class ApproxFormula {
    opt,      // reference phase at the cat's symmetry point:
              //   F = n_alpha + n_beta + 4 n_alpha n_beta sin^2(u/2)
    phase0,   // reference phase zero:
              //   F = n_alpha + n_beta + n_alpha n_beta sin^2(u)
    lossy_fit // phase0 with the loss-induced envelope
              //   exp(-(2/3)(t/tau)^3), tau = (kappa u0^2 n_alpha)^(-1/3)
};

struct ApproxParams {
    double n_alpha = 0.0;
    double n_beta = 0.0;
    double u0t = 0.0;
    double kappa = 0.0; // lossy_fit only
    double u0 = 0.0;    // lossy_fit only, converts u0t to a time
};

double qfi_approx(ApproxFormula formula, const ApproxParams& p);

// Collapse time of the lossy envelope.
double lossy_tau(double kappa, double u0, double n_alpha);

struct PhaseOptimum {
    double phi_beta = 0.0;
    double qfi = 0.0;
};

// Scans the reference-beam phase phi_beta over `grid_size` points of
// [0, 2pi) and returns the maximizing phase (ties resolve to the
// smallest phase) together with the attained value.
PhaseOptimum optimize_phase_beta(const StateVariant& port_a, double beta0,
                                 int grid_size = 64, int nb_cutoff = -1);

} // namespace catmzi
