#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "catmzi/errors.hpp"

namespace catmzi {

using cd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// State vector over one or two truncated Fock modes.  Cutoffs are the
// largest retained occupation number, so mode a has na+1 levels.
// Two-mode amplitudes are stored row-major with mode a slowest:
//   amps[n * (nb + 1) + m] = <n, m | psi>.
struct FockVector {
    int modes = 1;
    int na = 0;
    int nb = 0; // meaningful only when modes == 2
    Vec amps;

    int dim_a() const { return na + 1; }
    int dim_b() const { return modes == 2 ? nb + 1 : 1; }
    int dim() const { return dim_a() * dim_b(); }
    int index(int n, int m = 0) const { return n * dim_b() + m; }

    double norm2() const { return amps.squaredNorm(); }
    // Rescales to unit norm; zero-norm states cannot be normalized.
    void normalize();
};

// Subsystem layout of a density matrix.  atom_field pairs a two-level
// atom (slow index, b=0 ground / c=1 excited) with one field mode;
// two_mode_field pairs field modes a (slow) and b.
enum class Structure { field, atom_field, two_mode_field };

struct DensityMatrix {
    Structure structure = Structure::field;
    int na = 0; // field cutoff (cavity / mode a)
    int nb = 0; // second field cutoff, two_mode_field only
    Mat rho;

    int dim_slow() const;
    int dim_fast() const;
    int dim() const { return static_cast<int>(rho.rows()); }

    double trace_real() const { return rho.trace().real(); }
    // max |rho - rho^dagger| entrywise, 0 for exactly Hermitian input
    double hermiticity_error() const;
    double min_eigenvalue() const;
};

// A state that may be a vector or a density matrix.
using StateVariant = std::variant<FockVector, DensityMatrix>;

// Spectral weights and eigenvectors of a single-mode state, keeping
// weights above `floor`.  A state vector yields one unit-weight pair.
// Eigenvalues below -1e-10 reject the input as non-positive.
std::pair<std::vector<double>, std::vector<Vec>>
state_eigenpairs(const StateVariant& state, double floor = 1e-14);

// |n> with the given cutoff.
FockVector fock_basis(int n, int cutoff);

// Coherent state |alpha> truncated at `cutoff` and renormalized.  The
// amplitudes follow C_{n+1} = C_n * alpha / sqrt(n+1) seeded with
// C_0 = exp(-|alpha|^2 / 2).  If `discarded_mass` is given it receives
// the probability the truncation removed from the untruncated state.
FockVector coherent_state(cd alpha, int cutoff,
                          double* discarded_mass = nullptr);

// Warn threshold used by callers that check discarded coherent mass.
inline constexpr double kCoherentTailWarn = 1e-10;

// Smallest cutoff that keeps the discarded coherent mass negligible
// for mean occupation nbar: ceil(nbar + 6 sqrt(nbar) + 10).
int default_cutoff(double nbar);

// Probability mass of a Poisson(nbar) distribution above `cutoff`.
double poisson_tail(double nbar, int cutoff);

// Probability held by the cutoff shell of the stored, normalized
// state: the n = na (and m = nb) boundary occupations.  A large value
// means the truncation is biting.
double truncation_tail_mass(const FockVector& psi);
double truncation_tail_mass(const DensityMatrix& rho);

// Kronecker product |a> (x) |b> of two single-mode vectors, mode a slow.
// Refuses products beyond `max_dim` total amplitudes.
FockVector tensor_product(const FockVector& a, const FockVector& b,
                          int max_dim = 4096);

// Rank-one density |psi><psi| for a single- or two-mode vector.
DensityMatrix pure_density(const FockVector& psi);

enum class Keep { slow, fast };

// Traces out one subsystem of a bipartite density matrix and returns
// the reduced state of the other.  atom_field supports only
// Keep::fast (the field); the bare atom is not a Fock mode.
DensityMatrix partial_trace(const DensityMatrix& rho, Keep keep);

// <n> of a single-mode vector or density, or of one mode of a
// two-mode vector (mode 0 = a, 1 = b).
double mean_occupation(const FockVector& psi, int mode = 0);
double mean_occupation(const DensityMatrix& rho);

// Overlap fidelities.  Pure/pure is |<a|b>|^2; pure/mixed is
// <psi|rho|psi>; mixed/mixed is the Uhlmann fidelity
// (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const FockVector& a, const FockVector& b);
double fidelity(const FockVector& psi, const DensityMatrix& rho);
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

} // namespace catmzi
