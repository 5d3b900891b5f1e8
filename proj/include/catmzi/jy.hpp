#pragma once

#include <vector>

#include "catmzi/fock.hpp"

namespace catmzi {

// One total-photon-number block of J_y.  Basis state k of the block is
// |n_lo + k, total - n_lo - k>.
struct JyBlock {
    int total = 0;
    int n_lo = 0;
    Eigen::VectorXd evals;
    Mat evecs;
};

// J_y = (a^dag b - b^dag a) / 2i on the truncated two-mode space.  The
// operator conserves total photon number, so it is assembled and
// diagonalized block by block; rotations exp(-i theta J_y) reuse the
// cached eigensystems.
class JyOperator {
public:
    static JyOperator build(int na, int nb);

    int na() const { return na_; }
    int nb() const { return nb_; }

    // J_y |psi>
    FockVector apply(const FockVector& psi) const;

    // exp(-i theta J_y) |psi>
    FockVector rotate(const FockVector& psi, double theta) const;

    // exp(-i theta J_y) rho exp(+i theta J_y) for a two-mode density
    DensityMatrix rotate(const DensityMatrix& rho, double theta) const;

    // <J_y> and Var(J_y) in a (normalized) two-mode state
    double expectation(const FockVector& psi) const;
    double variance(const FockVector& psi) const;

    // Full matrix; intended for small cutoffs and cross-checks.
    Mat dense() const;

private:
    int na_ = 0;
    int nb_ = 0;
    std::vector<JyBlock> blocks_;

    void check_shape(const FockVector& psi) const;
};

// Beam-splitter-sandwiched phase shift of a Mach-Zehnder
// interferometer acting as exp(-i theta J_y).  Convenience wrapper
// that builds the operator for the state's cutoffs on the fly.
FockVector mzi_transform(const FockVector& psi, double theta);
DensityMatrix mzi_transform(const DensityMatrix& rho, double theta);

} // namespace catmzi
