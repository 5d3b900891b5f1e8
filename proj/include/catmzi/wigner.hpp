#pragma once

#include "catmzi/fock.hpp"

namespace catmzi {

// Rectangular grid in the complex plane, inclusive of both ends,
// `points` samples per axis.
struct PhaseGrid {
    double re_min = -1.0;
    double re_max = 1.0;
    double im_min = -1.0;
    double im_max = 1.0;
    int points = 201;

    static PhaseGrid square(double extent, int points);
    double re_step() const { return (re_max - re_min) / (points - 1); }
    double im_step() const { return (im_max - im_min) / (points - 1); }
    double re_at(int i) const { return re_min + i * re_step(); }
    double im_at(int j) const { return im_min + j * im_step(); }
    bool operator==(const PhaseGrid&) const = default;
};

// Symmetric grid wide enough for a state of mean occupation nbar.
PhaseGrid default_grid(double nbar);

// values(i, j) = W(re_at(i) + i im_at(j)), normalized so the integral
// over the plane is 1 (vacuum peaks at 2/pi).
struct WignerMap {
    PhaseGrid grid;
    Eigen::ArrayXXd values;
};

// Wigner function of a single-mode state, evaluated through the
// displaced-parity form W(a) = (2/pi) Tr[rho D(a) P D(-a)], folded to
// (2/pi) Tr[rho D(2a) P].  Both trace indices stay inside the state's
// own Fock support, so the displacement matrix elements are exact for
// any |a|; exponentiating a truncated generator instead would reflect
// off the truncation edge and corrupt the far field.
WignerMap wigner(const FockVector& psi, const PhaseGrid& grid);
WignerMap wigner(const DensityMatrix& rho, const PhaseGrid& grid);
WignerMap wigner(const StateVariant& state, const PhaseGrid& grid);

// Discretized integral of the map over its grid.
double wigner_mass(const WignerMap& map);

// pi h_re h_im sum W W': equals |<psi|psi'>|^2 for pure states when
// the grid captures both.  The maps must share one grid.
double wigner_overlap(const WignerMap& a, const WignerMap& b);

// Dominant direction of the map's gradient energy, in radians within
// [0, pi), measured from the re axis.  Central differences feed the
// structure tensor; its leading eigenvector is the answer.  Flat and
// direction-free (isotropic) maps are rejected.
double gradient_direction(const WignerMap& map);

} // namespace catmzi
