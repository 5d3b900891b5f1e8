#pragma once

#include <nlohmann/json.hpp>

#include "catmzi/fock.hpp"
#include "catmzi/json_io.hpp"
#include "catmzi/lindblad.hpp"

namespace catmzi {

struct PrepParams {
    cd alpha;          // initial coherent amplitude of the cavity
    double u0 = 0.0;   // dispersive shift rate
    double t = 0.0;    // interaction time; the physics depends on u0*t
    double kappa = 0.0; // cavity loss rate (lossy preparation only)
    int cutoff = -1;   // <= 0 selects default_cutoff(|alpha|^2)
};

// Post-selected cavity state plus the probability of keeping the run.
struct PreparedState {
    StateVariant light;
    double success_probability = 0.0;
};

int resolve_cutoff(const PrepParams& p);

// Closed-form probability of finding the atom in |b> after the
// dispersive interaction and the second pi/2 pulse:
//   A = (1 - exp(n_a (cos u - 1)) cos(n_a sin u)) / 2,  u = u0 t.
double ideal_success_probability(double n_alpha, double u0t);

// Loss-free preparation.  The kept branch has amplitudes
// -i C_n e^{-i n u/2} sin(n u/2) before normalization; the squared
// norm of that branch is the success probability.  u = 0 (mod 2pi)
// leaves nothing in the post-selected branch and is rejected.
PreparedState prepare_ideal(const PrepParams& p);

// Same state built the other way, as a normalized difference of two
// coherent states |alpha e^{-i u}> - |alpha>; used to cross-check
// prepare_ideal.
FockVector cat_reference(const PrepParams& p);

// Preparation with cavity loss: evolves the atom (x) field density
// matrix under the dispersive Hamiltonian and the photon-loss
// dissipator, applies the pi/2 pulse, projects on |b> and
// renormalizes.  Returns the reduced field density matrix.
PreparedState prepare_lossy(const PrepParams& p, const IntegratorConfig& cfg = {});

// fockstate-v1 JSON for the light plus {"success_probability": real}.
nlohmann::json to_json(const PreparedState& s);
PreparedState prepared_from_json(const nlohmann::json& j);

} // namespace catmzi
