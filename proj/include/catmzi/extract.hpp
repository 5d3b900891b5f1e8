#pragma once

#include "catmzi/lindblad.hpp"
#include "catmzi/prep.hpp"

namespace catmzi {

struct ExtractionParams {
    double kappa_T = 0.0;     // cavity-to-propagating-mode transfer rate
    double kappa_tilde = 0.0; // mirror absorption rate
    double tau = 0.0;         // transfer duration; kappa_T*tau = pi/2 is a full swap
};

// Transfers the prepared cavity light into an initially empty
// propagating mode b under H = kappa_T (a+ b + b+ a), with an optional
// absorption dissipator at rate kappa_tilde on the cavity, and returns
// the reduced state of mode b after time tau.
//
// The dynamics never raises the total photon number, so the problem
// is integrated on the packed basis {|n, m> : n + m <= n_max}.  The
// swap hands every transferred photon a factor -i; the result is
// reported in a calibrated output frame (m-th amplitude rescaled by
// i^m) in which a lossless full swap is the identity.
DensityMatrix extract_mode(const PreparedState& prepared,
                           const ExtractionParams& params,
                           const IntegratorConfig& cfg = {});

} // namespace catmzi
