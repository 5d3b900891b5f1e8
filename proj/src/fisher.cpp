#include "catmzi/fisher.hpp"

#include <cmath>
#include <limits>

namespace catmzi {

double qfi_pure(const FockVector& psi, const JyOperator& jy) {
    return 4.0 * jy.variance(psi);
}

double qfi_pure(const FockVector& psi) {
    if (psi.modes != 2)
        throw ConfigError("qfi: a two-mode state is required");
    return qfi_pure(psi, JyOperator::build(psi.na, psi.nb));
}

double qfi_from_eigenpairs(const std::vector<double>& weights,
                           const std::vector<FockVector>& vectors,
                           const JyOperator& jy, double rank_tolerance) {
    const std::size_t r = weights.size();
    if (r == 0 || vectors.size() != r)
        throw ConfigError("qfi: weights and vectors must match and be non-empty");
    std::vector<Vec> jv;
    jv.reserve(r);
    for (const auto& v : vectors)
        jv.push_back(jy.apply(v).amps);
    double f = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        const double j2 = jv[i].squaredNorm();
        const double j1 = vectors[i].amps.dot(jv[i]).real();
        f += 4.0 * weights[i] * j2 - 4.0 * weights[i] * j1 * j1;
    }
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j) {
            const double denom = weights[i] + weights[j];
            if (denom <= rank_tolerance)
                continue;
            const double cross = std::norm(vectors[i].amps.dot(jv[j]));
            f -= 16.0 * weights[i] * weights[j] / denom * cross;
        }
    return f;
}

double qfi_mixed(const DensityMatrix& rho, double rank_tolerance) {
    if (rho.structure != Structure::two_mode_field)
        throw ConfigError("qfi: a two-mode density matrix is required");
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho.rho + rho.rho.adjoint()));
    std::vector<double> w;
    std::vector<FockVector> v;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double lam = es.eigenvalues()[i];
        if (lam < -1e-10)
            throw ConfigError("qfi: density is not positive semidefinite");
        if (lam > 1e-14) {
            w.push_back(lam);
            FockVector e;
            e.modes = 2;
            e.na = rho.na;
            e.nb = rho.nb;
            e.amps = es.eigenvectors().col(i);
            v.push_back(std::move(e));
        }
    }
    return qfi_from_eigenpairs(w, v, JyOperator::build(rho.na, rho.nb),
                               rank_tolerance);
}

double qfi(const MziPropagator& prop, double rank_tolerance) {
    return qfi_from_eigenpairs(prop.weights(), prop.vectors(), prop.jy(),
                               rank_tolerance);
}

double qfi(const InterferometerInput& input, double rank_tolerance) {
    return qfi(MziPropagator(input), rank_tolerance);
}

double qfi_approx(ApproxFormula formula, const ApproxParams& p) {
    if (p.n_alpha < 0 || p.n_beta < 0)
        throw ConfigError("qfi_approx: occupations must be non-negative");
    switch (formula) {
    case ApproxFormula::opt: {
        const double s = std::sin(0.5 * p.u0t);
        return p.n_alpha + p.n_beta + 4.0 * p.n_alpha * p.n_beta * s * s;
    }
    case ApproxFormula::phase0: {
        const double s = std::sin(p.u0t);
        return p.n_alpha + p.n_beta + p.n_alpha * p.n_beta * s * s;
    }
    case ApproxFormula::lossy_fit: {
        const double tau = lossy_tau(p.kappa, p.u0, p.n_alpha);
        const double x = p.u0t / p.u0 / tau;
        const double env = std::exp(-(2.0 / 3.0) * x * x * x);
        const double s = std::sin(p.u0t);
        return p.n_alpha + p.n_beta + env * s * s * p.n_alpha * p.n_beta;
    }
    }
    throw ConfigError("qfi_approx: unknown formula");
}

double lossy_tau(double kappa, double u0, double n_alpha) {
    if (kappa <= 0 || u0 <= 0 || n_alpha <= 0)
        throw ConfigError("lossy_tau: kappa, u0 and n_alpha must be positive");
    return std::pow(kappa * u0 * u0 * n_alpha, -1.0 / 3.0);
}

PhaseOptimum optimize_phase_beta(const StateVariant& port_a, double beta0,
                                 int grid_size, int nb_cutoff) {
    if (grid_size < 8)
        throw ConfigError("optimize_phase_beta: grid_size must be at least 8");
    if (beta0 < 0)
        throw ConfigError("optimize_phase_beta: beta0 must be non-negative");
    auto [w, vecs] = state_eigenpairs(port_a);
    if (w.empty())
        throw ConfigError("optimize_phase_beta: state carries no weight");
    const int na = static_cast<int>(vecs.front().size()) - 1;
    const int nb = nb_cutoff > 0 ? nb_cutoff : default_cutoff(beta0 * beta0);
    const JyOperator jy = JyOperator::build(na, nb);
    std::vector<FockVector> amode;
    amode.reserve(vecs.size());
    for (auto& v : vecs) {
        FockVector a;
        a.modes = 1;
        a.na = na;
        a.amps = std::move(v);
        amode.push_back(std::move(a));
    }
    PhaseOptimum best;
    best.qfi = -std::numeric_limits<double>::infinity();
    const double two_pi = 2.0 * M_PI;
    std::vector<FockVector> probes(amode.size());
    for (int k = 0; k < grid_size; ++k) {
        const double phi = two_pi * k / grid_size;
        const FockVector ref = coherent_state(std::polar(beta0, phi), nb);
        for (std::size_t i = 0; i < amode.size(); ++i)
            probes[i] = tensor_product(amode[i], ref);
        const double f = qfi_from_eigenpairs(w, probes, jy);
        // ties (within relative 1e-9) keep the smallest phase
        if (!std::isfinite(best.qfi) ||
            f > best.qfi + 1e-9 * std::abs(best.qfi)) {
            best.phi_beta = phi;
            best.qfi = f;
        }
    }
    return best;
}

} // namespace catmzi
