#include "catmzi/fock.hpp"

#include <cmath>

namespace catmzi {

void FockVector::normalize() {
    const double n2 = norm2();
    if (!(n2 > 1e-300))
        throw NumericalError("cannot normalize a state with vanishing norm");
    amps /= std::sqrt(n2);
}

int DensityMatrix::dim_slow() const {
    switch (structure) {
    case Structure::field: return na + 1;
    case Structure::atom_field: return 2;
    case Structure::two_mode_field: return na + 1;
    }
    return 0;
}

int DensityMatrix::dim_fast() const {
    switch (structure) {
    case Structure::field: return 1;
    case Structure::atom_field: return na + 1;
    case Structure::two_mode_field: return nb + 1;
    }
    return 0;
}

double DensityMatrix::hermiticity_error() const {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
    Mat h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

std::pair<std::vector<double>, std::vector<Vec>>
state_eigenpairs(const StateVariant& state, double floor) {
    std::vector<double> w;
    std::vector<Vec> v;
    if (std::holds_alternative<FockVector>(state)) {
        const auto& psi = std::get<FockVector>(state);
        if (psi.modes != 1)
            throw ConfigError("state_eigenpairs: the state must be single-mode");
        w.push_back(1.0);
        v.push_back(psi.amps);
        return {w, v};
    }
    const auto& rho = std::get<DensityMatrix>(state);
    if (rho.structure != Structure::field)
        throw ConfigError("state_eigenpairs: the state must be single-mode");
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho.rho + rho.rho.adjoint()));
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double lam = es.eigenvalues()[i];
        if (lam < -1e-10)
            throw ConfigError("state_eigenpairs: density is not positive semidefinite");
        if (lam > floor) {
            w.push_back(lam);
            v.push_back(es.eigenvectors().col(i));
        }
    }
    return {w, v};
}

FockVector fock_basis(int n, int cutoff) {
    if (cutoff < 0 || n < 0 || n > cutoff)
        throw ConfigError("fock_basis: need 0 <= n <= cutoff");
    FockVector psi;
    psi.modes = 1;
    psi.na = cutoff;
    psi.amps = Vec::Zero(cutoff + 1);
    psi.amps[n] = 1.0;
    return psi;
}

FockVector coherent_state(cd alpha, int cutoff, double* discarded_mass) {
    if (cutoff < 0)
        throw ConfigError("coherent_state: cutoff must be non-negative");
    FockVector psi;
    psi.modes = 1;
    psi.na = cutoff;
    psi.amps = Vec::Zero(cutoff + 1);
    cd c = std::exp(-0.5 * std::norm(alpha));
    double kept = 0.0;
    for (int n = 0; n <= cutoff; ++n) {
        psi.amps[n] = c;
        kept += std::norm(c);
        c *= alpha / std::sqrt(double(n + 1));
    }
    if (discarded_mass)
        *discarded_mass = std::max(0.0, 1.0 - kept);
    psi.normalize();
    return psi;
}

int default_cutoff(double nbar) {
    if (nbar < 0)
        throw ConfigError("default_cutoff: mean occupation must be non-negative");
    return static_cast<int>(std::ceil(nbar + 6.0 * std::sqrt(nbar) + 10.0));
}

double poisson_tail(double nbar, int cutoff) {
    if (nbar < 0 || cutoff < 0)
        throw ConfigError("poisson_tail: arguments must be non-negative");
    double p = std::exp(-nbar);
    double below = 0.0;
    for (int n = 0; n <= cutoff; ++n) {
        below += p;
        p *= nbar / double(n + 1);
    }
    return std::max(0.0, 1.0 - below);
}

double truncation_tail_mass(const FockVector& psi) {
    if (psi.modes == 1)
        return std::norm(psi.amps[psi.na]);
    double mass = 0.0;
    for (int m = 0; m <= psi.nb; ++m)
        mass += std::norm(psi.amps[psi.index(psi.na, m)]);
    for (int n = 0; n < psi.na; ++n)
        mass += std::norm(psi.amps[psi.index(n, psi.nb)]);
    return mass;
}

double truncation_tail_mass(const DensityMatrix& rho) {
    const auto diag_at = [&](int i) { return rho.rho(i, i).real(); };
    switch (rho.structure) {
    case Structure::field:
        return diag_at(rho.na);
    case Structure::atom_field: {
        const int d = rho.na + 1;
        return diag_at(rho.na) + diag_at(d + rho.na);
    }
    case Structure::two_mode_field: {
        const int db = rho.nb + 1;
        double mass = 0.0;
        for (int m = 0; m <= rho.nb; ++m)
            mass += diag_at(rho.na * db + m);
        for (int n = 0; n < rho.na; ++n)
            mass += diag_at(n * db + rho.nb);
        return mass;
    }
    }
    return 0.0;
}

FockVector tensor_product(const FockVector& a, const FockVector& b, int max_dim) {
    if (a.modes != 1 || b.modes != 1)
        throw ConfigError("tensor_product: both factors must be single-mode");
    const long dim = long(a.dim()) * long(b.dim());
    if (dim > max_dim)
        throw ConfigError("tensor_product: combined dimension " +
                          std::to_string(dim) + " exceeds limit " +
                          std::to_string(max_dim));
    FockVector out;
    out.modes = 2;
    out.na = a.na;
    out.nb = b.na;
    out.amps = Vec(dim);
    for (int n = 0; n <= a.na; ++n)
        out.amps.segment(n * b.dim(), b.dim()) = a.amps[n] * b.amps;
    return out;
}

DensityMatrix pure_density(const FockVector& psi) {
    DensityMatrix rho;
    if (psi.modes == 1) {
        rho.structure = Structure::field;
        rho.na = psi.na;
    } else {
        rho.structure = Structure::two_mode_field;
        rho.na = psi.na;
        rho.nb = psi.nb;
    }
    rho.rho = psi.amps * psi.amps.adjoint();
    return rho;
}

DensityMatrix partial_trace(const DensityMatrix& rho, Keep keep) {
    if (rho.structure == Structure::field)
        throw ConfigError("partial_trace: state is not bipartite");
    if (rho.structure == Structure::atom_field && keep == Keep::slow)
        throw ConfigError("partial_trace: the bare atom is not a Fock mode");
    const int ds = rho.dim_slow();
    const int df = rho.dim_fast();
    DensityMatrix out;
    out.structure = Structure::field;
    if (keep == Keep::slow) {
        out.na = ds - 1;
        out.rho = Mat::Zero(ds, ds);
        for (int n = 0; n < ds; ++n)
            for (int k = 0; k < ds; ++k)
                for (int m = 0; m < df; ++m)
                    out.rho(n, k) += rho.rho(n * df + m, k * df + m);
    } else {
        out.na = df - 1;
        out.rho = Mat::Zero(df, df);
        for (int s = 0; s < ds; ++s)
            out.rho += rho.rho.block(s * df, s * df, df, df);
    }
    return out;
}

double mean_occupation(const FockVector& psi, int mode) {
    if (psi.modes == 1) {
        if (mode != 0)
            throw ConfigError("mean_occupation: single-mode state has only mode 0");
        double acc = 0.0;
        for (int n = 0; n <= psi.na; ++n)
            acc += n * std::norm(psi.amps[n]);
        return acc;
    }
    if (mode != 0 && mode != 1)
        throw ConfigError("mean_occupation: mode must be 0 or 1");
    double acc = 0.0;
    for (int n = 0; n <= psi.na; ++n)
        for (int m = 0; m <= psi.nb; ++m)
            acc += (mode == 0 ? n : m) * std::norm(psi.amps[psi.index(n, m)]);
    return acc;
}

double mean_occupation(const DensityMatrix& rho) {
    if (rho.structure == Structure::field) {
        double acc = 0.0;
        for (int n = 0; n <= rho.na; ++n)
            acc += n * rho.rho(n, n).real();
        return acc;
    }
    if (rho.structure == Structure::atom_field) {
        const int d = rho.na + 1;
        double acc = 0.0;
        for (int s = 0; s < 2; ++s)
            for (int n = 0; n <= rho.na; ++n)
                acc += n * rho.rho(s * d + n, s * d + n).real();
        return acc;
    }
    throw ConfigError("mean_occupation: reduce two-mode densities with partial_trace first");
}

namespace {

void require_same_shape(const FockVector& a, const FockVector& b) {
    if (a.modes != b.modes || a.na != b.na || (a.modes == 2 && a.nb != b.nb))
        throw ConfigError("fidelity: states live on different spaces");
}

} // namespace

double fidelity(const FockVector& a, const FockVector& b) {
    require_same_shape(a, b);
    return std::norm(a.amps.dot(b.amps));
}

double fidelity(const FockVector& psi, const DensityMatrix& rho) {
    if (psi.dim() != rho.dim())
        throw ConfigError("fidelity: states live on different spaces");
    const cd v = psi.amps.dot(rho.rho * psi.amps);
    return std::max(0.0, v.real());
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim())
        throw ConfigError("fidelity: states live on different spaces");
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho.rho + rho.rho.adjoint()));
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Mat root = es.eigenvectors() * lam.asDiagonal() *
               es.eigenvectors().adjoint();
    Mat inner = root * (0.5 * (sigma.rho + sigma.rho.adjoint())) * root;
    Eigen::SelfAdjointEigenSolver<Mat> es2(inner, Eigen::EigenvaluesOnly);
    double acc = 0.0;
    for (int i = 0; i < es2.eigenvalues().size(); ++i)
        acc += std::sqrt(std::max(0.0, es2.eigenvalues()[i]));
    return acc * acc;
}

} // namespace catmzi
