#include "catmzi/jy.hpp"

#include <cmath>

namespace catmzi {

JyOperator JyOperator::build(int na, int nb) {
    if (na < 0 || nb < 0)
        throw ConfigError("JyOperator: cutoffs must be non-negative");
    JyOperator op;
    op.na_ = na;
    op.nb_ = nb;
    op.blocks_.reserve(na + nb + 1);
    for (int total = 0; total <= na + nb; ++total) {
        const int lo = std::max(0, total - nb);
        const int hi = std::min(na, total);
        const int len = hi - lo + 1;
        Mat t = Mat::Zero(len, len);
        for (int k = 0; k + 1 < len; ++k) {
            const int n = lo + k; // |n, total-n> -> |n+1, total-n-1>
            const double g = 0.5 * std::sqrt(double(n + 1) * double(total - n));
            t(k + 1, k) = cd(0.0, -g);
            t(k, k + 1) = cd(0.0, g);
        }
        Eigen::SelfAdjointEigenSolver<Mat> es(t);
        op.blocks_.push_back({total, lo, es.eigenvalues(), es.eigenvectors()});
    }
    return op;
}

void JyOperator::check_shape(const FockVector& psi) const {
    if (psi.modes != 2 || psi.na != na_ || psi.nb != nb_)
        throw ConfigError("JyOperator: state does not match the operator's two-mode space");
}

FockVector JyOperator::apply(const FockVector& psi) const {
    check_shape(psi);
    FockVector out = psi;
    out.amps.setZero();
    const int db = nb_ + 1;
    for (int n = 0; n <= na_; ++n) {
        for (int m = 0; m <= nb_; ++m) {
            const cd v = psi.amps[n * db + m];
            if (n + 1 <= na_ && m >= 1)
                out.amps[(n + 1) * db + (m - 1)] +=
                    cd(0.0, -0.5 * std::sqrt(double(n + 1) * double(m))) * v;
            if (n >= 1 && m + 1 <= nb_)
                out.amps[(n - 1) * db + (m + 1)] +=
                    cd(0.0, 0.5 * std::sqrt(double(n) * double(m + 1))) * v;
        }
    }
    return out;
}

FockVector JyOperator::rotate(const FockVector& psi, double theta) const {
    check_shape(psi);
    FockVector out = psi;
    const int db = nb_ + 1;
    for (const auto& blk : blocks_) {
        const int len = static_cast<int>(blk.evals.size());
        Vec c(len);
        for (int k = 0; k < len; ++k) {
            const int n = blk.n_lo + k;
            c[k] = psi.amps[n * db + (blk.total - n)];
        }
        Vec phase(len);
        for (int k = 0; k < len; ++k)
            phase[k] = std::exp(cd(0.0, -theta * blk.evals[k]));
        Vec cp = blk.evecs * phase.cwiseProduct(blk.evecs.adjoint() * c);
        for (int k = 0; k < len; ++k) {
            const int n = blk.n_lo + k;
            out.amps[n * db + (blk.total - n)] = cp[k];
        }
    }
    return out;
}

DensityMatrix JyOperator::rotate(const DensityMatrix& rho, double theta) const {
    if (rho.structure != Structure::two_mode_field || rho.na != na_ || rho.nb != nb_)
        throw ConfigError("JyOperator: density does not match the operator's two-mode space");
    const int db = nb_ + 1;
    // Per-block unitaries U_N = V exp(-i theta L) V^dag, then
    // rho'_{NN'} = U_N rho_{NN'} U_{N'}^dag on the gathered sub-blocks.
    std::vector<Mat> u;
    u.reserve(blocks_.size());
    for (const auto& blk : blocks_) {
        const int len = static_cast<int>(blk.evals.size());
        Vec phase(len);
        for (int k = 0; k < len; ++k)
            phase[k] = std::exp(cd(0.0, -theta * blk.evals[k]));
        u.push_back(blk.evecs * phase.asDiagonal() * blk.evecs.adjoint());
    }
    DensityMatrix out = rho;
    const auto flat = [&](const JyBlock& blk, int k) {
        const int n = blk.n_lo + k;
        return n * db + (blk.total - n);
    };
    for (size_t bi = 0; bi < blocks_.size(); ++bi) {
        const auto& rb = blocks_[bi];
        const int lr = static_cast<int>(rb.evals.size());
        for (size_t bj = 0; bj < blocks_.size(); ++bj) {
            const auto& cb = blocks_[bj];
            const int lc = static_cast<int>(cb.evals.size());
            Mat sub(lr, lc);
            for (int r = 0; r < lr; ++r)
                for (int c = 0; c < lc; ++c)
                    sub(r, c) = rho.rho(flat(rb, r), flat(cb, c));
            Mat subp = u[bi] * sub * u[bj].adjoint();
            for (int r = 0; r < lr; ++r)
                for (int c = 0; c < lc; ++c)
                    out.rho(flat(rb, r), flat(cb, c)) = subp(r, c);
        }
    }
    return out;
}

double JyOperator::expectation(const FockVector& psi) const {
    const FockVector jpsi = apply(psi);
    return psi.amps.dot(jpsi.amps).real();
}

double JyOperator::variance(const FockVector& psi) const {
    const FockVector jpsi = apply(psi);
    const double mean = psi.amps.dot(jpsi.amps).real();
    return jpsi.amps.squaredNorm() - mean * mean;
}

Mat JyOperator::dense() const {
    const int db = nb_ + 1;
    const int dim = (na_ + 1) * db;
    Mat j = Mat::Zero(dim, dim);
    for (int n = 0; n <= na_; ++n) {
        for (int m = 0; m <= nb_; ++m) {
            if (n + 1 <= na_ && m >= 1)
                j((n + 1) * db + (m - 1), n * db + m) =
                    cd(0.0, -0.5 * std::sqrt(double(n + 1) * double(m)));
            if (n >= 1 && m + 1 <= nb_)
                j((n - 1) * db + (m + 1), n * db + m) =
                    cd(0.0, 0.5 * std::sqrt(double(n) * double(m + 1)));
        }
    }
    return j;
}

FockVector mzi_transform(const FockVector& psi, double theta) {
    if (psi.modes != 2)
        throw ConfigError("mzi_transform: interferometer input must be two-mode");
    return JyOperator::build(psi.na, psi.nb).rotate(psi, theta);
}

DensityMatrix mzi_transform(const DensityMatrix& rho, double theta) {
    if (rho.structure != Structure::two_mode_field)
        throw ConfigError("mzi_transform: interferometer input must be two-mode");
    return JyOperator::build(rho.na, rho.nb).rotate(rho, theta);
}

} // namespace catmzi
