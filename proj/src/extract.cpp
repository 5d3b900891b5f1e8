#include "catmzi/extract.hpp"

#include <cmath>
#include <vector>

namespace catmzi {

namespace {

// Basis {|n, m> : n + m <= n_max} ordered by N = n + m, then n.
struct PackedBasis {
    int n_max;
    std::vector<int> n_of, m_of;
    std::vector<int> up, down, raise_a; // -1 where the partner leaves the basis
    std::vector<double> g_up, g_down;   // transfer couplings, without kappa_T
    std::vector<double> sq_a;           // sqrt(n+1) toward raise_a

    explicit PackedBasis(int nmax) : n_max(nmax) {
        const int dim = (nmax + 1) * (nmax + 2) / 2;
        n_of.resize(dim);
        m_of.resize(dim);
        up.assign(dim, -1);
        down.assign(dim, -1);
        raise_a.assign(dim, -1);
        g_up.assign(dim, 0.0);
        g_down.assign(dim, 0.0);
        sq_a.assign(dim, 0.0);
        int i = 0;
        for (int total = 0; total <= nmax; ++total)
            for (int n = 0; n <= total; ++n, ++i) {
                n_of[i] = n;
                m_of[i] = total - n;
            }
        for (int j = 0; j < dim; ++j) {
            const int n = n_of[j], m = m_of[j];
            if (m >= 1) { // |n,m> -> |n+1,m-1>
                up[j] = index_of(n + 1, m - 1);
                g_up[j] = std::sqrt(double(n + 1) * double(m));
            }
            if (n >= 1) { // |n,m> -> |n-1,m+1>
                down[j] = index_of(n - 1, m + 1);
                g_down[j] = std::sqrt(double(n) * double(m + 1));
            }
            if (n + m + 1 <= nmax) {
                raise_a[j] = index_of(n + 1, m);
                sq_a[j] = std::sqrt(double(n + 1));
            }
        }
    }

    int dim() const { return static_cast<int>(n_of.size()); }
    int index_of(int n, int m) const {
        const int total = n + m;
        return total * (total + 1) / 2 + n;
    }
};

// H |psi> with H = a+ b + b+ a (kappa_T applied by the caller)
void apply_transfer(const PackedBasis& b, const Vec& in, Vec& out) {
    out.setZero(in.size());
    for (int j = 0; j < b.dim(); ++j) {
        const cd v = in[j];
        if (b.up[j] >= 0)
            out[b.up[j]] += b.g_up[j] * v;
        if (b.down[j] >= 0)
            out[b.down[j]] += b.g_down[j] * v;
    }
}

Vec embed_with_vacuum(const PackedBasis& b, const Vec& cavity) {
    Vec out = Vec::Zero(b.dim());
    for (int n = 0; n < cavity.size(); ++n)
        out[b.index_of(n, 0)] = cavity[n];
    return out;
}

// rho_b[m, m'] += w * Tr_a |psi><psi|
void accumulate_reduced(const PackedBasis& b, const Vec& psi, double w, Mat& rho_b) {
    for (int m = 0; m <= b.n_max; ++m)
        for (int mp = 0; mp <= b.n_max; ++mp) {
            cd acc = 0.0;
            const int n_hi = b.n_max - std::max(m, mp);
            for (int n = 0; n <= n_hi; ++n)
                acc += psi[b.index_of(n, m)] * std::conj(psi[b.index_of(n, mp)]);
            rho_b(m, mp) += w * acc;
        }
}

void apply_output_calibration(Mat& rho_b) {
    const cd i_unit(0.0, 1.0);
    cd row_phase = 1.0;
    for (int m = 0; m < rho_b.rows(); ++m, row_phase *= i_unit) {
        cd col_phase = 1.0;
        for (int mp = 0; mp < rho_b.cols(); ++mp, col_phase *= -i_unit)
            rho_b(m, mp) *= row_phase * col_phase;
    }
}

} // namespace

DensityMatrix extract_mode(const PreparedState& prepared,
                           const ExtractionParams& params,
                           const IntegratorConfig& cfg) {
    if (params.kappa_T < 0 || params.kappa_tilde < 0 || params.tau < 0)
        throw ConfigError("extract_mode: rates and duration must be non-negative");

    auto [weights, vecs] = state_eigenpairs(prepared.light, 1e-14);
    const int n_max = static_cast<int>(vecs.front().size()) - 1;
    const PackedBasis basis(n_max);
    if (basis.dim() > 4096)
        throw ConfigError("extract_mode: packed two-mode dimension " +
                          std::to_string(basis.dim()) + " exceeds limit 4096");

    const double rate = std::max(params.kappa_T, params.kappa_tilde) * double(n_max);
    Mat rho_b = Mat::Zero(n_max + 1, n_max + 1);

    if (params.kappa_tilde == 0.0) {
        // Unitary transfer: each eigenvector evolves independently.
        const double kt = params.kappa_T;
        const auto rhs = [&](const Vec& in, Vec& out) {
            apply_transfer(basis, in, out);
            out *= cd(0.0, -kt);
        };
        for (size_t i = 0; i < weights.size(); ++i) {
            Vec psi = embed_with_vacuum(basis, vecs[i]);
            integrate_rk4(psi, rhs, params.tau, rate, cfg, [](const Vec& y) {
                return std::abs(y.squaredNorm() - 1.0);
            });
            accumulate_reduced(basis, psi, weights[i], rho_b);
        }
    } else {
        Mat rho = Mat::Zero(basis.dim(), basis.dim());
        for (size_t i = 0; i < weights.size(); ++i) {
            const Vec psi = embed_with_vacuum(basis, vecs[i]);
            rho.noalias() += weights[i] * (psi * psi.adjoint());
        }
        const double kt = params.kappa_T;
        const double ka = params.kappa_tilde;
        Mat hwork(basis.dim(), basis.dim());
        // Every RK4 stage is a real combination of Hermitian matrices,
        // so r stays Hermitian and H r = (r H)^dag: one columnwise pass
        // computes the whole commutator.
        const auto rhs = [&basis, kt, ka, &hwork](const Mat& r, Mat& out) {
            const int dim = basis.dim();
            for (int j = 0; j < dim; ++j) {
                auto col = hwork.col(j);
                const int dn = basis.down[j], up = basis.up[j];
                if (dn >= 0 && up >= 0)
                    col = basis.g_down[j] * r.col(dn) + basis.g_up[j] * r.col(up);
                else if (dn >= 0)
                    col = basis.g_down[j] * r.col(dn);
                else if (up >= 0)
                    col = basis.g_up[j] * r.col(up);
                else
                    col.setZero();
            }
            out = cd(0.0, -kt) * (hwork.adjoint() - hwork);
            // kappa_tilde (2 a r a+ - {a+a, r}) on the cavity index
            for (int k = 0; k < dim; ++k) {
                const double nk = basis.n_of[k];
                const int rk = basis.raise_a[k];
                for (int j = 0; j < dim; ++j) {
                    cd v = -ka * (basis.n_of[j] + nk) * r(j, k);
                    if (rk >= 0 && basis.raise_a[j] >= 0)
                        v += 2.0 * ka * basis.sq_a[j] * basis.sq_a[k] *
                             r(basis.raise_a[j], rk);
                    out(j, k) += v;
                }
            }
        };
        integrate_rk4(rho, rhs, params.tau, rate, cfg, [](const Mat& r) {
            return std::abs(r.trace().real() - 1.0);
        });
        for (int m = 0; m <= n_max; ++m)
            for (int mp = 0; mp <= n_max; ++mp) {
                cd acc = 0.0;
                const int n_hi = n_max - std::max(m, mp);
                for (int n = 0; n <= n_hi; ++n)
                    acc += rho(basis.index_of(n, m), basis.index_of(n, mp));
                rho_b(m, mp) = acc;
            }
    }

    apply_output_calibration(rho_b);
    rho_b = 0.5 * (rho_b + rho_b.adjoint()).eval();
    const double tr = rho_b.trace().real();
    if (std::abs(tr - 1.0) > cfg.trace_tolerance)
        throw NumericalError("extract_mode: output trace drifted to " + std::to_string(tr));
    rho_b /= tr;

    DensityMatrix out;
    out.structure = Structure::field;
    out.na = n_max;
    out.rho = std::move(rho_b);
    return out;
}

} // namespace catmzi
