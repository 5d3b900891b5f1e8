#include "catmzi/lindblad.hpp"

namespace catmzi {

DensityMatrix evolve_dispersive(const DensityMatrix& rho0, double u0,
                                double kappa, double t,
                                const IntegratorConfig& cfg) {
    if (rho0.structure != Structure::atom_field)
        throw ConfigError("evolve_dispersive: expected an atom_field density matrix");
    if (kappa < 0)
        throw ConfigError("evolve_dispersive: kappa must be non-negative");
    const int d = rho0.na + 1;
    const int na = rho0.na;

    // Entrywise right-hand side: the Hamiltonian is diagonal in the
    // (atom, number) basis and the dissipator shifts both number
    // indices up by one, so no matrix products are needed.
    const auto rhs = [d, na, u0, kappa](const Mat& r, Mat& out) {
        out.resizeLike(r);
        for (int s = 0; s < 2; ++s) {
            for (int n = 0; n <= na; ++n) {
                const int row = s * d + n;
                for (int sp = 0; sp < 2; ++sp) {
                    for (int np = 0; np <= na; ++np) {
                        const int col = sp * d + np;
                        const double hdiff =
                            u0 * (n * (s == 0 ? 1.0 : 0.0) -
                                  np * (sp == 0 ? 1.0 : 0.0));
                        cd v = (cd(0.0, -hdiff) - kappa * double(n + np)) * r(row, col);
                        if (n < na && np < na)
                            v += 2.0 * kappa *
                                 std::sqrt(double(n + 1) * double(np + 1)) *
                                 r(row + 1, col + 1);
                        out(row, col) = v;
                    }
                }
            }
        }
    };

    const double rate = std::max(std::abs(u0), kappa) * double(na);
    DensityMatrix rho = rho0;
    integrate_rk4(
        rho.rho, rhs, t, rate, cfg,
        [](const Mat& r) { return std::abs(r.trace().real() - 1.0); });
    return rho;
}

} // namespace catmzi
