#include "catmzi/wigner.hpp"

#include <cmath>
#include <vector>

namespace catmzi {

namespace {

void check_grid(const PhaseGrid& g) {
    if (g.points < 2)
        throw ConfigError("phase grid: at least 2 points per axis");
    if (!(g.re_max > g.re_min) || !(g.im_max > g.im_min))
        throw ConfigError("phase grid: bounds must be increasing");
}

// Adds weight * W_psi over the grid to vals through the folded
// displaced-parity trace, grouped by density-matrix diagonals:
//   W = (2/pi) e^{-x/2} [ S_0 + 2 Re sum_{k>=1} S_k ],  x = |2a|^2
//   S_k = (g/sqrt(x))^k u_k Clenshaw_n[ (-1)^n psi_n conj(psi_{n+k}) ]
// over the normalized Laguerre family l_n^k = sqrt(n!/(n+k)!) L_n^(k),
//   l_{n+1} = [(2n+k+1-x) l_n - sqrt(n(n+k)) l_{n-1}]
//             / sqrt((n+1)(n+k+1)),
// with u_k = exp((k ln x - x)/2 - lgamma(k+1)/2) = x^{k/2}e^{-x/2}l_0^k.
// Both trace indices stay inside the state's Fock support, so the
// result is exact for any displacement; the downward Clenshaw pass and
// the tiny u_k prefactor keep it stable where a forward recurrence on
// the displacement columns explodes (large dim, large |a|).
void accumulate_map(const Vec& psi, double weight, const PhaseGrid& grid,
                    Eigen::ArrayXXd& vals) {
    const int dim = static_cast<int>(psi.size());
    const double two_over_pi = 2.0 / M_PI;

    // per-diagonal data, flattened over (k, n), n <= dim-1-k
    std::vector<int> offset(dim + 1, 0);
    for (int k = 0; k < dim; ++k)
        offset[k + 1] = offset[k] + (dim - k);
    const int total = offset[dim];
    std::vector<cd> cdiag(total);
    std::vector<double> num(total), invd(total), bup(total), lg(dim);
    for (int k = 0; k < dim; ++k) {
        lg[k] = std::lgamma(k + 1.0);
        for (int n = 0; n + k < dim; ++n) {
            const int i = offset[k] + n;
            cdiag[i] = (n % 2 == 0 ? 1.0 : -1.0) * psi[n] *
                       std::conj(psi[n + k]);
            num[i] = 2.0 * n + k + 1.0;
            invd[i] = 1.0 / std::sqrt((n + 1.0) * (n + k + 1.0));
            bup[i] = -std::sqrt((n + 1.0) * (n + 1.0 + k)) /
                     std::sqrt((n + 2.0) * (n + k + 2.0));
        }
    }

    for (int j = 0; j < grid.points; ++j) {
        const double y = grid.im_at(j);
        for (int i = 0; i < grid.points; ++i) {
            const double re = grid.re_at(i);
            const cd g = 2.0 * cd(re, y);
            const double x = std::norm(g);
            if (x == 0.0) {
                double diag = 0.0;
                for (int n = 0; n < dim; ++n)
                    diag += cdiag[offset[0] + n].real();
                vals(i, j) += weight * two_over_pi * diag;
                continue;
            }
            const double lx = std::log(x);
            const cd phase = g / std::sqrt(x);
            cd pk = 1.0;
            double acc = 0.0;
            for (int k = 0; k < dim; ++k, pk *= phase) {
                const double uk =
                    std::exp(0.5 * (k * lx - x) - 0.5 * lg[k]);
                if (uk == 0.0)
                    continue;
                const int base = offset[k];
                cd b1 = 0.0, b2 = 0.0;
                for (int n = dim - 1 - k; n >= 0; --n) {
                    const int t = base + n;
                    const cd b0 = cdiag[t] +
                                  ((num[t] - x) * invd[t]) * b1 +
                                  bup[t] * b2;
                    b2 = b1;
                    b1 = b0;
                }
                const double term = uk * (pk * b1).real();
                acc += k == 0 ? term : 2.0 * term;
            }
            vals(i, j) += weight * two_over_pi * acc;
        }
    }
}

} // namespace

PhaseGrid PhaseGrid::square(double extent, int points) {
    if (!(extent > 0))
        throw ConfigError("phase grid: extent must be positive");
    PhaseGrid g;
    g.re_min = -extent;
    g.re_max = extent;
    g.im_min = -extent;
    g.im_max = extent;
    g.points = points;
    check_grid(g);
    return g;
}

PhaseGrid default_grid(double nbar) {
    if (nbar < 0)
        throw ConfigError("phase grid: mean occupation must be non-negative");
    return PhaseGrid::square(std::sqrt(nbar) + 4.0, 201);
}

WignerMap wigner(const FockVector& psi, const PhaseGrid& grid) {
    if (psi.modes != 1)
        throw ConfigError("wigner: a single-mode state is required");
    check_grid(grid);
    WignerMap map;
    map.grid = grid;
    map.values = Eigen::ArrayXXd::Zero(grid.points, grid.points);
    accumulate_map(psi.amps, 1.0, grid, map.values);
    return map;
}

WignerMap wigner(const DensityMatrix& rho, const PhaseGrid& grid) {
    check_grid(grid);
    auto [w, vecs] = state_eigenpairs(rho);
    WignerMap map;
    map.grid = grid;
    map.values = Eigen::ArrayXXd::Zero(grid.points, grid.points);
    if (w.empty())
        return map;
    for (std::size_t i = 0; i < w.size(); ++i)
        accumulate_map(vecs[i], w[i], grid, map.values);
    return map;
}

WignerMap wigner(const StateVariant& state, const PhaseGrid& grid) {
    if (std::holds_alternative<FockVector>(state))
        return wigner(std::get<FockVector>(state), grid);
    return wigner(std::get<DensityMatrix>(state), grid);
}

double wigner_mass(const WignerMap& map) {
    return map.grid.re_step() * map.grid.im_step() * map.values.sum();
}

double wigner_overlap(const WignerMap& a, const WignerMap& b) {
    if (!(a.grid == b.grid))
        throw ConfigError("wigner overlap: maps use different grids");
    return M_PI * a.grid.re_step() * a.grid.im_step() *
           (a.values * b.values).sum();
}

double gradient_direction(const WignerMap& map) {
    const auto& v = map.values;
    const int p = map.grid.points;
    if (p < 3)
        throw ConfigError("gradient_direction: needs at least 3 points per axis");
    const double hx = map.grid.re_step();
    const double hy = map.grid.im_step();
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int j = 1; j + 1 < p; ++j)
        for (int i = 1; i + 1 < p; ++i) {
            const double wx = (v(i + 1, j) - v(i - 1, j)) / (2.0 * hx);
            const double wy = (v(i, j + 1) - v(i, j - 1)) / (2.0 * hy);
            sxx += wx * wx;
            sxy += wx * wy;
            syy += wy * wy;
        }
    const double half_trace = 0.5 * (sxx + syy);
    const double det = sxx * syy - sxy * sxy;
    const double disc =
        std::sqrt(std::max(0.0, half_trace * half_trace - det));
    const double lam_hi = half_trace + disc;
    const double lam_lo = half_trace - disc;
    if (lam_hi <= 1e-30)
        throw NumericalError("gradient_direction: the map is flat");
    if ((lam_hi - lam_lo) / lam_hi < 1e-6)
        throw NumericalError("gradient_direction: no dominant direction");
    double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    if (angle < 0)
        angle += M_PI;
    if (angle >= M_PI)
        angle -= M_PI;
    return angle;
}

} // namespace catmzi
