#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "catmzi/fisher.hpp"
#include "catmzi/prep.hpp"
#include "catmzi/rng.hpp"

using namespace catmzi;

namespace {

const double kRootTen = std::sqrt(10.0);

PreparedState cat(double u0t, int cutoff = 40) {
    PrepParams p;
    p.alpha = kRootTen;
    p.u0 = 1.0;
    p.t = u0t;
    p.cutoff = cutoff;
    return prepare_ideal(p);
}

InterferometerInput probe(const StateVariant& light, double beta0,
                          double phi_beta, int nb_cutoff) {
    InterferometerInput in;
    in.port_a = light;
    in.beta = std::polar(beta0, phi_beta);
    in.nb_cutoff = nb_cutoff;
    return in;
}

FockVector random_state(std::uint64_t key, int cutoff) {
    CounterRng rng(key);
    FockVector psi;
    psi.na = cutoff;
    psi.amps = Vec(cutoff + 1);
    for (int n = 0; n <= cutoff; ++n)
        psi.amps[n] = cd(rng.next_double() - 0.5, rng.next_double() - 0.5);
    psi.normalize();
    return psi;
}

// full-spectrum QFI on a dense two-mode density:
//   F = sum_{l+m > 0} 2 (l - m)^2 / (l + m) |<l|J|m>|^2
double dense_qfi_oracle(const DensityMatrix& rho, const Mat& j) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho.rho +
                                                 rho.rho.adjoint().eval()));
    const auto& lam = es.eigenvalues();
    const Mat jv = es.eigenvectors().adjoint() * j * es.eigenvectors();
    double f = 0.0;
    for (int a = 0; a < lam.size(); ++a)
        for (int b = 0; b < lam.size(); ++b) {
            const double s = lam[a] + lam[b];
            if (s > 1e-12)
                f += 2.0 * (lam[a] - lam[b]) * (lam[a] - lam[b]) / s *
                     std::norm(jv(a, b));
        }
    return f;
}

} // namespace

TEST_SUITE("fisher") {

TEST_CASE("two coherent ports sit at the shot-noise limit") {
    const FockVector psi =
        tensor_product(coherent_state(kRootTen, 40),
                       coherent_state(kRootTen, 40));
    CHECK(qfi_pure(psi) == doctest::Approx(20.0).epsilon(1e-6));
}

TEST_CASE("frozen benchmark values of the cat-state probe") {
    // n_alpha = n_beta = 10, cutoff 40
    const auto f = [&](double u0t, double phi) {
        return qfi(probe(cat(u0t).light, kRootTen, phi, 40));
    };
    CHECK(f(M_PI / 2, -M_PI / 4) ==
          doctest::Approx(219.991754).epsilon(1e-8));
    CHECK(f(M_PI / 2, 0.0) == doctest::Approx(119.991754).epsilon(1e-8));
    CHECK(f(M_PI, M_PI / 2) == doctest::Approx(420.000001).epsilon(1e-8));
    CHECK(f(M_PI, 0.0) == doctest::Approx(20.000001).epsilon(1e-8));
}

TEST_CASE("reference phase enters with period pi") {
    const StateVariant light = cat(M_PI / 2).light;
    const double a = qfi(probe(light, kRootTen, -M_PI / 4, 40));
    const double b = qfi(probe(light, kRootTen, 3 * M_PI / 4, 40));
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("rank-1 mixed inputs agree with the pure formula") {
    for (std::uint64_t k = 0; k < 10; ++k) {
        const FockVector a = random_state(300 + k, 10);
        const FockVector psi = tensor_product(a, coherent_state(1.1, 10));
        const double pure = qfi_pure(psi);
        DensityMatrix rho = pure_density(psi);
        rho.structure = Structure::two_mode_field;
        rho.na = 10;
        rho.nb = 10;
        CHECK(qfi_mixed(rho) == doctest::Approx(pure).epsilon(1e-8));
    }
}

TEST_CASE("low-rank path matches a dense full-spectrum oracle") {
    const int na = 3, nb = 3;
    const JyOperator jy = JyOperator::build(na, nb);
    const Mat j = jy.dense();
    CounterRng rng(77);
    for (int rep = 0; rep < 5; ++rep) {
        // random mixture of a handful of pure product states
        const int d = (na + 1) * (nb + 1);
        Mat acc = Mat::Zero(d, d);
        double wsum = 0.0;
        for (int r = 0; r < 4; ++r) {
            FockVector v;
            v.modes = 2;
            v.na = na;
            v.nb = nb;
            v.amps = Vec(d);
            for (int i = 0; i < d; ++i)
                v.amps[i] =
                    cd(rng.next_double() - 0.5, rng.next_double() - 0.5);
            v.normalize();
            const double w = 0.5 + rng.next_double();
            acc += w * (v.amps * v.amps.adjoint());
            wsum += w;
        }
        DensityMatrix rho;
        rho.structure = Structure::two_mode_field;
        rho.na = na;
        rho.nb = nb;
        rho.rho = acc / wsum;
        CHECK(qfi_mixed(rho) ==
              doctest::Approx(dense_qfi_oracle(rho, j)).epsilon(1e-8));
    }
}

TEST_CASE("qfi is invariant under the rotation it measures") {
    const FockVector psi = tensor_product(random_state(41, 8),
                                          coherent_state(1.3, 8));
    const JyOperator jy = JyOperator::build(8, 8);
    const double base = qfi_pure(psi, jy);
    for (const double theta : {0.2, 0.9, 2.0})
        CHECK(qfi_pure(jy.rotate(psi, theta), jy) ==
              doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("closed-form benchmarks") {
    ApproxParams ap;
    ap.n_alpha = 10.0;
    ap.n_beta = 10.0;
    SUBCASE("optimal reference phase") {
        ap.u0t = M_PI;
        CHECK(qfi_approx(ApproxFormula::opt, ap) == doctest::Approx(420.0));
        ap.u0t = M_PI / 2;
        CHECK(qfi_approx(ApproxFormula::opt, ap) == doctest::Approx(220.0));
    }
    SUBCASE("zero reference phase") {
        ap.u0t = M_PI / 2;
        CHECK(qfi_approx(ApproxFormula::phase0, ap) ==
              doctest::Approx(120.0));
        ap.u0t = M_PI;
        CHECK(qfi_approx(ApproxFormula::phase0, ap) == doctest::Approx(20.0));
    }
    SUBCASE("the lossy fit reduces to the lossless form as kappa -> 0") {
        ap.u0t = 1.1;
        ap.u0 = 2.0;
        ap.kappa = 1e-12;
        const double fit = qfi_approx(ApproxFormula::lossy_fit, ap);
        ap.kappa = 0.0;
        CHECK(fit == doctest::Approx(qfi_approx(ApproxFormula::phase0, ap))
                         .epsilon(1e-9));
    }
}

TEST_CASE("characteristic loss time") {
    CHECK(lossy_tau(0.05, 2.0, 10.0) ==
          doctest::Approx(0.793700526).epsilon(1e-9));
    CHECK_THROWS_AS(lossy_tau(0.0, 2.0, 10.0), ConfigError);
    CHECK_THROWS_AS(lossy_tau(0.05, -1.0, 10.0), ConfigError);
}

TEST_CASE("lossy preparation tracks the cubic-decay fit") {
    // kappa = 0.05, U0 = 2: the peak QFI decays on tau ~ 0.794
    PrepParams p;
    p.alpha = kRootTen;
    p.u0 = 2.0;
    p.kappa = 0.05;
    p.cutoff = 40;
    const double tau = lossy_tau(p.kappa, p.u0, 10.0);
    p.t = 0.75 * tau;
    const PreparedState st = prepare_lossy(p);
    const double f = qfi(probe(st.light, kRootTen, 0.0, 40));
    CHECK(f == doctest::Approx(82.4663).epsilon(1e-5));
    ApproxParams ap;
    ap.n_alpha = 10.0;
    ap.n_beta = 10.0;
    ap.u0t = p.u0 * p.t;
    ap.kappa = p.kappa;
    ap.u0 = p.u0;
    const double fit = qfi_approx(ApproxFormula::lossy_fit, ap);
    CHECK(std::abs(f - fit) / fit < 0.10);
}

TEST_CASE("reference-phase optimization") {
    const StateVariant light = cat(M_PI).light;
    const PhaseOptimum opt = optimize_phase_beta(light, kRootTen, 64, 40);
    // the two maxima pi/2 and 3pi/2 tie; the scan keeps the smaller
    CHECK(opt.phi_beta == doctest::Approx(M_PI / 2).epsilon(1e-12));
    CHECK(opt.qfi == doctest::Approx(420.000001).epsilon(1e-8));
    CHECK_THROWS_AS(optimize_phase_beta(light, kRootTen, 4, 40),
                    ConfigError);
    CHECK_THROWS_AS(optimize_phase_beta(light, -1.0, 64, 40), ConfigError);
}

TEST_CASE("degenerate weights are rejected") {
    std::vector<double> w;
    std::vector<FockVector> v;
    const JyOperator jy = JyOperator::build(2, 2);
    CHECK_THROWS_AS(qfi_from_eigenpairs(w, v, jy), ConfigError);
}

} // TEST_SUITE
