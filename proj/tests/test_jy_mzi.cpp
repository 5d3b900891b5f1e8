#include <doctest.h>

#include <cmath>
#include <complex>

#include "catmzi/jy.hpp"
#include "catmzi/rng.hpp"

using namespace catmzi;

namespace {

FockVector random_two_mode(std::uint64_t key, int na, int nb) {
    CounterRng rng(key);
    FockVector psi;
    psi.modes = 2;
    psi.na = na;
    psi.nb = nb;
    psi.amps = Vec(psi.dim());
    for (int i = 0; i < psi.dim(); ++i)
        psi.amps[i] = cd(rng.next_double() - 0.5, rng.next_double() - 0.5);
    psi.normalize();
    return psi;
}

// (a+ b - a b+) / 2i assembled from dense ladder operators
Mat dense_jy_oracle(int na, int nb) {
    const int da = na + 1, db = nb + 1;
    Mat adag = Mat::Zero(da, da), bdag = Mat::Zero(db, db);
    for (int n = 0; n + 1 < da; ++n)
        adag(n + 1, n) = std::sqrt(double(n + 1));
    for (int m = 0; m + 1 < db; ++m)
        bdag(m + 1, m) = std::sqrt(double(m + 1));
    const Mat ia = Mat::Identity(da, da), ib = Mat::Identity(db, db);
    const auto kron = [](const Mat& x, const Mat& y) {
        Mat out(x.rows() * y.rows(), x.cols() * y.cols());
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j)
                out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) =
                    x(i, j) * y;
        return out;
    };
    const Mat ab = kron(adag, ib) * kron(ia, bdag.adjoint().eval());
    return (ab - ab.adjoint().eval()) / cd(0.0, 2.0);
}

} // namespace

TEST_SUITE("jy_mzi") {

TEST_CASE("block assembly matches the dense ladder-operator oracle") {
    for (const auto& [na, nb] : {std::pair{3, 3}, {5, 2}, {2, 6}}) {
        const JyOperator jy = JyOperator::build(na, nb);
        const Mat dense = jy.dense();
        const Mat oracle = dense_jy_oracle(na, nb);
        REQUIRE(dense.rows() == oracle.rows());
        CHECK((dense - oracle).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("apply agrees with the dense matrix") {
    const JyOperator jy = JyOperator::build(4, 5);
    const Mat oracle = dense_jy_oracle(4, 5);
    const FockVector psi = random_two_mode(7, 4, 5);
    const FockVector jpsi = jy.apply(psi);
    CHECK((jpsi.amps - oracle * psi.amps).norm() < 1e-13);
}

TEST_CASE("rotation is unitary and has the group property") {
    const JyOperator jy = JyOperator::build(6, 6);
    for (std::uint64_t k = 0; k < 20; ++k) {
        CounterRng rng(100 + k);
        const double t1 = 4.0 * rng.next_double() - 2.0;
        const double t2 = 4.0 * rng.next_double() - 2.0;
        const FockVector psi = random_two_mode(200 + k, 6, 6);
        const FockVector r1 = jy.rotate(psi, t1);
        CHECK(r1.norm2() == doctest::Approx(1.0).epsilon(1e-12));
        const FockVector r12 = jy.rotate(r1, t2);
        const FockVector direct = jy.rotate(psi, t1 + t2);
        CHECK((r12.amps - direct.amps).norm() < 1e-11);
    }
}

TEST_CASE("rotation generator is -i Jy") {
    const JyOperator jy = JyOperator::build(5, 5);
    const FockVector psi = random_two_mode(33, 5, 5);
    const double h = 1e-6;
    const FockVector plus = jy.rotate(psi, h);
    const FockVector minus = jy.rotate(psi, -h);
    const Vec fd = (plus.amps - minus.amps) / (2.0 * h);
    const Vec expect = cd(0.0, -1.0) * jy.apply(psi).amps;
    CHECK((fd - expect).norm() < 1e-8);
}

TEST_CASE("total photon number is conserved") {
    const JyOperator jy = JyOperator::build(5, 5);
    FockVector psi = tensor_product(fock_basis(2, 5), fock_basis(3, 5));
    const FockVector rot = jy.rotate(psi, 0.7);
    for (int n = 0; n <= 5; ++n)
        for (int m = 0; m <= 5; ++m)
            if (n + m != 5)
                CHECK(std::abs(rot.amps[rot.index(n, m)]) < 1e-13);
}

TEST_CASE("theta = pi swaps the ports") {
    const JyOperator jy = JyOperator::build(3, 3);
    const FockVector in10 = tensor_product(fock_basis(1, 3), fock_basis(0, 3));
    const FockVector in01 = tensor_product(fock_basis(0, 3), fock_basis(1, 3));
    const FockVector out = jy.rotate(in10, M_PI);
    CHECK(std::abs(out.amps[out.index(0, 1)] - cd(1.0, 0.0)) < 1e-12);
    const FockVector back = jy.rotate(in01, M_PI);
    CHECK(std::abs(back.amps[back.index(1, 0)] + cd(1.0, 0.0)) < 1e-12);
}

TEST_CASE("coherent pair moments") {
    const cd alpha(1.2, 0.0), beta(0.0, 0.8);
    const FockVector psi =
        tensor_product(coherent_state(alpha, 18), coherent_state(beta, 18));
    const JyOperator jy = JyOperator::build(18, 18);
    CHECK(jy.expectation(psi) ==
          doctest::Approx(std::imag(std::conj(alpha) * beta)).epsilon(1e-9));
    CHECK(jy.variance(psi) ==
          doctest::Approx((std::norm(alpha) + std::norm(beta)) / 4.0)
              .epsilon(1e-9));
}

TEST_CASE("density rotation matches the pure route") {
    const JyOperator jy = JyOperator::build(4, 4);
    const FockVector psi = random_two_mode(55, 4, 4);
    const DensityMatrix r1 = jy.rotate(pure_density(psi), 0.9);
    const DensityMatrix r2 = pure_density(jy.rotate(psi, 0.9));
    CHECK((r1.rho - r2.rho).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("standalone transform matches the cached operator") {
    const FockVector psi = random_two_mode(66, 4, 3);
    const JyOperator jy = JyOperator::build(4, 3);
    const FockVector a = mzi_transform(psi, 0.37);
    const FockVector b = jy.rotate(psi, 0.37);
    CHECK((a.amps - b.amps).norm() < 1e-13);
    const DensityMatrix da = mzi_transform(pure_density(psi), 0.37);
    CHECK((da.rho - pure_density(b).rho).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("shape mismatches are rejected") {
    const JyOperator jy = JyOperator::build(4, 4);
    CHECK_THROWS_AS(jy.apply(random_two_mode(1, 3, 4)), ConfigError);
    CHECK_THROWS_AS(jy.apply(coherent_state(1.0, 4)), ConfigError);
    CHECK_THROWS_AS(JyOperator::build(-1, 4), ConfigError);
}

} // TEST_SUITE
