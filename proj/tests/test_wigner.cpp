#include <doctest.h>

#include <cmath>

#include "catmzi/prep.hpp"
#include "catmzi/rng.hpp"
#include "catmzi/wigner.hpp"

using namespace catmzi;

namespace {

const double kRootTen = std::sqrt(10.0);

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

FockVector odd_cat(int cutoff = 40) {
    PrepParams p;
    p.alpha = kRootTen;
    p.u0 = 1.0;
    p.t = M_PI;
    p.cutoff = cutoff;
    return std::get<FockVector>(prepare_ideal(p).light);
}

double value_at(const WignerMap& map, double x, double y) {
    const auto& g = map.grid;
    const int i = int(std::lround((x - g.re_min) / g.re_step()));
    const int j = int(std::lround((y - g.im_min) / g.im_step()));
    REQUIRE(std::abs(g.re_at(i) - x) < 1e-12);
    REQUIRE(std::abs(g.im_at(j) - y) < 1e-12);
    return map.values(i, j);
}

} // namespace

TEST_SUITE("wigner") {

TEST_CASE("vacuum is a gaussian of height 2/pi") {
    const WignerMap map = wigner(fock_basis(0, 12), PhaseGrid::square(2, 41));
    for (const auto& [x, y] : {std::pair{0.0, 0.0}, {0.5, 0.0}, {1.0, -1.5}}) {
        const double expect =
            (2.0 / M_PI) * std::exp(-2.0 * (x * x + y * y));
        CHECK(value_at(map, x, y) == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("a coherent state is the displaced vacuum gaussian") {
    const cd alpha(1.2, -0.6);
    const FockVector psi = coherent_state(alpha, default_cutoff(1.8));
    const WignerMap map = wigner(psi, PhaseGrid::square(3, 61));
    for (const auto& [x, y] :
         {std::pair{1.2, -0.6}, {1.0, -0.5}, {0.3, 0.3}}) {
        const double expect =
            (2.0 / M_PI) * std::exp(-2.0 * std::norm(cd(x, y) - alpha));
        CHECK(value_at(map, x, y) == doctest::Approx(expect).epsilon(1e-7));
    }
}

TEST_CASE("single photon is maximally negative at the origin") {
    const WignerMap map = wigner(fock_basis(1, 10), PhaseGrid::square(1, 21));
    CHECK(value_at(map, 0, 0) == doctest::Approx(-2.0 / M_PI).epsilon(1e-12));
}

TEST_CASE("the odd cat is negative at the origin") {
    const FockVector cat = odd_cat();
    const WignerMap map = wigner(cat, PhaseGrid::square(0.5, 11));
    CHECK(value_at(map, 0, 0) == doctest::Approx(-2.0 / M_PI).epsilon(1e-9));
}

TEST_CASE("origin value equals the parity sum") {
    const FockVector cat =
        std::get<FockVector>(([] {
                                 PrepParams p;
                                 p.alpha = kRootTen;
                                 p.u0 = 1.0;
                                 p.t = M_PI / 2;
                                 p.cutoff = 40;
                                 return prepare_ideal(p);
                             })()
                                 .light);
    double parity = 0.0;
    for (int n = 0; n <= cat.na; ++n)
        parity += (n % 2 == 0 ? 1.0 : -1.0) * std::norm(cat.amps[n]);
    const double expect = (2.0 / M_PI) * parity;
    const WignerMap at0 = wigner(cat, PhaseGrid::square(1e-9, 3));
    CHECK(at0.values(1, 1) == doctest::Approx(expect).epsilon(1e-12));
    // just off the origin exercises the displaced branch
    CHECK(at0.values(2, 2) == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("overlap identity on random pure pairs") {
    const PhaseGrid grid = PhaseGrid::square(8, 201);
    for (std::uint64_t k = 0; k < 10; ++k) {
        const FockVector a = random_state(900 + 2 * k, 12);
        const FockVector b = random_state(901 + 2 * k, 12);
        const double exact = std::norm(a.amps.dot(b.amps));
        const double est = wigner_overlap(wigner(a, grid), wigner(b, grid));
        CHECK(std::abs(est - exact) <= 0.01 * std::max(exact, 0.02));
    }
}

TEST_CASE("density maps are weighted pure maps") {
    const FockVector p1 = random_state(33, 8);
    const FockVector p2 = random_state(34, 8);
    const PhaseGrid grid = PhaseGrid::square(3, 31);
    const WignerMap w1 = wigner(p1, grid);
    const WignerMap w2 = wigner(p2, grid);
    SUBCASE("pure density equals the vector route") {
        const WignerMap wd = wigner(pure_density(p1), grid);
        CHECK((wd.values - w1.values).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("mixtures are linear") {
        DensityMatrix mix;
        mix.na = 8;
        mix.rho = 0.3 * pure_density(p1).rho + 0.7 * pure_density(p2).rho;
        const WignerMap wd = wigner(StateVariant(mix), grid);
        CHECK((wd.values - (0.3 * w1.values + 0.7 * w2.values))
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    }
}

TEST_CASE("total mass on a generous grid is one") {
    const FockVector psi = coherent_state(1.5, 30);
    CHECK(wigner_mass(wigner(psi, PhaseGrid::square(6, 121))) ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(wigner_mass(wigner(odd_cat(), default_grid(10.0))) ==
          doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("large displacements stay accurate") {
    // |beta|^2 = 100 checks the factored displacement at scale
    const double beta = 10.0;
    const FockVector psi = coherent_state(beta, default_cutoff(100.0));
    const WignerMap map =
        wigner(psi, PhaseGrid::square(10.5, 43));
    const double peak = value_at(map, 10.0, 0.0);
    CHECK(peak == doctest::Approx(2.0 / M_PI).epsilon(1e-6));
    CHECK(value_at(map, 9.5, 0.0) ==
          doctest::Approx((2.0 / M_PI) * std::exp(-2.0 * 0.25))
              .epsilon(1e-4));
}

TEST_CASE("interference fringe direction") {
    SUBCASE("u0t = pi") {
        const double angle =
            gradient_direction(wigner(odd_cat(), default_grid(10.0)));
        CHECK(std::abs(angle - M_PI / 2) < 1e-6);
    }
    SUBCASE("u0t = pi/2") {
        PrepParams p;
        p.alpha = kRootTen;
        p.u0 = 1.0;
        p.t = M_PI / 2;
        p.cutoff = 40;
        const FockVector cat =
            std::get<FockVector>(prepare_ideal(p).light);
        const double angle =
            gradient_direction(wigner(cat, default_grid(10.0)));
        CHECK(std::abs(angle - 3 * M_PI / 4) < 1e-6);
    }
    SUBCASE("isotropic maps have no direction") {
        const WignerMap map =
            wigner(fock_basis(0, 10), PhaseGrid::square(3, 61));
        CHECK_THROWS_AS(gradient_direction(map), NumericalError);
    }
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(wigner(fock_basis(0, 4), PhaseGrid::square(0.0, 21)),
                    ConfigError);
    CHECK_THROWS_AS(wigner(fock_basis(0, 4), PhaseGrid::square(2, 1)),
                    ConfigError);
    PhaseGrid bad = PhaseGrid::square(2, 21);
    bad.re_min = 3.0; // above re_max
    CHECK_THROWS_AS(wigner(fock_basis(0, 4), bad), ConfigError);
    const WignerMap w1 = wigner(fock_basis(0, 4), PhaseGrid::square(2, 21));
    const WignerMap w2 = wigner(fock_basis(0, 4), PhaseGrid::square(2, 31));
    CHECK_THROWS_AS(wigner_overlap(w1, w2), ConfigError);
}

} // TEST_SUITE
