#include "doctest.h"
#include "oracles.hpp"

#include "gaudin/algebra.hpp"
#include "gaudin/errors.hpp"

#include <array>
#include <random>

using namespace gaudin;

namespace {

LevelSet halves(std::vector<double> etas) {
    std::vector<Spin> spins(etas.size(), Spin(1));
    return LevelSet(std::move(etas), std::move(spins));
}

}  // namespace

TEST_CASE("trigonometric pair entries") {
    const auto g = build_gaudin(GaudinKind::trigonometric, halves({1, 2}));
    CHECK(g.x(0, 1).real() == doctest::Approx(-std::sqrt(10.0)).epsilon(1e-14));
    CHECK(g.z(0, 1).real() == doctest::Approx(-3.0).epsilon(1e-14));
    CHECK(std::abs(g.x(0, 1) * g.x(0, 1) - g.z(0, 1) * g.z(0, 1) - 1.0) < 1e-13);
    CHECK(antisymmetry_defect(g) == 0.0);
}

TEST_CASE("rational pair entries") {
    const auto g = build_gaudin(GaudinKind::rational, halves({0, 2}));
    CHECK(g.x(0, 1).real() == doctest::Approx(-0.5));
    CHECK(g.z(0, 1).real() == doctest::Approx(-0.5));
    CHECK(gaudin_constant_deviation(g) < 1e-15);
}

TEST_CASE("Gaudin identity on a triple") {
    const auto g = build_gaudin(GaudinKind::trigonometric, halves({1, 2, 3}));
    const cplx r = g.x(0, 1) * g.x(1, 2) - g.x(0, 2) * (g.z(0, 1) + g.z(1, 2));
    CHECK(std::abs(r) < 1e-14);
    CHECK(gaudin_identity_residual(g) < 1e-14);
}

TEST_CASE("entries agree with the direct formulas") {
    const std::vector<double> etas{-1.3, 0.2, 0.9, 2.5};
    const auto t = build_gaudin(GaudinKind::trigonometric, halves(etas));
    const auto r = build_gaudin(GaudinKind::rational, halves(etas));
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            CHECK(std::abs(t.x(i, j) - oracle::trig_x(etas[i], etas[j])) < 1e-13);
            CHECK(std::abs(t.z(i, j) - oracle::trig_z(etas[i], etas[j])) < 1e-13);
            CHECK(std::abs(r.x(i, j) - oracle::rat_xz(etas[i], etas[j])) < 1e-13);
        }
    }
}

TEST_CASE("duplicate levels are rejected") {
    CHECK_THROWS_AS(halves({1.0, 1.0}), DegenerateLevelError);
    CHECK_THROWS_AS(halves({1.0, 1.0 + 1e-12}), DegenerateLevelError);
    CHECK_THROWS_AS(LevelSet({}, {}), ValidationError);
    CHECK_THROWS_AS(LevelSet({1.0, 2.0}, {Spin(1)}), ValidationError);
}

TEST_CASE("degeneracies map to spins") {
    const std::array<int, 3> om{2, 3, 4};
    const auto l = LevelSet::from_degeneracies({0, 1, 2}, om);
    CHECK(l.spin(0).value() == 0.5);
    CHECK(l.spin(1).value() == 1.0);
    CHECK(l.degeneracy(2) == 4);
    CHECK_THROWS(Spin::from_value(0.3));
}

TEST_CASE("extension by rapidities") {
    const LevelSet lv = halves({1, 2});
    const auto base = build_gaudin(GaudinKind::trigonometric, lv);
    SUBCASE("single rapidity") {
        const std::vector<cplx> r{3.0};
        const auto e = extend_with_rapidities(base, lv, r);
        REQUIRE(e.dim() == 3);
        CHECK(e.x(0, 2).real() == doctest::Approx(-std::sqrt(20.0) / 2).epsilon(1e-14));
        CHECK(e.z(0, 2).real() == doctest::Approx(-2.0).epsilon(1e-14));
        CHECK(e.x.topLeftCorner(2, 2) == base.x);
    }
    SUBCASE("two rapidities keep the identity") {
        const std::vector<cplx> r{3.0, 4.0};
        const auto e = extend_with_rapidities(base, lv, r);
        CHECK(gaudin_identity_residual(e) < 1e-13);
        CHECK(gaudin_constant_deviation(e) < 1e-13);
    }
    SUBCASE("rational") {
        const LevelSet one = halves({0});
        const std::vector<cplx> r{1.0};
        const auto e = extend_with_rapidities(build_gaudin(GaudinKind::rational, one), one, r);
        CHECK(e.x(0, 1).real() == doctest::Approx(-1.0));
    }
    SUBCASE("collisions") {
        const std::vector<cplx> on_level{2.0 + 1e-12};
        CHECK_THROWS_AS(extend_with_rapidities(base, lv, on_level), SingularEvaluationError);
        const std::vector<cplx> pair{cplx(3, 1), cplx(3, 1)};
        try {
            extend_with_rapidities(base, lv, pair);
            FAIL("expected a collision");
        } catch (const SingularEvaluationError& e) {
            CHECK(e.offending_pair().first != e.offending_pair().second);
        }
    }
}

TEST_CASE("complex rapidities keep the Gaudin algebra") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 2 + trial % 7;
        const LevelSet lv = halves(oracle::jittered_levels(m, gen));
        const auto r = oracle::random_rapidities(1 + trial % 4, gen);
        for (GaudinKind kind : {GaudinKind::rational, GaudinKind::trigonometric}) {
            const auto e = extend_with_rapidities(build_gaudin(kind, lv), lv, r);
            CHECK(gaudin_identity_residual(e) < 1e-12);
            CHECK(gaudin_constant_deviation(e) < 1e-12);
            CHECK(antisymmetry_defect(e) == 0.0);
        }
    }
}

TEST_CASE("rows at infinity") {
    auto r0 = eta0_infinity_row(halves({0.0}));
    CHECK(r0.x0[0] == 1.0);
    CHECK(r0.z0[0] == 0.0);
    auto r1 = eta0_infinity_row(halves({-0.75}));
    CHECK(r1.x0[0] == doctest::Approx(1.25));
    CHECK(r1.z0[0] == doctest::Approx(-0.75));

    const LevelSet lv = halves({1, 2});
    const auto rows = eta0_infinity_row(lv);
    const auto g = build_gaudin(GaudinKind::trigonometric, lv);
    CHECK(reconstruct_x_from_infinity(rows, 0, 1) == doctest::Approx(-std::sqrt(10.0)).epsilon(1e-13));
    CHECK(reconstruct_x_from_infinity(rows, 0, 1) == doctest::Approx(g.x(0, 1).real()).epsilon(1e-13));

    // the rows are the limit of an actual far level
    const double far = 1e7;
    const auto r15 = eta0_infinity_row(halves({1.5}));
    CHECK(std::abs(oracle::trig_z(far, 1.5) - r15.z0[0]) < 1e-6);
    CHECK(std::abs(oracle::trig_x(far, 1.5) - r15.x0[0]) < 1e-6);
}

TEST_CASE("reconstruction identity on random sets") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 20; ++trial) {
        const LevelSet lv = halves(oracle::jittered_levels(2 + trial % 7, gen));
        const auto rows = eta0_infinity_row(lv);
        const auto g = build_gaudin(GaudinKind::trigonometric, lv);
        for (std::size_t i = 0; i < lv.size(); ++i) {
            for (std::size_t k = 0; k < lv.size(); ++k) {
                if (i == k) continue;
                const double direct = g.x(i, k).real();
                CHECK(std::abs(reconstruct_x_from_infinity(rows, i, k) - direct) <= 1e-12 * std::abs(direct));
            }
        }
    }
}

TEST_CASE("deformed spin labels") {
    const auto a = deformed_spin(DeformationPoint(1.0, 2), Spin(1));
    CHECK(a.s_xi() == doctest::Approx(0.5));
    CHECK(a.xi_s_xi == doctest::Approx(0.5));
    const auto b = deformed_spin(DeformationPoint(0.5, 2), Spin(1));
    CHECK(b.s_xi() == doctest::Approx(2.5));
    CHECK(b.xi_s_xi == doctest::Approx(1.25));
    const auto c = deformed_spin(DeformationPoint(0.0, 2), Spin(1));
    CHECK(c.xi_s_xi == doctest::Approx(2.0));
    CHECK_THROWS_AS(c.s_xi(), ContractionLimitError);
    CHECK(deformed_spin(DeformationPoint(1e-9, 2), Spin(1)).xi_s_xi == doctest::Approx(2.0).epsilon(1e-8));
    CHECK_THROWS_AS(DeformationPoint(1.5, 2), DomainError);
    CHECK_THROWS_AS(DeformationPoint(-0.1, 2), DomainError);
}

TEST_CASE("xi s(xi) is linear in xi") {
    const double e0 = deformed_spin(DeformationPoint(0.0, 3), Spin(2)).xi_s_xi;
    const double e1 = deformed_spin(DeformationPoint(1.0, 3), Spin(2)).xi_s_xi;
    for (double xi : {0.1, 0.37, 0.8}) {
        CHECK(deformed_spin(DeformationPoint(xi, 3), Spin(2)).xi_s_xi == doctest::Approx(e0 + xi * (e1 - e0)));
    }
}

TEST_CASE("unitary grid") {
    for (int omega : {2, 3, 5}) {
        for (int n = 0; n < 40; n += 3) {
            const double xi = unitary_grid_point(n, omega);
            const Spin s1(omega - 1);
            const double s = deformed_spin(DeformationPoint(xi, omega), s1).s_xi();
            CHECK(s == doctest::Approx(s1.value() + 0.5 * n));
            CHECK(unitary_grid_index(xi, omega) == n);
            CHECK(deformed_spin_on_grid(xi, s1).twice() == s1.twice() + n);
        }
    }
    CHECK(!unitary_grid_index(0.3, 2).has_value());
    CHECK_THROWS_AS(deformed_spin_on_grid(0.3, Spin(1)), RepresentationError);
}
