#include "doctest.h"
#include "oracles.hpp"

#include "gaudin/errors.hpp"
#include "gaudin/rg_core.hpp"

#include <random>

using namespace gaudin;
using Eigen::VectorXcd;

namespace {

ModelSpec trig_model(std::vector<double> etas, std::vector<int> twice, double g, int n) {
    std::vector<Spin> spins;
    for (int t : twice) spins.emplace_back(t);
    return ModelSpec{LevelSet(std::move(etas), std::move(spins)), GaudinKind::trigonometric, n, g, std::nullopt};
}

RapiditySet eta(std::initializer_list<cplx> v) {
    RapiditySet r{VectorXcd(static_cast<Eigen::Index>(v.size())), Frame::rg_eta};
    Eigen::Index a = 0;
    for (cplx c : v) r.values[a++] = c;
    return r;
}

RapiditySet xs(std::initializer_list<cplx> v) {
    RapiditySet r = eta(v);
    r.frame = Frame::dicke_x;
    return r;
}

DickeSpec jc(double hw, double eps, double G, int twice = 1, int n = 1) {
    return DickeSpec{{eps}, {Spin(twice)}, G, hw, n};
}

}  // namespace

TEST_CASE("free coupling gives unit residuals") {
    const auto m = trig_model({1, 2, 3}, {1, 1, 1}, 0.0, 2);
    const auto rep = rg_residual(m, eta({cplx(0.3, 0.2), cplx(0.3, -0.2)}));
    CHECK(std::abs(rep.residuals[0] - 1.0) < 1e-15);
    CHECK(std::abs(rep.residuals[1] - 1.0) < 1e-15);
    CHECK(rep.max_abs == doctest::Approx(1.0));
}

TEST_CASE("single-level closed form root") {
    const auto m = trig_model({1}, {1}, 0.2, 1);
    CHECK(rg_residual(m, eta({11.0 / 9.0})).max_abs < 1e-14);
    CHECK(rg_residual(m, eta({1.3})).max_abs > 1e-3);
}

TEST_CASE("permutation equivariance and conjugation symmetry") {
    const auto m = trig_model({0.5, 1.7, 3.1}, {1, 2, 1}, -0.2, 3);
    const auto r = eta({cplx(0.9, 0.4), cplx(0.9, -0.4), cplx(2.4, 0.0)});
    const auto p = eta({cplx(2.4, 0.0), cplx(0.9, 0.4), cplx(0.9, -0.4)});
    const auto a = rg_residual(m, r);
    const auto b = rg_residual(m, p);
    CHECK(a.max_abs == doctest::Approx(b.max_abs).epsilon(1e-14));
    CHECK(std::abs(a.residuals[2] - b.residuals[0]) < 1e-14);
    CHECK(std::abs(a.residuals[0] - b.residuals[1]) < 1e-14);

    RapiditySet c = r;
    c.values = r.values.conjugate();
    const auto cc = rg_residual(m, c);
    CHECK((cc.residuals - a.residuals.conjugate()).norm() < 1e-14);
}

TEST_CASE("endpoint identities of the deformed family") {
    const auto m = trig_model({1, 2, 3, 4}, {1, 1, 1, 1}, -0.15, 2);
    const auto r = eta({cplx(1.4, 0.3), cplx(2.6, -0.1)});
    const auto d1 = deformed_rg_residual(m, 1.0, r);
    const auto ref = rg_residual(m, r);
    CHECK((d1.residuals - ref.residuals).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((*d1.jacobian - *ref.jacobian).cwiseAbs().maxCoeff() < 1e-14);
    const auto d0 = deformed_rg_residual(m, 0.0, r);
    const auto tda = tda_residual(m, r);
    CHECK((d0.residuals - tda.residuals).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(tda.decoupled);
    CHECK_THROWS_AS(deformed_rg_residual(m, 1.2, r), DomainError);
}

TEST_CASE("decoupled equations") {
    const auto m = trig_model({1}, {1}, 0.1, 2);
    CHECK(deformed_rg_residual(m, 0.0, eta({1.5})).max_abs < 1e-15);
    const auto rep = deformed_rg_residual(m, 0.0, eta({cplx(1.5, 0.1), cplx(1.5, -0.1)}));
    REQUIRE(rep.jacobian);
    CHECK((*rep.jacobian)(0, 1) == cplx(0.0));
    CHECK((*rep.jacobian)(1, 0) == cplx(0.0));
    CHECK(tda_residual(m, eta({1.5})).max_abs < 1e-15);
    const auto free = trig_model({1}, {1}, 0.0, 1);
    CHECK(tda_residual(free, eta({0.7})).max_abs == doctest::Approx(1.0));
}

TEST_CASE("assembled from explicit matrices") {
    const auto m = trig_model({0.3, 1.1, 2.0}, {1, 3, 1}, 0.12, 2);
    const auto r = eta({cplx(0.6, 0.2), cplx(1.7, -0.3)});
    CHECK((rg_residual_via_matrices(m, r).residuals - rg_residual(m, r).residuals).norm() < 1e-13);
}

TEST_CASE("Dicke RG equations: quadratic oracles") {
    SUBCASE("Jaynes-Cummings") {
        // (hw - x)(eps - x) = G^2
        const auto [lo, hi] = oracle::quadratic_roots(1.0, -2.0, 1.0 - 0.25);
        const auto spec = jc(1, 1, 0.5);
        CHECK(lo == doctest::Approx(0.5));
        CHECK(hi == doctest::Approx(1.5));
        CHECK(dicke_rg_residual(spec, xs({lo})).max_abs < 1e-14);
        CHECK(dicke_rg_residual(spec, xs({hi})).max_abs < 1e-14);
    }
    SUBCASE("spin one") {
        // (1 - x)^2 = 2 G^2 s
        const auto spec = jc(1, 1, 0.5, 2);
        CHECK(dicke_rg_residual(spec, xs({1.0 - 1.0 / std::sqrt(2.0)})).max_abs < 1e-14);
        CHECK(dicke_rg_residual(spec, xs({1.0 + 1.0 / std::sqrt(2.0)})).max_abs < 1e-14);
    }
    SUBCASE("free photon") {
        const auto spec = jc(1.3, 0.7, 0.0);
        CHECK(dicke_rg_residual(spec, xs({1.3})).max_abs == 0.0);
    }
    SUBCASE("collision with a level") {
        const auto spec = jc(1, 1, 0.5);
        try {
            dicke_rg_residual(spec, xs({1.0}));
            FAIL("expected a collision");
        } catch (const SingularEvaluationError& e) {
            CHECK(e.offending_pair().first == 0);
        }
    }
    SUBCASE("frame mismatch") {
        CHECK_THROWS_AS(dicke_rg_residual(jc(1, 1, 0.5), eta({0.5})), ContractError);
        CHECK_THROWS_AS(rg_residual(trig_model({1}, {1}, 0.1, 1), xs({0.5})), ContractError);
    }
}

TEST_CASE("single-copy family approaches the Dicke equations") {
    const DickeSpec spec = jc(1, 1, 0.5);
    const DeformedCopy copy = DeformedCopy::for_excitations(1);
    const auto x = xs({0.3});
    const double target = dicke_rg_residual(spec, x).residuals[0].real();
    std::vector<double> gaps;
    for (double xi : {1e-4, 1e-6, 1e-8}) {
        const auto rep = deformed_dicke_residual(spec, copy, xi, x);
        gaps.push_back(std::abs(spec.hbar_omega * rep.residuals[0] - target));
    }
    CHECK(gaps[0] < 1e-2);
    // a sqrt(xi) rate already gives a factor of 10 over two decades
    CHECK(gaps[1] < gaps[0] / 10.0);
    CHECK(gaps[2] < gaps[1] / 10.0);
    // on the JC root the residual tends to zero
    CHECK(std::abs(deformed_dicke_residual(spec, copy, 1e-6, xs({0.5})).residuals[0]) < 1e-2);
    CHECK_THROWS_AS(deformed_dicke_residual(spec, copy, 0.0, x), ContractionLimitError);
    // the xi = 0 end of the family is exactly the Dicke system
    const FamilyPoint p = evaluate_single_copy(spec, copy, 0.0, x.values);
    CHECK((p.f - dicke_rg_residual(spec, x).residuals).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("copy degeneracy enters only through xi / Omega") {
    const DickeSpec spec = jc(1, 0.8, 0.4);
    const DeformedCopy a{Spin(1)};  // Omega 2
    const DeformedCopy b{Spin(3)};  // Omega 4
    for (double xi : {0.5, 0.1, 0.01}) {
        CHECK(contraction_coupling(spec, b, xi) == doctest::Approx(contraction_coupling(spec, a, xi / 2)));
        CHECK(contraction_scale(spec, b, xi) == doctest::Approx(contraction_scale(spec, a, xi / 2)));
    }
}

TEST_CASE("frames convert back and forth") {
    const DickeSpec spec = jc(1, 0.8, 0.4);
    const DeformedCopy copy{Spin(2)};
    const auto x = xs({cplx(0.3, 0.1), cplx(1.2, -0.4)});
    const auto e = to_rg_frame(x, spec, copy, 0.3);
    CHECK(e.frame == Frame::rg_eta);
    CHECK((to_dicke_frame(e, spec, copy, 0.3).values - x.values).norm() < 1e-14);
    CHECK_THROWS_AS(to_rg_frame(x, spec, copy, 0.0), DomainError);
}

TEST_CASE("xi = 1 single copy matches a far-away explicit level") {
    const DickeSpec spec = jc(1, 1, 0.5);
    const DeformedCopy copy = DeformedCopy::for_excitations(1);
    const ModelSpec aux = auxiliary_rg_model(spec, copy);
    const auto x = xs({0.7});
    const auto e = to_rg_frame(x, spec, copy, 1.0);
    const auto single = deformed_dicke_residual(spec, copy, 1.0, x);
    CHECK(std::abs(single.residuals[0] - rg_residual(aux, e).residuals[0]) < 1e-13);

    // explicit two-level trigonometric model with eta_0 = 1e8
    const ModelSpec explicit_model{
        LevelSet({1e8, aux.levels.eta(0)}, {copy.s0, aux.levels.spin(0)}), GaudinKind::trigonometric, 1, aux.g,
        std::nullopt};
    CHECK(std::abs(single.residuals[0] - rg_residual(explicit_model, e).residuals[0]) < 1e-6);
}

TEST_CASE("analytic Jacobians match finite differences") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto m = trig_model({0.4, 1.3, 2.2}, {1, 2, 1}, -0.17, 3);
    const DickeSpec d{{0.8, 1.3}, {Spin(1), Spin(1)}, 0.2, 1.0, 3};
    const DeformedCopy copy = DeformedCopy::for_excitations(3);
    for (int trial = 0; trial < 5; ++trial) {
        VectorXcd v(3);
        v << cplx(0.7 + u(gen), 0.3 + 0.2 * u(gen)), cplx(1.8 + u(gen), -0.4 - 0.2 * u(gen)), cplx(3.0 + u(gen), 0.0);
        const double xi = 0.1 + 0.8 * u(gen);
        auto check = [&](auto family, Frame frame) {
            const RapiditySet r{v, frame};
            const auto rep = family(r);
            const auto fd = oracle::fd_jacobian([&](const VectorXcd& y) { return family(RapiditySet{y, frame}).residuals; }, v);
            CHECK(oracle::rel_diff(*rep.jacobian, fd) < 1e-6);
        };
        check([&](const RapiditySet& r) { return rg_residual(m, r); }, Frame::rg_eta);
        check([&](const RapiditySet& r) { return deformed_rg_residual(m, xi, r); }, Frame::rg_eta);
        check([&](const RapiditySet& r) { return tda_residual(m, r); }, Frame::rg_eta);
        check([&](const RapiditySet& r) { return dicke_rg_residual(d, r); }, Frame::dicke_x);
        check([&](const RapiditySet& r) { return deformed_dicke_residual(d, copy, xi, r); }, Frame::dicke_x);
    }
}

TEST_CASE("family evaluation at complex xi is consistent") {
    const auto m = trig_model({1, 2, 3}, {1, 1, 1}, -0.2, 2);
    VectorXcd v(2);
    v << cplx(1.4, 0.2), cplx(2.5, -0.1);
    const FamilyPoint real_pt = evaluate_all_copies(m, 0.4, v);
    CHECK((real_pt.f - deformed_rg_residual(m, 0.4, RapiditySet{v, Frame::rg_eta}).residuals).norm() < 1e-14);
    // d f / d xi against a complex-direction difference
    const cplx xi(0.4, 0.1);
    const double h = 1e-6;
    const VectorXcd fd = (evaluate_all_copies(m, xi + cplx(0, h), v).f - evaluate_all_copies(m, xi - cplx(0, h), v).f) /
                         cplx(0, 2 * h);
    CHECK((evaluate_all_copies(m, xi, v).dxi - fd).norm() < 1e-7);
}
