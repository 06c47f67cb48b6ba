#include "doctest.h"
#include "oracles.hpp"

#include "gaudin/dicke.hpp"
#include "gaudin/ed_oracle.hpp"
#include "gaudin/errors.hpp"
#include "gaudin/solver.hpp"

#include <algorithm>
#include <random>

using namespace gaudin;
using Eigen::MatrixXcd;

namespace {

OperatorExpression single(OpSymbol s, int site, cplx c = 1.0) {
    OperatorExpression e;
    e.add(c, {{s, site}});
    return e;
}

ModelSpec model(GaudinKind kind, std::vector<double> etas, std::vector<int> twice, double g, int n) {
    std::vector<Spin> spins;
    for (int t : twice) spins.emplace_back(t);
    return ModelSpec{LevelSet(std::move(etas), std::move(spins)), kind, n, g, std::nullopt};
}

double max_pair_commutator(const std::vector<MatrixOperator>& ops) {
    double worst = 0.0;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        for (std::size_t j = i + 1; j < ops.size(); ++j) worst = std::max(worst, commutator_norm(ops[i], ops[j]));
    }
    return worst;
}

}  // namespace

TEST_CASE("spin one-half matrices") {
    const auto basis = HilbertBasis::make({LocalSpace::spin(Spin(1))});
    const auto sz = realize(single(OpSymbol::spin_weight, 0), basis);
    CHECK(sz.matrix(0, 0) == cplx(-0.5));
    CHECK(sz.matrix(1, 1) == cplx(0.5));
    const auto sp = realize(single(OpSymbol::spin_raise, 0), basis);
    const auto sm = realize(single(OpSymbol::spin_lower, 0), basis);
    CHECK((sp.matrix * sm.matrix - sm.matrix * sp.matrix - 2.0 * sz.matrix).norm() < 1e-15);
}

TEST_CASE("spin algebra for larger spins") {
    for (int twice : {2, 3, 6}) {
        const double s = 0.5 * twice;
        const auto basis = HilbertBasis::make({LocalSpace::spin(Spin(twice))});
        const auto sp = realize(single(OpSymbol::spin_raise, 0), basis).matrix;
        const auto sm = realize(single(OpSymbol::spin_lower, 0), basis).matrix;
        const auto sz = realize(single(OpSymbol::spin_weight, 0), basis).matrix;
        CHECK((sp - oracle::spin_plus(s)).norm() < 1e-14);
        CHECK((sz * sp - sp * sz - sp).norm() < 1e-13);
        CHECK((sp * sm - sm * sp - 2.0 * sz).norm() < 1e-13);
    }
}

TEST_CASE("truncated boson commutator") {
    const auto basis = HilbertBasis::make({LocalSpace::boson(3)});
    const auto b = realize(single(OpSymbol::boson_annihilate, 0), basis).matrix;
    const auto bd = realize(single(OpSymbol::boson_create, 0), basis).matrix;
    const MatrixOperator n = realize(single(OpSymbol::boson_number, 0), basis);
    const MatrixXcd comm = b * bd - bd * b;
    CHECK((comm.topLeftCorner(3, 3) - MatrixXcd::Identity(3, 3)).norm() < 1e-14);
    CHECK(comm(3, 3).real() == doctest::Approx(-3.0));  // the truncation edge
    CHECK((bd * b - n.matrix).norm() < 1e-14);
}

TEST_CASE("JC sector matrix and spectra") {
    const DickeSpec jc{{1.0}, {Spin(1)}, 0.5, 1.0, 1};
    const auto basis = dicke_basis(jc, 10, 1);
    REQUIRE(basis->dim() == 2);
    const auto h = realize(build_dicke_hamiltonian(jc), basis);
    const auto i_photon = *basis->index_of({1, 0});
    const auto i_spin = *basis->index_of({0, 1});
    CHECK(h.matrix(i_photon, i_photon).real() == doctest::Approx(1.0 - 0.5));
    CHECK(h.matrix(i_spin, i_spin).real() == doctest::Approx(0.5));
    CHECK(h.matrix(i_photon, i_spin).real() == doctest::Approx(0.5));
    const auto ev = spectrum(h);
    CHECK(ev[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(ev[1] == doctest::Approx(1.0));

    const DickeSpec detuned{{0.5}, {Spin(1)}, 0.3, 1.0, 1};
    const auto ev2 = spectrum(realize(build_dicke_hamiltonian(detuned), dicke_basis(detuned, 10, 1)));
    CHECK(ev2[0] == doctest::Approx(0.5 - std::sqrt(0.1525)).epsilon(1e-12));
    CHECK(ev2[1] == doctest::Approx(0.5 + std::sqrt(0.1525)).epsilon(1e-12));
    CHECK(ev2[0] == doctest::Approx(0.1095).epsilon(1e-3));
}

TEST_CASE("decoupled spectrum") {
    const DickeSpec d{{0.7, 1.6}, {Spin(1), Spin(2)}, 0.0, 1.1, 1};
    const int cutoff = 4;
    const auto ev = spectrum(realize(build_dicke_hamiltonian(d), dicke_basis(d, cutoff)));
    std::vector<double> want;
    for (int n = 0; n <= cutoff; ++n) {
        for (double m1 : {-0.5, 0.5}) {
            for (double m2 : {-1.0, 0.0, 1.0}) want.push_back(1.1 * n + 0.7 * m1 + 1.6 * m2);
        }
    }
    std::sort(want.begin(), want.end());
    REQUIRE(static_cast<std::size_t>(ev.size()) == want.size());
    for (std::size_t j = 0; j < want.size(); ++j) CHECK(ev[static_cast<Eigen::Index>(j)] == doctest::Approx(want[j]));
}

TEST_CASE("sector spectra are contained in the full spectrum") {
    const DickeSpec d{{0.8, 1.3}, {Spin(1), Spin(1)}, 0.2, 1.0, 2};
    const auto full = spectrum(realize(build_dicke_hamiltonian(d), dicke_basis(d, 6)));
    const std::vector<double> fv(full.data(), full.data() + full.size());
    for (int M = 0; M <= 4; ++M) {
        const auto sec = spectrum(realize(build_dicke_hamiltonian(d), dicke_basis(d, 6, M)));
        const std::vector<double> sv(sec.data(), sec.data() + sec.size());
        const auto match = match_spectra(sv, fv);
        CHECK(match.max_error < 1e-10);
        CHECK(match.collision_free);
    }
}

TEST_CASE("contract errors") {
    const auto basis = HilbertBasis::make({LocalSpace::spin(Spin(1))});
    const auto sp = realize(single(OpSymbol::spin_raise, 0), basis);
    CHECK(!sp.hermitian);
    CHECK_THROWS_AS(spectrum(sp), ContractError);
    CHECK_THROWS_AS(realize(single(OpSymbol::spin_weight, 3), basis), BasisMismatchError);
    CHECK_THROWS_AS(realize(single(OpSymbol::boson_number, 0), basis), BasisMismatchError);
    const auto other = HilbertBasis::make({LocalSpace::spin(Spin(2))});
    CHECK_THROWS(commutator_norm(sp, realize(single(OpSymbol::spin_weight, 0), other)));
    // a raising term leaves an exact sector
    const auto sector = HilbertBasis::make({LocalSpace::spin(Spin(1)), LocalSpace::spin(Spin(1))}, SectorFilter::exactly, 1);
    CHECK_THROWS_AS(realize(single(OpSymbol::spin_raise, 0), sector), ContractError);
}

TEST_CASE("commutators") {
    const auto basis = HilbertBasis::make({LocalSpace::spin(Spin(1)), LocalSpace::spin(Spin(2))});
    CHECK(commutator_norm(realize(single(OpSymbol::spin_weight, 0), basis),
                          realize(single(OpSymbol::spin_weight, 1), basis)) == 0.0);

    SUBCASE("trigonometric charges at xi = 1") {
        const auto m = model(GaudinKind::trigonometric, {0.5, 1.4, 2.7}, {1, 1, 1}, -0.3, 1);
        CHECK(max_pair_commutator(realize_rg_charges(m, 1.0)) < 1e-10);
    }
    SUBCASE("rational charges") {
        const auto m = model(GaudinKind::rational, {0.2, 1.1}, {1, 1}, 0.77, 1);
        CHECK(max_pair_commutator(realize_rg_charges(m, 1.0)) < 1e-12);
    }
    SUBCASE("unitary grid point") {
        const auto m = model(GaudinKind::trigonometric, {0.5, 1.4, 2.7}, {1, 1, 1}, -0.3, 1);
        const double xi = unitary_grid_point(4, 2);
        CHECK(xi == doctest::Approx(0.5));
        CHECK(max_pair_commutator(realize_rg_charges(m, xi)) < 1e-10);
        CHECK_THROWS_AS(realize_rg_charges(m, 0.37), RepresentationError);
    }
    SUBCASE("bosonic charges") {
        const auto m = model(GaudinKind::trigonometric, {0.5, 1.4}, {1, 1}, -0.3, 1);
        const auto ops = realize_rg_charges(m, 0.0, 10);
        CHECK(ops.size() == 2);
        CHECK(max_pair_commutator(ops) < 1e-10);
    }
    SUBCASE("free limit") {
        const auto m = model(GaudinKind::trigonometric, {0.5, 1.4}, {1, 2}, 0.0, 1);
        const auto ops = realize_rg_charges(m, 1.0);
        const auto b = rg_spin_basis(m, false);
        for (int i = 0; i < 2; ++i) {
            CHECK((ops[static_cast<std::size_t>(i)].matrix - realize(single(OpSymbol::spin_weight, i), b).matrix).norm() < 1e-15);
        }
    }
    SUBCASE("grid point n = 0 is the undeformed model") {
        const auto m = model(GaudinKind::trigonometric, {0.5, 1.4}, {1, 1}, -0.3, 1);
        const auto a = realize_rg_charges(m, unitary_grid_point(0, 2));
        const auto b = realize_rg_charges(m, 1.0);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i].matrix - b[i].matrix).norm() < 1e-14);
    }
}

TEST_CASE("eigencheck") {
    const auto basis = HilbertBasis::make({LocalSpace::spin(Spin(4))});
    const auto sz = realize(single(OpSymbol::spin_weight, 0), basis);
    StateVector v{basis, Eigen::VectorXcd::Zero(5)};
    v.amplitudes[3] = 2.0;
    const auto c = eigencheck(sz, v);
    CHECK(c.rayleigh == doctest::Approx(1.0));
    CHECK(c.rel_residual == 0.0);

    const DickeSpec d{{0.8, 1.3}, {Spin(1), Spin(1)}, 0.2, 1.0, 2};
    const auto h = realize(build_dicke_hamiltonian(d), dicke_basis(d, 8, 2));
    std::mt19937_64 gen(5);
    std::normal_distribution<double> nd;
    StateVector r{h.basis, Eigen::VectorXcd(h.basis->dim())};
    for (Eigen::Index i = 0; i < r.amplitudes.size(); ++i) r.amplitudes[i] = cplx(nd(gen), nd(gen));
    CHECK(eigencheck(h, r).rel_residual > 0.01);
    StateVector zero{h.basis, Eigen::VectorXcd::Zero(h.basis->dim())};
    CHECK_THROWS(eigencheck(h, zero));
}

TEST_CASE("RG Bethe vectors diagonalize the charges") {
    const auto m = model(GaudinKind::trigonometric, {1, 2, 3, 4}, {1, 1, 1, 1}, -0.15, 2);
    const auto basis = rg_spin_basis(m, true);
    CHECK(basis->dim() == 6);
    std::vector<MatrixOperator> ops;
    for (const auto& e : rg_charge_expressions(m, m.g)) ops.push_back(realize(e, basis));
    const auto seeds = all_seed_multisets(static_cast<int>(tda_modes(m).size()), 2);
    int good = 0;
    for (const auto& b : solve_rg_branches(m, seeds, BranchOptions{})) {
        if (!b.converged()) continue;
        ++good;
        const StateVector v = rg_bethe_vector(m, b.trace.final_rapidities(), basis);
        for (const auto& op : ops) CHECK(eigencheck(op, v).rel_residual < 1e-9);
    }
    CHECK(good >= 6);
}

TEST_CASE("greedy spectrum matching") {
    const auto a = match_spectra({1.0, 2.0}, {0.0, 1.0 + 1e-9, 2.0, 3.0});
    CHECK(a.assignment == std::vector<int>{1, 2});
    CHECK(a.max_error < 1e-8);
    CHECK(a.collision_free);
    CHECK(a.unmatched_reference == 2);
    const auto b = match_spectra({1.0, 1.0}, {1.0, 5.0});
    CHECK(b.assignment[0] != b.assignment[1]);
    CHECK(b.max_error == doctest::Approx(4.0));
}
