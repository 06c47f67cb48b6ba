#include "gaudin/ed_oracle.hpp"

#include "gaudin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace gaudin {

namespace {

using Eigen::Index;
using Eigen::MatrixXcd;

// Applies one factor to a local state in place; returns the amplitude
// (0 when the state leaves the local space).
double apply_factor(const LocalSpace& space, OpSymbol symbol, int& j) {
    switch (symbol) {
        case OpSymbol::boson_create:
        case OpSymbol::spin_raise: {
            const double a = space.raise(j);
            ++j;
            return a;
        }
        case OpSymbol::boson_annihilate:
        case OpSymbol::spin_lower: {
            if (j == 0) return 0.0;
            --j;
            return space.raise(j);
        }
        case OpSymbol::boson_number:
        case OpSymbol::spin_weight: return space.weight(j);
    }
    return 0.0;
}

void check_sites(const OperatorExpression& expr, const HilbertBasis& basis) {
    for (const auto& t : expr.terms()) {
        for (const auto& f : t.factors) {
            if (f.site >= static_cast<int>(basis.sites().size())) {
                throw BasisMismatchError("operator refers to site " + std::to_string(f.site) +
                                         " which the basis does not contain");
            }
            const bool boson_site = basis.sites()[f.site].kind == LocalSpace::Kind::boson;
            if (boson_site != is_boson(f.symbol)) {
                throw BasisMismatchError("operator " + to_string(f.symbol) + " does not act on site " +
                                         std::to_string(f.site));
            }
        }
    }
}

void require_same_basis(const MatrixOperator& a, const MatrixOperator& b) {
    if (!a.basis || !b.basis || !a.basis->same_as(*b.basis) || a.matrix.rows() != b.matrix.rows()) {
        throw BasisMismatchError("operators live on different bases");
    }
}

double hermiticity_defect(const MatrixXcd& m) {
    return (m - m.adjoint()).norm();
}

void add_pair(OperatorExpression& e, double c, OpSymbol a, int i, OpSymbol b, int k) {
    e.add(c, {{a, i}, {b, k}});
}

}  // namespace

MatrixOperator realize(const OperatorExpression& expr, const BasisPtr& basis) {
    if (!basis) throw ContractError("realize needs a basis");
    check_sites(expr, *basis);
    const Index n = basis->dim();
    MatrixOperator out{basis, MatrixXcd::Zero(n, n), false};
    std::vector<int> local;
    for (Index col = 0; col < n; ++col) {
        for (const auto& term : expr.terms()) {
            local = basis->state(col);
            double amp = 1.0;
            for (auto it = term.factors.rbegin(); it != term.factors.rend() && amp != 0.0; ++it) {
                const auto& space = basis->sites()[it->site];
                amp *= apply_factor(space, it->symbol, local[it->site]);
                if (local[it->site] >= space.dim) amp = 0.0;
            }
            if (amp == 0.0) continue;
            const auto row = basis->index_of(local);
            if (!row) {
                int total = 0;
                for (int j : local) total += j;
                if (basis->filter() == SectorFilter::exactly && total != basis->sector()) {
                    throw ContractError("expression does not conserve the excitation number of the sector basis");
                }
                continue;
            }
            out.matrix(*row, col) += term.coefficient * amp;
        }
    }
    const double scale = std::max(1.0, out.matrix.norm());
    out.hermitian = hermiticity_defect(out.matrix) <= 1e-12 * scale;
    return out;
}

Eigen::VectorXd spectrum(const MatrixOperator& op) {
    if (!op.hermitian) throw ContractError("spectrum requires a Hermitian operator");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(op.matrix, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

Eigensystem eigensystem(const MatrixOperator& op) {
    if (!op.hermitian) throw ContractError("eigensystem requires a Hermitian operator");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(op.matrix);
    return {es.eigenvalues(), es.eigenvectors()};
}

double commutator_norm(const MatrixOperator& a, const MatrixOperator& b) {
    require_same_basis(a, b);
    return (a.matrix * b.matrix - b.matrix * a.matrix).norm();
}

EigenCheck eigencheck(const MatrixOperator& op, const StateVector& v) {
    if (!v.basis || !op.basis || !v.basis->same_as(*op.basis) || v.amplitudes.size() != op.matrix.cols()) {
        throw BasisMismatchError("state and operator live on different bases");
    }
    const double vn = v.amplitudes.norm();
    if (!(vn > 0.0)) throw ContractError("eigencheck needs a nonzero vector");
    const Eigen::VectorXcd ov = op.matrix * v.amplitudes;
    const cplx rq = v.amplitudes.dot(ov) / (vn * vn);
    const double floor = op.matrix.norm() * vn / std::sqrt(static_cast<double>(op.matrix.rows()));
    const double denom = std::max(ov.norm(), floor);
    const double res = (ov - rq * v.amplitudes).norm();
    return {rq.real(), denom > 0.0 ? res / denom : 0.0};
}

std::vector<OperatorExpression> rg_charge_expressions(const ModelSpec& spec, double coupling) {
    const auto gm = build_gaudin(spec.kind, spec.levels);
    const int m = static_cast<int>(spec.levels.size());
    std::vector<OperatorExpression> out;
    for (int i = 0; i < m; ++i) {
        OperatorExpression r;
        r.add(1.0, {{OpSymbol::spin_weight, i}});
        for (int k = 0; k < m; ++k) {
            if (k == i) continue;
            const double x = gm.x(i, k).real();
            const double z = gm.z(i, k).real();
            add_pair(r, 0.5 * coupling * x, OpSymbol::spin_raise, k, OpSymbol::spin_lower, i);
            add_pair(r, 0.5 * coupling * x, OpSymbol::spin_raise, i, OpSymbol::spin_lower, k);
            add_pair(r, coupling * z, OpSymbol::spin_weight, i, OpSymbol::spin_weight, k);
        }
        r.set_observable(true);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<OperatorExpression> bosonic_charge_expressions(const ModelSpec& spec) {
    const auto gm = build_gaudin(spec.kind, spec.levels);
    const int m = static_cast<int>(spec.levels.size());
    std::vector<OperatorExpression> out;
    for (int i = 0; i < m; ++i) {
        const double oi = spec.levels.degeneracy(i);
        OperatorExpression r;
        r.add(1.0, {{OpSymbol::boson_number, i}});
        for (int k = 0; k < m; ++k) {
            if (k == i) continue;
            const double ok = spec.levels.degeneracy(k);
            const double x = gm.x(i, k).real();
            const double z = gm.z(i, k).real();
            const double hop = 0.25 * spec.g * x * std::sqrt(oi * ok);
            add_pair(r, hop, OpSymbol::boson_create, i, OpSymbol::boson_annihilate, k);
            add_pair(r, hop, OpSymbol::boson_create, k, OpSymbol::boson_annihilate, i);
            r.add(-0.25 * spec.g * z * oi, {{OpSymbol::boson_number, k}});
            r.add(-0.25 * spec.g * z * ok, {{OpSymbol::boson_number, i}});
        }
        r.set_observable(true);
        out.push_back(std::move(r));
    }
    return out;
}

BasisPtr rg_spin_basis(const ModelSpec& spec, bool sector_only) {
    std::vector<LocalSpace> sites;
    for (const Spin& s : spec.levels.spins()) sites.push_back(LocalSpace::spin(s));
    return HilbertBasis::make(std::move(sites), sector_only ? SectorFilter::exactly : SectorFilter::none,
                              spec.n_excitations);
}

std::vector<MatrixOperator> realize_rg_charges(const ModelSpec& spec, double xi, int boson_cutoff) {
    spec.validate();
    if (spec.far_level) throw ContractError("charge realization does not support a level at infinity");
    std::vector<OperatorExpression> exprs;
    BasisPtr basis;
    if (xi == 1.0) {
        exprs = rg_charge_expressions(spec, spec.g);
        basis = rg_spin_basis(spec, false);
    } else if (xi == 0.0) {
        exprs = bosonic_charge_expressions(spec);
        std::vector<LocalSpace> sites(spec.levels.size(), LocalSpace::boson(boson_cutoff));
        basis = HilbertBasis::make(std::move(sites), SectorFilter::at_most, boson_cutoff);
    } else {
        std::vector<LocalSpace> sites;
        for (const Spin& s : spec.levels.spins()) sites.push_back(LocalSpace::spin(deformed_spin_on_grid(xi, s)));
        exprs = rg_charge_expressions(spec, spec.g * xi);
        basis = HilbertBasis::make(std::move(sites));
    }
    std::vector<MatrixOperator> out;
    for (const auto& e : exprs) out.push_back(realize(e, basis));
    return out;
}

StateVector rg_bethe_vector(const ModelSpec& spec, const RapiditySet& r, const BasisPtr& basis) {
    if (r.frame != Frame::rg_eta) throw ContractError("rg_bethe_vector expects Gaudin-coordinate rapidities");
    const int m = static_cast<int>(spec.levels.size());
    BasisPtr work = rg_spin_basis(spec, false);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(work->dim());
    psi[*work->index_of(std::vector<int>(static_cast<std::size_t>(m), 0))] = 1.0;
    for (Index a = 0; a < r.size(); ++a) {
        OperatorExpression b;
        for (int i = 0; i < m; ++i) {
            b.add(gaudin_x(spec.kind, spec.levels.eta(static_cast<std::size_t>(i)), r.values[a]),
                  {{OpSymbol::spin_raise, i}});
        }
        psi = realize(b, work).matrix * psi;
    }
    StateVector out{basis, Eigen::VectorXcd::Zero(basis->dim())};
    for (Index i = 0; i < work->dim(); ++i) {
        if (psi[i] == cplx(0.0)) continue;
        const auto idx = basis->index_of(work->state(i));
        if (!idx) {
            if (std::abs(psi[i]) > 0.0) throw BasisMismatchError("Bethe vector has weight outside the target basis");
            continue;
        }
        out.amplitudes[*idx] = psi[i];
    }
    return out;
}

SpectrumMatch match_spectra(const std::vector<double>& targets, const std::vector<double>& reference) {
    SpectrumMatch out;
    out.assignment.assign(targets.size(), -1);
    std::vector<bool> used(reference.size(), false);
    // all candidate pairs, closest first
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t t = 0; t < targets.size(); ++t) {
        for (std::size_t r = 0; r < reference.size(); ++r) {
            pairs.emplace_back(std::abs(targets[t] - reference[r]), t, r);
        }
    }
    std::sort(pairs.begin(), pairs.end());
    for (const auto& [d, t, r] : pairs) {
        if (out.assignment[t] >= 0 || used[r]) continue;
        out.assignment[t] = static_cast<int>(r);
        used[r] = true;
        out.max_error = std::max(out.max_error, d);
    }
    for (std::size_t t = 0; t < targets.size(); ++t) {
        if (out.assignment[t] < 0) out.max_error = std::numeric_limits<double>::infinity();
    }
    // collision audit
    std::map<int, int> seen;
    for (int a : out.assignment) {
        if (a >= 0 && ++seen[a] > 1) out.collision_free = false;
    }
    out.unmatched_reference = static_cast<int>(std::count(used.begin(), used.end(), false));
    return out;
}

}  // namespace gaudin
