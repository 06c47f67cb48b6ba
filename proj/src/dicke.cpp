#include "gaudin/dicke.hpp"

#include "gaudin/errors.hpp"

#include <cmath>
#include <map>

namespace gaudin {

namespace {

void check_level(const DickeSpec& spec, int i) {
    if (i < 0 || i > static_cast<int>(spec.size())) {
        throw ValidationError("charge index " + std::to_string(i) + " out of range");
    }
}

}  // namespace

OperatorExpression build_dicke_hamiltonian(const DickeSpec& spec) {
    spec.validate();
    OperatorExpression h;
    h.add(spec.hbar_omega, {{OpSymbol::boson_number, 0}});
    for (std::size_t k = 0; k < spec.size(); ++k) {
        h.add(spec.epsilons[k], {{OpSymbol::spin_weight, static_cast<int>(k) + 1}});
    }
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const int site = static_cast<int>(k) + 1;
        h.add(spec.coupling_G, {{OpSymbol::boson_create, 0}, {OpSymbol::spin_lower, site}});
        h.add(spec.coupling_G, {{OpSymbol::spin_raise, site}, {OpSymbol::boson_annihilate, 0}});
    }
    h.set_observable(true);
    return h;
}

OperatorExpression build_dicke_charge(const DickeSpec& spec, int i) {
    spec.validate();
    check_level(spec, i);
    if (i == 0) return build_dicke_hamiltonian(spec);
    const std::size_t li = static_cast<std::size_t>(i - 1);
    const double g2 = spec.coupling_G * spec.coupling_G;
    OperatorExpression r;
    r.add(spec.hbar_omega - spec.epsilons[li], {{OpSymbol::spin_weight, i}});
    for (std::size_t k = 0; k < spec.size(); ++k) {
        if (k == li) continue;
        const int site = static_cast<int>(k) + 1;
        const double c = 2.0 * g2 / (spec.epsilons[k] - spec.epsilons[li]);
        r.add(0.5 * c, {{OpSymbol::spin_raise, i}, {OpSymbol::spin_lower, site}});
        r.add(0.5 * c, {{OpSymbol::spin_raise, site}, {OpSymbol::spin_lower, i}});
        r.add(c, {{OpSymbol::spin_weight, i}, {OpSymbol::spin_weight, site}});
    }
    r.add(-spec.coupling_G, {{OpSymbol::boson_annihilate, 0}, {OpSymbol::spin_raise, i}});
    r.add(-spec.coupling_G, {{OpSymbol::boson_create, 0}, {OpSymbol::spin_lower, i}});
    r.set_observable(true);
    return r;
}

OperatorExpression excitation_operator(const DickeSpec& spec) {
    OperatorExpression m;
    m.add(1.0, {{OpSymbol::boson_number, 0}});
    for (std::size_t k = 0; k < spec.size(); ++k) m.add(1.0, {{OpSymbol::spin_weight, static_cast<int>(k) + 1}});
    m.set_observable(true);
    return m;
}

OperatorExpression build_deformed_charge0(const DickeSpec& spec, const DeformedCopy& copy, double xi) {
    spec.validate();
    const double g = contraction_coupling(spec, copy, xi);
    const double lambda = contraction_scale(spec, copy, xi);
    OperatorExpression r;
    r.add(1.0, {{OpSymbol::spin_weight, 0}});
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const int site = static_cast<int>(k) + 1;
        const double eta = -lambda * spec.epsilons[k];
        const double x0 = std::sqrt(1.0 + eta * eta);
        r.add(0.5 * g * x0, {{OpSymbol::spin_raise, 0}, {OpSymbol::spin_lower, site}});
        r.add(0.5 * g * x0, {{OpSymbol::spin_raise, site}, {OpSymbol::spin_lower, 0}});
        r.add(g * eta, {{OpSymbol::spin_weight, 0}, {OpSymbol::spin_weight, site}});
    }
    r.set_observable(true);
    return r;
}

BasisPtr dicke_basis(const DickeSpec& spec, int boson_cutoff, std::optional<int> sector) {
    spec.validate();
    std::vector<LocalSpace> sites{LocalSpace::boson(boson_cutoff)};
    for (const Spin& s : spec.spins) sites.push_back(LocalSpace::spin(s));
    if (sector) return HilbertBasis::make(std::move(sites), SectorFilter::exactly, *sector);
    return HilbertBasis::make(std::move(sites));
}

BasisPtr deformed_copy_basis(const DickeSpec& spec, const DeformedCopy& copy, double xi, int boson_cutoff) {
    spec.validate();
    const Spin s_xi = deformed_spin_on_grid(xi, copy.s0);
    if (boson_cutoff + 1 > s_xi.degeneracy()) {
        throw CutoffError("the deformed copy irrep at this xi is smaller than the requested cutoff window");
    }
    std::vector<LocalSpace> sites{LocalSpace::truncated_spin(s_xi.value(), boson_cutoff + 1)};
    for (const Spin& s : spec.spins) sites.push_back(LocalSpace::spin(s));
    return HilbertBasis::make(std::move(sites));
}

double contraction_defect(const DickeSpec& spec, const DeformedCopy& copy, double xi, int boson_cutoff) {
    const auto hb = dicke_basis(spec, boson_cutoff);
    const auto db = deformed_copy_basis(spec, copy, xi, boson_cutoff);
    const auto h = realize(build_dicke_hamiltonian(spec), hb);
    const auto r0 = realize(build_deformed_charge0(spec, copy, xi), db);
    const double s_xi = deformed_spin_on_grid(xi, copy.s0).value();
    Eigen::MatrixXcd d = spec.hbar_omega * r0.matrix;
    d.diagonal().array() += spec.hbar_omega * s_xi;
    d -= h.matrix;
    return d.norm() / h.matrix.norm();
}

StateVector bethe_coefficients(const BetheProductState& state, const BasisPtr& basis) {
    const DickeSpec& spec = state.spec;
    spec.validate();
    if (state.rapidities.frame != Frame::dicke_x) {
        throw ContractError("bethe_coefficients expects Dicke-coordinate rapidities");
    }
    const auto& sites = basis->sites();
    if (sites.size() != spec.size() + 1 || sites[0].kind != LocalSpace::Kind::boson) {
        throw BasisMismatchError("basis does not follow the Dicke site convention");
    }
    const int n = static_cast<int>(state.rapidities.size());
    if (sites[0].dim - 1 < n) {
        throw CutoffError("boson cutoff " + std::to_string(sites[0].dim - 1) + " is below N = " + std::to_string(n));
    }
    for (std::size_t k = 0; k < spec.size(); ++k) {
        for (Eigen::Index a = 0; a < n; ++a) {
            if (std::abs(state.rapidities.values[a] - spec.epsilons[k]) < kCollisionTolerance) {
                throw SingularEvaluationError("rapidity collides with a level", static_cast<int>(k),
                                              -static_cast<int>(a) - 1);
            }
        }
    }
    std::map<std::vector<int>, cplx> psi;
    psi[std::vector<int>(sites.size(), 0)] = 1.0;
    for (Eigen::Index a = 0; a < n; ++a) {
        const cplx x = state.rapidities.values[a];
        std::map<std::vector<int>, cplx> next;
        for (const auto& [local, amp] : psi) {
            auto up = local;
            const double bamp = sites[0].raise(local[0]);
            ++up[0];
            if (bamp != 0.0) next[up] += amp * bamp;
            for (std::size_t k = 0; k < spec.size(); ++k) {
                const double samp = sites[k + 1].raise(local[k + 1]);
                if (samp == 0.0) continue;
                auto s = local;
                ++s[k + 1];
                next[s] += amp * (-spec.coupling_G / (spec.epsilons[k] - x)) * samp;
            }
        }
        psi = std::move(next);
    }
    StateVector out{basis, Eigen::VectorXcd::Zero(basis->dim())};
    for (const auto& [local, amp] : psi) {
        const auto idx = basis->index_of(local);
        if (!idx) {
            if (amp != cplx(0.0)) throw BasisMismatchError("Bethe state has weight outside the basis");
            continue;
        }
        out.amplitudes[*idx] = amp;
    }
    if (state.normalization == Normalization::unit_norm) {
        const double nrm = out.amplitudes.norm();
        if (nrm > 0.0) out.amplitudes /= nrm;
    }
    return out;
}

StateVector bethe_coefficients(const BetheProductState& state, int boson_cutoff) {
    return bethe_coefficients(state, dicke_basis(state.spec, boson_cutoff, state.spec.n_excitations));
}

}  // namespace gaudin
