// dicke.hpp — Dicke Hamiltonian, its conserved charges, the deformed charge
// R_0(xi) and Bethe-state coefficients.
//
// Site convention: site 0 is the boson mode (or the deformed copy), site k
// (k = 1..m) is spin level k.
#pragma once

#include "gaudin/ed_oracle.hpp"
#include "gaudin/hilbert.hpp"
#include "gaudin/operator_expression.hpp"
#include "gaudin/rg_core.hpp"

#include <optional>

namespace gaudin {

// H = hw b^+ b + sum_k eps_k S_k^0 + G sum_k (b^+ S_k + S_k^+ b)
OperatorExpression build_dicke_hamiltonian(const DickeSpec& spec);

// i = 0 gives H; i = 1..m gives hw R_i in the contraction limit.
OperatorExpression build_dicke_charge(const DickeSpec& spec, int i);

// M = b^+ b + sum_k S_k^0
OperatorExpression excitation_operator(const DickeSpec& spec);

// R_0(xi) = A_0^0 + g(xi) sum_k [X_0k (A_0^+ S_k + S_k^+ A_0)/2 + Z_0k A_0^0 S_k^0]
// with X_0k = sqrt(1 + eta_k^2), Z_0k = eta_k, eta_k = -lambda(xi) eps_k.
// Site 0 carries the deformed copy as a spin. Needs 0 < xi <= 1.
OperatorExpression build_deformed_charge0(const DickeSpec& spec, const DeformedCopy& copy, double xi);

// Basis for the Dicke model with boson cutoff; with `sector` only states with
// exactly that many excitations (b^+ b + sum (S^0 + s)).
BasisPtr dicke_basis(const DickeSpec& spec, int boson_cutoff, std::optional<int> sector = std::nullopt);

// Basis with the boson replaced by the lowest (cutoff + 1) weights of the
// deformed copy in its s(xi_n) irrep. Off the unitary grid this raises
// RepresentationError.
BasisPtr deformed_copy_basis(const DickeSpec& spec, const DeformedCopy& copy, double xi, int boson_cutoff);

// |hw R_0(xi_n) + hw s_0(xi_n) - H| / |H| (Frobenius) with both operators
// realized on matching bases of the given cutoff.
double contraction_defect(const DickeSpec& spec, const DeformedCopy& copy, double xi, int boson_cutoff);

enum class Normalization { raw, unit_norm };

struct BetheProductState {
    DickeSpec spec;
    RapiditySet rapidities;  // frame dicke_x
    Normalization normalization{Normalization::unit_norm};
};

// Expands prod_alpha (b^+ - G sum_k S_k^+ / (eps_k - x_alpha)) |theta> on
// `basis` (which must use the Dicke site convention). Raises CutoffError when
// the boson cutoff is below N.
StateVector bethe_coefficients(const BetheProductState& state, const BasisPtr& basis);
StateVector bethe_coefficients(const BetheProductState& state, int boson_cutoff);

}  // namespace gaudin
