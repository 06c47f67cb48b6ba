// ed_oracle.hpp — dense exact-diagonalization oracle: realizes operator
// expressions on truncated bases and checks spectra, commutators and
// eigenvectors.
#pragma once

#include "gaudin/hilbert.hpp"
#include "gaudin/operator_expression.hpp"
#include "gaudin/rg_core.hpp"

#include <Eigen/Dense>

#include <vector>

namespace gaudin {

struct MatrixOperator {
    BasisPtr basis;
    Eigen::MatrixXcd matrix;
    bool hermitian{false};
};

// Tensor-product realization. Terms that leave an exact excitation sector
// raise ContractError; terms pushed past a truncation edge are dropped.
MatrixOperator realize(const OperatorExpression& expr, const BasisPtr& basis);

// Ascending eigenvalues. Requires a Hermitian operator.
Eigen::VectorXd spectrum(const MatrixOperator& op);

struct Eigensystem {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
};
Eigensystem eigensystem(const MatrixOperator& op);

// Frobenius norm of AB - BA.
double commutator_norm(const MatrixOperator& a, const MatrixOperator& b);

struct EigenCheck {
    double rayleigh;
    double rel_residual;
};

// rel_residual = |Ov - rayleigh v| / max(|Ov|, |O|_F |v| / sqrt(dim)); the
// floor keeps zero eigenvalues from being judged on round-off alone.
EigenCheck eigencheck(const MatrixOperator& op, const StateVector& v);

// Expressions of the RG charges R_i = S_i^0 + g sum_k [X_ik (S_k^+ S_i + S_i^+ S_k)/2 + Z_ik S_i^0 S_k^0],
// site i = level i.
std::vector<OperatorExpression> rg_charge_expressions(const ModelSpec& spec, double coupling);

// Bosonic xi = 0 charges, site i = boson mode of level i.
std::vector<OperatorExpression> bosonic_charge_expressions(const ModelSpec& spec);

// Charges at xi = 1, at a unitary grid point xi_n (all levels in their
// s(xi_n) irreps, coupling g xi) or at xi = 0 (bosonic, total boson number
// up to boson_cutoff). Other xi raise RepresentationError.
std::vector<MatrixOperator> realize_rg_charges(const ModelSpec& spec, double xi, int boson_cutoff = 10);

// The RG basis at xi = 1 (optionally restricted to N excitations).
BasisPtr rg_spin_basis(const ModelSpec& spec, bool sector_only);

// Bethe vector prod_alpha (sum_i X_{i alpha} S_i^+) |theta> at xi = 1.
StateVector rg_bethe_vector(const ModelSpec& spec, const RapiditySet& r, const BasisPtr& basis);

struct SpectrumMatch {
    std::vector<int> assignment;  // for each target, index into reference (-1 if unmatched)
    double max_error{0.0};
    bool collision_free{true};
    int unmatched_reference{0};
};

// Greedy nearest matching of `targets` against `reference`, each reference
// value used at most once.
SpectrumMatch match_spectra(const std::vector<double>& targets, const std::vector<double>& reference);

}  // namespace gaudin
