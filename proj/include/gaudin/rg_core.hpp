// rg_core.hpp — residual systems (RG, pseudo-deformed RG, pp-TDA, Dicke and
// single-copy deformed Dicke) with analytic Jacobians.
#pragma once

#include "gaudin/algebra.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <optional>
#include <vector>

namespace gaudin {

struct ModelSpec {
    LevelSet levels;
    GaudinKind kind{GaudinKind::trigonometric};
    int n_excitations{1};
    double g{0.0};
    // Optional extra copy placed exactly at eta_0 = infinity (trigonometric
    // only), entering through the limit rows Z_{0 alpha} = eta_alpha.
    std::optional<Spin> far_level;

    void validate() const;
};

struct DickeSpec {
    std::vector<double> epsilons;
    std::vector<Spin> spins;
    double coupling_G{0.0};
    double hbar_omega{1.0};
    int n_excitations{1};

    std::size_t size() const noexcept { return epsilons.size(); }
    void validate() const;
};

// The quasispin copy that contracts to the boson mode.
struct DeformedCopy {
    Spin s0{1};

    int omega() const noexcept { return s0.degeneracy(); }
    // Smallest copy whose xi = 1 excitation sector matches the Dicke sector.
    static DeformedCopy for_excitations(int n) { return DeformedCopy{Spin(std::max(n, 1))}; }

    friend bool operator==(const DeformedCopy&, const DeformedCopy&) = default;
};

enum class Frame { rg_eta, dicke_x };

struct RapiditySet {
    Eigen::VectorXcd values;
    Frame frame{Frame::rg_eta};

    Eigen::Index size() const noexcept { return values.size(); }
};

struct ResidualReport {
    Eigen::VectorXcd residuals;
    double max_abs{0.0};
    std::optional<Eigen::MatrixXcd> jacobian;
    bool decoupled{false};
};

// Residual families at real parameters.
ResidualReport rg_residual(const ModelSpec& spec, const RapiditySet& r, bool with_jacobian = true);
ResidualReport deformed_rg_residual(const ModelSpec& spec, double xi, const RapiditySet& r,
                                    bool with_jacobian = true);
ResidualReport tda_residual(const ModelSpec& spec, const RapiditySet& r, bool with_jacobian = true);
ResidualReport dicke_rg_residual(const DickeSpec& spec, const RapiditySet& r, bool with_jacobian = true);
// Dimensionless single-copy residual in the rescaled Gaudin coordinates;
// hbar_omega times it tends to dicke_rg_residual as xi -> 0. The Jacobian is
// taken with respect to the Dicke-frame rapidities x.
ResidualReport deformed_dicke_residual(const DickeSpec& spec, const DeformedCopy& copy, double xi,
                                       const RapiditySet& r, bool with_jacobian = true);

// Same RG equations assembled from the explicit (m+N) Gaudin matrices built by
// extend_with_rapidities. Used as an independent check of solver endpoints.
ResidualReport rg_residual_via_matrices(const ModelSpec& spec, const RapiditySet& r);

// Contraction rescalings of the single-copy construction.
double contraction_coupling(const DickeSpec& spec, const DeformedCopy& copy, double xi);
double contraction_scale(const DickeSpec& spec, const DeformedCopy& copy, double xi);

// x = -eta / lambda(xi) and back. Both need xi > 0.
RapiditySet to_dicke_frame(const RapiditySet& eta, const DickeSpec& spec, const DeformedCopy& copy, double xi);
RapiditySet to_rg_frame(const RapiditySet& x, const DickeSpec& spec, const DeformedCopy& copy, double xi);

// The xi = 1 trigonometric model of the single-copy construction: levels
// eta_k = -lambda(1) eps_k, spins s_k, coupling g(1), the deformed copy as
// far level.
ModelSpec auxiliary_rg_model(const DickeSpec& spec, const DeformedCopy& copy);

// Family evaluation at a possibly complex deformation parameter, as used by
// the continuation. f, its Jacobian in the rapidities and df/dxi.
struct FamilyPoint {
    Eigen::VectorXcd f;
    Eigen::MatrixXcd jacobian;
    Eigen::VectorXcd dxi;
};

// All copies deformed (pseudo-deformed RG equations, dimensionless).
FamilyPoint evaluate_all_copies(const ModelSpec& spec, cplx xi, const Eigen::VectorXcd& eta);
// Single deformed copy in Dicke coordinates, energy units; at xi = 0 this is
// exactly the Dicke RG system.
FamilyPoint evaluate_single_copy(const DickeSpec& spec, const DeformedCopy& copy, cplx xi,
                                 const Eigen::VectorXcd& x);

double max_abs(const Eigen::VectorXcd& v);

}  // namespace gaudin
