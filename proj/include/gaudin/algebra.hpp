// algebra.hpp — Gaudin-algebra parametrizations, the eta_0 -> infinity rows,
// and pseudo-deformation bookkeeping for quasispin irrep labels.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace gaudin {

using cplx = std::complex<double>;

// Coordinates closer than this (absolute, eta scale) count as colliding.
inline constexpr double kCollisionTolerance = 1e-10;

// A positive half-integer spin stored as 2s.
class Spin {
public:
    constexpr Spin() = default;
    explicit constexpr Spin(int twice) : twice_(twice) {}

    // Accepts values within 1e-12 of a half-integer; throws DomainError otherwise.
    static Spin from_value(double s);

    constexpr int twice() const noexcept { return twice_; }
    constexpr double value() const noexcept { return 0.5 * twice_; }
    constexpr int degeneracy() const noexcept { return twice_ + 1; }

    friend constexpr bool operator==(Spin, Spin) = default;

private:
    int twice_{1};
};

// The m spin levels of a Richardson-Gaudin model: Gaudin coordinates eta_i,
// quasispins s_i and degeneracies Omega_i = 2 s_i + 1.
class LevelSet {
public:
    // Throws DegenerateLevelError for colliding etas, ValidationError for
    // empty input, size mismatch or non-positive spins.
    LevelSet(std::vector<double> etas, std::vector<Spin> spins);

    static LevelSet from_degeneracies(std::vector<double> etas, std::span<const int> degeneracies);

    std::size_t size() const noexcept { return etas_.size(); }
    const std::vector<double>& etas() const noexcept { return etas_; }
    const std::vector<Spin>& spins() const noexcept { return spins_; }
    double eta(std::size_t i) const { return etas_.at(i); }
    Spin spin(std::size_t i) const { return spins_.at(i); }
    int degeneracy(std::size_t i) const { return spins_.at(i).degeneracy(); }

    friend bool operator==(const LevelSet&, const LevelSet&) = default;

private:
    std::vector<double> etas_;
    std::vector<Spin> spins_;
};

enum class GaudinKind { rational, trigonometric };

// c in X^2 - Z^2 = c.
constexpr double gaudin_constant(GaudinKind kind) noexcept {
    return kind == GaudinKind::rational ? 0.0 : 1.0;
}

// Antisymmetric X, Z over a list of coordinates (levels first, then any
// rapidities appended by extend_with_rapidities).
struct GaudinMatrices {
    GaudinKind kind{GaudinKind::trigonometric};
    std::vector<cplx> coordinates;
    Eigen::MatrixXcd x;
    Eigen::MatrixXcd z;

    Eigen::Index dim() const noexcept { return x.rows(); }
};

// Scalar Gaudin entries for a coordinate pair. For the trigonometric kind the
// square-root factor sqrt(1 + eta^2) is taken per coordinate (principal
// branch), which keeps the Gaudin identity exact for complex coordinates.
cplx gaudin_z(GaudinKind kind, cplx a, cplx b);
cplx gaudin_x(GaudinKind kind, cplx a, cplx b);
// dZ(a, b)/db and dZ(a, b)/da.
cplx gaudin_dz_db(GaudinKind kind, cplx a, cplx b);
cplx gaudin_dz_da(GaudinKind kind, cplx a, cplx b);

GaudinMatrices build_gaudin(GaudinKind kind, const LevelSet& levels);

// Appends rapidity coordinates. The original block is left untouched.
// Throws SingularEvaluationError when a rapidity collides with a level or
// another rapidity.
GaudinMatrices extend_with_rapidities(const GaudinMatrices& matrices, const LevelSet& levels,
                                      std::span<const cplx> rapidities);

struct InfinityRows {
    std::vector<double> x0;  // X_{0k} = sqrt(1 + eta_k^2)
    std::vector<double> z0;  // Z_{0k} = eta_k
};

InfinityRows eta0_infinity_row(const LevelSet& levels);

// X_{ik} rebuilt from the eta_0 -> infinity rows through the Gaudin relation
// X_{ik} = X_{i0} X_{0k} / (Z_{i0} + Z_{0k}).
double reconstruct_x_from_infinity(const InfinityRows& rows, std::size_t i, std::size_t k);

// Diagnostics used by tests and the acceptance suite.
double gaudin_identity_residual(const GaudinMatrices& m);
double gaudin_constant_deviation(const GaudinMatrices& m);
double antisymmetry_defect(const GaudinMatrices& m);

// xi in [0, 1] and the degeneracy Omega of the deformed copy.
class DeformationPoint {
public:
    DeformationPoint(double xi, int omega);

    double xi() const noexcept { return xi_; }
    int omega() const noexcept { return omega_; }

private:
    double xi_;
    int omega_;
};

struct DeformedSpin {
    double xi;
    double xi_s_xi;  // xi s(xi) = xi s(1) + (1 - xi) Omega, finite on [0, 1]

    // s(xi) = s(1) + (1/xi - 1) Omega. Throws ContractionLimitError at xi = 0.
    double s_xi() const;
};

DeformedSpin deformed_spin(const DeformationPoint& point, Spin s1);

// Complex-xi form of xi s(xi), used when continuation leaves the real axis.
inline cplx scaled_deformed_spin(cplx xi, double s1, int omega) {
    return xi * s1 + (1.0 - xi) * static_cast<double>(omega);
}

// Unitary grid xi_n = 2 Omega / (n + 2 Omega); s(xi_n) = s(1) + n/2.
double unitary_grid_point(int n, int omega);
std::optional<int> unitary_grid_index(double xi, int omega);
// Irrep label at a grid point. Throws RepresentationError off the grid.
Spin deformed_spin_on_grid(double xi, Spin s1);

}  // namespace gaudin
