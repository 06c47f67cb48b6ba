#include "gaudin/algebra.hpp"

#include "gaudin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gaudin {

Spin Spin::from_value(double s) {
    const double twice = 2.0 * s;
    const double rounded = std::round(twice);
    if (!std::isfinite(s) || std::abs(twice - rounded) > 1e-12 || rounded < 1.0) {
        throw DomainError("spin must be a positive half-integer, got " + std::to_string(s));
    }
    return Spin(static_cast<int>(rounded));
}

LevelSet::LevelSet(std::vector<double> etas, std::vector<Spin> spins)
    : etas_(std::move(etas)), spins_(std::move(spins)) {
    if (etas_.empty()) {
        throw ValidationError("level set needs at least one level");
    }
    if (etas_.size() != spins_.size()) {
        throw ValidationError("levels: etas and spins differ in length");
    }
    for (std::size_t i = 0; i < etas_.size(); ++i) {
        if (!std::isfinite(etas_[i])) {
            throw ValidationError("levels: eta must be finite");
        }
        if (spins_[i].twice() < 1) {
            throw ValidationError("levels: spins must be positive half-integers");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(etas_[i] - etas_[j]) < kCollisionTolerance) {
                throw DegenerateLevelError("levels must be distinct (levels " + std::to_string(j) +
                                           " and " + std::to_string(i) + ")");
            }
        }
    }
}

LevelSet LevelSet::from_degeneracies(std::vector<double> etas, std::span<const int> degeneracies) {
    std::vector<Spin> spins;
    spins.reserve(degeneracies.size());
    for (int omega : degeneracies) {
        if (omega < 2) {
            throw ValidationError("degeneracies must be >= 2 (Omega = 2s + 1 with s >= 1/2)");
        }
        spins.emplace_back(omega - 1);
    }
    return LevelSet(std::move(etas), std::move(spins));
}

namespace {

cplx trig_root(cplx a) { return std::sqrt(1.0 + a * a); }

}  // namespace

cplx gaudin_z(GaudinKind kind, cplx a, cplx b) {
    if (kind == GaudinKind::rational) {
        return 1.0 / (a - b);
    }
    return (1.0 + a * b) / (a - b);
}

cplx gaudin_x(GaudinKind kind, cplx a, cplx b) {
    if (kind == GaudinKind::rational) {
        return 1.0 / (a - b);
    }
    return trig_root(a) * trig_root(b) / (a - b);
}

cplx gaudin_dz_db(GaudinKind kind, cplx a, cplx b) {
    const cplx d = a - b;
    if (kind == GaudinKind::rational) {
        return 1.0 / (d * d);
    }
    return (1.0 + a * a) / (d * d);
}

cplx gaudin_dz_da(GaudinKind kind, cplx a, cplx b) {
    const cplx d = a - b;
    if (kind == GaudinKind::rational) {
        return -1.0 / (d * d);
    }
    return -(1.0 + b * b) / (d * d);
}

namespace {

GaudinMatrices fill(GaudinKind kind, std::vector<cplx> coords) {
    const auto n = static_cast<Eigen::Index>(coords.size());
    GaudinMatrices out;
    out.kind = kind;
    out.x = Eigen::MatrixXcd::Zero(n, n);
    out.z = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const cplx xv = gaudin_x(kind, coords[i], coords[j]);
            const cplx zv = gaudin_z(kind, coords[i], coords[j]);
            out.x(i, j) = xv;
            out.x(j, i) = -xv;
            out.z(i, j) = zv;
            out.z(j, i) = -zv;
        }
    }
    out.coordinates = std::move(coords);
    return out;
}

}  // namespace

GaudinMatrices build_gaudin(GaudinKind kind, const LevelSet& levels) {
    std::vector<cplx> coords(levels.etas().begin(), levels.etas().end());
    return fill(kind, std::move(coords));
}

GaudinMatrices extend_with_rapidities(const GaudinMatrices& matrices, const LevelSet& levels,
                                      std::span<const cplx> rapidities) {
    const auto m = static_cast<Eigen::Index>(matrices.coordinates.size());
    if (static_cast<std::size_t>(m) < levels.size()) {
        throw ValidationError("extend_with_rapidities: matrices smaller than the level set");
    }
    for (std::size_t a = 0; a < rapidities.size(); ++a) {
        for (std::size_t i = 0; i < levels.size(); ++i) {
            if (std::abs(rapidities[a] - levels.eta(i)) < kCollisionTolerance) {
                throw SingularEvaluationError("rapidity " + std::to_string(a) + " collides with level " +
                                                  std::to_string(i),
                                              static_cast<int>(i), -static_cast<int>(a) - 1);
            }
        }
        for (std::size_t b = 0; b < a; ++b) {
            if (std::abs(rapidities[a] - rapidities[b]) < kCollisionTolerance) {
                throw SingularEvaluationError("rapidities " + std::to_string(b) + " and " +
                                                  std::to_string(a) + " collide",
                                              -static_cast<int>(b) - 1, -static_cast<int>(a) - 1);
            }
        }
    }
    const auto n = m + static_cast<Eigen::Index>(rapidities.size());
    GaudinMatrices out;
    out.kind = matrices.kind;
    out.coordinates = matrices.coordinates;
    out.coordinates.insert(out.coordinates.end(), rapidities.begin(), rapidities.end());
    out.x = Eigen::MatrixXcd::Zero(n, n);
    out.z = Eigen::MatrixXcd::Zero(n, n);
    out.x.topLeftCorner(m, m) = matrices.x;
    out.z.topLeftCorner(m, m) = matrices.z;
    for (Eigen::Index j = m; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            const cplx xv = gaudin_x(out.kind, out.coordinates[i], out.coordinates[j]);
            const cplx zv = gaudin_z(out.kind, out.coordinates[i], out.coordinates[j]);
            out.x(i, j) = xv;
            out.x(j, i) = -xv;
            out.z(i, j) = zv;
            out.z(j, i) = -zv;
        }
    }
    return out;
}

InfinityRows eta0_infinity_row(const LevelSet& levels) {
    InfinityRows rows;
    rows.x0.reserve(levels.size());
    rows.z0.reserve(levels.size());
    for (double eta : levels.etas()) {
        rows.x0.push_back(std::sqrt(1.0 + eta * eta));
        rows.z0.push_back(eta);
    }
    return rows;
}

double reconstruct_x_from_infinity(const InfinityRows& rows, std::size_t i, std::size_t k) {
    // X_{i0} = -X_{0i}, Z_{i0} = -Z_{0i}
    return -rows.x0.at(i) * rows.x0.at(k) / (-rows.z0.at(i) + rows.z0.at(k));
}

double gaudin_identity_residual(const GaudinMatrices& m) {
    const Eigen::Index n = m.dim();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            for (Eigen::Index k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                const cplx r = m.x(i, j) * m.x(j, k) - m.x(i, k) * (m.z(i, j) + m.z(j, k));
                worst = std::max(worst, std::abs(r));
            }
        }
    }
    return worst;
}

double gaudin_constant_deviation(const GaudinMatrices& m) {
    const double c = gaudin_constant(m.kind);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < m.dim(); ++i) {
        for (Eigen::Index j = 0; j < m.dim(); ++j) {
            if (i == j) continue;
            worst = std::max(worst, std::abs(m.x(i, j) * m.x(i, j) - m.z(i, j) * m.z(i, j) - c));
        }
    }
    return worst;
}

double antisymmetry_defect(const GaudinMatrices& m) {
    return std::max((m.x + m.x.transpose()).cwiseAbs().maxCoeff(),
                    (m.z + m.z.transpose()).cwiseAbs().maxCoeff());
}

DeformationPoint::DeformationPoint(double xi, int omega) : xi_(xi), omega_(omega) {
    if (!(xi >= 0.0 && xi <= 1.0)) {
        throw DomainError("deformation parameter xi must lie in [0, 1], got " + std::to_string(xi));
    }
    if (omega < 1) {
        throw DomainError("deformed copy degeneracy must be positive");
    }
}

double DeformedSpin::s_xi() const {
    if (xi == 0.0) {
        throw ContractionLimitError("s(xi) diverges at xi = 0; only xi s(xi) is defined there");
    }
    return xi_s_xi / xi;
}

DeformedSpin deformed_spin(const DeformationPoint& point, Spin s1) {
    const double xi = point.xi();
    return {xi, xi * s1.value() + (1.0 - xi) * point.omega()};
}

double unitary_grid_point(int n, int omega) {
    if (n < 0 || omega < 1) {
        throw DomainError("unitary grid index must be non-negative");
    }
    return 2.0 * omega / (n + 2.0 * omega);
}

std::optional<int> unitary_grid_index(double xi, int omega) {
    if (!(xi > 0.0 && xi <= 1.0)) {
        return std::nullopt;
    }
    const double n_real = 2.0 * omega * (1.0 / xi - 1.0);
    const double n = std::round(n_real);
    if (n < 0 || n > 1e9) {
        return std::nullopt;
    }
    const double back = unitary_grid_point(static_cast<int>(n), omega);
    if (std::abs(back - xi) > 1e-12 * std::max(1.0, xi)) {
        return std::nullopt;
    }
    return static_cast<int>(n);
}

Spin deformed_spin_on_grid(double xi, Spin s1) {
    const auto n = unitary_grid_index(xi, s1.degeneracy());
    if (!n) {
        throw RepresentationError("xi = " + std::to_string(xi) +
                                  " is not on the unitary grid 2 Omega / (n + 2 Omega) for Omega = " +
                                  std::to_string(s1.degeneracy()));
    }
    return Spin(s1.twice() + *n);
}

}  // namespace gaudin
