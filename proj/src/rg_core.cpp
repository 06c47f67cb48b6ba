#include "gaudin/rg_core.hpp"

#include "gaudin/errors.hpp"

#include <cmath>
#include <string>

namespace gaudin {

namespace {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

void require_frame(const RapiditySet& r, Frame frame, const char* who) {
    if (r.frame != frame) {
        throw ContractError(std::string(who) + ": rapidities are in the wrong coordinate frame");
    }
}

void check_collisions(std::span<const double> levels, const VectorXcd& e) {
    for (Index a = 0; a < e.size(); ++a) {
        if (!std::isfinite(e[a].real()) || !std::isfinite(e[a].imag())) {
            throw SingularEvaluationError("rapidity " + std::to_string(a) + " is not finite", -static_cast<int>(a) - 1,
                                          -static_cast<int>(a) - 1);
        }
        for (std::size_t i = 0; i < levels.size(); ++i) {
            if (std::abs(e[a] - levels[i]) < kCollisionTolerance) {
                throw SingularEvaluationError("rapidity " + std::to_string(a) + " collides with level " +
                                                  std::to_string(i),
                                              static_cast<int>(i), -static_cast<int>(a) - 1);
            }
        }
        for (Index b = 0; b < a; ++b) {
            if (std::abs(e[a] - e[b]) < kCollisionTolerance) {
                throw SingularEvaluationError("rapidities " + std::to_string(b) + " and " + std::to_string(a) +
                                                  " collide",
                                              -static_cast<int>(b) - 1, -static_cast<int>(a) - 1);
            }
        }
    }
}

// One kernel for every Gaudin-coordinate family:
//   F_a = 1 + g sum_i w_i Z(eta_i, e_a) + g w0 e_a - g kappa sum_{b != a} Z(e_b, e_a)
// The rapidity sum is skipped entirely when kappa == 0, so the decoupled
// system tolerates coincident rapidities.
struct Kernel {
    GaudinKind kind;
    std::span<const double> levels;
    std::vector<cplx> w;
    std::optional<cplx> w0;
    double g;
    cplx kappa;
};

void run_kernel(const Kernel& k, const VectorXcd& e, VectorXcd& f, MatrixXcd* jac) {
    const Index n = e.size();
    f.resize(n);
    if (jac) jac->setZero(n, n);
    const bool coupled = k.kappa != cplx(0.0);
    for (Index a = 0; a < n; ++a) {
        cplx level_sum = 0.0;
        cplx level_der = 0.0;
        for (std::size_t i = 0; i < k.levels.size(); ++i) {
            level_sum += k.w[i] * gaudin_z(k.kind, k.levels[i], e[a]);
            if (jac) level_der += k.w[i] * gaudin_dz_db(k.kind, k.levels[i], e[a]);
        }
        cplx value = 1.0 + k.g * level_sum;
        cplx diag = k.g * level_der;
        if (k.w0) {
            value += k.g * *k.w0 * e[a];
            diag += k.g * *k.w0;
        }
        if (coupled) {
            cplx pair_sum = 0.0;
            cplx pair_der = 0.0;
            for (Index b = 0; b < n; ++b) {
                if (b == a) continue;
                pair_sum += gaudin_z(k.kind, e[b], e[a]);
                if (jac) {
                    pair_der += gaudin_dz_db(k.kind, e[b], e[a]);
                    (*jac)(a, b) = -k.g * k.kappa * gaudin_dz_da(k.kind, e[b], e[a]);
                }
            }
            value -= k.g * k.kappa * pair_sum;
            diag -= k.g * k.kappa * pair_der;
        }
        f[a] = value;
        if (jac) (*jac)(a, a) = diag;
    }
}

Kernel deformed_kernel(const ModelSpec& spec, cplx xi) {
    Kernel k{spec.kind, spec.levels.etas(), {}, std::nullopt, spec.g, xi};
    k.w.reserve(spec.levels.size());
    for (const Spin& s : spec.levels.spins()) {
        k.w.push_back(scaled_deformed_spin(xi, s.value(), s.degeneracy()));
    }
    if (spec.far_level) {
        k.w0 = scaled_deformed_spin(xi, spec.far_level->value(), spec.far_level->degeneracy());
    }
    return k;
}

ResidualReport finish(VectorXcd f, std::optional<MatrixXcd> jac, bool decoupled) {
    ResidualReport rep;
    rep.max_abs = max_abs(f);
    rep.residuals = std::move(f);
    rep.jacobian = std::move(jac);
    rep.decoupled = decoupled;
    return rep;
}

ResidualReport report_from_kernel(const Kernel& k, const RapiditySet& r, bool with_jacobian, bool decoupled) {
    check_collisions(k.levels, r.values);
    VectorXcd f;
    std::optional<MatrixXcd> jac;
    if (with_jacobian) jac.emplace();
    run_kernel(k, r.values, f, jac ? &*jac : nullptr);
    return finish(std::move(f), std::move(jac), decoupled);
}

void check_xi(double xi) {
    if (!(xi >= 0.0 && xi <= 1.0)) {
        throw DomainError("deformation parameter xi must lie in [0, 1], got " + std::to_string(xi));
    }
}

// Energy-unit single-copy kernel in Dicke coordinates. mu = xi / Omega_0 is
// 2 G^2 lambda^2, r = xi s_0(xi) / Omega_0.
void single_copy_kernel(const DickeSpec& spec, const DeformedCopy& copy, cplx xi, const VectorXcd& x,
                        VectorXcd& f, MatrixXcd* jac, VectorXcd* dxi) {
    const Index n = x.size();
    const double omega0 = copy.omega();
    const double s0 = copy.s0.value();
    const double two_g2 = 2.0 * spec.coupling_G * spec.coupling_G;
    const cplx mu = xi / omega0;
    const cplx r = scaled_deformed_spin(xi, s0, copy.omega()) / omega0;
    const double dr = (s0 - omega0) / omega0;
    const double dmu = 1.0 / omega0;
    f.resize(n);
    if (jac) jac->setZero(n, n);
    if (dxi) dxi->resize(n);
    for (Index a = 0; a < n; ++a) {
        cplx value = spec.hbar_omega - x[a] * r;
        cplx diag = -r;
        cplx dv = -x[a] * dr;
        for (std::size_t k = 0; k < spec.size(); ++k) {
            const double eps = spec.epsilons[k];
            const double sk = spec.spins[k].value();
            const cplx d = eps - x[a];
            value -= sk * (two_g2 + mu * eps * x[a]) / d;
            diag -= sk * (two_g2 + mu * eps * eps) / (d * d);
            dv -= sk * dmu * eps * x[a] / d;
        }
        for (Index b = 0; b < n; ++b) {
            if (b == a) continue;
            const cplx d = x[b] - x[a];
            value += (two_g2 + mu * x[b] * x[a]) / d;
            diag += (two_g2 + mu * x[b] * x[b]) / (d * d);
            if (jac) (*jac)(a, b) = -(two_g2 + mu * x[a] * x[a]) / (d * d);
            dv += dmu * x[b] * x[a] / d;
        }
        f[a] = value;
        if (jac) (*jac)(a, a) = diag;
        if (dxi) (*dxi)[a] = dv;
    }
}

}  // namespace

double max_abs(const VectorXcd& v) {
    double m = 0.0;
    for (Index i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
    return m;
}

void ModelSpec::validate() const {
    if (n_excitations < 1) {
        throw ValidationError("N must be at least 1");
    }
    if (!std::isfinite(g)) {
        throw ValidationError("coupling g must be finite");
    }
    if (far_level && kind != GaudinKind::trigonometric) {
        throw ValidationError("a level at eta = infinity needs the trigonometric kind");
    }
}

void DickeSpec::validate() const {
    if (epsilons.empty()) {
        throw ValidationError("Dicke spec needs at least one level");
    }
    if (epsilons.size() != spins.size()) {
        throw ValidationError("epsilons and spins differ in length");
    }
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!std::isfinite(epsilons[i])) throw ValidationError("epsilons must be finite");
        if (spins[i].twice() < 1) throw ValidationError("spins must be positive half-integers");
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(epsilons[i] - epsilons[j]) < kCollisionTolerance) {
                throw DegenerateLevelError("levels must be distinct (levels " + std::to_string(j) + " and " +
                                           std::to_string(i) + ")");
            }
        }
    }
    if (!(hbar_omega > 0.0) || !std::isfinite(hbar_omega)) {
        throw ValidationError("hbar_omega must be positive");
    }
    if (!std::isfinite(coupling_G)) {
        throw ValidationError("G must be finite");
    }
    if (n_excitations < 1) {
        throw ValidationError("N must be at least 1");
    }
}

ResidualReport rg_residual(const ModelSpec& spec, const RapiditySet& r, bool with_jacobian) {
    require_frame(r, Frame::rg_eta, "rg_residual");
    return report_from_kernel(deformed_kernel(spec, 1.0), r, with_jacobian, false);
}

ResidualReport deformed_rg_residual(const ModelSpec& spec, double xi, const RapiditySet& r, bool with_jacobian) {
    check_xi(xi);
    require_frame(r, Frame::rg_eta, "deformed_rg_residual");
    return report_from_kernel(deformed_kernel(spec, xi), r, with_jacobian, xi == 0.0);
}

ResidualReport tda_residual(const ModelSpec& spec, const RapiditySet& r, bool with_jacobian) {
    require_frame(r, Frame::rg_eta, "tda_residual");
    return report_from_kernel(deformed_kernel(spec, 0.0), r, with_jacobian, true);
}

ResidualReport rg_residual_via_matrices(const ModelSpec& spec, const RapiditySet& r) {
    require_frame(r, Frame::rg_eta, "rg_residual_via_matrices");
    const auto base = build_gaudin(spec.kind, spec.levels);
    std::vector<cplx> rap(r.values.data(), r.values.data() + r.values.size());
    const auto ext = extend_with_rapidities(base, spec.levels, rap);
    const auto m = static_cast<Index>(spec.levels.size());
    const Index n = r.size();
    VectorXcd f(n);
    for (Index a = 0; a < n; ++a) {
        cplx v = 1.0;
        for (Index i = 0; i < m; ++i) {
            v += spec.g * ext.z(i, m + a) * spec.levels.spin(static_cast<std::size_t>(i)).value();
        }
        if (spec.far_level) {
            // Z_{0 alpha} -> eta_alpha for eta_0 -> infinity
            v += spec.g * spec.far_level->value() * r.values[a];
        }
        for (Index b = 0; b < n; ++b) {
            if (b != a) v -= spec.g * ext.z(m + b, m + a);
        }
        f[a] = v;
    }
    return finish(std::move(f), std::nullopt, false);
}

ResidualReport dicke_rg_residual(const DickeSpec& spec, const RapiditySet& r, bool with_jacobian) {
    require_frame(r, Frame::dicke_x, "dicke_rg_residual");
    check_collisions(spec.epsilons, r.values);
    const VectorXcd& x = r.values;
    const Index n = x.size();
    const double two_g2 = 2.0 * spec.coupling_G * spec.coupling_G;
    VectorXcd f(n);
    std::optional<MatrixXcd> jac;
    if (with_jacobian) jac = MatrixXcd::Zero(n, n);
    for (Index a = 0; a < n; ++a) {
        cplx value = spec.hbar_omega - x[a];
        cplx diag = -1.0;
        for (std::size_t k = 0; k < spec.size(); ++k) {
            const cplx d = spec.epsilons[k] - x[a];
            value -= two_g2 * spec.spins[k].value() / d;
            diag -= two_g2 * spec.spins[k].value() / (d * d);
        }
        for (Index b = 0; b < n; ++b) {
            if (b == a) continue;
            const cplx d = x[b] - x[a];
            value += two_g2 / d;
            diag += two_g2 / (d * d);
            if (jac) (*jac)(a, b) = -two_g2 / (d * d);
        }
        f[a] = value;
        if (jac) (*jac)(a, a) = diag;
    }
    return finish(std::move(f), std::move(jac), false);
}

ResidualReport deformed_dicke_residual(const DickeSpec& spec, const DeformedCopy& copy, double xi,
                                       const RapiditySet& r, bool with_jacobian) {
    check_xi(xi);
    require_frame(r, Frame::dicke_x, "deformed_dicke_residual");
    if (xi == 0.0) {
        throw ContractionLimitError("deformed_dicke_residual at xi = 0: use dicke_rg_residual for the contraction limit");
    }
    check_collisions(spec.epsilons, r.values);
    const double lambda = contraction_scale(spec, copy, xi);
    const double g = contraction_coupling(spec, copy, xi);
    std::vector<double> etas(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) etas[k] = -lambda * spec.epsilons[k];
    Kernel k{GaudinKind::trigonometric, etas, {}, std::nullopt, g, 1.0};
    for (const Spin& s : spec.spins) k.w.emplace_back(s.value());
    k.w0 = deformed_spin(DeformationPoint(xi, copy.omega()), copy.s0).s_xi();
    const VectorXcd eta = -lambda * r.values;
    check_collisions(etas, eta);
    VectorXcd f;
    std::optional<MatrixXcd> jac;
    if (with_jacobian) jac.emplace();
    run_kernel(k, eta, f, jac ? &*jac : nullptr);
    if (jac) *jac *= -lambda;
    return finish(std::move(f), std::move(jac), false);
}

FamilyPoint evaluate_all_copies(const ModelSpec& spec, cplx xi, const VectorXcd& eta) {
    check_collisions(spec.levels.etas(), eta);
    FamilyPoint p;
    const Kernel k = deformed_kernel(spec, xi);
    run_kernel(k, eta, p.f, &p.jacobian);
    const Index n = eta.size();
    p.dxi.resize(n);
    for (Index a = 0; a < n; ++a) {
        cplx v = 0.0;
        for (std::size_t i = 0; i < spec.levels.size(); ++i) {
            const Spin s = spec.levels.spin(i);
            v += (s.value() - s.degeneracy()) * gaudin_z(spec.kind, spec.levels.eta(i), eta[a]);
        }
        if (spec.far_level) {
            v += (spec.far_level->value() - spec.far_level->degeneracy()) * eta[a];
        }
        for (Index b = 0; b < n; ++b) {
            if (b != a) v -= gaudin_z(spec.kind, eta[b], eta[a]);
        }
        p.dxi[a] = spec.g * v;
    }
    return p;
}

FamilyPoint evaluate_single_copy(const DickeSpec& spec, const DeformedCopy& copy, cplx xi, const VectorXcd& x) {
    check_collisions(spec.epsilons, x);
    FamilyPoint p;
    single_copy_kernel(spec, copy, xi, x, p.f, &p.jacobian, &p.dxi);
    return p;
}

}  // namespace gaudin
