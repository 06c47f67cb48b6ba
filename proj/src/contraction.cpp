#include "gaudin/errors.hpp"
#include "gaudin/rg_core.hpp"

#include <cmath>

namespace gaudin {

namespace {

void require_positive_xi(double xi) {
    if (!(xi > 0.0 && xi <= 1.0)) {
        throw DomainError("contraction rescaling needs 0 < xi <= 1");
    }
}

void require_coupling(const DickeSpec& spec) {
    if (spec.coupling_G == 0.0) {
        throw DomainError("the contraction rescaling is undefined for G = 0");
    }
}

}  // namespace

// g(xi) = sqrt(2 xi / (Omega_0 G^2)) G^2 / hbar_omega
double contraction_coupling(const DickeSpec& spec, const DeformedCopy& copy, double xi) {
    require_positive_xi(xi);
    require_coupling(spec);
    const double g2 = spec.coupling_G * spec.coupling_G;
    return std::sqrt(2.0 * xi / (copy.omega() * g2)) * g2 / spec.hbar_omega;
}

// lambda(xi) = sqrt(xi / (2 Omega_0 G^2)), eta = -lambda eps
double contraction_scale(const DickeSpec& spec, const DeformedCopy& copy, double xi) {
    require_positive_xi(xi);
    require_coupling(spec);
    return std::sqrt(xi / (2.0 * copy.omega() * spec.coupling_G * spec.coupling_G));
}

RapiditySet to_dicke_frame(const RapiditySet& eta, const DickeSpec& spec, const DeformedCopy& copy, double xi) {
    if (eta.frame != Frame::rg_eta) {
        throw ContractError("to_dicke_frame expects Gaudin-coordinate rapidities");
    }
    const double lambda = contraction_scale(spec, copy, xi);
    return RapiditySet{-eta.values / lambda, Frame::dicke_x};
}

RapiditySet to_rg_frame(const RapiditySet& x, const DickeSpec& spec, const DeformedCopy& copy, double xi) {
    if (x.frame != Frame::dicke_x) {
        throw ContractError("to_rg_frame expects Dicke-coordinate rapidities");
    }
    const double lambda = contraction_scale(spec, copy, xi);
    return RapiditySet{-lambda * x.values, Frame::rg_eta};
}

ModelSpec auxiliary_rg_model(const DickeSpec& spec, const DeformedCopy& copy) {
    spec.validate();
    const double lambda = contraction_scale(spec, copy, 1.0);
    std::vector<double> etas;
    etas.reserve(spec.size());
    for (double e : spec.epsilons) etas.push_back(-lambda * e);
    ModelSpec out{LevelSet(std::move(etas), spec.spins), GaudinKind::trigonometric, spec.n_excitations,
                  contraction_coupling(spec, copy, 1.0), copy.s0};
    return out;
}

}  // namespace gaudin
