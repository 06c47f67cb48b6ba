#include "gaudin/solver.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace gaudin {

namespace {

using Eigen::VectorXcd;

using Evaluator = std::function<FamilyPoint(cplx, const VectorXcd&)>;
using PathFn = std::function<cplx(double)>;

struct FollowResult {
    bool ok{false};
    VectorXcd x;
    bool collided{false};
    std::string collision;
};

class Tracker {
public:
    Tracker(Evaluator eval, const ContinuationPolicy& policy) : eval_(std::move(eval)), policy_(policy) {}

    // Newton corrector at fixed xi, no damping.
    bool correct(cplx xi, VectorXcd& x, int& iters, double& residual) {
        for (int it = 0; it <= policy_.max_newton_iters; ++it) {
            FamilyPoint p;
            try {
                p = eval_(xi, x);
            } catch (const SingularEvaluationError& e) {
                collided_ = true;
                collision_ = e.what();
                return false;
            }
            residual = max_abs(p.f);
            if (!std::isfinite(residual)) return false;
            if (residual <= policy_.newton_tol) {
                iters = it;
                return true;
            }
            if (it == policy_.max_newton_iters) break;
            Eigen::PartialPivLU<Eigen::MatrixXcd> lu(p.jacobian);
            if (!(lu.rcond() > 1e-15)) return false;
            x -= lu.solve(p.f);
            if (!x.allFinite()) return false;
        }
        return false;
    }

    // Euler tangent dx/dxi; constant prediction when the solve is ill-conditioned.
    VectorXcd tangent(cplx xi, const VectorXcd& x) {
        try {
            FamilyPoint p = eval_(xi, x);
            Eigen::PartialPivLU<Eigen::MatrixXcd> lu(p.jacobian);
            if (lu.rcond() > 1e-13) {
                VectorXcd v = -lu.solve(p.dxi);
                if (v.allFinite()) return v;
            }
        } catch (const SingularEvaluationError&) {
        }
        return VectorXcd::Zero(x.size());
    }

    // Follows path(t), t in [0, 1], of length `length` in the xi-plane.
    // on_accept receives every accepted point.
    FollowResult follow(VectorXcd x, const PathFn& path, double length, double& h,
                        const std::function<void(cplx, const VectorXcd&, double, int)>& on_accept) {
        collided_ = false;
        double t = 0.0;
        while (t < 1.0) {
            const double dt = std::min(h / length, 1.0 - t);
            const double t_next = (dt >= 1.0 - t) ? 1.0 : t + dt;
            const cplx xa = path(t);
            const cplx xb = path(t_next);
            const VectorXcd pred = x + tangent(xa, x) * (xb - xa);
            VectorXcd xn = pred;
            int iters = 0;
            double residual = 0.0;
            bool accept = correct(xb, xn, iters, residual);
            if (accept) {
                const double predictor_move = (pred - x).cwiseAbs().maxCoeff();
                const double corrector_move = (xn - pred).cwiseAbs().maxCoeff();
                accept = corrector_move <= policy_.jump_ratio * std::max(predictor_move, policy_.jump_floor);
            }
            if (accept) {
                x = xn;
                t = t_next;
                on_accept(xb, x, residual, iters);
                h = std::min(h * policy_.step_grow, policy_.max_step);
                collided_ = false;
            } else {
                h *= policy_.step_shrink;
                if (h < policy_.min_step) {
                    return {false, x, collided_, collision_};
                }
            }
        }
        return {true, x, false, {}};
    }

private:
    Evaluator eval_;
    ContinuationPolicy policy_;
    bool collided_{false};
    std::string collision_;
};

SolutionTrace track(const Evaluator& eval, const ContinuationPolicy& policy, RapiditySet start) {
    policy.validate();
    SolutionTrace trace;
    const double a = policy.xi_start;
    const double b = policy.xi_end;
    Tracker tracker(eval, policy);

    FamilyPoint p0 = eval(a, start.values);
    double res0 = max_abs(p0.f);
    int iters0 = 0;
    if (res0 > policy.newton_tol) {
        VectorXcd x = start.values;
        if (!tracker.correct(a, x, iters0, res0)) {
            throw ContractError("continuation start point does not solve the equations at xi_start");
        }
        start.values = x;
    }
    trace.path.push_back({a, start, res0, iters0});
    if (a == b) {
        trace.status = TraceStatus::converged;
        return trace;
    }

    const double dir = b > a ? 1.0 : -1.0;
    auto record = [&](cplx xi, const VectorXcd& x, double res, int it) {
        trace.path.push_back({xi.real(), RapiditySet{x, start.frame}, res, it});
    };
    auto ignore = [](cplx, const VectorXcd&, double, int) {};

    double h = policy.initial_step;
    while (true) {
        const TracePoint& cur = trace.path.back();
        const double from = cur.xi;
        const PathFn line = [from, b](double t) { return t >= 1.0 ? cplx(b) : cplx(from + (b - from) * t); };
        FollowResult fr = tracker.follow(cur.rapidities.values, line, std::abs(b - from), h, record);
        if (fr.ok) {
            trace.status = TraceStatus::converged;
            return trace;
        }
        const double stall = trace.path.back().xi;
        const auto fail = [&](const std::string& why) {
            trace.status = fr.collided ? TraceStatus::collision_detected : TraceStatus::stalled;
            std::ostringstream os;
            os << why << " at xi = " << stall;
            if (fr.collided) os << " (" << fr.collision << ")";
            trace.diagnostic = os.str();
            return trace;
        };
        if (!policy.allow_detours) return fail("step underflow");
        if (trace.detours >= policy.max_detours) return fail("detour budget exhausted");

        bool rescued = false;
        double rho = policy.detour_radius;
        for (int attempt = 0; attempt < policy.detour_attempts && !rescued; ++attempt, rho *= 2.5) {
            // latest recorded point at least rho before the stall
            std::size_t k = trace.path.size() - 1;
            while (k > 0 && dir * (stall - trace.path[k].xi) < rho) --k;
            const double xb = trace.path[k].xi;
            double radius = std::max(rho, 0.5 * (dir * (stall - xb) + rho));
            double end = xb + dir * 2.0 * radius;
            if (dir * (end - b) > 0.0) {
                end = b;
                radius = 0.5 * std::abs(b - xb);
            }
            if (radius <= 0.0) continue;
            const cplx center = xb + dir * radius;
            const PathFn arc = [=](double t) {
                if (t >= 1.0) return cplx(end);
                return center - dir * radius * std::exp(cplx(0.0, -dir * std::numbers::pi * t));
            };
            double h_arc = policy.initial_step;
            FollowResult ar = tracker.follow(trace.path[k].rapidities.values, arc, std::numbers::pi * radius, h_arc,
                                             ignore);
            if (!ar.ok) continue;
            int it = 0;
            double res = 0.0;
            VectorXcd x = ar.x;
            if (!tracker.correct(end, x, it, res)) continue;
            trace.path.push_back({end, RapiditySet{x, start.frame}, res, it});
            ++trace.detours;
            rescued = true;
        }
        if (!rescued) return fail("step underflow, detours failed");
        if (trace.path.back().xi == b) {
            trace.status = TraceStatus::converged;
            return trace;
        }
        h = policy.initial_step;
    }
}

}  // namespace

const char* to_string(TraceStatus s) noexcept {
    switch (s) {
        case TraceStatus::converged: return "converged";
        case TraceStatus::stalled: return "stalled";
        case TraceStatus::collision_detected: return "collision_detected";
    }
    return "unknown";
}

void ContinuationPolicy::validate() const {
    if (!(xi_start >= 0.0 && xi_start <= 1.0 && xi_end >= 0.0 && xi_end <= 1.0)) {
        throw ValidationError("continuation endpoints must lie in [0, 1]");
    }
    if (!(min_step > 0.0 && min_step <= initial_step && initial_step <= max_step)) {
        throw ValidationError("continuation steps must satisfy 0 < min_step <= initial_step <= max_step");
    }
    if (!(newton_tol > 0.0)) {
        throw ValidationError("newton_tol must be positive");
    }
    if (max_newton_iters < 1 || !(step_shrink > 0.0 && step_shrink < 1.0) || !(step_grow >= 1.0)) {
        throw ValidationError("invalid newton iteration count or step factors");
    }
}

SolutionTrace continue_in_xi(const ModelSpec& spec, const ContinuationPolicy& policy, const RapiditySet& start) {
    if (start.frame != Frame::rg_eta) {
        throw ContractError("all-copies continuation expects Gaudin-coordinate rapidities");
    }
    spec.validate();
    Evaluator eval = [&spec](cplx xi, const VectorXcd& e) { return evaluate_all_copies(spec, xi, e); };
    SolutionTrace trace = track(eval, policy, start);
    if (trace.status == TraceStatus::converged) {
        const RapiditySet& fin = trace.final_rapidities();
        try {
            trace.endpoint_check = policy.xi_end == 1.0 ? rg_residual_via_matrices(spec, fin).max_abs
                                                        : deformed_rg_residual(spec, policy.xi_end, fin, false).max_abs;
        } catch (const SingularEvaluationError& e) {
            trace.status = TraceStatus::collision_detected;
            trace.diagnostic = e.what();
        }
    }
    return trace;
}

SolutionTrace continue_in_xi(const DickeSpec& spec, const DeformedCopy& copy, const ContinuationPolicy& policy,
                             const RapiditySet& start) {
    if (start.frame != Frame::dicke_x) {
        throw ContractError("single-copy continuation expects Dicke-coordinate rapidities");
    }
    spec.validate();
    Evaluator eval = [&spec, &copy](cplx xi, const VectorXcd& x) { return evaluate_single_copy(spec, copy, xi, x); };
    SolutionTrace trace = track(eval, policy, start);
    if (trace.status != TraceStatus::converged) return trace;
    TracePoint& last = trace.path.back();
    try {
        if (policy.xi_end == 0.0) {
            NewtonResult polished = newton_solve_dicke(spec, last.rapidities, policy.newton_tol, 20);
            last.rapidities = polished.rapidities;
            last.max_abs = polished.max_abs;
            trace.endpoint_check = dicke_rg_residual(spec, last.rapidities, false).max_abs;
        } else {
            trace.endpoint_check =
                spec.hbar_omega * deformed_dicke_residual(spec, copy, policy.xi_end, last.rapidities, false).max_abs;
        }
    } catch (const SingularEvaluationError& e) {
        trace.status = TraceStatus::collision_detected;
        trace.diagnostic = e.what();
    } catch (const Error& e) {
        trace.status = TraceStatus::stalled;
        trace.diagnostic = e.what();
    }
    return trace;
}

}  // namespace gaudin
