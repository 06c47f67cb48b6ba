// solver.hpp — pp-TDA seeds, damped Newton and adaptive xi-continuation from
// the decoupled limit to the coupled RG and Dicke equations.
#pragma once

#include "gaudin/errors.hpp"
#include "gaudin/rg_core.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gaudin {

struct ContinuationPolicy {
    double xi_start{0.0};
    double xi_end{1.0};
    double initial_step{1e-2};
    double min_step{1e-8};
    double max_step{0.1};
    double newton_tol{1e-10};
    int max_newton_iters{8};
    double step_shrink{0.5};
    double step_grow{1.3};
    // Accept a corrector only if it moves at most jump_ratio times the
    // predictor displacement (plus jump_floor); guards against branch jumps.
    double jump_ratio{0.1};
    double jump_floor{1e-3};
    // On step underflow, go around the stall point on a semicircle in the
    // upper half xi-plane instead of giving up.
    bool allow_detours{true};
    double detour_radius{0.02};
    int detour_attempts{3};
    int max_detours{12};

    void validate() const;
};

enum class TraceStatus { converged, stalled, collision_detected };

const char* to_string(TraceStatus s) noexcept;

struct TracePoint {
    double xi;
    RapiditySet rapidities;
    double max_abs;
    int iterations;
};

struct SolutionTrace {
    std::vector<TracePoint> path;
    TraceStatus status{TraceStatus::stalled};
    int detours{0};
    // Residual of the final point from an evaluation independent of the
    // continuation family (set on success).
    std::optional<double> endpoint_check;
    std::string diagnostic;

    const RapiditySet& final_rapidities() const { return path.back().rapidities; }
};

class NoConvergenceError : public Error {
public:
    NoConvergenceError(const std::string& what, RapiditySet best, double best_residual)
        : Error(what), best_(std::move(best)), best_residual_(best_residual) {}
    const RapiditySet& best_iterate() const noexcept { return best_; }
    double best_residual() const noexcept { return best_residual_; }

private:
    RapiditySet best_;
    double best_residual_;
};

// A root of the scalar pp-TDA secular function together with the level it is
// attached to (-1 for the level at infinity).
struct TdaMode {
    double root;
    int level;
};

// All real roots of 1 + g sum_i Omega_i Z(eta_i, eta) (+ g Omega_0 eta for a
// level at infinity), ascending.
std::vector<TdaMode> tda_modes(const ModelSpec& spec);

struct SeedSelection {
    enum class Rule { lowest, pattern };
    Rule rule{Rule::lowest};
    // Mode indices into tda_modes (with repetition), used by Rule::pattern.
    std::vector<int> pattern;
    // Refuse to put more than 2 s_i seeds on the mode of level i.
    bool enforce_capacity{false};

    static SeedSelection lowest() { return {}; }
    static SeedSelection occupation(std::vector<int> modes) { return {Rule::pattern, std::move(modes), false}; }
};

// Seed multiset (mode indices) chosen by the selection rule.
std::vector<int> select_modes(const ModelSpec& spec, const std::vector<TdaMode>& modes, const SeedSelection& sel);

// N decoupled rapidities, sorted by real part; repeated roots stay repeated.
RapiditySet solve_tda(const ModelSpec& spec, const SeedSelection& selection = SeedSelection::lowest());

struct LiftedStart {
    RapiditySet rapidities;
    double xi;
};

// Splits repeated TDA roots along the leading-order cluster shape (scaled
// Hermite zeros) and returns the point where continuation should start.
// Distinct seeds are returned unchanged at xi = 0. A nonzero rng_seed
// rescales the lift magnitude reproducibly.
LiftedStart lift_repeated_seeds(const ModelSpec& spec, const RapiditySet& tda, const ContinuationPolicy& policy,
                                double magnitude = 1e-4, std::uint64_t rng_seed = 0);

// Zeros of the physicists' Hermite polynomial H_k, ascending.
std::vector<double> hermite_zeros(int k);

struct NewtonResult {
    RapiditySet rapidities;
    double max_abs;
    int iterations;
};

using ResidualFunction = std::function<ResidualReport(const RapiditySet&)>;

// Damped Newton with the analytic Jacobian supplied by the residual function.
NewtonResult newton_solve(const ResidualFunction& residual, const RapiditySet& r0, double tol, int max_iters);

NewtonResult newton_solve_rg(const ModelSpec& spec, const RapiditySet& r0, double tol = 1e-10, int max_iters = 50);
NewtonResult newton_solve_dicke(const DickeSpec& spec, const RapiditySet& r0, double tol = 1e-10,
                                int max_iters = 50);

// All copies deformed, Gaudin coordinates, usually xi: 0 -> 1.
SolutionTrace continue_in_xi(const ModelSpec& spec, const ContinuationPolicy& policy, const RapiditySet& start);
// Single deformed copy, Dicke coordinates, usually xi: 1 -> 0. With
// xi_end = 0 the endpoint is polished and checked on the Dicke RG equations.
SolutionTrace continue_in_xi(const DickeSpec& spec, const DeformedCopy& copy, const ContinuationPolicy& policy,
                             const RapiditySet& start);

struct RgBranch {
    std::vector<int> seed_modes;
    SolutionTrace trace;
    bool converged() const { return trace.status == TraceStatus::converged; }
};

struct BranchOptions {
    ContinuationPolicy policy{};
    std::uint64_t rng_seed{0};
    bool parallel{false};
    double lift_magnitude{1e-4};
};

// Every multiset of N TDA modes (capacity ignored).
std::vector<std::vector<int>> all_seed_multisets(int n_modes, int n);

RgBranch solve_rg_branch(const ModelSpec& spec, const std::vector<int>& seed_modes, const BranchOptions& opt);
std::vector<RgBranch> solve_rg_branches(const ModelSpec& spec, const std::vector<std::vector<int>>& seeds,
                                        const BranchOptions& opt);

struct DickeBranch {
    std::vector<int> seed_modes;
    SolutionTrace aux_trace;    // all copies, xi: 0 -> 1 in the auxiliary model
    SolutionTrace dicke_trace;  // single copy, xi: 1 -> 0
    RapiditySet x;              // final Dicke rapidities (frame dicke_x)
    double energy{0.0};         // sum x_alpha - sum eps_k s_k
};

struct DickeSolveResult {
    std::vector<DickeBranch> branches;  // distinct converged branches
    std::vector<RgBranch> failed;       // seeds that did not reach the Dicke point
    int duplicates{0};
};

std::vector<DickeBranch> dedupe_dicke(std::vector<DickeBranch> in, int* duplicates = nullptr);

DickeSolveResult solve_dicke_branches(const DickeSpec& spec, const DeformedCopy& copy, const BranchOptions& opt,
                                      const std::optional<std::vector<std::vector<int>>>& seeds = std::nullopt);

// Energy of a Dicke Bethe state from its rapidities.
double dicke_energy(const DickeSpec& spec, const RapiditySet& x);

// Unordered comparison of rapidity sets.
bool same_rapidities(const RapiditySet& a, const RapiditySet& b, double tol);
double conjugation_defect(const RapiditySet& r);
RapiditySet sorted_by_real(RapiditySet r);

}  // namespace gaudin
