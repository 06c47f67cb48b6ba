#include "gaudin/solver.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <random>
#include <string>

namespace gaudin {

namespace {

using Eigen::VectorXcd;

double secular(const ModelSpec& spec, double y) {
    double v = 1.0;
    for (std::size_t i = 0; i < spec.levels.size(); ++i) {
        v += spec.g * spec.levels.degeneracy(i) * gaudin_z(spec.kind, spec.levels.eta(i), y).real();
    }
    if (spec.far_level) v += spec.g * spec.far_level->degeneracy() * y;
    return v;
}

double secular_derivative(const ModelSpec& spec, double y) {
    double v = 0.0;
    for (std::size_t i = 0; i < spec.levels.size(); ++i) {
        v += spec.g * spec.levels.degeneracy(i) * gaudin_dz_db(spec.kind, spec.levels.eta(i), y).real();
    }
    if (spec.far_level) v += spec.g * spec.far_level->degeneracy();
    return v;
}

std::optional<double> bracket_root(const ModelSpec& spec, double lo, double hi) {
    const double flo = secular(spec, lo);
    const double fhi = secular(spec, hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) return std::nullopt;
    boost::math::tools::eps_tolerance<double> tol(52);
    std::uintmax_t iters = 200;
    const auto f = [&spec](double y) { return secular(spec, y); };
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    return 0.5 * (r.first + r.second);
}

// Exterior interval search: walk outwards from the pole until the sign flips.
std::optional<double> exterior_root(const ModelSpec& spec, double pole, double dir) {
    const double near = pole + dir * 1e-10 * (1.0 + std::abs(pole));
    const double fnear = secular(spec, near);
    double prev = near;
    for (int k = 0; k < 200; ++k) {
        const double far = pole + dir * std::ldexp(1.0 + std::abs(pole), k - 20);
        if (dir * (far - prev) <= 0.0) continue;
        const double ffar = secular(spec, far);
        if ((ffar > 0.0) != (fnear > 0.0) || ffar == 0.0) {
            return dir > 0 ? bracket_root(spec, prev, far) : bracket_root(spec, far, prev);
        }
        prev = far;
        if (std::abs(far) > 1e15) break;
    }
    return std::nullopt;
}

int level_capacity(const ModelSpec& spec, int level) {
    return level < 0 ? spec.far_level->twice() : spec.levels.spin(static_cast<std::size_t>(level)).twice();
}

}  // namespace

std::vector<TdaMode> tda_modes(const ModelSpec& spec) {
    spec.validate();
    const std::size_t m = spec.levels.size();
    if (spec.g == 0.0) return {};
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return spec.levels.eta(a) < spec.levels.eta(b); });
    std::vector<double> poles;
    for (auto i : order) poles.push_back(spec.levels.eta(i));

    const bool positive = spec.g > 0.0;
    const bool far = spec.far_level.has_value();
    std::vector<TdaMode> out;
    // left exterior
    if (auto r = exterior_root(spec, poles.front(), -1.0)) {
        const int level = positive ? (far ? -1 : static_cast<int>(order.back())) : static_cast<int>(order.front());
        out.push_back({*r, level});
    }
    for (std::size_t k = 0; k + 1 < m; ++k) {
        const double lo = poles[k] + 1e-10 * (1.0 + std::abs(poles[k]));
        const double hi = poles[k + 1] - 1e-10 * (1.0 + std::abs(poles[k + 1]));
        if (auto r = bracket_root(spec, lo, hi)) {
            out.push_back({*r, static_cast<int>(positive ? order[k] : order[k + 1])});
        }
    }
    if (auto r = exterior_root(spec, poles.back(), 1.0)) {
        const int level = positive ? static_cast<int>(order.back()) : (far ? -1 : static_cast<int>(order.front()));
        out.push_back({*r, level});
    }
    std::sort(out.begin(), out.end(), [](const TdaMode& a, const TdaMode& b) { return a.root < b.root; });
    return out;
}

std::vector<int> select_modes(const ModelSpec& spec, const std::vector<TdaMode>& modes, const SeedSelection& sel) {
    const int n = spec.n_excitations;
    const int r = static_cast<int>(modes.size());
    if (r == 0) {
        throw InsufficientModesError("the pp-TDA secular equation has no real roots");
    }
    std::vector<int> picked;
    if (sel.rule == SeedSelection::Rule::pattern) {
        if (static_cast<int>(sel.pattern.size()) != n) {
            throw SelectionError("occupation pattern must list exactly N = " + std::to_string(n) + " modes");
        }
        for (int idx : sel.pattern) {
            if (idx < 0 || idx >= r) {
                throw SelectionError("occupation pattern refers to mode " + std::to_string(idx) + " but only " +
                                     std::to_string(r) + " TDA roots exist");
            }
        }
        picked = sel.pattern;
    } else if (sel.enforce_capacity) {
        for (int idx = 0; idx < r && static_cast<int>(picked.size()) < n; ++idx) {
            const int cap = level_capacity(spec, modes[idx].level);
            for (int c = 0; c < cap && static_cast<int>(picked.size()) < n; ++c) picked.push_back(idx);
        }
        if (static_cast<int>(picked.size()) < n) {
            throw InsufficientModesError("fewer TDA mode slots than N under the capacity rule");
        }
    } else {
        for (int idx = 0; idx < std::min(n, r); ++idx) picked.push_back(idx);
        while (static_cast<int>(picked.size()) < n) picked.push_back(0);
    }
    std::sort(picked.begin(), picked.end());
    if (sel.enforce_capacity) {
        std::map<int, int> count;
        for (int idx : picked) {
            if (++count[idx] > level_capacity(spec, modes[idx].level)) {
                throw SelectionError("mode " + std::to_string(idx) + " occupied beyond the capacity of its level");
            }
        }
    }
    return picked;
}

RapiditySet solve_tda(const ModelSpec& spec, const SeedSelection& selection) {
    const auto modes = tda_modes(spec);
    const auto picked = select_modes(spec, modes, selection);
    RapiditySet out{VectorXcd(static_cast<Eigen::Index>(picked.size())), Frame::rg_eta};
    for (std::size_t a = 0; a < picked.size(); ++a) out.values[static_cast<Eigen::Index>(a)] = modes[picked[a]].root;
    return sorted_by_real(out);
}

std::vector<double> hermite_zeros(int k) {
    if (k < 1) return {};
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (int j = 1; j < k; ++j) {
        t(j - 1, j) = t(j, j - 1) = std::sqrt(0.5 * j);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
    std::vector<double> z(es.eigenvalues().data(), es.eigenvalues().data() + k);
    std::sort(z.begin(), z.end());
    return z;
}

LiftedStart lift_repeated_seeds(const ModelSpec& spec, const RapiditySet& tda, const ContinuationPolicy& policy,
                                double magnitude, std::uint64_t rng_seed) {
    if (rng_seed != 0) {
        std::mt19937_64 gen(rng_seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        magnitude *= 1.0 + 0.5 * u(gen);
    }
    // clusters of identical roots
    std::vector<std::pair<double, int>> clusters;
    for (Eigen::Index a = 0; a < tda.size(); ++a) {
        const double r = tda.values[a].real();
        auto it = std::find_if(clusters.begin(), clusters.end(),
                               [&](const auto& c) { return std::abs(c.first - r) < kCollisionTolerance; });
        if (it == clusters.end()) {
            clusters.emplace_back(r, 1);
        } else {
            ++it->second;
        }
    }
    const bool repeated = std::any_of(clusters.begin(), clusters.end(), [](const auto& c) { return c.second > 1; });
    if (!repeated) return {tda, policy.xi_start};

    std::vector<cplx> t(clusters.size());
    double xi = policy.xi_start;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        if (clusters[c].second < 2) continue;
        const double r = clusters[c].first;
        const double curvature = spec.kind == GaudinKind::trigonometric ? 1.0 + r * r : 1.0;
        t[c] = std::sqrt(cplx(-spec.g * curvature / secular_derivative(spec, r)));
        xi = std::max(xi, magnitude * magnitude / std::norm(t[c]));
    }
    if (xi > policy.xi_end) {
        throw ContractError("repeated-seed lift would start beyond the end of the continuation path");
    }
    RapiditySet guess{VectorXcd(tda.size()), Frame::rg_eta};
    Eigen::Index a = 0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        const auto z = hermite_zeros(clusters[c].second);
        for (double zk : z) guess.values[a++] = clusters[c].first + t[c] * std::sqrt(xi) * zk;
    }
    const auto residual = [&spec, xi](const RapiditySet& r) { return deformed_rg_residual(spec, xi, r); };
    NewtonResult nr = newton_solve(residual, guess, policy.newton_tol, 50);
    return {nr.rapidities, xi};
}

// A couple of full steps past tolerance are nearly free once in the quadratic
// regime; each is kept only if it lowers the residual.
static void refine(const ResidualFunction& residual, RapiditySet& r, ResidualReport& rep) {
    for (int extra = 0; extra < 2 && rep.max_abs > 0.0 && rep.jacobian; ++extra) {
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(*rep.jacobian);
        RapiditySet cand{r.values - lu.solve(rep.residuals), r.frame};
        try {
            ResidualReport crep = residual(cand);
            if (!(crep.max_abs < rep.max_abs)) return;
            r = std::move(cand);
            rep = std::move(crep);
        } catch (const SingularEvaluationError&) {
            return;
        }
    }
}

NewtonResult newton_solve(const ResidualFunction& residual, const RapiditySet& r0, double tol, int max_iters) {
    RapiditySet r = r0;
    ResidualReport rep = residual(r);
    if (rep.max_abs <= tol) {
        refine(residual, r, rep);
        return {r, rep.max_abs, 0};
    }
    for (int it = 1; it <= max_iters; ++it) {
        if (!rep.jacobian) throw ContractError("newton_solve needs a residual with Jacobian");
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(*rep.jacobian);
        if (!(lu.rcond() >= 1e-14)) {
            throw SingularJacobianError("Jacobian condition estimate exceeds 1e14 at iteration " + std::to_string(it));
        }
        const VectorXcd step = lu.solve(rep.residuals);
        double damping = 1.0;
        bool improved = false;
        for (int h = 0; h < 30; ++h, damping *= 0.5) {
            RapiditySet cand{r.values - damping * step, r.frame};
            try {
                ResidualReport crep = residual(cand);
                if (crep.max_abs < rep.max_abs) {
                    r = std::move(cand);
                    rep = std::move(crep);
                    improved = true;
                    break;
                }
            } catch (const SingularEvaluationError&) {
            }
        }
        if (!improved) break;
        if (rep.max_abs <= tol) {
            refine(residual, r, rep);
            return {r, rep.max_abs, it};
        }
    }
    throw NoConvergenceError("newton_solve did not reach tolerance (best residual " + std::to_string(rep.max_abs) +
                                 ")",
                             r, rep.max_abs);
}

NewtonResult newton_solve_rg(const ModelSpec& spec, const RapiditySet& r0, double tol, int max_iters) {
    return newton_solve([&spec](const RapiditySet& r) { return rg_residual(spec, r); }, r0, tol, max_iters);
}

NewtonResult newton_solve_dicke(const DickeSpec& spec, const RapiditySet& r0, double tol, int max_iters) {
    return newton_solve([&spec](const RapiditySet& r) { return dicke_rg_residual(spec, r); }, r0, tol, max_iters);
}

std::vector<std::vector<int>> all_seed_multisets(int n_modes, int n) {
    std::vector<std::vector<int>> out;
    if (n_modes < 1 || n < 1) return out;
    std::vector<int> cur(static_cast<std::size_t>(n), 0);
    while (true) {
        out.push_back(cur);
        int k = n - 1;
        while (k >= 0 && cur[k] == n_modes - 1) --k;
        if (k < 0) break;
        ++cur[k];
        for (int j = k + 1; j < n; ++j) cur[j] = cur[k];
    }
    return out;
}

RgBranch solve_rg_branch(const ModelSpec& spec, const std::vector<int>& seed_modes, const BranchOptions& opt) {
    RgBranch branch;
    branch.seed_modes = seed_modes;
    try {
        const RapiditySet tda = solve_tda(spec, SeedSelection::occupation(seed_modes));
        const LiftedStart start = lift_repeated_seeds(spec, tda, opt.policy, opt.lift_magnitude, opt.rng_seed);
        ContinuationPolicy policy = opt.policy;
        if (start.xi > policy.xi_start) {
            // the lifted cluster opens like sqrt(xi), so steps must start at the scale of xi itself
            policy.initial_step = std::min(policy.initial_step, start.xi);
            policy.min_step = std::min(policy.min_step, 1e-3 * start.xi);
        }
        policy.xi_start = start.xi;
        branch.trace = continue_in_xi(spec, policy, start.rapidities);
    } catch (const Error& e) {
        branch.trace.status = TraceStatus::stalled;
        branch.trace.diagnostic = e.what();
    }
    return branch;
}

std::vector<RgBranch> solve_rg_branches(const ModelSpec& spec, const std::vector<std::vector<int>>& seeds,
                                        const BranchOptions& opt) {
    std::vector<RgBranch> out;
    out.reserve(seeds.size());
    if (opt.parallel) {
        std::vector<std::future<RgBranch>> jobs;
        for (const auto& s : seeds) {
            jobs.push_back(std::async(std::launch::async, [&spec, s, &opt] { return solve_rg_branch(spec, s, opt); }));
        }
        for (auto& j : jobs) out.push_back(j.get());
    } else {
        for (const auto& s : seeds) out.push_back(solve_rg_branch(spec, s, opt));
    }
    return out;
}

double dicke_energy(const DickeSpec& spec, const RapiditySet& x) {
    double e = x.values.sum().real();
    for (std::size_t k = 0; k < spec.size(); ++k) e -= spec.epsilons[k] * spec.spins[k].value();
    return e;
}

bool same_rapidities(const RapiditySet& a, const RapiditySet& b, double tol) {
    if (a.size() != b.size()) return false;
    std::vector<bool> used(static_cast<std::size_t>(b.size()), false);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        bool found = false;
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            if (std::abs(a.values[i] - b.values[j]) <= tol * (1.0 + std::abs(a.values[i]))) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

double conjugation_defect(const RapiditySet& r) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        const cplx c = std::conj(r.values[i]);
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < r.size(); ++j) best = std::min(best, std::abs(r.values[j] - c));
        worst = std::max(worst, best);
    }
    return worst;
}

RapiditySet sorted_by_real(RapiditySet r) {
    std::vector<cplx> v(r.values.data(), r.values.data() + r.values.size());
    std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    for (std::size_t i = 0; i < v.size(); ++i) r.values[static_cast<Eigen::Index>(i)] = v[i];
    return r;
}

std::vector<DickeBranch> dedupe_dicke(std::vector<DickeBranch> in, int* duplicates) {
    std::vector<DickeBranch> out;
    int dup = 0;
    for (auto& b : in) {
        const bool seen = std::any_of(out.begin(), out.end(), [&](const DickeBranch& o) {
            return same_rapidities(o.x, b.x, 1e-6);
        });
        if (seen) {
            ++dup;
        } else {
            out.push_back(std::move(b));
        }
    }
    if (duplicates) *duplicates = dup;
    return out;
}

DickeSolveResult solve_dicke_branches(const DickeSpec& spec, const DeformedCopy& copy, const BranchOptions& opt,
                                      const std::optional<std::vector<std::vector<int>>>& seeds) {
    spec.validate();
    const ModelSpec aux = auxiliary_rg_model(spec, copy);
    const auto modes = tda_modes(aux);
    const auto seed_list = seeds ? *seeds : all_seed_multisets(static_cast<int>(modes.size()), spec.n_excitations);

    BranchOptions aux_opt = opt;
    aux_opt.policy.xi_start = 0.0;
    aux_opt.policy.xi_end = 1.0;
    const auto aux_branches = solve_rg_branches(aux, seed_list, aux_opt);

    DickeSolveResult result;
    std::vector<const RgBranch*> distinct;
    for (const auto& b : aux_branches) {
        if (!b.converged()) {
            result.failed.push_back(b);
            continue;
        }
        const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](const RgBranch* o) {
            return same_rapidities(o->trace.final_rapidities(), b.trace.final_rapidities(), 1e-6);
        });
        if (seen) {
            ++result.duplicates;
        } else {
            distinct.push_back(&b);
        }
    }

    ContinuationPolicy dpol = opt.policy;
    dpol.xi_start = 1.0;
    dpol.xi_end = 0.0;
    const auto contract = [&](const RgBranch* b) {
        DickeBranch d;
        d.seed_modes = b->seed_modes;
        d.aux_trace = b->trace;
        try {
            const RapiditySet x1 = to_dicke_frame(b->trace.final_rapidities(), spec, copy, 1.0);
            d.dicke_trace = continue_in_xi(spec, copy, dpol, x1);
        } catch (const Error& e) {
            d.dicke_trace.status = TraceStatus::stalled;
            d.dicke_trace.diagnostic = e.what();
        }
        if (d.dicke_trace.status == TraceStatus::converged) {
            d.x = sorted_by_real(d.dicke_trace.final_rapidities());
            d.energy = dicke_energy(spec, d.x);
        }
        return d;
    };
    std::vector<DickeBranch> found;
    if (opt.parallel) {
        std::vector<std::future<DickeBranch>> jobs;
        for (const RgBranch* b : distinct) jobs.push_back(std::async(std::launch::async, contract, b));
        for (auto& j : jobs) found.push_back(j.get());
    } else {
        for (const RgBranch* b : distinct) found.push_back(contract(b));
    }
    std::vector<DickeBranch> ok;
    for (auto& d : found) {
        if (d.dicke_trace.status == TraceStatus::converged) {
            ok.push_back(std::move(d));
        } else {
            RgBranch f;
            f.seed_modes = d.seed_modes;
            f.trace = d.dicke_trace;
            result.failed.push_back(std::move(f));
        }
    }
    int dup = 0;
    result.branches = dedupe_dicke(std::move(ok), &dup);
    result.duplicates += dup;
    std::sort(result.branches.begin(), result.branches.end(),
              [](const DickeBranch& a, const DickeBranch& b) { return a.energy < b.energy; });
    return result;
}

}  // namespace gaudin
