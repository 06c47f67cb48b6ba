#include "gaudin/run.hpp"

#include "gaudin/dicke.hpp"
#include "gaudin/ed_oracle.hpp"
#include "gaudin/errors.hpp"
#include "gaudin/keyvalue.hpp"
#include "gaudin/solver.hpp"
#include "gaudin/spec_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#ifndef GAUDIN_VERSION
#define GAUDIN_VERSION "dev"
#endif

namespace gaudin {

const char* version() noexcept { return GAUDIN_VERSION; }

Mode parse_mode(const std::string& text) {
    if (text == "solve-rg") return Mode::solve_rg;
    if (text == "solve-dicke") return Mode::solve_dicke;
    if (text == "sweep-xi") return Mode::sweep_xi;
    if (text == "verify") return Mode::verify;
    if (text == "ed-spectrum") return Mode::ed_spectrum;
    throw ValidationError("unknown mode '" + text + "'");
}

std::string to_string(Mode m) {
    switch (m) {
        case Mode::solve_rg: return "solve-rg";
        case Mode::solve_dicke: return "solve-dicke";
        case Mode::sweep_xi: return "sweep-xi";
        case Mode::verify: return "verify";
        case Mode::ed_spectrum: return "ed-spectrum";
    }
    return "?";
}

namespace {

// Largest basis the oracle will realize for an RG branch.
constexpr Eigen::Index kMaxOracleDim = 20000;

struct Context {
    RunConfig cfg;
    SpecFile spec{DickeSpec{}, std::nullopt};
    ContinuationPolicy policy;
    int cutoff{0};
    double verify_tol{0.0};
    double oracle_tol{1e-8};
    std::uint64_t seed{0};
    std::ostringstream summary;

    void log(int level, const std::string& msg) {
        if (cfg.log) cfg.log(level, msg);
    }
    void note(const std::string& msg) {
        summary << msg << "\n";
        log(1, msg);
    }
};

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

std::vector<double> re_part(const RapiditySet& r) {
    std::vector<double> v;
    for (Eigen::Index a = 0; a < r.size(); ++a) v.push_back(r.values[a].real());
    return v;
}

std::vector<double> im_part(const RapiditySet& r) {
    std::vector<double> v;
    for (Eigen::Index a = 0; a < r.size(); ++a) v.push_back(r.values[a].imag());
    return v;
}

RapiditySet from_parts(const std::vector<double>& re, const std::vector<double>& im, Frame frame) {
    if (re.size() != im.size()) throw ValidationError("re and im lists differ in length");
    RapiditySet r{Eigen::VectorXcd(static_cast<Eigen::Index>(re.size())), frame};
    for (std::size_t a = 0; a < re.size(); ++a) r.values[static_cast<Eigen::Index>(a)] = cplx(re[a], im[a]);
    return r;
}

Eigen::Index worst_index(const Eigen::VectorXcd& v) {
    Eigen::Index k = 0;
    for (Eigen::Index a = 1; a < v.size(); ++a) {
        if (std::abs(v[a]) > std::abs(v[k])) k = a;
    }
    return k;
}

struct BranchRecord {
    std::vector<int> seed_modes;
    std::string status;
    RapiditySet r;
    double residual{0.0};
    std::optional<double> energy;
    std::vector<double> rayleigh;
    std::optional<double> oracle_residual;
    int detours{0};
};

// Oracle data realized once per run and shared by all branches.
struct DickeOracle {
    BasisPtr basis;
    std::vector<MatrixOperator> ops;  // H, then hw R_1..hw R_m

    DickeOracle(const DickeSpec& d, int cutoff) {
        if (cutoff < d.n_excitations) {
            throw CutoffError("boson cutoff " + std::to_string(cutoff) + " is below N = " +
                              std::to_string(d.n_excitations));
        }
        basis = dicke_basis(d, cutoff, d.n_excitations);
        for (int i = 0; i <= static_cast<int>(d.size()); ++i) ops.push_back(realize(build_dicke_charge(d, i), basis));
    }

    void check(const DickeSpec& d, BranchRecord& rec) const {
        const StateVector v = bethe_coefficients(BetheProductState{d, rec.r, Normalization::unit_norm}, basis);
        double worst = 0.0;
        rec.rayleigh.clear();
        for (std::size_t i = 0; i < ops.size(); ++i) {
            const EigenCheck c = eigencheck(ops[i], v);
            if (i == 0) rec.rayleigh.push_back(c.rayleigh);
            worst = std::max(worst, c.rel_residual);
        }
        rec.oracle_residual = worst;
    }
};

struct RgOracle {
    BasisPtr basis;
    std::vector<MatrixOperator> ops;
    bool available{false};

    explicit RgOracle(const ModelSpec& m) {
        if (m.far_level) return;
        basis = rg_spin_basis(m, true);
        if (basis->dim() > kMaxOracleDim || basis->dim() == 0) return;
        for (const auto& e : rg_charge_expressions(m, m.g)) ops.push_back(realize(e, basis));
        available = true;
    }

    void check(const ModelSpec& m, BranchRecord& rec) const {
        if (!available) return;
        const StateVector v = rg_bethe_vector(m, rec.r, basis);
        double worst = 0.0;
        rec.rayleigh.clear();
        for (const auto& op : ops) {
            const EigenCheck c = eigencheck(op, v);
            rec.rayleigh.push_back(c.rayleigh);
            worst = std::max(worst, c.rel_residual);
        }
        rec.oracle_residual = worst;
    }
};

bool record_passes(const Context& ctx, const BranchRecord& rec) {
    if (rec.status != "converged") return false;
    if (!(rec.residual <= ctx.verify_tol)) return false;
    if (rec.oracle_residual && !(*rec.oracle_residual <= ctx.oracle_tol)) return false;
    return true;
}

void write_header(Context& ctx, KvWriter& w) {
    w.section("run");
    w.put("mode", to_string(ctx.cfg.mode));
    w.put("version", std::string(version()));
    w.put("newton_tol", ctx.policy.newton_tol);
    w.put("max_step", ctx.policy.max_step);
    w.put("verify_tol", ctx.verify_tol);
    w.put("oracle_tol", ctx.oracle_tol);
    w.put("boson_cutoff", ctx.cutoff);
    w.put("seed", std::to_string(ctx.seed));
    w.section("spec");
    emit_spec(ctx.spec, w);
}

void write_branch(KvWriter& w, int id, const BranchRecord& rec) {
    w.section("branch." + std::to_string(id));
    w.put("id", id);
    w.put("seed_modes", rec.seed_modes);
    w.put("status", rec.status);
    w.put("frame", std::string(rec.r.frame == Frame::dicke_x ? "dicke_x" : "rg_eta"));
    w.put("re", re_part(rec.r));
    w.put("im", im_part(rec.r));
    w.put("residual", rec.residual);
    if (rec.energy) w.put("energy", *rec.energy);
    if (!rec.rayleigh.empty()) w.put("rayleigh", rec.rayleigh);
    if (rec.oracle_residual) w.put("oracle_residual", *rec.oracle_residual);
    w.put("detours", rec.detours);
}

std::string tabular_branches(const std::vector<BranchRecord>& recs) {
    std::ostringstream out;
    std::size_t n = recs.empty() ? 0 : static_cast<std::size_t>(recs.front().r.size());
    out << "# branch status residual energy rayleigh oracle_residual";
    for (std::size_t a = 0; a < n; ++a) out << " re_" << a << " im_" << a;
    out << "\n";
    for (std::size_t k = 0; k < recs.size(); ++k) {
        const auto& r = recs[k];
        out << k << " " << r.status << " " << format_double(r.residual) << " "
            << (r.energy ? format_double(*r.energy) : "nan") << " "
            << (r.rayleigh.empty() ? "nan" : format_double(r.rayleigh.front())) << " "
            << (r.oracle_residual ? format_double(*r.oracle_residual) : "nan");
        for (Eigen::Index a = 0; a < r.r.size(); ++a) {
            out << " " << format_double(r.r.values[a].real()) << " " << format_double(r.r.values[a].imag());
        }
        out << "\n";
    }
    return out.str();
}

BranchOptions branch_options(const Context& ctx) {
    BranchOptions opt;
    opt.policy = ctx.policy;
    opt.rng_seed = ctx.seed;
    opt.parallel = ctx.cfg.parallel_branches;
    return opt;
}

int finish_solve(Context& ctx, const std::vector<BranchRecord>& recs, int failed, int duplicates, bool required_missing,
                 std::string& output) {
    int code = exit_ok;
    if (recs.empty() || required_missing) code = exit_convergence;
    for (std::size_t k = 0; k < recs.size(); ++k) {
        if (!record_passes(ctx, recs[k])) {
            code = std::max(code, static_cast<int>(exit_verification));
            ctx.note("branch " + std::to_string(k) + " fails its tolerances (residual " +
                     format_double(recs[k].residual) + ", oracle residual " +
                     (recs[k].oracle_residual ? format_double(*recs[k].oracle_residual) : std::string("n/a")) + ")");
        }
    }
    if (ctx.cfg.format == OutputFormat::tabular) {
        output = tabular_branches(recs);
        return code;
    }
    KvWriter w;
    write_header(ctx, w);
    w.section("summary");
    w.put("branches", static_cast<int>(recs.size()));
    w.put("failed_seeds", failed);
    w.put("duplicates", duplicates);
    w.put("status", std::string(code == exit_ok ? "ok" : "failed"));
    for (std::size_t k = 0; k < recs.size(); ++k) write_branch(w, static_cast<int>(k), recs[k]);
    output = w.str();
    return code;
}

int solve_dicke_mode(Context& ctx, std::string& output) {
    const DickeSpec& d = ctx.spec.dicke();
    const DeformedCopy copy = ctx.spec.deformed_copy();
    std::optional<std::vector<std::vector<int>>> seeds;
    if (ctx.cfg.occupation) seeds = std::vector<std::vector<int>>{*ctx.cfg.occupation};
    const DickeSolveResult res = solve_dicke_branches(d, copy, branch_options(ctx), seeds);
    ctx.note(std::to_string(res.branches.size()) + " distinct branches, " + std::to_string(res.failed.size()) +
             " failed seeds, " + std::to_string(res.duplicates) + " duplicates");
    for (const auto& f : res.failed) {
        ctx.log(2, "seed failed (" + std::string(to_string(f.trace.status)) + "): " + one_line(f.trace.diagnostic));
    }
    const DickeOracle oracle(d, ctx.cutoff);
    std::vector<BranchRecord> recs;
    bool missing = false;
    for (std::size_t k = 0; k < res.branches.size(); ++k) {
        if (ctx.cfg.branch && static_cast<int>(k) != *ctx.cfg.branch) continue;
        const DickeBranch& b = res.branches[k];
        BranchRecord rec;
        rec.seed_modes = b.seed_modes;
        rec.status = to_string(b.dicke_trace.status);
        rec.r = b.x;
        rec.residual = dicke_rg_residual(d, b.x, false).max_abs;
        rec.energy = b.energy;
        rec.detours = b.aux_trace.detours + b.dicke_trace.detours;
        oracle.check(d, rec);
        recs.push_back(std::move(rec));
    }
    if (ctx.cfg.branch && recs.empty()) {
        ctx.note("requested branch " + std::to_string(*ctx.cfg.branch) + " does not exist");
        missing = true;
    }
    if (ctx.cfg.occupation && res.branches.empty()) missing = true;
    return finish_solve(ctx, recs, static_cast<int>(res.failed.size()), res.duplicates, missing, output);
}

int solve_rg_mode(Context& ctx, std::string& output) {
    const ModelSpec& m = ctx.spec.rg();
    std::vector<std::vector<int>> seeds;
    if (ctx.cfg.occupation) {
        seeds.push_back(*ctx.cfg.occupation);
    } else {
        seeds = all_seed_multisets(static_cast<int>(tda_modes(m).size()), m.n_excitations);
    }
    const std::vector<RgBranch> raw = solve_rg_branches(m, seeds, branch_options(ctx));
    std::vector<const RgBranch*> distinct;
    int failed = 0;
    int duplicates = 0;
    for (const auto& b : raw) {
        if (!b.converged()) {
            ++failed;
            ctx.log(2, "seed failed (" + std::string(to_string(b.trace.status)) + "): " + one_line(b.trace.diagnostic));
            continue;
        }
        const bool dup = std::any_of(distinct.begin(), distinct.end(), [&](const RgBranch* o) {
            return same_rapidities(o->trace.final_rapidities(), b.trace.final_rapidities(), 1e-7);
        });
        if (dup) {
            ++duplicates;
        } else {
            distinct.push_back(&b);
        }
    }
    ctx.note(std::to_string(distinct.size()) + " distinct branches, " + std::to_string(failed) + " failed seeds, " +
             std::to_string(duplicates) + " duplicates");
    const RgOracle oracle(m);
    std::vector<BranchRecord> recs;
    for (std::size_t k = 0; k < distinct.size(); ++k) {
        if (ctx.cfg.branch && static_cast<int>(k) != *ctx.cfg.branch) continue;
        const RgBranch& b = *distinct[k];
        BranchRecord rec;
        rec.seed_modes = b.seed_modes;
        rec.status = to_string(b.trace.status);
        rec.r = sorted_by_real(b.trace.final_rapidities());
        rec.residual = rg_residual(m, rec.r, false).max_abs;
        rec.detours = b.trace.detours;
        oracle.check(m, rec);
        recs.push_back(std::move(rec));
    }
    bool missing = ctx.cfg.branch && recs.empty();
    if (missing) ctx.note("requested branch " + std::to_string(*ctx.cfg.branch) + " does not exist");
    return finish_solve(ctx, recs, failed, duplicates, missing, output);
}

void write_trace(KvWriter& w, std::ostringstream& tab, const std::string& leg, const SolutionTrace& t) {
    const std::size_t n = t.path.empty() ? 0 : static_cast<std::size_t>(t.path.front().rapidities.size());
    std::string cols = "xi";
    for (std::size_t a = 0; a < n; ++a) cols += " re_" + std::to_string(a) + " im_" + std::to_string(a);
    cols += " residual";
    w.section("trace." + leg);
    w.put("status", std::string(to_string(t.status)));
    w.put("points", static_cast<int>(t.path.size()));
    w.put("detours", t.detours);
    w.put("columns", cols);
    if (!t.diagnostic.empty()) w.comment(one_line(t.diagnostic));
    tab << "# leg " << cols << "\n";
    for (std::size_t p = 0; p < t.path.size(); ++p) {
        const TracePoint& pt = t.path[p];
        std::vector<double> row{pt.xi};
        for (Eigen::Index a = 0; a < pt.rapidities.size(); ++a) {
            row.push_back(pt.rapidities.values[a].real());
            row.push_back(pt.rapidities.values[a].imag());
        }
        row.push_back(pt.max_abs);
        w.put("row." + std::to_string(p), row);
        tab << leg;
        for (double v : row) tab << " " << format_double(v);
        tab << "\n";
    }
}

int sweep_mode(Context& ctx, std::string& output) {
    KvWriter w;
    write_header(ctx, w);
    std::ostringstream tab;
    int code = exit_ok;
    std::optional<BranchRecord> endpoint;

    if (ctx.spec.is_dicke()) {
        const DickeSpec& d = ctx.spec.dicke();
        const DeformedCopy copy = ctx.spec.deformed_copy();
        const ModelSpec aux = auxiliary_rg_model(d, copy);
        std::vector<int> seed;
        if (ctx.cfg.occupation) {
            seed = *ctx.cfg.occupation;
        } else if (ctx.cfg.branch) {
            const auto all = all_seed_multisets(static_cast<int>(tda_modes(aux).size()), aux.n_excitations);
            if (*ctx.cfg.branch < 0 || *ctx.cfg.branch >= static_cast<int>(all.size())) {
                throw SelectionError("branch index out of range (" + std::to_string(all.size()) + " seed multisets)");
            }
            seed = all[static_cast<std::size_t>(*ctx.cfg.branch)];
        } else {
            seed = select_modes(aux, tda_modes(aux), SeedSelection::lowest());
        }
        const DickeSolveResult res = solve_dicke_branches(d, copy, branch_options(ctx),
                                                          std::vector<std::vector<int>>{seed});
        if (!res.branches.empty()) {
            const DickeBranch& b = res.branches.front();
            write_trace(w, tab, "aux", b.aux_trace);
            write_trace(w, tab, "dicke", b.dicke_trace);
            BranchRecord rec;
            rec.seed_modes = b.seed_modes;
            rec.status = to_string(b.dicke_trace.status);
            rec.r = b.x;
            rec.residual = dicke_rg_residual(d, b.x, false).max_abs;
            rec.energy = b.energy;
            rec.detours = b.aux_trace.detours + b.dicke_trace.detours;
            DickeOracle(d, ctx.cutoff).check(d, rec);
            endpoint = rec;
        } else {
            const SolutionTrace& t = res.failed.front().trace;
            write_trace(w, tab, "partial", t);
            ctx.note("continuation failed: " + one_line(t.diagnostic));
            code = exit_convergence;
        }
    } else {
        const ModelSpec& m = ctx.spec.rg();
        std::vector<int> seed;
        if (ctx.cfg.occupation) {
            seed = *ctx.cfg.occupation;
        } else if (ctx.cfg.branch) {
            const auto all = all_seed_multisets(static_cast<int>(tda_modes(m).size()), m.n_excitations);
            if (*ctx.cfg.branch < 0 || *ctx.cfg.branch >= static_cast<int>(all.size())) {
                throw SelectionError("branch index out of range (" + std::to_string(all.size()) + " seed multisets)");
            }
            seed = all[static_cast<std::size_t>(*ctx.cfg.branch)];
        } else {
            seed = select_modes(m, tda_modes(m), SeedSelection::lowest());
        }
        const RgBranch b = solve_rg_branch(m, seed, branch_options(ctx));
        write_trace(w, tab, "rg", b.trace);
        if (b.converged()) {
            BranchRecord rec;
            rec.seed_modes = b.seed_modes;
            rec.status = to_string(b.trace.status);
            rec.r = sorted_by_real(b.trace.final_rapidities());
            rec.residual = rg_residual(m, rec.r, false).max_abs;
            rec.detours = b.trace.detours;
            RgOracle(m).check(m, rec);
            endpoint = rec;
        } else {
            ctx.note("continuation failed: " + one_line(b.trace.diagnostic));
            code = exit_convergence;
        }
    }

    if (endpoint) {
        if (!record_passes(ctx, *endpoint)) {
            code = exit_verification;
            ctx.note("sweep endpoint fails its tolerances (residual " + format_double(endpoint->residual) + ")");
        }
        w.section("summary");
        w.put("branches", 1);
        w.put("failed_seeds", 0);
        w.put("duplicates", 0);
        w.put("status", std::string(code == exit_ok ? "ok" : "failed"));
        write_branch(w, 0, *endpoint);
    } else {
        w.section("summary");
        w.put("branches", 0);
        w.put("status", std::string("failed"));
    }
    output = ctx.cfg.format == OutputFormat::tabular ? tab.str() : w.str();
    return code;
}

int ed_mode(Context& ctx, std::string& output) {
    KvWriter w;
    write_header(ctx, w);
    std::ostringstream tab;
    tab << "# sector index eigenvalue\n";
    auto emit = [&](const std::string& label, int sector, const std::string& key, const Eigen::VectorXd& ev) {
        std::vector<double> v(ev.data(), ev.data() + ev.size());
        w.put(key, v);
        for (std::size_t j = 0; j < v.size(); ++j) {
            tab << label << sector << " " << j << " " << format_double(v[j]) << "\n";
        }
    };
    if (ctx.spec.is_dicke()) {
        const DickeSpec& d = ctx.spec.dicke();
        double vacuum = 0.0;
        for (std::size_t k = 0; k < d.size(); ++k) vacuum -= d.epsilons[k] * d.spins[k].value();
        const OperatorExpression h = build_dicke_hamiltonian(d);
        for (int M = 0; M <= d.n_excitations; ++M) {
            const BasisPtr basis = dicke_basis(d, std::max(ctx.cutoff, M), M);
            w.section("sector." + std::to_string(M));
            w.put("excitations", M);
            w.put("dim", static_cast<int>(basis->dim()));
            w.put("vacuum_energy", vacuum);
            emit("M=", M, "eigenvalues", spectrum(realize(h, basis)));
        }
    } else {
        const ModelSpec& m = ctx.spec.rg();
        if (m.far_level) throw ValidationError("ed-spectrum does not support far_spin");
        std::vector<LocalSpace> sites;
        for (const Spin& s : m.levels.spins()) sites.push_back(LocalSpace::spin(s));
        const auto exprs = rg_charge_expressions(m, m.g);
        for (int M = 0; M <= m.n_excitations; ++M) {
            const BasisPtr basis = HilbertBasis::make(sites, SectorFilter::exactly, M);
            w.section("sector." + std::to_string(M));
            w.put("excitations", M);
            w.put("dim", static_cast<int>(basis->dim()));
            if (basis->dim() == 0) continue;
            for (std::size_t i = 0; i < exprs.size(); ++i) {
                emit("M=", M, "charge." + std::to_string(i + 1), spectrum(realize(exprs[i], basis)));
            }
        }
    }
    output = ctx.cfg.format == OutputFormat::tabular ? tab.str() : w.str();
    return exit_ok;
}

int verify_mode(Context& ctx, std::string& output) {
    const KvDocument doc = KvDocument::read_file(ctx.cfg.spec_path);
    const KvSection& run = doc.require_section("run");
    const SpecFile spec = parse_spec_section(doc.require_section("spec"));
    const KvSection& summary = doc.require_section("summary");
    std::vector<std::string> failures;

    if (run.get_string("version") != version()) {
        failures.push_back("results were written by version " + run.get_string("version"));
    }
    const std::string mode = run.get_string("mode");
    if (mode != "solve-rg" && mode != "solve-dicke" && mode != "sweep-xi") {
        throw ValidationError("verify needs the results of a solve or sweep run, got mode '" + mode + "'");
    }
    if (summary.get_string("status") != "ok") failures.push_back("the run that wrote this file did not pass");
    const double verify_tol = run.get_double("verify_tol");
    const double oracle_tol = run.get_double("oracle_tol");
    const int cutoff = static_cast<int>(run.get_int("boson_cutoff"));
    const long long expected = summary.get_int("branches");

    std::optional<DickeOracle> dicke_oracle;
    std::optional<RgOracle> rg_oracle;
    long long seen = 0;
    for (const KvSection& s : doc.sections()) {
        if (s.name.rfind("branch.", 0) != 0) continue;
        ++seen;
        const std::string label = s.name;
        if (s.get_string("status") != "converged") failures.push_back(label + ": status " + s.get_string("status"));
        const bool dicke = spec.is_dicke();
        const Frame frame = dicke ? Frame::dicke_x : Frame::rg_eta;
        const RapiditySet r = from_parts(s.get_doubles("re"), s.get_doubles("im"), frame);
        const ResidualReport rep = dicke ? dicke_rg_residual(spec.dicke(), r, false) : rg_residual(spec.rg(), r, false);
        if (!(rep.max_abs <= verify_tol)) {
            const Eigen::Index a = worst_index(rep.residuals);
            failures.push_back(label + ": equation " + std::to_string(a) + " residual " +
                               format_double(std::abs(rep.residuals[a])) + " exceeds " + format_double(verify_tol));
        }
        BranchRecord rec;
        rec.r = r;
        if (dicke) {
            const DickeSpec& d = spec.dicke();
            if (!dicke_oracle) dicke_oracle.emplace(d, cutoff);
            dicke_oracle->check(d, rec);
            const double e = dicke_energy(d, r);
            if (s.has("energy") && !(std::abs(s.get_double("energy") - e) <= 1e-12 * (1.0 + std::abs(e)))) {
                failures.push_back(label + ": stored energy does not match the rapidities");
            }
            if (!(std::abs(rec.rayleigh.front() - e) <= oracle_tol * (1.0 + std::abs(e)))) {
                failures.push_back(label + ": Rayleigh energy " + format_double(rec.rayleigh.front()) +
                                   " differs from " + format_double(e));
            }
        } else {
            if (!rg_oracle) rg_oracle.emplace(spec.rg());
            rg_oracle->check(spec.rg(), rec);
        }
        if (rec.oracle_residual && !(*rec.oracle_residual <= oracle_tol)) {
            failures.push_back(label + ": eigenvector residual " + format_double(*rec.oracle_residual) + " exceeds " +
                               format_double(oracle_tol));
        }
    }
    if (seen != expected) {
        failures.push_back("expected " + std::to_string(expected) + " branch records, found " + std::to_string(seen));
    }
    if (seen == 0) failures.push_back("no branch records to verify");

    for (const auto& f : failures) ctx.note(f);
    KvWriter w;
    w.section("verify");
    w.put("file", ctx.cfg.spec_path);
    w.put("version", std::string(version()));
    w.put("branches", static_cast<int>(seen));
    w.put("failures", static_cast<int>(failures.size()));
    w.put("status", std::string(failures.empty() ? "ok" : "failed"));
    for (const auto& f : failures) w.comment(f);
    output = w.str();
    return failures.empty() ? exit_ok : exit_verification;
}

void apply_overrides(Context& ctx) {
    for (const auto& [key, value] : ctx.cfg.overrides) {
        if (key == "cutoff" || key == "boson_cutoff") {
            ctx.cfg.boson_cutoff = static_cast<int>(std::llround(value));
        } else if (key == "newton_tol") {
            ctx.cfg.newton_tol = value;
        } else if (key == "verify_tol") {
            ctx.verify_tol = value;
        } else if (key == "oracle_tol") {
            ctx.oracle_tol = value;
        } else if (key == "seed") {
            if (value < 0) throw ValidationError("seed must be non-negative");
            ctx.cfg.seed = static_cast<std::uint64_t>(std::llround(value));
        } else if (key == "xi_steps") {
            ctx.cfg.xi_steps = static_cast<int>(std::llround(value));
        } else if (ctx.cfg.mode != Mode::verify) {
            apply_override(ctx.spec, key, value);
        } else {
            throw ValidationError("override '" + key + "' does not apply to verify");
        }
    }
}

void configure(Context& ctx) {
    const RunConfig& c = ctx.cfg;
    if (!(c.newton_tol > 0.0)) throw ValidationError("newton tolerance must be positive");
    ctx.policy.newton_tol = c.newton_tol;
    if (c.xi_steps) {
        if (*c.xi_steps < 1) throw ValidationError("xi-steps must be at least 1");
        ctx.policy.max_step = 1.0 / *c.xi_steps;
        ctx.policy.initial_step = std::min(ctx.policy.initial_step, ctx.policy.max_step);
    }
    ctx.policy.validate();
    if (ctx.verify_tol == 0.0) ctx.verify_tol = 10.0 * c.newton_tol;
    ctx.seed = c.seed;
    int n = ctx.spec.is_dicke() ? ctx.spec.dicke().n_excitations : ctx.spec.rg().n_excitations;
    ctx.cutoff = c.boson_cutoff ? *c.boson_cutoff : n + 12;
    if (ctx.cutoff < 0) throw ValidationError("boson cutoff must be non-negative");
    if (c.branch && *c.branch < 0) throw ValidationError("branch index must be non-negative");
}

void write_output(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot write '" + path + "'");
    f << text;
    if (!f) throw ValidationError("error writing '" + path + "'");
}

}  // namespace

RunResult run(const RunConfig& config) {
    Context ctx;
    ctx.cfg = config;
    RunResult result;
    try {
        if (ctx.cfg.spec_path.empty()) throw ValidationError("a spec (or results) file is required");
        if (ctx.cfg.mode == Mode::verify) {
            apply_overrides(ctx);
            result.exit_code = verify_mode(ctx, result.output);
        } else {
            ctx.spec = parse_spec(ctx.cfg.spec_path);
            apply_overrides(ctx);
            configure(ctx);
            if (ctx.cfg.mode == Mode::solve_dicke && !ctx.spec.is_dicke()) {
                throw ValidationError("solve-dicke needs a dicke spec");
            }
            if (ctx.cfg.mode == Mode::solve_rg && ctx.spec.is_dicke()) {
                throw ValidationError("solve-rg needs an rg spec");
            }
            ctx.log(0, "spec:\n" + emit_spec(ctx.spec));
            switch (ctx.cfg.mode) {
                case Mode::solve_rg: result.exit_code = solve_rg_mode(ctx, result.output); break;
                case Mode::solve_dicke: result.exit_code = solve_dicke_mode(ctx, result.output); break;
                case Mode::sweep_xi: result.exit_code = sweep_mode(ctx, result.output); break;
                case Mode::ed_spectrum: result.exit_code = ed_mode(ctx, result.output); break;
                case Mode::verify: break;
            }
        }
    } catch (const NoConvergenceError& e) {
        ctx.note(std::string("no convergence: ") + e.what() + " (best residual " + format_double(e.best_residual()) +
                 ")");
        result.exit_code = exit_convergence;
    } catch (const SingularJacobianError& e) {
        ctx.note(std::string("singular Jacobian: ") + e.what());
        result.exit_code = exit_convergence;
    } catch (const SingularEvaluationError& e) {
        ctx.note(std::string("singular evaluation: ") + e.what());
        result.exit_code = exit_convergence;
    } catch (const std::exception& e) {
        ctx.note(std::string("error: ") + e.what());
        result.exit_code = exit_validation;
    }
    if (!ctx.cfg.out_path.empty() && !result.output.empty()) {
        try {
            write_output(ctx.cfg.out_path, result.output);
        } catch (const std::exception& e) {
            ctx.note(e.what());
            result.exit_code = exit_validation;
        }
    }
    result.summary = ctx.summary.str();
    return result;
}

}  // namespace gaudin
