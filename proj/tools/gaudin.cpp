// Command-line front end for the Richardson-Gaudin and Dicke solvers.
#include "gaudin/run.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

namespace {

spdlog::level::level_enum log_level_from_env() {
    const char* v = std::getenv("GAUDIN_LOG");
    if (!v) return spdlog::level::warn;
    return spdlog::level::from_str(v);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Richardson-Gaudin / Dicke solver"};
    gaudin::RunConfig cfg;

    std::string mode;
    std::string format = "structured";
    std::vector<std::string> sets;
    std::vector<int> occupation;
    int xi_steps = 0;
    int cutoff = -1;
    int branch = -1;

    app.add_option("--mode", mode, "solve-rg | solve-dicke | sweep-xi | verify | ed-spectrum")->required();
    app.add_option("--spec", cfg.spec_path, "model spec file (results file for verify)")->required();
    app.add_option("--out", cfg.out_path, "output file (default: stdout)");
    app.add_option("--format", format, "structured | tabular")
        ->check(CLI::IsMember({"structured", "tabular"}));
    app.add_option("--xi-steps", xi_steps, "minimum number of continuation steps in xi");
    app.add_option("--newton-tol", cfg.newton_tol, "Newton tolerance");
    app.add_option("--boson-cutoff", cutoff, "boson cutoff for the oracle (default N + 12)");
    app.add_option("--branch", branch, "only report this branch (0-based)");
    app.add_option("--occupation", occupation, "TDA mode indices of the seed, e.g. --occupation 0 1");
    app.add_option("--seed", cfg.seed, "seed for the perturbation lifts");
    app.add_flag("--parallel-branches", cfg.parallel_branches, "continue branches concurrently");
    app.add_option("--set", sets, "override key=value (g, G, hbar_omega, N, cutoff, newton_tol, verify_tol, seed)");

    CLI11_PARSE(app, argc, argv);

    auto logger = spdlog::stderr_color_mt("gaudin");
    logger->set_level(log_level_from_env());
    cfg.log = [logger](int level, const std::string& msg) {
        switch (level) {
            case 0: logger->debug(msg); break;
            case 1: logger->info(msg); break;
            default: logger->warn(msg); break;
        }
    };

    try {
        cfg.mode = gaudin::parse_mode(mode);
        for (const std::string& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
            cfg.overrides.emplace_back(s.substr(0, eq), std::stod(s.substr(eq + 1)));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return gaudin::exit_validation;
    }
    cfg.format = format == "tabular" ? gaudin::OutputFormat::tabular : gaudin::OutputFormat::structured;
    if (xi_steps > 0) cfg.xi_steps = xi_steps;
    if (cutoff >= 0) cfg.boson_cutoff = cutoff;
    if (branch >= 0) cfg.branch = branch;
    if (!occupation.empty()) cfg.occupation = occupation;

    const gaudin::RunResult res = gaudin::run(cfg);
    if (cfg.out_path.empty()) std::cout << res.output;
    if (res.exit_code != gaudin::exit_ok) std::cerr << res.summary;
    return res.exit_code;
}
