// run.hpp — mode dispatch behind the command-line tool.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gaudin {

enum class Mode { solve_rg, solve_dicke, sweep_xi, verify, ed_spectrum };
enum class OutputFormat { structured, tabular };

Mode parse_mode(const std::string& text);
std::string to_string(Mode m);

enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_convergence = 2, exit_verification = 3 };

struct RunConfig {
    Mode mode{Mode::solve_rg};
    std::string spec_path;  // results file in verify mode
    std::string out_path;   // empty: result text only returned
    OutputFormat format{OutputFormat::structured};
    std::vector<std::pair<std::string, double>> overrides;
    std::optional<int> xi_steps;
    double newton_tol{1e-10};
    std::optional<int> boson_cutoff;
    std::optional<int> branch;
    std::optional<std::vector<int>> occupation;
    std::uint64_t seed{0};
    bool parallel_branches{false};
    // level: 0 debug, 1 info, 2 warning
    std::function<void(int, const std::string&)> log;
};

struct RunResult {
    int exit_code{exit_ok};
    std::string output;   // the results document
    std::string summary;  // human-readable diagnostics
};

const char* version() noexcept;

RunResult run(const RunConfig& config);

}  // namespace gaudin
