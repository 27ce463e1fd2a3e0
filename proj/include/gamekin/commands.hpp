#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gamekin/gamefile.hpp"
#include "gamekin/kinetics.hpp"

// Command layer behind the CLI: one RunRequest per invocation, dispatched to
// build | eval | reduce | iterate | sweep | stability | decompose. Results are
// CSV or structured text with reals printed to 17 significant digits; the
// pipeline is deterministic, so identical requests emit identical bytes.

namespace gamekin {

struct RunRequest {
    std::string command;
    std::string game_path;     // exactly one of game_path / builtin_name
    std::string builtin_name;
    std::optional<std::size_t> player;  // 1-based; reduce and decompose only
    std::string beta = "1";             // real or "inf"
    std::string betas;                  // "start:stop:step" or comma list, sweep only
    std::string init;                   // per-player probabilities, ';' between players
    double tolerance = 1e-10;
    std::size_t max_sweeps = 100000;
    std::string order = "seq";          // seq | par
    std::string sequence;               // comma-separated 1-based player update order
    bool trace = false;
    bool warm = false;                  // sweep: carry states from one beta to the next
    std::string out_path;               // empty = write to `out`
    std::string format = "auto";        // auto | csv | structured
};

// Executes one request. Results go to `out` (or out_path), warnings and error
// messages to `err`. The exit status flags only operational failures; a
// non-converged iteration is a status-0 outcome reported in the output.
int run_command(const RunRequest& request, std::ostream& out, std::ostream& err);

// Flag-parsing helpers, exposed for direct testing.
double parse_beta(const std::string& text);
std::vector<double> parse_beta_grid(const std::string& text);
std::vector<PlayerState> parse_initial_states(const std::string& text,
                                              const DimensionProfile& profile);
std::vector<std::size_t> parse_update_sequence(const std::string& text);
std::string classification_name(Stability s);

}  // namespace gamekin
