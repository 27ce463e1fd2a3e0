#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "gamekin/commands.hpp"

// Thin front end: flags map one-to-one onto a RunRequest, all real work and
// all validation live in the command layer. Exit status flags operational
// failures only; mathematical outcomes (non-convergence, instability) are
// reported in the output with status 0.

int main(int argc, char** argv) {
    CLI::App app{"gamekin: Gibbs-state equilibria of classical and quantum static games"};

    gamekin::RunRequest request;
    std::string source_kind;
    std::string source_name;
    std::size_t player = 0;

    app.add_option("command", request.command,
                   "build | eval | reduce | iterate | sweep | stability | decompose")
        ->required();
    app.add_option("source", source_kind, "optional positional source: builtin|game <name>");
    app.add_option("source-name", source_name, "name or path for the positional source");
    app.add_option("--game", request.game_path, "game definition file");
    app.add_option("--builtin", request.builtin_name,
                   "builtin: prisoners-dilemma | hawk-dove | penny-classical | penny-quantum");
    app.add_option("--player", player, "1-based player index (reduce, decompose)");
    app.add_option("--beta", request.beta, "inverse temperature: nonnegative real or 'inf'");
    app.add_option("--betas", request.betas, "beta grid: start:stop:step or comma list");
    app.add_option("--init", request.init,
                   "initial probabilities: ';' between players, ',' within a player; "
                   "a bare x per two-strategy player means (x, 1-x)");
    app.add_option("--tol", request.tolerance, "convergence tolerance (default 1e-10)");
    app.add_option("--max-sweeps", request.max_sweeps, "sweep limit (default 100000)");
    app.add_option("--order", request.order, "update mode: seq (Gauss-Seidel) | par (Jacobi)");
    app.add_option("--sequence", request.sequence,
                   "within-sweep player update order, 1-based, e.g. 2,1");
    app.add_flag("--trace", request.trace, "iterate: emit one block per sweep");
    app.add_flag("--warm", request.warm, "sweep: carry states from one beta to the next");
    app.add_option("--out", request.out_path, "output path (default stdout)");
    app.add_option("--format", request.format, "csv | structured (default per command)");

    CLI11_PARSE(app, argc, argv);

    if (app.count("--player") > 0) request.player = player;

    // Accept the prose form "iterate builtin prisoners-dilemma" as well.
    if (!source_kind.empty()) {
        if (source_name.empty()) {
            std::cerr << "error: positional source '" << source_kind
                      << "' needs a name or path\n";
            return 1;
        }
        if (source_kind == "builtin") {
            request.builtin_name = source_name;
        } else if (source_kind == "game" || source_kind == "file") {
            request.game_path = source_name;
        } else {
            std::cerr << "error: positional source must be 'builtin' or 'game', got '"
                      << source_kind << "'\n";
            return 1;
        }
    }

    return gamekin::run_command(request, std::cout, std::cerr);
}
