#pragma once

#include <string>
#include <variant>
#include <vector>

#include "gamekin/game.hpp"
#include "gamekin/kinetics.hpp"
#include "gamekin/matrix.hpp"

// Game-definition files: a structured text format (JSON) holding one of the
// three game kinds. Complex entries are two-element [re, im] arrays, matrices
// are row-major nested arrays, and reals are written with 17 significant
// digits so that serialize -> parse -> serialize is byte-identical.

namespace gamekin {

enum class GameKind { classical, quantum, raw_hermitian };

// Pre-built Hermitian payoff matrices over a declared product space.
struct RawGame {
    std::vector<std::size_t> dims;                          // per player
    std::vector<std::vector<std::string>> strategy_labels;  // per player
    std::vector<ComplexMatrix> payoff_matrices;             // per player

    std::size_t players() const { return dims.size(); }
    DimensionProfile profile() const;
    void validate() const;
};

struct GameFile {
    GameKind kind = GameKind::classical;
    std::string name;
    std::string description;
    std::variant<ClassicalGame, QuantumGameSpec, RawGame> game;

    DimensionProfile profile() const;
    std::vector<std::vector<std::string>> labels() const;
    void validate() const;
};

// Parses the structured text format. Syntax errors report the line; semantic
// errors name the offending field.
GameFile parse_game_file(const std::string& text);

GameFile load_game_file(const std::string& path);

// Deterministic emission: fixed key order, two-space indent, reals as %.17g.
std::string serialize_game_file(const GameFile& file);

// Per-player payoff matrices of whatever the file holds.
std::vector<PayoffMatrix> payoff_matrices(const GameFile& file);

GameSystem make_system(const GameFile& file);

GameFile game_file_from_builtin(const std::string& name);

// Shared emission helpers: 17-significant-digit reals, JSON string quoting,
// and the row-per-line [re, im] matrix layout used by files and reports.
std::string format_real(double v);
std::string json_quote(const std::string& s);
void write_complex_matrix_json(std::ostream& os, const ComplexMatrix& m, int indent);

}  // namespace gamekin
