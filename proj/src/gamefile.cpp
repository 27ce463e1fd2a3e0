#include "gamekin/gamefile.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace gamekin {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
    throw std::invalid_argument("game file: " + message);
}

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    const std::size_t end = std::min(byte, text.size());
    for (std::size_t k = 0; k < end; ++k)
        if (text[k] == '\n') ++line;
    return line;
}

const json& need(const json& obj, const std::string& key) {
    if (!obj.is_object() || !obj.contains(key)) fail("field '" + key + "' missing");
    return obj.at(key);
}

double need_real(const json& j, const std::string& ctx) {
    if (!j.is_number()) fail("field '" + ctx + "': expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail("field '" + ctx + "': not finite");
    return v;
}

std::size_t need_index(const json& j, const std::string& ctx) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        fail("field '" + ctx + "': expected a non-negative integer");
    return static_cast<std::size_t>(j.get<long long>());
}

std::string need_string(const json& j, const std::string& ctx) {
    if (!j.is_string()) fail("field '" + ctx + "': expected a string");
    return j.get<std::string>();
}

cplx need_complex(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.size() != 2)
        fail("field '" + ctx + "': expected a [re, im] pair");
    return cplx(need_real(j[0], ctx + "[0]"), need_real(j[1], ctx + "[1]"));
}

ComplexMatrix need_cmatrix(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.empty()) fail("field '" + ctx + "': expected matrix rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    std::vector<cplx> entries;
    for (std::size_t r = 0; r < rows; ++r) {
        const json& row = j[r];
        const std::string rctx = ctx + "[" + std::to_string(r) + "]";
        if (!row.is_array() || row.empty()) fail("field '" + rctx + "': expected a row");
        if (r == 0) {
            cols = row.size();
            entries.reserve(rows * cols);
        } else if (row.size() != cols) {
            fail("field '" + rctx + "': ragged row");
        }
        for (std::size_t c = 0; c < cols; ++c)
            entries.push_back(need_complex(row[c], rctx + "[" + std::to_string(c) + "]"));
    }
    return ComplexMatrix(rows, cols, std::move(entries));
}

void flatten_reals(const json& j, const std::string& ctx, std::vector<double>& out) {
    if (j.is_number()) {
        out.push_back(need_real(j, ctx));
        return;
    }
    if (!j.is_array()) fail("field '" + ctx + "': expected numbers");
    for (std::size_t k = 0; k < j.size(); ++k)
        flatten_reals(j[k], ctx + "[" + std::to_string(k) + "]", out);
}

std::vector<std::vector<std::string>> need_labels(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.empty())
        fail("field '" + ctx + "': expected per-player label arrays");
    std::vector<std::vector<std::string>> labels;
    for (std::size_t p = 0; p < j.size(); ++p) {
        const std::string pctx = ctx + "[" + std::to_string(p) + "]";
        if (!j[p].is_array() || j[p].empty()) fail("field '" + pctx + "': expected labels");
        std::vector<std::string> one;
        for (std::size_t k = 0; k < j[p].size(); ++k)
            one.push_back(need_string(j[p][k], pctx + "[" + std::to_string(k) + "]"));
        labels.push_back(std::move(one));
    }
    return labels;
}

std::vector<std::string> synthetic_labels(std::size_t dim) {
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < dim; ++k) labels.push_back("s" + std::to_string(k + 1));
    return labels;
}

ClassicalGame parse_classical(const json& root) {
    ClassicalGame game;
    game.strategy_labels = need_labels(need(root, "labels"), "labels");

    const json& tables = need(root, "tables");
    if (!tables.is_array() || tables.size() != game.strategy_labels.size())
        fail("field 'tables': expected one payoff table per player");
    std::size_t total = 1;
    for (const auto& labels : game.strategy_labels) total *= labels.size();
    for (std::size_t p = 0; p < tables.size(); ++p) {
        const std::string ctx = "tables[" + std::to_string(p) + "]";
        std::vector<double> flat;
        flatten_reals(tables[p], ctx, flat);
        if (flat.size() != total)
            fail("field '" + ctx + "': expected " + std::to_string(total) +
                 " entries, got " + std::to_string(flat.size()));
        game.payoff_tensors.push_back(std::move(flat));
    }
    return game;
}

QuantumGameSpec parse_quantum(const json& root) {
    QuantumGameSpec spec;
    spec.object_dim = need_index(need(root, "object_dim"), "object_dim");
    if (spec.object_dim == 0) fail("field 'object_dim': must be positive");
    spec.rho0 = need_cmatrix(need(root, "rho0"), "rho0");

    const json& players = need(root, "players");
    if (!players.is_array() || players.empty())
        fail("field 'players': expected per-player entries");
    for (std::size_t p = 0; p < players.size(); ++p) {
        const std::string ctx = "players[" + std::to_string(p) + "]";
        const json& entry = players[p];
        if (!entry.is_object()) fail("field '" + ctx + "': expected an object");
        const json& labels = need(entry, "labels");
        std::vector<std::string> one;
        if (!labels.is_array() || labels.empty())
            fail("field '" + ctx + ".labels': expected labels");
        for (std::size_t k = 0; k < labels.size(); ++k)
            one.push_back(need_string(labels[k], ctx + ".labels[" + std::to_string(k) + "]"));
        spec.strategy_labels.push_back(std::move(one));

        const json& basis = need(entry, "basis");
        if (!basis.is_array() || basis.size() != spec.strategy_labels.back().size())
            fail("field '" + ctx + ".basis': expected one operator per label");
        std::vector<ComplexMatrix> ops;
        for (std::size_t k = 0; k < basis.size(); ++k)
            ops.push_back(need_cmatrix(basis[k], ctx + ".basis[" + std::to_string(k) + "]"));
        spec.strategy_bases.push_back(std::move(ops));
    }

    const json& payoffs = need(root, "payoff_operators");
    if (!payoffs.is_array() || payoffs.size() != spec.strategy_bases.size())
        fail("field 'payoff_operators': expected one operator per player");
    for (std::size_t p = 0; p < payoffs.size(); ++p)
        spec.payoff_operators.push_back(
            need_cmatrix(payoffs[p], "payoff_operators[" + std::to_string(p) + "]"));

    if (root.contains("acting_order")) {
        const json& order = root.at("acting_order");
        if (!order.is_array()) fail("field 'acting_order': expected player indices");
        for (std::size_t k = 0; k < order.size(); ++k)
            spec.acting_order.push_back(
                need_index(order[k], "acting_order[" + std::to_string(k) + "]"));
    } else {
        for (std::size_t p = 0; p < spec.strategy_bases.size(); ++p)
            spec.acting_order.push_back(p);
    }
    return spec;
}

RawGame parse_raw(const json& root) {
    RawGame game;
    const json& dims = need(root, "dims");
    if (!dims.is_array() || dims.empty()) fail("field 'dims': expected per-player sizes");
    for (std::size_t k = 0; k < dims.size(); ++k) {
        const std::size_t d = need_index(dims[k], "dims[" + std::to_string(k) + "]");
        if (d == 0) fail("field 'dims[" + std::to_string(k) + "]': must be positive");
        game.dims.push_back(d);
    }

    if (root.contains("labels")) {
        game.strategy_labels = need_labels(root.at("labels"), "labels");
    } else {
        for (const std::size_t d : game.dims)
            game.strategy_labels.push_back(synthetic_labels(d));
    }

    const json& matrices = need(root, "matrices");
    if (!matrices.is_array() || matrices.size() != game.dims.size())
        fail("field 'matrices': expected one payoff matrix per player");
    for (std::size_t p = 0; p < matrices.size(); ++p)
        game.payoff_matrices.push_back(
            need_cmatrix(matrices[p], "matrices[" + std::to_string(p) + "]"));
    return game;
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (const char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    return out + "\"";
}

std::string ind(int n) { return std::string(static_cast<std::size_t>(n), ' '); }

void write_complex(std::ostream& os, const cplx& z) {
    os << '[' << format_real(z.real()) << ", " << format_real(z.imag()) << ']';
}

void write_tensor(std::ostream& os, const std::vector<double>& flat,
                  const std::vector<std::size_t>& dims, std::size_t level,
                  std::size_t& cursor, int indent) {
    if (level + 1 == dims.size()) {
        os << ind(indent) << '[';
        for (std::size_t k = 0; k < dims[level]; ++k) {
            if (k > 0) os << ", ";
            os << format_real(flat[cursor++]);
        }
        os << ']';
        return;
    }
    os << ind(indent) << "[\n";
    for (std::size_t k = 0; k < dims[level]; ++k) {
        write_tensor(os, flat, dims, level + 1, cursor, indent + 2);
        os << (k + 1 < dims[level] ? ",\n" : "\n");
    }
    os << ind(indent) << ']';
}

void write_labels(std::ostream& os, const std::vector<std::vector<std::string>>& labels,
                  int indent) {
    os << "[\n";
    for (std::size_t p = 0; p < labels.size(); ++p) {
        os << ind(indent + 2) << '[';
        for (std::size_t k = 0; k < labels[p].size(); ++k) {
            if (k > 0) os << ", ";
            os << quoted(labels[p][k]);
        }
        os << ']' << (p + 1 < labels.size() ? ",\n" : "\n");
    }
    os << ind(indent) << ']';
}

void write_header(std::ostream& os, const GameFile& file, const char* kind) {
    os << "{\n" << ind(2) << "\"kind\": " << quoted(kind);
    if (!file.name.empty()) os << ",\n" << ind(2) << "\"name\": " << quoted(file.name);
    if (!file.description.empty())
        os << ",\n" << ind(2) << "\"description\": " << quoted(file.description);
}

}  // namespace

DimensionProfile RawGame::profile() const { return DimensionProfile(dims); }

void RawGame::validate() const {
    const DimensionProfile prof(dims);
    if (strategy_labels.size() != dims.size())
        throw std::invalid_argument("raw game: labels for " +
                                    std::to_string(strategy_labels.size()) + " players, " +
                                    std::to_string(dims.size()) + " expected");
    for (std::size_t p = 0; p < dims.size(); ++p)
        if (strategy_labels[p].size() != dims[p])
            throw std::invalid_argument("raw game: label count of player " +
                                        std::to_string(p + 1) + " does not match its dim");
    if (payoff_matrices.size() != dims.size())
        throw std::invalid_argument("raw game: expected one payoff matrix per player");
    for (std::size_t p = 0; p < payoff_matrices.size(); ++p) {
        const ComplexMatrix& h = payoff_matrices[p];
        if (!h.square() || h.rows() != prof.total())
            throw std::invalid_argument("raw game: payoff matrix " + std::to_string(p + 1) +
                                        " is not " + std::to_string(prof.total()) + "x" +
                                        std::to_string(prof.total()));
        const double defect = h.hermiticity_defect();
        const double scale = std::max(1.0, h.max_abs());
        if (defect > 1e-9 * scale)
            throw std::invalid_argument("raw game: payoff matrix " + std::to_string(p + 1) +
                                        " not Hermitian (max asymmetry " +
                                        std::to_string(defect) + ")");
    }
}

DimensionProfile GameFile::profile() const {
    return std::visit([](const auto& g) { return g.profile(); }, game);
}

std::vector<std::vector<std::string>> GameFile::labels() const {
    return std::visit([](const auto& g) { return g.strategy_labels; }, game);
}

void GameFile::validate() const {
    std::visit([](const auto& g) { g.validate(); }, game);
}

GameFile parse_game_file(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        fail("malformed syntax at line " + std::to_string(line_of_byte(text, e.byte)) +
             ": " + e.what());
    }
    if (!root.is_object()) fail("expected a top-level object");

    GameFile file;
    if (root.contains("name")) file.name = need_string(root.at("name"), "name");
    if (root.contains("description"))
        file.description = need_string(root.at("description"), "description");

    const std::string kind = need_string(need(root, "kind"), "kind");
    if (kind == "classical") {
        file.kind = GameKind::classical;
        file.game = parse_classical(root);
    } else if (kind == "quantum") {
        file.kind = GameKind::quantum;
        file.game = parse_quantum(root);
    } else if (kind == "raw-hermitian") {
        file.kind = GameKind::raw_hermitian;
        file.game = parse_raw(root);
    } else {
        fail("field 'kind': unknown kind '" + kind + "'");
    }

    file.validate();
    return file;
}

GameFile load_game_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open game file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_game_file(text.str());
}

std::string serialize_game_file(const GameFile& file) {
    file.validate();
    std::ostringstream os;
    switch (file.kind) {
        case GameKind::classical: {
            const auto& game = std::get<ClassicalGame>(file.game);
            write_header(os, file, "classical");
            os << ",\n" << ind(2) << "\"labels\": ";
            write_labels(os, game.strategy_labels, 2);
            os << ",\n" << ind(2) << "\"tables\": [\n";
            std::vector<std::size_t> dims;
            for (const auto& labels : game.strategy_labels) dims.push_back(labels.size());
            for (std::size_t p = 0; p < game.payoff_tensors.size(); ++p) {
                std::size_t cursor = 0;
                write_tensor(os, game.payoff_tensors[p], dims, 0, cursor, 4);
                os << (p + 1 < game.payoff_tensors.size() ? ",\n" : "\n");
            }
            os << ind(2) << "]\n}\n";
            break;
        }
        case GameKind::quantum: {
            const auto& spec = std::get<QuantumGameSpec>(file.game);
            write_header(os, file, "quantum");
            os << ",\n" << ind(2) << "\"object_dim\": " << spec.object_dim;
            os << ",\n" << ind(2) << "\"rho0\": ";
            write_complex_matrix_json(os, spec.rho0, 2);
            os << ",\n" << ind(2) << "\"payoff_operators\": [\n";
            for (std::size_t p = 0; p < spec.payoff_operators.size(); ++p) {
                os << ind(4);
                write_complex_matrix_json(os, spec.payoff_operators[p], 4);
                os << (p + 1 < spec.payoff_operators.size() ? ",\n" : "\n");
            }
            os << ind(2) << "],\n" << ind(2) << "\"players\": [\n";
            for (std::size_t p = 0; p < spec.strategy_bases.size(); ++p) {
                os << ind(4) << "{\n" << ind(6) << "\"labels\": [";
                for (std::size_t k = 0; k < spec.strategy_labels[p].size(); ++k) {
                    if (k > 0) os << ", ";
                    os << quoted(spec.strategy_labels[p][k]);
                }
                os << "],\n" << ind(6) << "\"basis\": [\n";
                for (std::size_t k = 0; k < spec.strategy_bases[p].size(); ++k) {
                    os << ind(8);
                    write_complex_matrix_json(os, spec.strategy_bases[p][k], 8);
                    os << (k + 1 < spec.strategy_bases[p].size() ? ",\n" : "\n");
                }
                os << ind(6) << "]\n" << ind(4) << '}'
                   << (p + 1 < spec.strategy_bases.size() ? ",\n" : "\n");
            }
            os << ind(2) << "],\n" << ind(2) << "\"acting_order\": [";
            for (std::size_t k = 0; k < spec.acting_order.size(); ++k) {
                if (k > 0) os << ", ";
                os << spec.acting_order[k];
            }
            os << "]\n}\n";
            break;
        }
        case GameKind::raw_hermitian: {
            const auto& game = std::get<RawGame>(file.game);
            write_header(os, file, "raw-hermitian");
            os << ",\n" << ind(2) << "\"dims\": [";
            for (std::size_t k = 0; k < game.dims.size(); ++k) {
                if (k > 0) os << ", ";
                os << game.dims[k];
            }
            os << "],\n" << ind(2) << "\"labels\": ";
            write_labels(os, game.strategy_labels, 2);
            os << ",\n" << ind(2) << "\"matrices\": [\n";
            for (std::size_t p = 0; p < game.payoff_matrices.size(); ++p) {
                os << ind(4);
                write_complex_matrix_json(os, game.payoff_matrices[p], 4);
                os << (p + 1 < game.payoff_matrices.size() ? ",\n" : "\n");
            }
            os << ind(2) << "]\n}\n";
            break;
        }
    }
    return os.str();
}

std::vector<PayoffMatrix> payoff_matrices(const GameFile& file) {
    return make_system(file).payoffs;
}

GameSystem make_system(const GameFile& file) {
    switch (file.kind) {
        case GameKind::classical:
            return make_system(std::get<ClassicalGame>(file.game));
        case GameKind::quantum:
            return make_system(std::get<QuantumGameSpec>(file.game));
        case GameKind::raw_hermitian: {
            const auto& game = std::get<RawGame>(file.game);
            return make_system(game.profile(), game.payoff_matrices);
        }
    }
    throw std::logic_error("game file: unhandled kind");
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string json_quote(const std::string& s) { return quoted(s); }

void write_complex_matrix_json(std::ostream& os, const ComplexMatrix& m, int indent) {
    os << "[\n";
    for (std::size_t r = 0; r < m.rows(); ++r) {
        os << ind(indent + 2) << '[';
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c > 0) os << ", ";
            write_complex(os, m(r, c));
        }
        os << ']' << (r + 1 < m.rows() ? ",\n" : "\n");
    }
    os << ind(indent) << ']';
}

GameFile game_file_from_builtin(const std::string& name) {
    GameFile file;
    file.name = name;
    BuiltinGame game = builtin(name);
    if (std::holds_alternative<ClassicalGame>(game)) {
        file.kind = GameKind::classical;
        file.game = std::move(std::get<ClassicalGame>(game));
    } else {
        file.kind = GameKind::quantum;
        file.game = std::move(std::get<QuantumGameSpec>(game));
    }
    return file;
}

}  // namespace gamekin
