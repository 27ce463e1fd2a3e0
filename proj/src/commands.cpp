#include "gamekin/commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

namespace gamekin {

namespace {

[[noreturn]] void fail(const std::string& message) { throw std::invalid_argument(message); }

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string current;
    for (const char c : text) {
        if (c == sep) {
            parts.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    parts.push_back(current);
    return parts;
}

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_real_token(const std::string& token, const std::string& what) {
    const std::string t = trim(token);
    if (t.empty()) fail(what + ": empty number");
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        fail(what + ": invalid number '" + t + "'");
    }
    if (used != t.size()) fail(what + ": invalid number '" + t + "'");
    return v;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    return out + "\"";
}

const char* bool_name(bool v) { return v ? "true" : "false"; }

std::string ind(int n) { return std::string(static_cast<std::size_t>(n), ' '); }

void write_real_list(std::ostream& os, const std::vector<double>& values) {
    os << '[';
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k > 0) os << ", ";
        os << format_real(values[k]);
    }
    os << ']';
}

void write_label_list(std::ostream& os, const std::vector<std::string>& labels) {
    os << '[';
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (k > 0) os << ", ";
        os << json_quote(labels[k]);
    }
    os << ']';
}

// beta is "inf" at the boundary, which JSON numbers cannot spell.
void write_beta_json(std::ostream& os, double beta) {
    if (std::isfinite(beta)) os << format_real(beta);
    else os << "\"inf\"";
}

enum class Format { csv, structured };

Format resolve_format(const std::string& flag, const std::string& command) {
    if (flag == "csv") return Format::csv;
    if (flag == "structured") return Format::structured;
    if (flag == "auto" || flag.empty())
        return (command == "build" || command == "reduce") ? Format::structured : Format::csv;
    fail("--format: want csv or structured, got '" + flag + "'");
}

std::string run_build(const GameFile& file, const GameSystem& system, Format format) {
    if (format == Format::structured) {
        RawGame raw;
        raw.dims = system.profile.dims();
        raw.strategy_labels = file.labels();
        for (const PayoffMatrix& pm : system.payoffs) raw.payoff_matrices.push_back(pm.h);
        GameFile out;
        out.kind = GameKind::raw_hermitian;
        out.name = file.name;
        out.description = file.description;
        out.game = std::move(raw);
        return serialize_game_file(out);
    }
    std::ostringstream os;
    os << "player,row,col,re,im\n";
    for (std::size_t p = 0; p < system.payoffs.size(); ++p) {
        const ComplexMatrix& h = system.payoffs[p].h;
        for (std::size_t r = 0; r < h.rows(); ++r)
            for (std::size_t c = 0; c < h.cols(); ++c)
                os << p + 1 << ',' << r << ',' << c << ','
                   << format_real(h(r, c).real()) << ',' << format_real(h(r, c).imag())
                   << '\n';
    }
    return os.str();
}

std::string run_eval(const GameSystem& system, const std::vector<PlayerState>& states,
                     Format format) {
    const SystemState joint = system_from_players(states);
    std::vector<double> values;
    for (const PayoffMatrix& pm : system.payoffs) values.push_back(payoff(joint, pm));

    std::ostringstream os;
    if (format == Format::csv) {
        os << "player,payoff\n";
        for (std::size_t p = 0; p < values.size(); ++p)
            os << p + 1 << ',' << format_real(values[p]) << '\n';
        return os.str();
    }
    os << "{\n" << ind(2) << "\"players\": [\n";
    for (std::size_t p = 0; p < values.size(); ++p)
        os << ind(4) << "{\"player\": " << p + 1 << ", \"payoff\": "
           << format_real(values[p]) << '}' << (p + 1 < values.size() ? ",\n" : "\n");
    os << ind(2) << "]\n}\n";
    return os.str();
}

std::string run_reduce(const GameSystem& system,
                       const std::vector<std::vector<std::string>>& labels,
                       const std::vector<PlayerState>& states, const RunRequest& request,
                       Format format) {
    const std::size_t owner = request.player.value_or(1);
    if (owner < 1 || owner > system.players())
        fail("--player: index " + std::to_string(owner) + " out of range (game has " +
             std::to_string(system.players()) + " players)");
    const ComplexMatrix hr = reduced_payoff(system.payoffs[owner - 1], states, system.profile);

    std::ostringstream os;
    if (format == Format::csv) {
        os << "row,col,re,im\n";
        for (std::size_t r = 0; r < hr.rows(); ++r)
            for (std::size_t c = 0; c < hr.cols(); ++c)
                os << r << ',' << c << ',' << format_real(hr(r, c).real()) << ','
                   << format_real(hr(r, c).imag()) << '\n';
        return os.str();
    }
    os << "{\n" << ind(2) << "\"player\": " << owner << ",\n" << ind(2) << "\"labels\": ";
    write_label_list(os, labels[owner - 1]);
    os << ",\n" << ind(2) << "\"matrix\": ";
    write_complex_matrix_json(os, hr, 2);
    os << "\n}\n";
    return os.str();
}

std::string run_iterate(const GameSystem& system,
                        const std::vector<std::vector<std::string>>& labels,
                        const std::vector<PlayerState>& states, const KineticsConfig& config,
                        const RunRequest& request, Format format, std::ostream& err) {
    const FixedPointReport report = iterate(system, states, config, request.trace);
    if (report.quantum_finite_beta)
        err << "warning: finite-beta Gibbs iteration on a quantum (non-diagonal) game "
               "is heuristic\n";

    std::ostringstream os;
    if (format == Format::csv) {
        os << "sweep,player,strategy,probability,payoff,residual,converged\n";
        const auto emit = [&](std::size_t sweep, const std::vector<std::vector<double>>& probs,
                              const std::vector<double>& payoffs, double residual) {
            for (std::size_t p = 0; p < probs.size(); ++p)
                for (std::size_t k = 0; k < probs[p].size(); ++k)
                    os << sweep << ',' << p + 1 << ',' << csv_field(labels[p][k]) << ','
                       << format_real(probs[p][k]) << ',' << format_real(payoffs[p]) << ','
                       << format_real(residual) << ',' << bool_name(report.converged) << '\n';
        };
        if (request.trace) {
            for (const TrajectorySample& sample : report.trajectory)
                emit(sample.sweep, sample.probabilities, sample.payoffs, sample.residual);
        } else {
            std::vector<std::vector<double>> probs;
            for (const PlayerState& s : report.states)
                probs.push_back(s.diagonal_probabilities());
            emit(report.sweeps_used, probs, report.payoffs, report.residual);
        }
        return os.str();
    }

    os << "{\n";
    os << ind(2) << "\"converged\": " << bool_name(report.converged) << ",\n";
    os << ind(2) << "\"sweeps_used\": " << report.sweeps_used << ",\n";
    os << ind(2) << "\"residual\": " << format_real(report.residual) << ",\n";
    os << ind(2) << "\"cycle_period\": " << report.cycle_period << ",\n";
    os << ind(2) << "\"quantum_finite_beta\": " << bool_name(report.quantum_finite_beta)
       << ",\n";
    os << ind(2) << "\"players\": [\n";
    for (std::size_t p = 0; p < report.states.size(); ++p) {
        os << ind(4) << "{\n" << ind(6) << "\"player\": " << p + 1 << ",\n";
        os << ind(6) << "\"labels\": ";
        write_label_list(os, labels[p]);
        os << ",\n" << ind(6) << "\"probabilities\": ";
        write_real_list(os, report.states[p].diagonal_probabilities());
        os << ",\n" << ind(6) << "\"payoff\": " << format_real(report.payoffs[p]) << ",\n";
        os << ind(6) << "\"density\": ";
        write_complex_matrix_json(os, report.states[p].density(), 6);
        os << '\n' << ind(4) << '}' << (p + 1 < report.states.size() ? ",\n" : "\n");
    }
    os << ind(2) << ']';
    if (request.trace) {
        os << ",\n" << ind(2) << "\"trajectory\": [\n";
        for (std::size_t k = 0; k < report.trajectory.size(); ++k) {
            const TrajectorySample& sample = report.trajectory[k];
            os << ind(4) << "{\"sweep\": " << sample.sweep << ", \"residual\": "
               << format_real(sample.residual) << ", \"probabilities\": [";
            for (std::size_t p = 0; p < sample.probabilities.size(); ++p) {
                if (p > 0) os << ", ";
                write_real_list(os, sample.probabilities[p]);
            }
            os << "], \"payoffs\": ";
            write_real_list(os, sample.payoffs);
            os << '}' << (k + 1 < report.trajectory.size() ? ",\n" : "\n");
        }
        os << ind(2) << ']';
    }
    os << "\n}\n";
    return os.str();
}

std::string run_sweep(const GameSystem& system,
                      const std::vector<std::vector<std::string>>& labels,
                      const std::vector<PlayerState>& states, const KineticsConfig& config,
                      const RunRequest& request, Format format, std::ostream& err) {
    if (request.betas.empty()) fail("sweep requires --betas");
    const std::vector<double> grid = parse_beta_grid(request.betas);
    const bool with_stability = system.diagonal();
    const std::vector<BetaSweepRow> rows =
        beta_sweep(system, grid, states, config, request.warm, with_stability);

    for (const BetaSweepRow& row : rows) {
        if (row.report.quantum_finite_beta) {
            err << "warning: finite-beta Gibbs iteration on a quantum (non-diagonal) game "
                   "is heuristic\n";
            break;
        }
    }

    std::ostringstream os;
    if (format == Format::csv) {
        os << "beta,player,strategy,probability,converged,spectral_radius\n";
        for (const BetaSweepRow& row : rows) {
            const std::string radius = row.report.stability
                ? format_real(row.report.stability->spectral_radius)
                : "nan";
            for (std::size_t p = 0; p < row.report.states.size(); ++p) {
                const std::vector<double> probs =
                    row.report.states[p].diagonal_probabilities();
                for (std::size_t k = 0; k < probs.size(); ++k)
                    os << format_real(row.beta) << ',' << p + 1 << ','
                       << csv_field(labels[p][k]) << ',' << format_real(probs[k]) << ','
                       << bool_name(row.report.converged) << ',' << radius << '\n';
            }
        }
        return os.str();
    }

    os << "{\n" << ind(2) << "\"rows\": [\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const BetaSweepRow& row = rows[r];
        os << ind(4) << "{\n" << ind(6) << "\"beta\": ";
        write_beta_json(os, row.beta);
        os << ",\n" << ind(6) << "\"converged\": " << bool_name(row.report.converged) << ",\n";
        os << ind(6) << "\"sweeps_used\": " << row.report.sweeps_used << ",\n";
        os << ind(6) << "\"residual\": " << format_real(row.report.residual) << ",\n";
        if (row.report.stability) {
            os << ind(6) << "\"spectral_radius\": "
               << format_real(row.report.stability->spectral_radius) << ",\n";
            os << ind(6) << "\"classification\": "
               << json_quote(classification_name(row.report.stability->classification))
               << ",\n";
        } else {
            os << ind(6) << "\"spectral_radius\": null,\n";
            os << ind(6) << "\"classification\": null,\n";
        }
        os << ind(6) << "\"players\": [\n";
        for (std::size_t p = 0; p < row.report.states.size(); ++p) {
            os << ind(8) << "{\"player\": " << p + 1 << ", \"labels\": ";
            write_label_list(os, labels[p]);
            os << ", \"probabilities\": ";
            write_real_list(os, row.report.states[p].diagonal_probabilities());
            os << ", \"payoff\": " << format_real(row.report.payoffs[p]) << '}'
               << (p + 1 < row.report.states.size() ? ",\n" : "\n");
        }
        os << ind(6) << "]\n" << ind(4) << '}' << (r + 1 < rows.size() ? ",\n" : "\n");
    }
    os << ind(2) << "]\n}\n";
    return os.str();
}

std::string run_stability(const GameSystem& system, const std::vector<PlayerState>& states,
                          const KineticsConfig& config, Format format) {
    const StabilityReport report = stability(system, states, config);

    std::ostringstream os;
    if (format == Format::csv) {
        os << "beta,spectral_radius,classification,jacobian_row,jacobian_col,"
              "jacobian_value\n";
        for (std::size_t r = 0; r < report.jacobian.size(); ++r)
            for (std::size_t c = 0; c < report.jacobian[r].size(); ++c)
                os << format_real(report.beta) << ',' << format_real(report.spectral_radius)
                   << ',' << classification_name(report.classification) << ',' << r << ','
                   << c << ',' << format_real(report.jacobian[r][c]) << '\n';
        return os.str();
    }

    os << "{\n" << ind(2) << "\"beta\": ";
    write_beta_json(os, report.beta);
    os << ",\n" << ind(2) << "\"fd_step\": " << format_real(report.fd_step) << ",\n";
    os << ind(2) << "\"spectral_radius\": " << format_real(report.spectral_radius) << ",\n";
    os << ind(2) << "\"classification\": "
       << json_quote(classification_name(report.classification)) << ",\n";
    os << ind(2) << "\"jacobian\": [\n";
    for (std::size_t r = 0; r < report.jacobian.size(); ++r) {
        os << ind(4);
        write_real_list(os, report.jacobian[r]);
        os << (r + 1 < report.jacobian.size() ? ",\n" : "\n");
    }
    os << ind(2) << "]\n}\n";
    return os.str();
}

std::string run_decompose(const GameFile& file, const RunRequest& request, Format format) {
    if (file.kind != GameKind::quantum)
        fail("decompose requires a quantum game (operator strategy bases)");
    const auto& spec = std::get<QuantumGameSpec>(file.game);

    std::vector<std::size_t> targets;
    if (request.player) {
        const std::size_t p = *request.player;
        if (p < 1 || p > spec.players())
            fail("--player: index " + std::to_string(p) + " out of range (game has " +
                 std::to_string(spec.players()) + " players)");
        targets.push_back(p - 1);
    } else {
        for (std::size_t p = 0; p < spec.players(); ++p) targets.push_back(p);
    }

    std::vector<OperatorDecomposition> results;
    for (const std::size_t p : targets)
        results.push_back(decompose_operator(spec.payoff_operators[p], spec.strategy_bases[p]));

    std::ostringstream os;
    if (format == Format::csv) {
        os << "player,index,label,re,im,residual\n";
        for (std::size_t t = 0; t < targets.size(); ++t) {
            const std::size_t p = targets[t];
            const OperatorDecomposition& d = results[t];
            for (std::size_t k = 0; k < d.coefficients.size(); ++k)
                os << p + 1 << ',' << k + 1 << ',' << csv_field(spec.strategy_labels[p][k])
                   << ',' << format_real(d.coefficients[k].real()) << ','
                   << format_real(d.coefficients[k].imag()) << ','
                   << format_real(d.residual) << '\n';
        }
        return os.str();
    }

    os << "{\n" << ind(2) << "\"players\": [\n";
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const std::size_t p = targets[t];
        const OperatorDecomposition& d = results[t];
        os << ind(4) << "{\n" << ind(6) << "\"player\": " << p + 1 << ",\n";
        os << ind(6) << "\"labels\": ";
        write_label_list(os, spec.strategy_labels[p]);
        os << ",\n" << ind(6) << "\"coefficients\": [";
        for (std::size_t k = 0; k < d.coefficients.size(); ++k) {
            if (k > 0) os << ", ";
            os << '[' << format_real(d.coefficients[k].real()) << ", "
               << format_real(d.coefficients[k].imag()) << ']';
        }
        os << "],\n" << ind(6) << "\"residual\": " << format_real(d.residual) << '\n';
        os << ind(4) << '}' << (t + 1 < targets.size() ? ",\n" : "\n");
    }
    os << ind(2) << "]\n}\n";
    return os.str();
}

std::string execute(const RunRequest& request, std::ostream& err) {
    static const std::vector<std::string> known = {
        "build", "eval", "reduce", "iterate", "sweep", "stability", "decompose"};
    if (std::find(known.begin(), known.end(), request.command) == known.end())
        fail("unknown command '" + request.command + "'");
    if (request.game_path.empty() == request.builtin_name.empty())
        fail("exactly one of --game and --builtin is required");
    if (request.player && request.command != "reduce" && request.command != "decompose")
        fail("--player applies to reduce and decompose only");
    if (!request.betas.empty() && request.command != "sweep")
        fail("--betas applies to sweep only");

    const GameFile file = request.builtin_name.empty()
        ? load_game_file(request.game_path)
        : game_file_from_builtin(request.builtin_name);
    const Format format = resolve_format(request.format, request.command);

    if (request.command == "decompose") return run_decompose(file, request, format);

    const GameSystem system = make_system(file);
    const std::vector<std::vector<std::string>> labels = file.labels();

    if (request.command == "build") return run_build(file, system, format);

    KineticsConfig config;
    config.beta = parse_beta(request.beta);
    config.tolerance = request.tolerance;
    config.max_sweeps = request.max_sweeps;
    if (request.order == "seq") config.mode = UpdateMode::sequential;
    else if (request.order == "par") config.mode = UpdateMode::parallel;
    else fail("--order: want seq or par, got '" + request.order + "'");
    config.update_order = parse_update_sequence(request.sequence);
    config.validate(system.players());

    const std::vector<PlayerState> states = request.init.empty()
        ? uniform_states(system.profile)
        : parse_initial_states(request.init, system.profile);

    if (request.command == "eval") return run_eval(system, states, format);
    if (request.command == "reduce")
        return run_reduce(system, labels, states, request, format);
    if (request.command == "iterate")
        return run_iterate(system, labels, states, config, request, format, err);
    if (request.command == "sweep")
        return run_sweep(system, labels, states, config, request, format, err);
    return run_stability(system, states, config, format);
}

}  // namespace

double parse_beta(const std::string& text) {
    const double v = parse_real_token(text, "--beta");
    if (std::isnan(v) || v < 0.0) fail("--beta: must be a nonnegative real or 'inf'");
    return v;
}

std::vector<double> parse_beta_grid(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) fail("--betas: empty grid");
    std::vector<double> grid;
    if (t.find(':') != std::string::npos) {
        const std::vector<std::string> parts = split(t, ':');
        if (parts.size() != 3) fail("--betas: range must be start:stop:step");
        const double start = parse_real_token(parts[0], "--betas");
        const double stop = parse_real_token(parts[1], "--betas");
        const double step = parse_real_token(parts[2], "--betas");
        if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
            fail("--betas: range bounds must be finite");
        if (start < 0.0 || stop < start || step <= 0.0)
            fail("--betas: want 0 <= start <= stop and step > 0");
        const double slack = 1e-9 * std::max(1.0, step);
        for (std::size_t k = 0;; ++k) {
            const double v = start + static_cast<double>(k) * step;
            if (v > stop + slack) break;
            grid.push_back(std::min(v, stop));
        }
    } else {
        for (const std::string& token : split(t, ',')) {
            const double v = parse_real_token(token, "--betas");
            if (std::isnan(v) || v < 0.0)
                fail("--betas: values must be nonnegative reals or 'inf'");
            grid.push_back(v);
        }
    }
    return grid;
}

std::vector<PlayerState> parse_initial_states(const std::string& text,
                                              const DimensionProfile& profile) {
    const std::string t = trim(text);
    if (t.empty()) fail("--init: empty specification");
    const std::size_t players = profile.players();
    const std::vector<std::string> segments = split(t, ';');

    const auto reals = [](const std::string& segment) {
        std::vector<double> values;
        for (const std::string& token : split(segment, ','))
            values.push_back(parse_real_token(token, "--init"));
        return values;
    };

    std::vector<std::vector<double>> dists;
    if (segments.size() == players) {
        for (std::size_t j = 0; j < players; ++j) {
            std::vector<double> values = reals(segments[j]);
            if (values.size() == 1 && profile.dim(j) == 2) {
                values = {values[0], 1.0 - values[0]};
            } else if (values.size() != profile.dim(j)) {
                fail("--init: player " + std::to_string(j + 1) + " expects " +
                     std::to_string(profile.dim(j)) + " probabilities, got " +
                     std::to_string(values.size()));
            }
            dists.push_back(std::move(values));
        }
    } else if (segments.size() == 1 && players > 1) {
        const std::vector<double> values = reals(t);
        if (values.size() != players)
            fail("--init: expected one probability per player, got " +
                 std::to_string(values.size()));
        for (std::size_t j = 0; j < players; ++j) {
            if (profile.dim(j) != 2)
                fail("--init: the per-player shorthand needs two strategies per player");
            dists.push_back({values[j], 1.0 - values[j]});
        }
    } else {
        fail("--init: expected " + std::to_string(players) + " ';'-separated blocks, got " +
             std::to_string(segments.size()));
    }

    std::vector<PlayerState> states;
    for (std::size_t j = 0; j < players; ++j) {
        std::vector<double>& p = dists[j];
        double sum = 0.0;
        for (double& v : p) {
            if (!std::isfinite(v) || v < -1e-9 || v > 1.0 + 1e-9)
                fail("--init: player " + std::to_string(j + 1) + " probability " +
                     format_real(v) + " outside [0, 1]");
            v = std::min(1.0, std::max(0.0, v));
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            fail("--init: player " + std::to_string(j + 1) + " probabilities sum to " +
                 format_real(sum) + ", expected 1");
        double head = 0.0;
        for (std::size_t k = 0; k + 1 < p.size(); ++k) {
            p[k] /= sum;
            head += p[k];
        }
        p.back() = std::max(0.0, 1.0 - head);
        states.push_back(mixture_state(p));
    }
    return states;
}

std::vector<std::size_t> parse_update_sequence(const std::string& text) {
    const std::string t = trim(text);
    std::vector<std::size_t> order;
    if (t.empty()) return order;
    for (const std::string& token : split(t, ',')) {
        const std::string tok = trim(token);
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(tok, &used);
        } catch (const std::exception&) {
            fail("--sequence: invalid player index '" + tok + "'");
        }
        if (used != tok.size() || v < 1)
            fail("--sequence: invalid player index '" + tok + "'");
        order.push_back(static_cast<std::size_t>(v - 1));
    }
    return order;
}

std::string classification_name(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::marginal: return "marginal";
    }
    return "marginal";
}

int run_command(const RunRequest& request, std::ostream& out, std::ostream& err) {
    try {
        const std::string text = execute(request, err);
        if (!request.out_path.empty()) {
            std::ofstream file(request.out_path, std::ios::binary);
            if (!file)
                throw std::runtime_error("cannot write output file '" + request.out_path +
                                         "'");
            file << text;
            file.flush();
            if (!file)
                throw std::runtime_error("write failed for output file '" +
                                         request.out_path + "'");
        } else {
            out << text;
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace gamekin
