#include "gamekin/kinetics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <variant>

namespace gamekin {

namespace {

constexpr double kDegeneracyGap = 1e-9;
constexpr double kStabilityMargin = 1e-6;
constexpr double kCycleTolerance = 1e-6;
constexpr std::size_t kTrajectoryWindow = 8;
constexpr std::size_t kMaxCyclePeriod = 6;

double density_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    double d = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) d = std::max(d, std::abs(a(r, c) - b(r, c)));
    return d;
}

void check_states(const GameSystem& system, const std::vector<PlayerState>& states,
                  const char* what) {
    if (states.size() != system.players())
        throw std::invalid_argument(std::string(what) + ": one state per player required");
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i].dim() != system.profile.dim(i))
            throw std::invalid_argument(std::string(what) + ": state dimension mismatch");
}

std::vector<std::size_t> effective_order(const KineticsConfig& config, std::size_t players) {
    if (!config.update_order.empty()) return config.update_order;
    std::vector<std::size_t> order(players);
    for (std::size_t i = 0; i < players; ++i) order[i] = i;
    return order;
}

std::vector<std::vector<double>> snapshot_probabilities(const std::vector<PlayerState>& states) {
    std::vector<std::vector<double>> probs;
    probs.reserve(states.size());
    for (const PlayerState& s : states) probs.push_back(s.diagonal_probabilities());
    return probs;
}

std::vector<double> snapshot_payoffs(const GameSystem& system,
                                     const std::vector<PlayerState>& states) {
    const SystemState joint = system_from_players(states);
    std::vector<double> payoffs;
    payoffs.reserve(system.players());
    for (std::size_t i = 0; i < system.players(); ++i)
        payoffs.push_back(payoff(joint, system.payoffs[i]));
    return payoffs;
}

std::size_t detect_cycle(const std::vector<TrajectorySample>& window) {
    if (window.size() < 2) return 0;
    const std::size_t last = window.size() - 1;
    for (std::size_t period = 1; period <= kMaxCyclePeriod && period <= last; ++period) {
        const TrajectorySample& a = window[last];
        const TrajectorySample& b = window[last - period];
        double diff = 0.0;
        for (std::size_t i = 0; i < a.probabilities.size(); ++i)
            for (std::size_t s = 0; s < a.probabilities[i].size(); ++s)
                diff = std::max(diff, std::abs(a.probabilities[i][s] - b.probabilities[i][s]));
        if (diff <= kCycleTolerance) return period;
    }
    return 0;
}

}  // namespace

void KineticsConfig::validate(std::size_t players) const {
    if (std::isnan(beta) || beta < 0.0)
        throw std::invalid_argument("KineticsConfig: beta must be >= 0 or +infinity");
    if (!(tolerance > 0.0)) throw std::invalid_argument("KineticsConfig: tolerance must be > 0");
    if (max_sweeps < 1) throw std::invalid_argument("KineticsConfig: max_sweeps must be >= 1");
    if (update_order.empty()) return;
    if (update_order.size() != players)
        throw std::invalid_argument("KineticsConfig: update_order length mismatch");
    std::vector<bool> seen(players, false);
    for (std::size_t p : update_order) {
        if (p >= players || seen[p])
            throw std::invalid_argument("KineticsConfig: update_order not a permutation");
        seen[p] = true;
    }
}

bool GameSystem::diagonal() const {
    for (const PayoffMatrix& p : payoffs)
        if (!p.diagonal) return false;
    return true;
}

GameSystem make_system(const ClassicalGame& game) {
    std::vector<PayoffMatrix> payoffs;
    payoffs.reserve(game.players());
    for (std::size_t i = 0; i < game.players(); ++i)
        payoffs.push_back(classical_payoff_matrix(game, i));
    return GameSystem{game.profile(), std::move(payoffs)};
}

GameSystem make_system(const QuantumGameSpec& spec) {
    std::vector<PayoffMatrix> payoffs;
    payoffs.reserve(spec.players());
    for (std::size_t i = 0; i < spec.players(); ++i)
        payoffs.push_back(quantum_payoff_matrix(spec, i));
    return GameSystem{spec.profile(), std::move(payoffs)};
}

GameSystem make_system(DimensionProfile profile, std::vector<ComplexMatrix> matrices) {
    if (matrices.size() != profile.players())
        throw std::invalid_argument("make_system: one payoff matrix per player required");
    std::vector<PayoffMatrix> payoffs;
    payoffs.reserve(matrices.size());
    for (std::size_t i = 0; i < matrices.size(); ++i) {
        ComplexMatrix& m = matrices[i];
        if (!m.square() || m.rows() != profile.total())
            throw std::invalid_argument("make_system: payoff matrix side does not match profile");
        if (m.hermiticity_defect() > 1e-9 * std::max(1.0, m.max_abs()))
            throw std::invalid_argument("make_system: payoff matrix not Hermitian");
        ComplexMatrix sym(m.rows(), m.cols());
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (std::size_t c = 0; c < m.cols(); ++c)
                sym(r, c) = 0.5 * (m(r, c) + std::conj(m(c, r)));
        const bool diag = sym.exactly_diagonal();
        payoffs.push_back(PayoffMatrix{std::move(sym), i, diag});
    }
    return GameSystem{std::move(profile), std::move(payoffs)};
}

GameSystem make_system(const BuiltinGame& game) {
    return std::visit([](const auto& g) { return make_system(g); }, game);
}

std::vector<PlayerState> uniform_states(const DimensionProfile& profile) {
    std::vector<PlayerState> states;
    states.reserve(profile.players());
    for (std::size_t i = 0; i < profile.players(); ++i) {
        const std::size_t l = profile.dim(i);
        states.push_back(mixture_state(std::vector<double>(l, 1.0 / double(l))));
    }
    return states;
}

ComplexMatrix reduced_payoff(const PayoffMatrix& h, const std::vector<PlayerState>& states,
                             const DimensionProfile& profile) {
    if (!h.h.square() || h.h.rows() != profile.total())
        throw std::invalid_argument("reduced_payoff: matrix side does not match profile");
    if (h.owner >= profile.players())
        throw std::invalid_argument("reduced_payoff: owner out of range");
    if (states.size() != profile.players())
        throw std::invalid_argument("reduced_payoff: one state per player required");
    for (std::size_t j = 0; j < states.size(); ++j)
        if (states[j].dim() != profile.dim(j))
            throw std::invalid_argument("reduced_payoff: state dimension mismatch");

    ComplexMatrix embedded = (h.owner == 0) ? ComplexMatrix::identity(profile.dim(0))
                                            : states[0].density();
    for (std::size_t j = 1; j < profile.players(); ++j)
        embedded = kron(embedded, (j == h.owner) ? ComplexMatrix::identity(profile.dim(j))
                                                 : states[j].density());
    return partial_trace(embedded * h.h, profile, h.owner);
}

PlayerState gibbs_update(const ComplexMatrix& h_r, double beta) {
    if (!(std::isinf(beta) && beta > 0.0))
        return PlayerState::from_density(gibbs_exp(h_r, beta));

    const std::size_t n = h_r.rows();
    if (h_r.exactly_diagonal()) {
        const std::vector<cplx> diag = h_r.diagonal_entries();
        double top = diag[0].real();
        for (const cplx& d : diag) top = std::max(top, d.real());
        const double gap = kDegeneracyGap * std::max(1.0, std::abs(top));
        std::vector<std::size_t> winners;
        for (std::size_t k = 0; k < n; ++k)
            if (top - diag[k].real() <= gap) winners.push_back(k);
        ComplexMatrix rho(n, n);
        for (std::size_t k : winners) rho(k, k) = 1.0 / double(winners.size());
        return PlayerState::from_density(std::move(rho));
    }

    const EigenSystem es = eig_hermitian(h_r);
    const double top = es.values.back();
    const double gap = kDegeneracyGap * std::max(1.0, std::abs(top));
    std::vector<std::size_t> winners;
    for (std::size_t k = 0; k < n; ++k)
        if (top - es.values[k] <= gap) winners.push_back(k);

    ComplexMatrix rho(n, n);
    const double weight = 1.0 / double(winners.size());
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r; c < n; ++c) {
            cplx s = 0.0;
            for (std::size_t k : winners) s += es.vectors(r, k) * std::conj(es.vectors(c, k));
            rho(r, c) = s * weight;
            if (c != r) rho(c, r) = std::conj(rho(r, c));
        }
    return PlayerState::from_density(std::move(rho));
}

double sweep_once(const GameSystem& system, std::vector<PlayerState>& states,
                  const KineticsConfig& config) {
    config.validate(system.players());
    check_states(system, states, "sweep_once");

    const std::vector<std::size_t> order = effective_order(config, system.players());
    const std::vector<PlayerState> before = states;
    const std::vector<PlayerState>& read_from =
        (config.mode == UpdateMode::parallel) ? before : states;

    double residual = 0.0;
    for (std::size_t i : order) {
        const ComplexMatrix h_r = reduced_payoff(system.payoffs[i], read_from, system.profile);
        PlayerState next = gibbs_update(h_r, config.beta);
        residual = std::max(residual, density_diff(next.density(), states[i].density()));
        states[i] = std::move(next);
    }
    return residual;
}

FixedPointReport iterate(const GameSystem& system, std::vector<PlayerState> initial,
                         const KineticsConfig& config, bool trace) {
    config.validate(system.players());
    check_states(system, initial, "iterate");

    FixedPointReport report;
    report.quantum_finite_beta = !system.diagonal() && std::isfinite(config.beta);

    std::vector<PlayerState> states = std::move(initial);
    double residual = 0.0;
    std::size_t sweeps = 0;
    bool converged = false;

    while (sweeps < config.max_sweeps) {
        residual = sweep_once(system, states, config);
        ++sweeps;

        TrajectorySample sample;
        sample.sweep = sweeps;
        sample.probabilities = snapshot_probabilities(states);
        sample.payoffs = snapshot_payoffs(system, states);
        sample.residual = residual;
        report.trajectory.push_back(std::move(sample));
        if (!trace && report.trajectory.size() > kTrajectoryWindow)
            report.trajectory.erase(report.trajectory.begin());

        if (residual <= config.tolerance) {
            converged = true;
            break;
        }
    }

    report.states = std::move(states);
    report.payoffs = snapshot_payoffs(system, report.states);
    report.converged = converged;
    report.sweeps_used = sweeps;
    report.residual = residual;
    if (!converged) {
        const std::size_t from = report.trajectory.size() > kTrajectoryWindow
                                     ? report.trajectory.size() - kTrajectoryWindow
                                     : 0;
        const std::vector<TrajectorySample> window(report.trajectory.begin() + from,
                                                   report.trajectory.end());
        report.cycle_period = detect_cycle(window);
    }
    return report;
}

StabilityReport stability(const GameSystem& system, const std::vector<PlayerState>& states,
                          const KineticsConfig& config, double fd_step) {
    config.validate(system.players());
    check_states(system, states, "stability");
    if (!system.diagonal())
        throw std::invalid_argument(
            "stability: quantum (non-diagonal) payoff matrices are out of scope");
    for (const PlayerState& s : states)
        if (!s.density().exactly_diagonal())
            throw std::invalid_argument("stability: quantum (non-diagonal) states are out of scope");
    if (!(fd_step > 0.0)) throw std::invalid_argument("stability: fd_step must be > 0");

    const std::size_t players = system.players();
    std::vector<std::size_t> coord_player, coord_slot;
    for (std::size_t i = 0; i < players; ++i)
        for (std::size_t s = 0; s + 1 < system.profile.dim(i); ++s) {
            coord_player.push_back(i);
            coord_slot.push_back(s);
        }
    const std::size_t n = coord_player.size();

    std::vector<double> base(n);
    for (std::size_t k = 0; k < n; ++k)
        base[k] = states[coord_player[k]].diagonal_probabilities()[coord_slot[k]];

    // coordinates -> per-player probability vectors, dependent slot last;
    // out-of-range probes are clipped and, if needed, renormalized
    const auto build_probs = [&](const std::vector<double>& coords) {
        std::vector<std::vector<double>> probs(players);
        std::size_t idx = 0;
        for (std::size_t i = 0; i < players; ++i) {
            const std::size_t l = system.profile.dim(i);
            probs[i].resize(l);
            double sum = 0.0;
            for (std::size_t s = 0; s + 1 < l; ++s) {
                const double v = std::clamp(coords[idx++], 0.0, 1.0);
                probs[i][s] = v;
                sum += v;
            }
            if (sum > 1.0) {
                for (std::size_t s = 0; s + 1 < l; ++s) probs[i][s] /= sum;
                probs[i][l - 1] = 0.0;
            } else {
                probs[i][l - 1] = 1.0 - sum;
            }
        }
        return probs;
    };

    const auto parallel_map = [&](const std::vector<std::vector<double>>& probs) {
        std::vector<PlayerState> current;
        current.reserve(players);
        for (std::size_t i = 0; i < players; ++i) current.push_back(mixture_state(probs[i]));
        std::vector<double> out(n);
        for (std::size_t i = 0; i < players; ++i) {
            const ComplexMatrix h_r = reduced_payoff(system.payoffs[i], current, system.profile);
            const std::vector<double> next =
                gibbs_update(h_r, config.beta).diagonal_probabilities();
            for (std::size_t k = 0; k < n; ++k)
                if (coord_player[k] == i) out[k] = next[coord_slot[k]];
        }
        return out;
    };

    StabilityReport report;
    report.beta = config.beta;
    report.fd_step = fd_step;
    report.jacobian.assign(n, std::vector<double>(n, 0.0));

    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> plus = base, minus = base;
        plus[k] += fd_step;
        minus[k] -= fd_step;
        const auto probs_plus = build_probs(plus);
        const auto probs_minus = build_probs(minus);
        const double applied = probs_plus[coord_player[k]][coord_slot[k]] -
                               probs_minus[coord_player[k]][coord_slot[k]];
        if (std::abs(applied) < 1e-300) continue;
        const std::vector<double> f_plus = parallel_map(probs_plus);
        const std::vector<double> f_minus = parallel_map(probs_minus);
        for (std::size_t r = 0; r < n; ++r)
            report.jacobian[r][k] = (f_plus[r] - f_minus[r]) / applied;
    }

    double radius = 0.0;
    if (n > 0) {
        Eigen::MatrixXd j(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c)
                j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    report.jacobian[r][c];
        const Eigen::EigenSolver<Eigen::MatrixXd> solver(j, false);
        radius = solver.eigenvalues().cwiseAbs().maxCoeff();
    }
    report.spectral_radius = radius;
    if (radius < 1.0 - kStabilityMargin)
        report.classification = Stability::stable;
    else if (radius > 1.0 + kStabilityMargin)
        report.classification = Stability::unstable;
    else
        report.classification = Stability::marginal;
    return report;
}

std::vector<BetaSweepRow> beta_sweep(const GameSystem& system, const std::vector<double>& betas,
                                     const std::vector<PlayerState>& initial,
                                     const KineticsConfig& config, bool warm_start,
                                     bool with_stability) {
    if (betas.empty()) throw std::invalid_argument("beta_sweep: empty grid");
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (std::isnan(betas[i]) || betas[i] < 0.0)
            throw std::invalid_argument("beta_sweep: beta must be >= 0 or +infinity");
        if (i > 0 && !(betas[i] > betas[i - 1]))
            throw std::invalid_argument("beta_sweep: grid must be strictly ascending");
    }
    check_states(system, initial, "beta_sweep");

    std::vector<BetaSweepRow> rows;
    rows.reserve(betas.size());
    std::vector<PlayerState> carried = initial;
    for (const double beta : betas) {
        KineticsConfig point = config;
        point.beta = beta;
        FixedPointReport report = iterate(system, warm_start ? carried : initial, point);
        if (warm_start) carried = report.states;
        if (with_stability && system.diagonal())
            report.stability = stability(system, report.states, point);
        rows.push_back(BetaSweepRow{beta, std::move(report)});
    }
    return rows;
}

}  // namespace gamekin
