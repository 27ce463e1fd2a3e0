#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gamekin/game.hpp"
#include "gamekin/matrix.hpp"

// Fixed-point machinery: each player's state is repeatedly replaced by the
// Gibbs state of its reduced payoff matrix, rho^i <- e^{beta H_R^i}/Z, until
// the sweep residual drops below tolerance. beta = +infinity selects the
// normalized projector onto the top eigenspace instead.

namespace gamekin {

enum class UpdateMode { sequential, parallel };

struct KineticsConfig {
    double beta = 1.0;  // >= 0; +infinity selects the projection rule
    double tolerance = 1e-10;
    std::size_t max_sweeps = 100000;
    UpdateMode mode = UpdateMode::sequential;
    std::vector<std::size_t> update_order;  // 0-based; empty means 0..N-1

    void validate(std::size_t players) const;
};

// A game lowered to iteration form: one Hermitian payoff matrix per player
// on the shared product space.
struct GameSystem {
    DimensionProfile profile;
    std::vector<PayoffMatrix> payoffs;

    std::size_t players() const { return profile.players(); }
    bool diagonal() const;
};

GameSystem make_system(const ClassicalGame& game);
GameSystem make_system(const QuantumGameSpec& spec);
GameSystem make_system(DimensionProfile profile, std::vector<ComplexMatrix> matrices);
GameSystem make_system(const BuiltinGame& game);

std::vector<PlayerState> uniform_states(const DimensionProfile& profile);

struct TrajectorySample {
    std::size_t sweep = 0;
    std::vector<std::vector<double>> probabilities;  // per player, diagonal
    std::vector<double> payoffs;                     // per player
    double residual = 0.0;
};

enum class Stability { stable, unstable, marginal };

struct StabilityReport {
    // one row/column per independent probability coordinate (L_i - 1 per
    // player, in player order)
    std::vector<std::vector<double>> jacobian;
    double spectral_radius = 0.0;
    Stability classification = Stability::marginal;
    double beta = 0.0;
    double fd_step = 0.0;
};

struct FixedPointReport {
    std::vector<PlayerState> states;
    std::vector<double> payoffs;
    bool converged = false;
    std::size_t sweeps_used = 0;
    double residual = 0.0;
    // trailing window (last 8 sweeps), or the full history when traced
    std::vector<TrajectorySample> trajectory;
    // smallest period 1..6 detected over the trailing window when the
    // iteration did not converge; 0 when none
    std::size_t cycle_period = 0;
    // finite-beta iteration of a non-diagonal (quantum) game is heuristic:
    // mixture outputs are allowed but their game-theoretic reading is weak
    bool quantum_finite_beta = false;
    std::optional<StabilityReport> stability;
};

// H_R^i = Tr_{-i}((rho^1 x .. I_i .. x rho^N) H^i); the owner's slot in
// `states` is ignored. Satisfies Tr^i(rho^i H_R^i) = Tr(rho^s H^i).
ComplexMatrix reduced_payoff(const PayoffMatrix& h, const std::vector<PlayerState>& states,
                             const DimensionProfile& profile);

// finite beta: gibbs_exp; infinite: projector onto the top eigenspace divided
// by its dimension (relative gap below 1e-9 counts as degenerate)
PlayerState gibbs_update(const ComplexMatrix& h_r, double beta);

// One pass over update_order. Sequential mode feeds each update the most
// recent states (Gauss-Seidel); parallel mode responds to the pre-sweep
// states (Jacobi). Returns the max-abs density entry change.
double sweep_once(const GameSystem& system, std::vector<PlayerState>& states,
                  const KineticsConfig& config);

FixedPointReport iterate(const GameSystem& system, std::vector<PlayerState> initial,
                         const KineticsConfig& config, bool trace = false);

// Jacobian of the parallel one-step map over independent diagonal
// probability coordinates, by central differences; classical games only.
StabilityReport stability(const GameSystem& system, const std::vector<PlayerState>& states,
                          const KineticsConfig& config, double fd_step = 1e-6);

struct BetaSweepRow {
    double beta = 0.0;
    FixedPointReport report;
};

// One iterate per grid point (grid ascending). warm_start seeds each point
// with the previous fixed point instead of `initial`. with_stability adds a
// stability report at each converged point of a diagonal system.
std::vector<BetaSweepRow> beta_sweep(const GameSystem& system, const std::vector<double>& betas,
                                     const std::vector<PlayerState>& initial,
                                     const KineticsConfig& config, bool warm_start,
                                     bool with_stability);

}  // namespace gamekin
