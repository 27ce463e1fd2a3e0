#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "gamekin/matrix.hpp"

// Game data model and payoff-matrix construction. A classical payoff table
// becomes a diagonal operator on the product strategy space; a quantum game
// (initial object state, Hermitian payoff operators, per-player operator
// strategy bases) becomes a full Hermitian payoff matrix whose expectation
// Tr(rho_s H) is the payoff.

namespace gamekin {

struct ClassicalGame {
    std::vector<std::vector<std::string>> strategy_labels;  // per player
    // per player, row-major over the strategy multi-index, player 1 slowest
    std::vector<std::vector<double>> payoff_tensors;

    std::size_t players() const { return strategy_labels.size(); }
    DimensionProfile profile() const;
    void validate() const;
};

struct QuantumGameSpec {
    std::size_t object_dim = 0;
    ComplexMatrix rho0;
    std::vector<ComplexMatrix> payoff_operators;             // per player, Hermitian
    std::vector<std::vector<std::string>> strategy_labels;   // per player
    std::vector<std::vector<ComplexMatrix>> strategy_bases;  // per player, orthonormal
    std::vector<std::size_t> acting_order;                   // 0-based, default 0..N-1

    std::size_t players() const { return strategy_bases.size(); }
    DimensionProfile profile() const;
    void validate() const;
};

// Density matrix over one player's strategy basis.
class PlayerState {
public:
    static PlayerState from_density(ComplexMatrix rho);

    const ComplexMatrix& density() const { return rho_; }
    std::size_t dim() const { return rho_.rows(); }
    std::vector<double> diagonal_probabilities() const;

private:
    explicit PlayerState(ComplexMatrix rho) : rho_(std::move(rho)) {}
    ComplexMatrix rho_;
};

// Density matrix over the product basis of all players.
class SystemState {
public:
    static SystemState from_density(ComplexMatrix rho, DimensionProfile profile);

    const ComplexMatrix& density() const { return rho_; }
    const DimensionProfile& profile() const { return profile_; }
    bool product() const { return product_; }

private:
    SystemState(ComplexMatrix rho, DimensionProfile profile, bool product)
        : rho_(std::move(rho)), profile_(std::move(profile)), product_(product) {}
    ComplexMatrix rho_;
    DimensionProfile profile_;
    bool product_;

    friend SystemState system_from_players(const std::vector<PlayerState>& states);
};

struct PayoffMatrix {
    ComplexMatrix h;         // Hermitian, product-space
    std::size_t owner = 0;   // 0-based player index
    bool diagonal = false;   // exactly diagonal (classical construction)
};

PayoffMatrix classical_payoff_matrix(const ClassicalGame& game, std::size_t player);

// Two-player quantum construction. Entry at row S=(s1,s2), column S'=(s1',s2'):
//   H_{SS'} = Tr(P s2 s1 rho0 s1'^dag s2'^dag)
// with the row operators applied to rho0 in acting order and the column
// operators daggered; Hermitian by construction, symmetrized to kill rounding.
PayoffMatrix quantum_payoff_matrix(const QuantumGameSpec& spec, std::size_t player);

// Submatrix of h on the product rows/columns generated by per-player index
// subsets (e.g. the classical {N^c,F^c} block of a quantum payoff matrix).
ComplexMatrix classical_subblock(const ComplexMatrix& h, const DimensionProfile& profile,
                                 const std::vector<std::vector<std::size_t>>& indices);

PlayerState mixture_state(const std::vector<double>& probs);
PlayerState pure_state(const std::vector<cplx>& amplitudes);
SystemState system_from_players(const std::vector<PlayerState>& states);

// Real part of Tr(rho_s h); an imaginary residue above 1e-9 signals a
// corrupted (non-Hermitian) input pair and is an error.
double payoff(const SystemState& state, const PayoffMatrix& h);

// <s|rho|s> for a unit direction vector s.
double strategy_probability(const PlayerState& state, const std::vector<cplx>& direction);

struct OperatorDecomposition {
    std::vector<cplx> coefficients;  // c_k = op_inner(basis_k, a)
    double residual = 0.0;           // max-abs of a - sum c_k basis_k
};

OperatorDecomposition decompose_operator(const ComplexMatrix& a,
                                         const std::vector<ComplexMatrix>& basis);

using BuiltinGame = std::variant<ClassicalGame, QuantumGameSpec>;

// prisoners-dilemma | hawk-dove | penny-classical | penny-quantum
BuiltinGame builtin(const std::string& name);

}  // namespace gamekin
