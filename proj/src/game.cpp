#include "gamekin/game.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gamekin {

namespace {

constexpr double kStateTol = 1e-12;
constexpr double kBasisTol = 1e-10;
constexpr double kPayoffImagTol = 1e-9;

std::vector<std::size_t> strides_of(const DimensionProfile& profile) {
    const std::size_t n = profile.players();
    std::vector<std::size_t> stride(n, 1);
    for (std::size_t j = n; j-- > 1;) stride[j - 1] = stride[j] * profile.dim(j);
    return stride;
}

void check_density(const ComplexMatrix& rho, const std::string& what) {
    if (!rho.square()) throw std::invalid_argument(what + ": not square");
    if (rho.hermiticity_defect() > kStateTol * std::max(1.0, rho.max_abs()))
        throw std::invalid_argument(what + ": not Hermitian");
    const cplx tr = rho.trace();
    if (std::abs(tr - cplx(1.0, 0.0)) > 1e-12)
        throw std::invalid_argument(what + ": trace not 1");
    if (rho.exactly_diagonal()) {
        for (std::size_t k = 0; k < rho.rows(); ++k)
            if (rho(k, k).real() < -1e-12)
                throw std::invalid_argument(what + ": negative probability");
    } else {
        const EigenSystem es = eig_hermitian(rho);
        if (es.values.front() < -1e-12)
            throw std::invalid_argument(what + ": not positive semidefinite");
    }
}

}  // namespace

DimensionProfile ClassicalGame::profile() const {
    std::vector<std::size_t> dims;
    dims.reserve(strategy_labels.size());
    for (const auto& labels : strategy_labels) dims.push_back(labels.size());
    return DimensionProfile(dims);
}

void ClassicalGame::validate() const {
    if (players() < 2) throw std::invalid_argument("ClassicalGame: needs at least 2 players");
    if (payoff_tensors.size() != players())
        throw std::invalid_argument("ClassicalGame: one payoff tensor per player required");
    const std::size_t total = profile().total();
    for (std::size_t i = 0; i < players(); ++i) {
        if (strategy_labels[i].empty())
            throw std::invalid_argument("ClassicalGame: player has no strategies");
        if (payoff_tensors[i].size() != total) {
            std::ostringstream msg;
            msg << "ClassicalGame: payoff tensor " << i + 1 << " has " << payoff_tensors[i].size()
                << " entries, expected " << total;
            throw std::invalid_argument(msg.str());
        }
        for (double v : payoff_tensors[i])
            if (!std::isfinite(v))
                throw std::invalid_argument("ClassicalGame: non-finite payoff entry");
    }
}

DimensionProfile QuantumGameSpec::profile() const {
    std::vector<std::size_t> dims;
    dims.reserve(strategy_bases.size());
    for (const auto& basis : strategy_bases) dims.push_back(basis.size());
    return DimensionProfile(dims);
}

void QuantumGameSpec::validate() const {
    if (players() < 2) throw std::invalid_argument("QuantumGameSpec: needs at least 2 players");
    if (object_dim == 0) throw std::invalid_argument("QuantumGameSpec: object_dim must be positive");
    if (!rho0.square() || rho0.rows() != object_dim)
        throw std::invalid_argument("QuantumGameSpec: rho0 must be object_dim x object_dim");
    if (rho0.hermiticity_defect() > kStateTol * std::max(1.0, rho0.max_abs()))
        throw std::invalid_argument("QuantumGameSpec: rho0 not Hermitian");
    if (std::abs(rho0.trace() - cplx(1.0, 0.0)) > 1e-12)
        throw std::invalid_argument("QuantumGameSpec: rho0 trace not 1");
    {
        const EigenSystem es = eig_hermitian(rho0);
        if (es.values.front() < -1e-12)
            throw std::invalid_argument("QuantumGameSpec: rho0 not positive semidefinite");
    }
    if (payoff_operators.size() != players())
        throw std::invalid_argument("QuantumGameSpec: one payoff operator per player required");
    for (std::size_t i = 0; i < players(); ++i) {
        if (!payoff_operators[i].square() || payoff_operators[i].rows() != object_dim)
            throw std::invalid_argument("QuantumGameSpec: payoff operator has wrong shape");
        if (payoff_operators[i].hermiticity_defect() >
            1e-9 * std::max(1.0, payoff_operators[i].max_abs())) {
            std::ostringstream msg;
            msg << "QuantumGameSpec: payoff operator " << i + 1 << " not Hermitian";
            throw std::invalid_argument(msg.str());
        }
    }
    if (strategy_labels.size() != players())
        throw std::invalid_argument("QuantumGameSpec: one label list per player required");
    for (std::size_t i = 0; i < players(); ++i) {
        const auto& basis = strategy_bases[i];
        if (basis.empty()) throw std::invalid_argument("QuantumGameSpec: empty strategy basis");
        if (strategy_labels[i].size() != basis.size())
            throw std::invalid_argument("QuantumGameSpec: label count does not match basis size");
        for (const ComplexMatrix& op : basis)
            if (!op.square() || op.rows() != object_dim)
                throw std::invalid_argument("QuantumGameSpec: basis operator has wrong shape");
        for (std::size_t a = 0; a < basis.size(); ++a)
            for (std::size_t b = 0; b < basis.size(); ++b) {
                const cplx g = op_inner(basis[a], basis[b]);
                const cplx want = (a == b) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
                if (std::abs(g - want) > kBasisTol) {
                    std::ostringstream msg;
                    msg << "QuantumGameSpec: strategy basis of player " << i + 1
                        << " not orthonormal (gram defect " << std::abs(g - want) << ")";
                    throw std::invalid_argument(msg.str());
                }
            }
    }
    if (!acting_order.empty()) {
        if (acting_order.size() != players())
            throw std::invalid_argument("QuantumGameSpec: acting_order length mismatch");
        std::vector<bool> seen(players(), false);
        for (std::size_t p : acting_order) {
            if (p >= players() || seen[p])
                throw std::invalid_argument("QuantumGameSpec: acting_order not a permutation");
            seen[p] = true;
        }
    }
}

PlayerState PlayerState::from_density(ComplexMatrix rho) {
    check_density(rho, "PlayerState");
    return PlayerState(std::move(rho));
}

std::vector<double> PlayerState::diagonal_probabilities() const {
    std::vector<double> p(rho_.rows());
    for (std::size_t i = 0; i < rho_.rows(); ++i) p[i] = rho_(i, i).real();
    return p;
}

SystemState SystemState::from_density(ComplexMatrix rho, DimensionProfile profile) {
    if (rho.rows() != profile.total())
        throw std::invalid_argument("SystemState: matrix side does not match profile");
    check_density(rho, "SystemState");
    return SystemState(std::move(rho), std::move(profile), false);
}

PayoffMatrix classical_payoff_matrix(const ClassicalGame& game, std::size_t player) {
    game.validate();
    if (player >= game.players())
        throw std::invalid_argument("classical_payoff_matrix: player out of range");
    const std::size_t total = game.profile().total();
    ComplexMatrix h(total, total);
    for (std::size_t s = 0; s < total; ++s) h(s, s) = game.payoff_tensors[player][s];
    return PayoffMatrix{std::move(h), player, true};
}

PayoffMatrix quantum_payoff_matrix(const QuantumGameSpec& spec, std::size_t player) {
    spec.validate();
    if (spec.players() != 2)
        throw std::invalid_argument("quantum_payoff_matrix: only two-player games supported");
    if (player >= 2) throw std::invalid_argument("quantum_payoff_matrix: player out of range");

    const std::size_t first = spec.acting_order.empty() ? 0 : spec.acting_order[0];
    const std::size_t second = spec.acting_order.empty() ? 1 : spec.acting_order[1];
    const auto& basis1 = spec.strategy_bases[0];
    const auto& basis2 = spec.strategy_bases[1];
    const std::size_t l1 = basis1.size();
    const std::size_t l2 = basis2.size();
    const ComplexMatrix& p_op = spec.payoff_operators[player];

    // cache the composed strategy operator s2 s1 per multi-index; rows add rho0
    std::vector<ComplexMatrix> composed;
    composed.reserve(l1 * l2);
    for (std::size_t a = 0; a < l1; ++a)
        for (std::size_t b = 0; b < l2; ++b) {
            const ComplexMatrix& op_first = (first == 0) ? basis1[a] : basis2[b];
            const ComplexMatrix& op_second = (second == 0) ? basis1[a] : basis2[b];
            composed.push_back(op_second * op_first);
        }

    const std::size_t total = l1 * l2;
    const std::size_t d = spec.object_dim;
    ComplexMatrix h(total, total);
    for (std::size_t row = 0; row < total; ++row) {
        const ComplexMatrix left = p_op * (composed[row] * spec.rho0);
        for (std::size_t col = 0; col < total; ++col) {
            // Tr(left * composed[col]^dag) = sum_{r,c} left(r,c) conj(composed[col](r,c))
            cplx t = 0.0;
            for (std::size_t r = 0; r < d; ++r)
                for (std::size_t c = 0; c < d; ++c)
                    t += left(r, c) * std::conj(composed[col](r, c));
            h(row, col) = t;
        }
    }

    const double defect = h.hermiticity_defect();
    if (defect > 1e-10 * std::max(1.0, h.max_abs()))
        throw std::runtime_error("quantum_payoff_matrix: construction lost Hermiticity");
    ComplexMatrix sym = ComplexMatrix(total, total);
    for (std::size_t r = 0; r < total; ++r)
        for (std::size_t c = 0; c < total; ++c)
            sym(r, c) = 0.5 * (h(r, c) + std::conj(h(c, r)));
    const bool diag = sym.exactly_diagonal();
    return PayoffMatrix{std::move(sym), player, diag};
}

ComplexMatrix classical_subblock(const ComplexMatrix& h, const DimensionProfile& profile,
                                 const std::vector<std::vector<std::size_t>>& indices) {
    if (!h.square() || h.rows() != profile.total())
        throw std::invalid_argument("classical_subblock: matrix side does not match profile");
    if (indices.size() != profile.players())
        throw std::invalid_argument("classical_subblock: one index subset per player required");
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i].empty()) throw std::invalid_argument("classical_subblock: empty subset");
        for (std::size_t v : indices[i])
            if (v >= profile.dim(i))
                throw std::invalid_argument("classical_subblock: index out of range");
    }

    const std::vector<std::size_t> stride = strides_of(profile);
    std::vector<std::size_t> flat;
    std::vector<std::size_t> pick(indices.size(), 0);
    while (true) {
        std::size_t s = 0;
        for (std::size_t j = 0; j < indices.size(); ++j) s += indices[j][pick[j]] * stride[j];
        flat.push_back(s);
        std::size_t j = indices.size();
        while (j-- > 0) {
            if (++pick[j] < indices[j].size()) break;
            pick[j] = 0;
        }
        bool done = true;
        for (std::size_t t = 0; t < indices.size(); ++t)
            if (pick[t] != 0) { done = false; break; }
        if (done) break;
    }

    ComplexMatrix out(flat.size(), flat.size());
    for (std::size_t r = 0; r < flat.size(); ++r)
        for (std::size_t c = 0; c < flat.size(); ++c) out(r, c) = h(flat[r], flat[c]);
    return out;
}

PlayerState mixture_state(const std::vector<double>& probs) {
    if (probs.empty()) throw std::invalid_argument("mixture_state: empty probability list");
    double sum = 0.0;
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0.0)
            throw std::invalid_argument("mixture_state: probabilities must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("mixture_state: probabilities must sum to 1");
    ComplexMatrix rho(probs.size(), probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) rho(i, i) = probs[i];
    return PlayerState::from_density(std::move(rho));
}

PlayerState pure_state(const std::vector<cplx>& amplitudes) {
    if (amplitudes.empty()) throw std::invalid_argument("pure_state: empty amplitude list");
    double norm2 = 0.0;
    for (const cplx& x : amplitudes) {
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
            throw std::invalid_argument("pure_state: non-finite amplitude");
        norm2 += std::norm(x);
    }
    if (std::abs(norm2 - 1.0) > 1e-12)
        throw std::invalid_argument("pure_state: amplitudes must have unit norm");
    const std::size_t n = amplitudes.size();
    ComplexMatrix rho(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) rho(r, c) = amplitudes[r] * std::conj(amplitudes[c]);
    return PlayerState::from_density(std::move(rho));
}

SystemState system_from_players(const std::vector<PlayerState>& states) {
    if (states.size() < 2)
        throw std::invalid_argument("system_from_players: needs at least 2 players");
    ComplexMatrix rho = states[0].density();
    std::vector<std::size_t> dims{states[0].dim()};
    for (std::size_t i = 1; i < states.size(); ++i) {
        rho = kron(rho, states[i].density());
        dims.push_back(states[i].dim());
    }
    return SystemState(std::move(rho), DimensionProfile(dims), true);
}

double payoff(const SystemState& state, const PayoffMatrix& h) {
    const ComplexMatrix& rho = state.density();
    if (rho.rows() != h.h.rows()) throw std::invalid_argument("payoff: dimension mismatch");
    cplx e = 0.0;
    // Tr(rho h) without forming the product
    for (std::size_t r = 0; r < rho.rows(); ++r)
        for (std::size_t c = 0; c < rho.cols(); ++c) e += rho(r, c) * h.h(c, r);
    if (std::abs(e.imag()) > kPayoffImagTol) {
        std::ostringstream msg;
        msg << "payoff: imaginary residue " << e.imag() << " (corrupted state/payoff pair)";
        throw std::invalid_argument(msg.str());
    }
    return e.real();
}

double strategy_probability(const PlayerState& state, const std::vector<cplx>& direction) {
    if (direction.size() != state.dim())
        throw std::invalid_argument("strategy_probability: direction dimension mismatch");
    double norm2 = 0.0;
    for (const cplx& x : direction) norm2 += std::norm(x);
    if (std::abs(norm2 - 1.0) > 1e-12)
        throw std::invalid_argument("strategy_probability: direction must be unit norm");
    cplx v = 0.0;
    const ComplexMatrix& rho = state.density();
    for (std::size_t r = 0; r < rho.rows(); ++r)
        for (std::size_t c = 0; c < rho.cols(); ++c)
            v += std::conj(direction[r]) * rho(r, c) * direction[c];
    return v.real();
}

OperatorDecomposition decompose_operator(const ComplexMatrix& a,
                                         const std::vector<ComplexMatrix>& basis) {
    if (basis.empty()) throw std::invalid_argument("decompose_operator: empty basis");
    for (std::size_t k = 0; k < basis.size(); ++k)
        for (std::size_t l = 0; l < basis.size(); ++l) {
            const cplx g = op_inner(basis[k], basis[l]);
            const cplx want = (k == l) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
            if (std::abs(g - want) > kBasisTol)
                throw std::invalid_argument("decompose_operator: basis not orthonormal");
        }

    OperatorDecomposition out;
    out.coefficients.reserve(basis.size());
    ComplexMatrix recon(a.rows(), a.cols());
    for (const ComplexMatrix& op : basis) {
        const cplx c = op_inner(op, a);
        out.coefficients.push_back(c);
        recon += c * op;
    }
    out.residual = (a - recon).max_abs();
    return out;
}

namespace {

ClassicalGame make_classical(std::vector<std::vector<std::string>> labels,
                             std::vector<std::vector<double>> tensors) {
    ClassicalGame g{std::move(labels), std::move(tensors)};
    g.validate();
    return g;
}

QuantumGameSpec make_penny_quantum() {
    const ComplexMatrix nc = ComplexMatrix::identity(2);
    const ComplexMatrix fc(2, 2, {0.0, 1.0, 1.0, 0.0});
    const ComplexMatrix nq(2, 2, {1.0, 0.0, 0.0, -1.0});
    const ComplexMatrix fq(2, 2, {0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0});

    QuantumGameSpec spec;
    spec.object_dim = 2;
    spec.rho0 = ComplexMatrix(2, 2, {1.0, 0.0, 0.0, 0.0});
    spec.payoff_operators = {ComplexMatrix(2, 2, {1.0, 0.0, 0.0, -1.0}),
                             ComplexMatrix(2, 2, {-1.0, 0.0, 0.0, 1.0})};
    spec.strategy_labels = {{"Nc", "Fc", "Nq", "Fq"}, {"Nc", "Fc", "Nq", "Fq"}};
    spec.strategy_bases = {{nc, fc, nq, fq}, {nc, fc, nq, fq}};
    spec.acting_order = {0, 1};
    spec.validate();
    return spec;
}

}  // namespace

BuiltinGame builtin(const std::string& name) {
    if (name == "prisoners-dilemma")
        return make_classical({{"C", "D"}, {"C", "D"}},
                              {{-2.0, -5.0, 0.0, -4.0}, {-2.0, 0.0, -5.0, -4.0}});
    if (name == "hawk-dove")
        return make_classical({{"H", "D"}, {"H", "D"}},
                              {{3.0, 1.0, 4.0, 0.0}, {3.0, 4.0, 1.0, 0.0}});
    if (name == "penny-classical")
        return make_classical({{"N", "F"}, {"N", "F"}},
                              {{1.0, -1.0, -1.0, 1.0}, {-1.0, 1.0, 1.0, -1.0}});
    if (name == "penny-quantum") return make_penny_quantum();
    throw std::invalid_argument("builtin: unknown game '" + name + "'");
}

}  // namespace gamekin
