#include "qae/grover.hpp"

#include <cmath>
#include <utility>

namespace qae {

GroverIterate::GroverIterate(Unitary preparation, GoodStatePredicate predicate, QueryLedger& ledger)
    : preparation_(std::move(preparation)), predicate_(std::move(predicate)), ledger_(&ledger) {}

void apply_sign_flip_good(StateVector& state, const GoodStatePredicate& predicate,
                          QueryLedger* ledger) {
    auto amps = state.amplitudes();
    for (std::uint64_t x = 0; x < amps.size(); ++x) {
        if (predicate(x)) amps[x] = -amps[x];
    }
    if (ledger) ledger->count_oracle(amps.size());
}

void apply_sign_flip_zero(StateVector& state) {
    state.amplitudes()[0] = -state.amplitudes()[0];
}

namespace {

// Block-local body of Q; shared by the ledgered and ledger-free paths.
void grover_block(std::span<Complex> block, const Unitary& prep, const GoodStatePredicate& chi) {
    for (std::uint64_t x = 0; x < block.size(); ++x) {
        if (chi(x)) block[x] = -block[x];
    }
    prep.apply_inverse_block(block);
    block[0] = -block[0];
    prep.apply_forward_block(block);
    for (auto& a : block) a = -a;
}

}  // namespace

void apply_grover_iterate(StateVector& state, const GroverIterate& iterate) {
    if (state.n_qubits() != iterate.span_qubits()) {
        throw RangeError("grover iterate spans " + std::to_string(iterate.span_qubits()) +
                         " qubits but the state has " + std::to_string(state.n_qubits()));
    }
    apply_sign_flip_good(state, iterate.predicate(), &iterate.ledger());
    iterate.preparation().apply_inverse(state);
    iterate.ledger().count_a_inverse();
    apply_sign_flip_zero(state);
    iterate.preparation().apply(state);
    iterate.ledger().count_a();
    for (auto& a : state.amplitudes()) a = -a;
}

Unitary GroverIterate::as_unitary() const {
    const Unitary prep = preparation_;
    const GoodStatePredicate chi = predicate_;
    auto fwd = [prep, chi](std::span<Complex> block) { grover_block(block, prep, chi); };
    // Q^-1 = S_chi A S_0 A^-1 (each reflection is its own inverse).
    auto inv = [prep, chi](std::span<Complex> block) {
        for (auto& a : block) a = -a;
        prep.apply_inverse_block(block);
        block[0] = -block[0];
        prep.apply_forward_block(block);
        for (std::uint64_t x = 0; x < block.size(); ++x) {
            if (chi(x)) block[x] = -block[x];
        }
    };
    return Unitary(preparation_.span_qubits(), std::move(fwd), std::move(inv), "Q");
}

std::uint64_t amplification_iterations(double assumed_p, IterationStrategy strategy) {
    if (!(assumed_p > 0.0) || assumed_p > 1.0) {
        throw ConfigError("assumed probability must lie in (0, 1]");
    }
    if (strategy == IterationStrategy::table_sqrt) {
        return static_cast<std::uint64_t>(std::ceil(std::sqrt(1.0 / assumed_p) - 1e-12));
    }
    const double theta = std::asin(std::sqrt(assumed_p));
    return static_cast<std::uint64_t>(std::floor((PI / 4.0) / theta + 1e-12));
}

AmplifyOutcome amplify_assuming(const GroverIterate& iterate, double assumed_p, Rng& rng,
                                const StateFactory& state_factory, IterationStrategy strategy) {
    const std::uint64_t m = amplification_iterations(assumed_p, strategy);

    StateVector state = state_factory ? state_factory() : prepare_zero(iterate.span_qubits());
    iterate.preparation().apply(state);
    iterate.ledger().count_a();

    for (std::uint64_t i = 0; i < m; ++i) apply_grover_iterate(state, iterate);

    const QubitRange full{0, state.n_qubits()};
    const MeasurementOutcome out = measure(state, full, rng);
    iterate.ledger().count_measurement();

    const bool good = iterate.predicate()(out.basis_index);
    iterate.ledger().count_oracle();
    return AmplifyOutcome{good, out, m};
}

}  // namespace qae
