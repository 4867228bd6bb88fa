#pragma once
#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>

#include "qae/statevector.hpp"

namespace qae {

// Total boolean verdict over basis indices of the target register.
// Must be deterministic: the same index always yields the same verdict.
using GoodStatePredicate = std::function<bool(std::uint64_t)>;

struct QueryCounts {
    std::uint64_t a_applications = 0;
    std::uint64_t a_inverse_applications = 0;
    std::uint64_t oracle_evaluations = 0;
    std::uint64_t measurements = 0;
};

// Monotone cost counters; the artifact's unit of "running time".
// Counters are atomic so parallel runs may share a ledger; there is no reset.
class QueryLedger {
public:
    void count_a(std::uint64_t k = 1) { a_.fetch_add(k, std::memory_order_relaxed); }
    void count_a_inverse(std::uint64_t k = 1) { a_inv_.fetch_add(k, std::memory_order_relaxed); }
    void count_oracle(std::uint64_t k = 1) { oracle_.fetch_add(k, std::memory_order_relaxed); }
    void count_measurement(std::uint64_t k = 1) { meas_.fetch_add(k, std::memory_order_relaxed); }

    QueryCounts snapshot() const {
        return QueryCounts{a_.load(std::memory_order_relaxed),
                           a_inv_.load(std::memory_order_relaxed),
                           oracle_.load(std::memory_order_relaxed),
                           meas_.load(std::memory_order_relaxed)};
    }

private:
    std::atomic<std::uint64_t> a_{0};
    std::atomic<std::uint64_t> a_inv_{0};
    std::atomic<std::uint64_t> oracle_{0};
    std::atomic<std::uint64_t> meas_{0};
};

// Preparation unitary + good-state predicate + ledger: the operator
// Q = -A S_0 A^-1 S_chi. Immutable except for the ledger.
class GroverIterate {
public:
    GroverIterate(Unitary preparation, GoodStatePredicate predicate, QueryLedger& ledger);

    int span_qubits() const { return preparation_.span_qubits(); }
    const Unitary& preparation() const { return preparation_; }
    const GoodStatePredicate& predicate() const { return predicate_; }
    QueryLedger& ledger() const { return *ledger_; }

    // Q as a plain unitary with no ledger side effects; callers that use it
    // (controlled powers inside Est_Amp) account for their own costs.
    Unitary as_unitary() const;

private:
    Unitary preparation_;
    GoodStatePredicate predicate_;
    QueryLedger* ledger_;
};

// S_chi: negate amplitudes with chi(x) = 1. The simulated oracle sweeps every
// basis index, so the ledger (when given) gains 2^n oracle evaluations.
void apply_sign_flip_good(StateVector& state, const GoodStatePredicate& predicate,
                          QueryLedger* ledger = nullptr);

// S_0: negate the amplitude of |0...0>.
void apply_sign_flip_zero(StateVector& state);

// One application of Q = -A S_0 A^-1 S_chi (S_chi first, literal leading minus).
// Costs exactly one A and one A^-1 on the ledger.
void apply_grover_iterate(StateVector& state, const GroverIterate& iterate);

enum class IterationStrategy {
    table_sqrt,      // m = ceil(sqrt(1 / assumed_p)); default, segment-table arithmetic
    quarter_period,  // m = floor((pi/4) / arcsin(sqrt(assumed_p)))
};

std::uint64_t amplification_iterations(double assumed_p,
                                       IterationStrategy strategy = IterationStrategy::table_sqrt);

struct AmplifyOutcome {
    bool found = false;
    MeasurementOutcome outcome;
    std::uint64_t iterations = 0;  // Grover iterations applied
};

using StateFactory = std::function<StateVector()>;

// Fixed-iteration amplification probe: prepare A|0>, apply Q m(assumed_p)
// times, measure the full register once, and evaluate chi on the outcome.
// Ledger: m+1 A applications (m inside Q plus the preparation), m inverses,
// one measurement, and the oracle sweeps done by each S_chi.
AmplifyOutcome amplify_assuming(const GroverIterate& iterate, double assumed_p, Rng& rng,
                                const StateFactory& state_factory = {},
                                IterationStrategy strategy = IterationStrategy::table_sqrt);

}  // namespace qae
