#pragma once
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qae/errors.hpp"
#include "qae/rng.hpp"

namespace qae {

using Complex = std::complex<double>;

constexpr double PI = 3.14159265358979323846264338327950288;

// Qubit ordering convention used everywhere in this project:
// qubit 0 is the least-significant bit of the basis index, so basis state
// |x> assigns bit k of x to qubit k. A register {first, size} reads its
// value with qubit `first` as the value's least-significant bit.
struct QubitRange {
    int first = 0;
    int size = 0;
};

// Dense statevector over 2^n basis states. Operations mutate in place and
// are not re-entrant; independent states may be processed in parallel.
class StateVector {
public:
    static constexpr int kDefaultMaxQubits = 22;

    explicit StateVector(int n_qubits, int max_qubits = kDefaultMaxQubits);

    int n_qubits() const { return n_qubits_; }
    std::uint64_t dimension() const { return std::uint64_t{1} << n_qubits_; }

    std::span<Complex> amplitudes() { return amps_; }
    std::span<const Complex> amplitudes() const { return amps_; }
    Complex amplitude(std::uint64_t basis_index) const { return amps_[basis_index]; }

    double norm_squared() const;
    // Probability of measuring `value` on a register (marginal over the rest).
    double register_probability(QubitRange reg, std::uint64_t value) const;

    void check_register(QubitRange reg) const;

private:
    int n_qubits_;
    std::vector<Complex> amps_;
};

struct MeasurementOutcome {
    std::uint64_t basis_index = 0;  // value read off the measured register
    bool collapsed = false;         // true if the state collapsed, false if merely sampled
};

// Opaque reversible transformation acting on the low `span_qubits` qubits of
// a state. On wider states it acts as U (x) I on every contiguous block of
// 2^span amplitudes, which is what tensoring identity onto higher qubits means
// under the LSB-first convention.
class Unitary {
public:
    using SpanFn = std::function<void(std::span<Complex>)>;

    Unitary() = default;
    Unitary(int span_qubits, SpanFn forward, SpanFn inverse, std::string label = {});

    int span_qubits() const { return span_qubits_; }
    const std::string& label() const { return label_; }

    void apply(StateVector& state) const;
    void apply_inverse(StateVector& state) const;

    // Single-block application, used by controlled-power sweeps.
    void apply_forward_block(std::span<Complex> block) const { forward_(block); }
    void apply_inverse_block(std::span<Complex> block) const { inverse_(block); }

private:
    int span_qubits_ = 0;
    SpanFn forward_;
    SpanFn inverse_;
    std::string label_;
};

// |0...0> on n qubits. Throws CapacityError outside [1, max_qubits].
StateVector prepare_zero(int n_qubits, int max_qubits = StateVector::kDefaultMaxQubits);

enum class QftMethod { direct, butterfly };

// F_M on a contiguous register (M = 2^size): |x> -> (1/sqrt(M)) sum_y e^{2 pi i x y / M} |y>.
// The direct O(M^2) transform is the reference path; the butterfly path is an
// equivalent fast circuit.
void apply_qft(StateVector& state, QubitRange reg, QftMethod method = QftMethod::direct);
void apply_inverse_qft(StateVector& state, QubitRange reg, QftMethod method = QftMethod::direct);

// lambda_M(U): |j>|y> -> |j> U^j |y> for control value j. The control register
// must sit directly above the target span: reg.first == target_op.span_qubits().
// Higher qubits (above the control) are spectators.
void apply_controlled_powers(StateVector& state, QubitRange control, const Unitary& target_op);

// Measure a register. Outcome r is drawn with probability equal to the summed
// |amplitude|^2 over basis states whose register bits read r. With collapse,
// the state is projected and renormalized; throws NumericError on a
// zero-norm state.
MeasurementOutcome measure(StateVector& state, QubitRange reg, Rng& rng, bool collapse = true);

// Non-collapsing draw from the same distribution.
MeasurementOutcome sample(const StateVector& state, QubitRange reg, Rng& rng);

}  // namespace qae
