#include "qae/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace qae {

StateVector::StateVector(int n_qubits, int max_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > max_qubits) {
        throw CapacityError("qubit count " + std::to_string(n_qubits) +
                            " outside [1, " + std::to_string(max_qubits) + "]");
    }
    amps_.assign(std::uint64_t{1} << n_qubits, Complex{0.0, 0.0});
    amps_[0] = Complex{1.0, 0.0};
}

double StateVector::norm_squared() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
}

void StateVector::check_register(QubitRange reg) const {
    if (reg.size < 1 || reg.first < 0 || reg.first + reg.size > n_qubits_) {
        throw RangeError("register [" + std::to_string(reg.first) + ", " +
                         std::to_string(reg.first + reg.size) + ") out of bounds for " +
                         std::to_string(n_qubits_) + " qubits");
    }
}

double StateVector::register_probability(QubitRange reg, std::uint64_t value) const {
    check_register(reg);
    const std::uint64_t mask = ((std::uint64_t{1} << reg.size) - 1) << reg.first;
    const std::uint64_t want = value << reg.first;
    double p = 0.0;
    for (std::uint64_t x = 0; x < dimension(); ++x) {
        if ((x & mask) == want) p += std::norm(amps_[x]);
    }
    return p;
}

Unitary::Unitary(int span_qubits, SpanFn forward, SpanFn inverse, std::string label)
    : span_qubits_(span_qubits),
      forward_(std::move(forward)),
      inverse_(std::move(inverse)),
      label_(std::move(label)) {}

namespace {

void for_each_block(StateVector& state, int span, const Unitary::SpanFn& fn) {
    const std::uint64_t block = std::uint64_t{1} << span;
    auto amps = state.amplitudes();
    for (std::uint64_t base = 0; base < amps.size(); base += block) {
        fn(amps.subspan(base, block));
    }
}

}  // namespace

void Unitary::apply(StateVector& state) const {
    if (span_qubits_ > state.n_qubits()) {
        throw RangeError("unitary span " + std::to_string(span_qubits_) +
                         " exceeds state size " + std::to_string(state.n_qubits()));
    }
    for_each_block(state, span_qubits_, forward_);
}

void Unitary::apply_inverse(StateVector& state) const {
    if (span_qubits_ > state.n_qubits()) {
        throw RangeError("unitary span " + std::to_string(span_qubits_) +
                         " exceeds state size " + std::to_string(state.n_qubits()));
    }
    for_each_block(state, span_qubits_, inverse_);
}

StateVector prepare_zero(int n_qubits, int max_qubits) {
    return StateVector(n_qubits, max_qubits);
}

namespace {

// Direct DFT over a register: ~O(2^n * M) but exact and easy to audit.
void qft_direct(StateVector& state, QubitRange reg, bool inverse) {
    const std::uint64_t m = static_cast<std::uint64_t>(reg.size);
    const std::uint64_t M = std::uint64_t{1} << m;
    const double sign = inverse ? -1.0 : 1.0;
    const double scale = 1.0 / std::sqrt(static_cast<double>(M));

    std::vector<Complex> twiddle(M);
    for (std::uint64_t k = 0; k < M; ++k) {
        const double phase = sign * 2.0 * PI * static_cast<double>(k) / static_cast<double>(M);
        twiddle[k] = Complex{std::cos(phase), std::sin(phase)};
    }

    auto amps = state.amplitudes();
    const std::uint64_t dim = state.dimension();
    const std::uint64_t low_mask = (std::uint64_t{1} << reg.first) - 1;
    const std::uint64_t reg_stride = std::uint64_t{1} << reg.first;
    const std::uint64_t rest = dim >> reg.size;

    std::vector<Complex> in(M), out(M);
    for (std::uint64_t r = 0; r < rest; ++r) {
        // Reassemble the basis index from the non-register bits r.
        const std::uint64_t low = r & low_mask;
        const std::uint64_t high = (r & ~low_mask) << reg.size;
        const std::uint64_t base = high | low;

        for (std::uint64_t x = 0; x < M; ++x) in[x] = amps[base + x * reg_stride];
        for (std::uint64_t y = 0; y < M; ++y) {
            Complex acc{0.0, 0.0};
            for (std::uint64_t x = 0; x < M; ++x) acc += twiddle[(x * y) % M] * in[x];
            out[y] = acc * scale;
        }
        for (std::uint64_t y = 0; y < M; ++y) amps[base + y * reg_stride] = out[y];
    }
}

void apply_hadamard(StateVector& state, int qubit) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const std::uint64_t half = std::uint64_t{1} << qubit;
    const std::uint64_t stride = half << 1;
    auto amps = state.amplitudes();
    for (std::uint64_t base = 0; base < amps.size(); base += stride) {
        for (std::uint64_t i = 0; i < half; ++i) {
            const Complex a = amps[base + i];
            const Complex b = amps[base + i + half];
            amps[base + i] = (a + b) * inv_sqrt2;
            amps[base + i + half] = (a - b) * inv_sqrt2;
        }
    }
}

// diag(1, e^{i phase}) on `qubit`, applied only where `control` is 1.
void apply_controlled_phase(StateVector& state, int control, int qubit, double phase) {
    const std::uint64_t cbit = std::uint64_t{1} << control;
    const std::uint64_t tbit = std::uint64_t{1} << qubit;
    const Complex w{std::cos(phase), std::sin(phase)};
    auto amps = state.amplitudes();
    for (std::uint64_t x = 0; x < amps.size(); ++x) {
        if ((x & cbit) && (x & tbit)) amps[x] *= w;
    }
}

void swap_qubits(StateVector& state, int qa, int qb) {
    const std::uint64_t abit = std::uint64_t{1} << qa;
    const std::uint64_t bbit = std::uint64_t{1} << qb;
    auto amps = state.amplitudes();
    for (std::uint64_t x = 0; x < amps.size(); ++x) {
        const bool a = (x & abit) != 0;
        const bool b = (x & bbit) != 0;
        if (a && !b) {
            const std::uint64_t y = (x ^ abit) | bbit;
            std::swap(amps[x], amps[y]);
        }
    }
}

// Textbook butterfly circuit; equivalent to qft_direct, used as the fast path.
void qft_butterfly(StateVector& state, QubitRange reg, bool inverse) {
    const int m = reg.size;
    const double sign = inverse ? -1.0 : 1.0;
    if (!inverse) {
        for (int q = m - 1; q >= 0; --q) {
            apply_hadamard(state, reg.first + q);
            for (int k = q - 1; k >= 0; --k) {
                const double phase = sign * 2.0 * PI / static_cast<double>(std::uint64_t{1} << (q - k + 1));
                apply_controlled_phase(state, reg.first + k, reg.first + q, phase);
            }
        }
        for (int i = 0; i < m / 2; ++i) swap_qubits(state, reg.first + i, reg.first + m - 1 - i);
    } else {
        for (int i = 0; i < m / 2; ++i) swap_qubits(state, reg.first + i, reg.first + m - 1 - i);
        for (int q = 0; q < m; ++q) {
            for (int k = 0; k < q; ++k) {
                const double phase = sign * 2.0 * PI / static_cast<double>(std::uint64_t{1} << (q - k + 1));
                apply_controlled_phase(state, reg.first + k, reg.first + q, phase);
            }
            apply_hadamard(state, reg.first + q);
        }
    }
}

}  // namespace

void apply_qft(StateVector& state, QubitRange reg, QftMethod method) {
    state.check_register(reg);
    if (method == QftMethod::direct) {
        qft_direct(state, reg, /*inverse=*/false);
    } else {
        qft_butterfly(state, reg, /*inverse=*/false);
    }
}

void apply_inverse_qft(StateVector& state, QubitRange reg, QftMethod method) {
    state.check_register(reg);
    if (method == QftMethod::direct) {
        qft_direct(state, reg, /*inverse=*/true);
    } else {
        qft_butterfly(state, reg, /*inverse=*/true);
    }
}

void apply_controlled_powers(StateVector& state, QubitRange control, const Unitary& target_op) {
    state.check_register(control);
    const int span = target_op.span_qubits();
    if (control.first < span) {
        throw RangeError("control register overlaps the target span");
    }
    if (control.first != span) {
        throw RangeError("control register must sit directly above the target span");
    }
    const std::uint64_t M = std::uint64_t{1} << control.size;
    const std::uint64_t block = std::uint64_t{1} << span;
    auto amps = state.amplitudes();
    const std::uint64_t blocks = state.dimension() >> span;
    for (std::uint64_t b = 0; b < blocks; ++b) {
        const std::uint64_t j = b & (M - 1);  // control value; higher bits are spectators
        auto slice = amps.subspan(b * block, block);
        for (std::uint64_t rep = 0; rep < j; ++rep) target_op.apply_forward_block(slice);
    }
}

namespace {

MeasurementOutcome draw_register_value(const StateVector& state, QubitRange reg, Rng& rng) {
    const std::uint64_t M = std::uint64_t{1} << reg.size;
    const std::uint64_t mask = (M - 1) << reg.first;

    std::vector<double> probs(M, 0.0);
    auto amps = state.amplitudes();
    for (std::uint64_t x = 0; x < amps.size(); ++x) {
        probs[(x & mask) >> reg.first] += std::norm(amps[x]);
    }
    double total = 0.0;
    for (double p : probs) total += p;
    if (total < 1e-12) {
        throw NumericError("measurement on a zero-norm state");
    }

    const double u = rng.uniform_double() * total;
    double acc = 0.0;
    std::uint64_t outcome = M - 1;
    for (std::uint64_t r = 0; r < M; ++r) {
        acc += probs[r];
        if (u < acc) {
            outcome = r;
            break;
        }
    }
    return MeasurementOutcome{outcome, false};
}

}  // namespace

MeasurementOutcome measure(StateVector& state, QubitRange reg, Rng& rng, bool collapse) {
    state.check_register(reg);
    MeasurementOutcome out = draw_register_value(state, reg, rng);
    if (!collapse) return out;

    const std::uint64_t mask = ((std::uint64_t{1} << reg.size) - 1) << reg.first;
    const std::uint64_t want = out.basis_index << reg.first;
    auto amps = state.amplitudes();
    double kept = 0.0;
    for (std::uint64_t x = 0; x < amps.size(); ++x) {
        if ((x & mask) == want) {
            kept += std::norm(amps[x]);
        } else {
            amps[x] = Complex{0.0, 0.0};
        }
    }
    const double scale = 1.0 / std::sqrt(kept);
    for (std::uint64_t x = 0; x < amps.size(); ++x) {
        if ((x & mask) == want) amps[x] *= scale;
    }
    out.collapsed = true;
    return out;
}

MeasurementOutcome sample(const StateVector& state, QubitRange reg, Rng& rng) {
    state.check_register(reg);
    return draw_register_value(state, reg, rng);
}

}  // namespace qae
