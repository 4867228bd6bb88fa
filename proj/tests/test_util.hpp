#pragma once
#include <cmath>
#include <complex>
#include <vector>

#include "qae/grover.hpp"
#include "qae/statevector.hpp"

namespace qae::test {

// Dense matrix form of a unitary over n qubits, built column by column.
using DenseMatrix = std::vector<std::vector<Complex>>;

inline DenseMatrix dense_matrix_of(const Unitary& op, int n_qubits) {
    const std::uint64_t dim = std::uint64_t{1} << n_qubits;
    DenseMatrix mat(dim, std::vector<Complex>(dim, Complex{0.0, 0.0}));
    for (std::uint64_t col = 0; col < dim; ++col) {
        std::vector<Complex> basis(dim, Complex{0.0, 0.0});
        basis[col] = Complex{1.0, 0.0};
        op.apply_forward_block(basis);
        for (std::uint64_t row = 0; row < dim; ++row) mat[row][col] = basis[row];
    }
    return mat;
}

inline std::vector<Complex> mat_vec(const DenseMatrix& m, const std::vector<Complex>& v) {
    std::vector<Complex> out(v.size(), Complex{0.0, 0.0});
    for (std::size_t r = 0; r < v.size(); ++r) {
        for (std::size_t c = 0; c < v.size(); ++c) out[r] += m[r][c] * v[c];
    }
    return out;
}

// Random unitary from Gram-Schmidt over a random complex matrix; test oracle only.
inline DenseMatrix random_dense_unitary(int n_qubits, Rng& rng) {
    const std::uint64_t dim = std::uint64_t{1} << n_qubits;
    DenseMatrix cols(dim, std::vector<Complex>(dim));
    for (auto& col : cols) {
        for (auto& a : col) a = Complex{rng.uniform_double() - 0.5, rng.uniform_double() - 0.5};
    }
    for (std::uint64_t c = 0; c < dim; ++c) {
        for (std::uint64_t prev = 0; prev < c; ++prev) {
            Complex dot{0.0, 0.0};
            for (std::uint64_t r = 0; r < dim; ++r) dot += std::conj(cols[prev][r]) * cols[c][r];
            for (std::uint64_t r = 0; r < dim; ++r) cols[c][r] -= dot * cols[prev][r];
        }
        double norm = 0.0;
        for (const auto& a : cols[c]) norm += std::norm(a);
        norm = std::sqrt(norm);
        for (auto& a : cols[c]) a /= norm;
    }
    // cols holds orthonormal columns; transpose into row-major matrix form.
    DenseMatrix mat(dim, std::vector<Complex>(dim));
    for (std::uint64_t r = 0; r < dim; ++r) {
        for (std::uint64_t c = 0; c < dim; ++c) mat[r][c] = cols[c][r];
    }
    return mat;
}

inline Unitary unitary_from_dense(const DenseMatrix& mat, int n_qubits) {
    const std::uint64_t dim = std::uint64_t{1} << n_qubits;
    DenseMatrix inv(dim, std::vector<Complex>(dim));
    for (std::uint64_t r = 0; r < dim; ++r) {
        for (std::uint64_t c = 0; c < dim; ++c) inv[r][c] = std::conj(mat[c][r]);
    }
    auto fwd = [mat](std::span<Complex> block) {
        std::vector<Complex> v(block.begin(), block.end());
        const auto out = mat_vec(mat, v);
        std::copy(out.begin(), out.end(), block.begin());
    };
    auto bwd = [inv](std::span<Complex> block) {
        std::vector<Complex> v(block.begin(), block.end());
        const auto out = mat_vec(inv, v);
        std::copy(out.begin(), out.end(), block.begin());
    };
    return Unitary(n_qubits, std::move(fwd), std::move(bwd), "dense");
}

inline StateVector random_state(int n_qubits, Rng& rng) {
    StateVector s = prepare_zero(n_qubits);
    auto amps = s.amplitudes();
    double norm = 0.0;
    for (auto& a : amps) {
        a = Complex{rng.uniform_double() - 0.5, rng.uniform_double() - 0.5};
        norm += std::norm(a);
    }
    norm = std::sqrt(norm);
    for (auto& a : amps) a /= norm;
    return s;
}

inline double max_amp_diff(const StateVector& a, const StateVector& b) {
    double worst = 0.0;
    for (std::uint64_t i = 0; i < a.dimension(); ++i) {
        worst = std::max(worst, std::abs(a.amplitude(i) - b.amplitude(i)));
    }
    return worst;
}

// Signed good amplitude: inner product with the normalized good component of
// a reference state (A|0> before any iterate). Equals sin((2j+1) theta) for a
// rotation-style preparation.
inline double signed_good_amplitude(const StateVector& state, const StateVector& reference,
                                    const GoodStatePredicate& good) {
    double ref_norm = 0.0;
    for (std::uint64_t i = 0; i < reference.dimension(); ++i) {
        if (good(i)) ref_norm += std::norm(reference.amplitude(i));
    }
    ref_norm = std::sqrt(ref_norm);
    Complex dot{0.0, 0.0};
    for (std::uint64_t i = 0; i < state.dimension(); ++i) {
        if (good(i)) dot += std::conj(reference.amplitude(i) / ref_norm) * state.amplitude(i);
    }
    return dot.real();
}

inline double good_probability(const StateVector& state, const GoodStatePredicate& good) {
    double p = 0.0;
    for (std::uint64_t i = 0; i < state.dimension(); ++i) {
        if (good(i)) p += std::norm(state.amplitude(i));
    }
    return p;
}

}  // namespace qae::test
