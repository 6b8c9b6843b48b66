#pragma once

// Entanglement measures for pure three-qubit states: pairwise concurrences of
// the reduced two-qubit states, one-versus-rest concurrence, three-tangle and
// the concurrence sum.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "vaidman/linalg.hpp"
#include "vaidman/qcore.hpp"

namespace vaidman {

/// Spectral values below this (in squared units) are treated as exact zeros
/// before square roots are taken. Reduced states of three-qubit pure states
/// are rank deficient, and sqrt() would otherwise turn 1e-17 round-off into
/// 1e-8 errors in the concurrence.
inline constexpr double kSpectralFloor = 1e-13;

/// |<psi| sigma_y (x) sigma_y |psi*>| for a two-qubit pure state.
inline double concurrence_pure2(const StateVector& state) {
    if (state.num_qubits() != 2) {
        throw StateError("concurrence_pure2 needs a two-qubit state");
    }
    // sigma_y (x) sigma_y maps |00> -> -|11>, |11> -> -|00>, |01> -> |10>, |10> -> |01>.
    std::array<Complex, 4> flipped{};
    flipped[0b11] = -std::conj(state[0b00]);
    flipped[0b00] = -std::conj(state[0b11]);
    flipped[0b10] = std::conj(state[0b01]);
    flipped[0b01] = std::conj(state[0b10]);
    Complex overlap{};
    for (std::size_t i = 0; i < 4; ++i) {
        overlap += std::conj(state[i]) * flipped[i];
    }
    return std::clamp(std::abs(overlap), 0.0, 1.0);
}

/// Wootters concurrence max(0, l1 - l2 - l3 - l4), where l_i are the
/// decreasing square roots of the eigenvalues of rho * rho~ and
/// rho~ = (sy (x) sy) rho* (sy (x) sy). The l_i^2 are obtained as the
/// spectrum of the Hermitian sqrt(rho) rho~ sqrt(rho).
inline double concurrence_mixed2(const DensityMatrix& rho) {
    if (rho.num_qubits() != 2) {
        throw StateError("concurrence_mixed2 needs a two-qubit density matrix");
    }
    constexpr std::size_t d = 4;
    // sy (x) sy in the computational basis: anti-diagonal (-1, 1, 1, -1).
    constexpr std::array<double, 4> flip_sign{-1.0, 1.0, 1.0, -1.0};
    std::vector<Complex> tilde(d * d);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            tilde[r * d + c] = flip_sign[r] * flip_sign[c] * std::conj(rho(3 - r, 3 - c));
        }
    }
    auto sqrt_rho = linalg::hermitian_function(rho.entries(), d, [](double mu) {
        return mu > kSpectralFloor ? std::sqrt(mu) : 0.0;
    });
    auto m = linalg::matmul(linalg::matmul(sqrt_rho, tilde, d), sqrt_rho, d);
    auto mu = linalg::hermitian_eigenvalues(m, d);
    std::array<double, 4> l{};
    for (std::size_t k = 0; k < d; ++k) {
        l[k] = mu[k] > kSpectralFloor ? std::sqrt(mu[k]) : 0.0;
    }
    std::sort(l.begin(), l.end(), std::greater<>());
    return std::clamp(l[0] - l[1] - l[2] - l[3], 0.0, 1.0);
}

inline void require_three_qubits(const StateVector& s, const char* what) {
    if (s.num_qubits() != 3) {
        throw StateError(std::string(what) + " needs a three-qubit state");
    }
}

/// C_{P(QR)} = 2 sqrt(det rho_P) for a pure three-qubit state.
inline double one_rest_concurrence(const StateVector& state, std::size_t pivot) {
    require_three_qubits(state, "one_rest_concurrence");
    auto rho = reduced_density(state, {pivot});
    double det = (rho(0, 0) * rho(1, 1) - rho(0, 1) * rho(1, 0)).real();
    return std::clamp(2.0 * std::sqrt(std::max(det, 0.0)), 0.0, 1.0);
}

/// Concurrence of the two-qubit reduction onto qubits p and q.
inline double pairwise_concurrence(const StateVector& state, std::size_t p, std::size_t q) {
    require_three_qubits(state, "pairwise_concurrence");
    return concurrence_mixed2(reduced_density(state, {p, q}));
}

struct TangleReport {
    double c_one_rest = 0.0;
    double c_pq = 0.0;
    double c_pr = 0.0;
    double tau = 0.0;
    std::size_t pivot_qubit = 0;
};

/// tau = C_{P(QR)}^2 - C_{PQ}^2 - C_{PR}^2 with P = pivot.
inline TangleReport three_tangle(const StateVector& state, std::size_t pivot = 0) {
    require_three_qubits(state, "three_tangle");
    if (pivot > 2) {
        throw QubitIndexError("three_tangle: pivot must be 0, 1 or 2");
    }
    const std::size_t q = (pivot + 1) % 3;
    const std::size_t r = (pivot + 2) % 3;
    TangleReport rep;
    rep.pivot_qubit = pivot;
    rep.c_one_rest = one_rest_concurrence(state, pivot);
    rep.c_pq = pairwise_concurrence(state, pivot, q);
    rep.c_pr = pairwise_concurrence(state, pivot, r);
    double tau = rep.c_one_rest * rep.c_one_rest - rep.c_pq * rep.c_pq - rep.c_pr * rep.c_pr;
    if (tau < -kNormTolerance) {
        throw NumericalError("three-tangle below sanity bound: " + std::to_string(tau));
    }
    rep.tau = std::clamp(tau, 0.0, 1.0);
    return rep;
}

/// C_AB + C_BC + C_CA
inline double concurrence_sum(const StateVector& state) {
    require_three_qubits(state, "concurrence_sum");
    return pairwise_concurrence(state, 0, 1) + pairwise_concurrence(state, 1, 2) + pairwise_concurrence(state, 0, 2);
}

}  // namespace vaidman
