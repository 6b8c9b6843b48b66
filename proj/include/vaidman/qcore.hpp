#pragma once

// Dense state vectors over one to three qubits and projective single-qubit
// measurement in the X, Y, Z and lambda-parametrized bases.
//
// Index convention: qubit 0 (Alice) is the most significant bit of the
// amplitude index, so amps[0b100] is the amplitude of |100> = |1>_A|0>_B|0>_C.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vaidman/errors.hpp"
#include "vaidman/linalg.hpp"

namespace vaidman {

inline constexpr double kNormTolerance = 1e-9;
inline constexpr std::size_t kMaxQubits = 3;
/// Branches with probability at or below this carry no post-measurement state.
inline constexpr double kZeroProbability = 1e-14;

namespace detail {

inline std::size_t bit_shift(std::size_t num_qubits, std::size_t qubit) { return num_qubits - 1 - qubit; }

inline bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace detail

class StateVector {
  public:
    StateVector(std::size_t num_qubits, std::span<const Complex> amps) : num_qubits_(0) {
        if (num_qubits < 1 || num_qubits > kMaxQubits) {
            throw StateError("state vectors hold 1 to 3 qubits, got " + std::to_string(num_qubits));
        }
        std::size_t dim = std::size_t{1} << num_qubits;
        if (amps.size() != dim) {
            throw StateError("expected " + std::to_string(dim) + " amplitudes, got " + std::to_string(amps.size()));
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            if (!detail::finite(amps[i])) {
                throw StateError("non-finite amplitude at index " + std::to_string(i));
            }
            amps_[i] = amps[i];
            norm += std::norm(amps[i]);
        }
        if (std::abs(norm - 1.0) > kNormTolerance) {
            throw StateError("state is not normalized (squared norm " + std::to_string(norm) + ")");
        }
        num_qubits_ = static_cast<std::uint8_t>(num_qubits);
    }

    StateVector(std::size_t num_qubits, std::initializer_list<Complex> amps)
        : StateVector(num_qubits, std::span<const Complex>(amps.begin(), amps.size())) {}

    static StateVector basis_state(std::size_t num_qubits, std::size_t index) {
        std::array<Complex, 8> a{};
        if (num_qubits < 1 || num_qubits > kMaxQubits || index >= (std::size_t{1} << num_qubits)) {
            throw StateError("basis index out of range");
        }
        a[index] = 1.0;
        return StateVector(num_qubits, std::span<const Complex>(a.data(), std::size_t{1} << num_qubits));
    }

    std::size_t num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return std::size_t{1} << num_qubits_; }
    std::span<const Complex> amps() const { return {amps_.data(), dim()}; }
    Complex operator[](std::size_t i) const { return amps_[i]; }

    double norm_squared() const {
        double n = 0.0;
        for (auto a : amps()) {
            n += std::norm(a);
        }
        return n;
    }

    /// Bit-exact equality of qubit count and amplitudes.
    friend bool operator==(const StateVector& a, const StateVector& b) {
        return a.num_qubits_ == b.num_qubits_ && std::equal(a.amps().begin(), a.amps().end(), b.amps().begin());
    }

  private:
    std::uint8_t num_qubits_;
    std::array<Complex, 8> amps_{};
};

/// <a|b>
inline Complex inner(const StateVector& a, const StateVector& b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw StateError("inner product of states with different qubit counts");
    }
    Complex s{};
    for (std::size_t i = 0; i < a.dim(); ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

inline double fidelity(const StateVector& a, const StateVector& b) { return std::norm(inner(a, b)); }

enum class BasisKind : std::uint8_t { X, Y, Z, Lambda };

inline std::string_view to_string(BasisKind k) {
    switch (k) {
        case BasisKind::X:
            return "X";
        case BasisKind::Y:
            return "Y";
        case BasisKind::Z:
            return "Z";
        case BasisKind::Lambda:
            return "L";
    }
    return "?";
}

/// A single-qubit projective basis. The angle is present iff kind == Lambda.
struct MeasurementBasis {
    BasisKind kind = BasisKind::Z;
    std::optional<double> lambda_angle;

    static MeasurementBasis x() { return {BasisKind::X, std::nullopt}; }
    static MeasurementBasis y() { return {BasisKind::Y, std::nullopt}; }
    static MeasurementBasis z() { return {BasisKind::Z, std::nullopt}; }
    static MeasurementBasis lambda(double angle) { return {BasisKind::Lambda, angle}; }
    static MeasurementBasis of(BasisKind k) {
        if (k == BasisKind::Lambda) {
            throw BasisError("Lambda basis requires an angle");
        }
        return {k, std::nullopt};
    }

    friend bool operator==(const MeasurementBasis&, const MeasurementBasis&) = default;
};

using Ket1 = std::array<Complex, 2>;

/// The (first, second) basis kets as raw amplitude pairs. First is the +1
/// eigenvector for X/Y/Z (|0> for Z) and b0 for Lambda.
inline std::array<Ket1, 2> basis_kets(const MeasurementBasis& basis) {
    const double r = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    if (basis.kind != BasisKind::Lambda && basis.lambda_angle.has_value()) {
        throw BasisError("only the Lambda basis carries an angle");
    }
    switch (basis.kind) {
        case BasisKind::X:
            return {Ket1{r, r}, Ket1{r, -r}};
        case BasisKind::Y:
            return {Ket1{r, r * i}, Ket1{r, -r * i}};
        case BasisKind::Z:
            return {Ket1{1.0, 0.0}, Ket1{0.0, 1.0}};
        case BasisKind::Lambda: {
            if (!basis.lambda_angle.has_value()) {
                throw BasisError("Lambda basis without an angle");
            }
            double lam = *basis.lambda_angle;
            if (!std::isfinite(lam)) {
                throw BasisError("Lambda basis angle must be finite");
            }
            // b0 = sin(l)|0> - cos(l)|1>,  b1 = cos(l)|0> + sin(l)|1>
            return {Ket1{std::sin(lam), -std::cos(lam)}, Ket1{std::cos(lam), std::sin(lam)}};
        }
    }
    throw BasisError("unknown basis kind");
}

inline std::pair<StateVector, StateVector> basis_vectors(const MeasurementBasis& basis) {
    auto k = basis_kets(basis);
    return {StateVector(1, k[0]), StateVector(1, k[1])};
}

struct OutcomeBranch {
    BasisKind basis = BasisKind::Z;
    /// 0 for the first listed basis vector (+1 or b0), 1 for the second (-1 or b1).
    int index = 0;
    double probability = 0.0;
    std::optional<StateVector> post_state;

    int sign() const { return index == 0 ? 1 : -1; }

    std::string label() const {
        if (basis == BasisKind::Lambda) {
            return index == 0 ? "b0" : "b1";
        }
        return index == 0 ? "+1" : "-1";
    }
};

inline void require_normalized(const StateVector& s) {
    if (std::abs(s.norm_squared() - 1.0) > kNormTolerance) {
        throw StateError("input state is not normalized");
    }
}

/// Projects `qubit` onto each vector of `basis`. Post-states cover all qubits
/// and are renormalized; zero-probability branches carry none.
inline std::array<OutcomeBranch, 2> measure_single(const StateVector& state, std::size_t qubit,
                                                   const MeasurementBasis& basis) {
    const std::size_t n = state.num_qubits();
    if (qubit >= n) {
        throw QubitIndexError("qubit " + std::to_string(qubit) + " out of range for a " + std::to_string(n) +
                              "-qubit state");
    }
    require_normalized(state);
    const auto kets = basis_kets(basis);
    const std::size_t shift = detail::bit_shift(n, qubit);
    const std::size_t mask = std::size_t{1} << shift;
    const std::size_t dim = state.dim();

    std::array<OutcomeBranch, 2> out;
    for (int k = 0; k < 2; ++k) {
        const Ket1& v = kets[static_cast<std::size_t>(k)];
        std::array<Complex, 8> projected{};
        double prob = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            std::size_t i0 = i & ~mask;
            std::size_t i1 = i | mask;
            Complex overlap = std::conj(v[0]) * state[i0] + std::conj(v[1]) * state[i1];
            projected[i] = v[(i >> shift) & 1U] * overlap;
            prob += std::norm(projected[i]);
        }
        out[static_cast<std::size_t>(k)].basis = basis.kind;
        out[static_cast<std::size_t>(k)].index = k;
        out[static_cast<std::size_t>(k)].probability = prob;
        if (prob > kZeroProbability) {
            double scale = 1.0 / std::sqrt(prob);
            for (std::size_t i = 0; i < dim; ++i) {
                projected[i] *= scale;
            }
            out[static_cast<std::size_t>(k)].post_state.emplace(n, std::span<const Complex>(projected.data(), dim));
        }
    }
    return out;
}

/// One joint outcome of measuring every qubit. Bit (n-1-q) of `branches` is
/// the branch index of qubit q.
struct JointOutcome {
    std::size_t num_qubits = 0;
    std::uint8_t branches = 0;
    double probability = 0.0;

    int branch(std::size_t qubit) const {
        return static_cast<int>((branches >> detail::bit_shift(num_qubits, qubit)) & 1U);
    }
    int sign(std::size_t qubit) const { return branch(qubit) == 0 ? 1 : -1; }
    int product() const {
        int p = 1;
        for (std::size_t q = 0; q < num_qubits; ++q) {
            p *= sign(q);
        }
        return p;
    }
};

/// Probability of every joint outcome when qubit q is measured in bases[q].
/// Entries are ordered by `branches`.
inline std::vector<JointOutcome> joint_distribution(const StateVector& state,
                                                    std::span<const MeasurementBasis> bases) {
    const std::size_t n = state.num_qubits();
    if (bases.size() != n) {
        throw BasisError("need one basis per qubit: got " + std::to_string(bases.size()) + " for " +
                         std::to_string(n) + " qubits");
    }
    require_normalized(state);
    std::array<std::array<Ket1, 2>, kMaxQubits> kets;
    for (std::size_t q = 0; q < n; ++q) {
        kets[q] = basis_kets(bases[q]);
    }
    const std::size_t dim = state.dim();
    std::vector<JointOutcome> out;
    out.reserve(dim);
    for (std::size_t o = 0; o < dim; ++o) {
        Complex amp{};
        for (std::size_t i = 0; i < dim; ++i) {
            Complex w = state[i];
            for (std::size_t q = 0; q < n; ++q) {
                std::size_t sh = detail::bit_shift(n, q);
                w *= std::conj(kets[q][(o >> sh) & 1U][(i >> sh) & 1U]);
            }
            amp += w;
        }
        out.push_back({n, static_cast<std::uint8_t>(o), std::norm(amp)});
    }
    return out;
}

inline std::vector<JointOutcome> joint_distribution(const StateVector& state,
                                                    std::initializer_list<MeasurementBasis> bases) {
    return joint_distribution(state, std::span<const MeasurementBasis>(bases.begin(), bases.size()));
}

/// Expected product of the +/-1 outcome labels.
inline double product_expectation(const StateVector& state, std::span<const MeasurementBasis> bases) {
    double e = 0.0;
    for (const auto& o : joint_distribution(state, bases)) {
        e += o.product() * o.probability;
    }
    return e;
}

inline double product_expectation(const StateVector& state, std::initializer_list<MeasurementBasis> bases) {
    return product_expectation(state, std::span<const MeasurementBasis>(bases.begin(), bases.size()));
}

class DensityMatrix {
  public:
    /// Validates Hermiticity, unit trace and positive semidefiniteness, each to 1e-9.
    DensityMatrix(std::size_t num_qubits, std::vector<Complex> entries)
        : num_qubits_(num_qubits), entries_(std::move(entries)) {
        if (num_qubits < 1 || num_qubits > kMaxQubits) {
            throw StateError("density matrices hold 1 to 3 qubits");
        }
        const std::size_t d = dim();
        if (entries_.size() != d * d) {
            throw StateError("density matrix has wrong number of entries");
        }
        Complex tr{};
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
                if (!detail::finite((*this)(r, c))) {
                    throw StateError("non-finite density matrix entry");
                }
                if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > kNormTolerance) {
                    throw StateError("density matrix is not Hermitian");
                }
            }
            tr += (*this)(r, r);
        }
        if (std::abs(tr - Complex(1.0, 0.0)) > kNormTolerance) {
            throw StateError("density matrix trace is not 1");
        }
        for (double ev : eigenvalues()) {
            if (ev < -kNormTolerance) {
                throw StateError("density matrix is not positive semidefinite");
            }
        }
    }

    static DensityMatrix pure(const StateVector& s) {
        const std::size_t d = s.dim();
        std::vector<Complex> e(d * d);
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
                e[r * d + c] = s[r] * std::conj(s[c]);
            }
        }
        return DensityMatrix(s.num_qubits(), std::move(e));
    }

    std::size_t num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return std::size_t{1} << num_qubits_; }
    Complex operator()(std::size_t r, std::size_t c) const { return entries_[r * dim() + c]; }
    std::span<const Complex> entries() const { return entries_; }

    /// Ascending.
    std::vector<double> eigenvalues() const { return linalg::hermitian_eigenvalues(entries_, dim()); }

  private:
    std::size_t num_qubits_;
    std::vector<Complex> entries_;
};

/// Traces out every qubit not in `keep`. Kept qubits appear in ascending
/// index order, the lowest index as the most significant bit.
inline DensityMatrix reduced_density(const StateVector& state, std::span<const std::size_t> keep) {
    const std::size_t n = state.num_qubits();
    if (keep.empty()) {
        throw ParameterError("reduced_density: keep set is empty");
    }
    std::vector<std::size_t> kept(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    if (std::adjacent_find(kept.begin(), kept.end()) != kept.end()) {
        throw ParameterError("reduced_density: duplicate qubit in keep set");
    }
    if (kept.back() >= n) {
        throw QubitIndexError("reduced_density: qubit index out of range");
    }
    std::vector<std::size_t> traced;
    for (std::size_t q = 0; q < n; ++q) {
        if (!std::binary_search(kept.begin(), kept.end(), q)) {
            traced.push_back(q);
        }
    }
    auto compose = [&](std::size_t kept_bits, std::size_t traced_bits) {
        std::size_t idx = 0;
        for (std::size_t j = 0; j < kept.size(); ++j) {
            std::size_t bit = (kept_bits >> (kept.size() - 1 - j)) & 1U;
            idx |= bit << detail::bit_shift(n, kept[j]);
        }
        for (std::size_t j = 0; j < traced.size(); ++j) {
            std::size_t bit = (traced_bits >> (traced.size() - 1 - j)) & 1U;
            idx |= bit << detail::bit_shift(n, traced[j]);
        }
        return idx;
    };
    const std::size_t d = std::size_t{1} << kept.size();
    const std::size_t e = std::size_t{1} << traced.size();
    std::vector<Complex> rho(d * d, Complex{});
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            Complex s{};
            for (std::size_t t = 0; t < e; ++t) {
                s += state[compose(r, t)] * std::conj(state[compose(c, t)]);
            }
            rho[r * d + c] = s;
        }
    }
    return DensityMatrix(kept.size(), std::move(rho));
}

inline DensityMatrix reduced_density(const StateVector& state, std::initializer_list<std::size_t> keep) {
    return reduced_density(state, std::span<const std::size_t>(keep.begin(), keep.size()));
}

}  // namespace vaidman
