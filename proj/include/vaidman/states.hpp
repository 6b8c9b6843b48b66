#pragma once

// Constructors for the GHZ-class, W-class and W_n state families.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "vaidman/qcore.hpp"

namespace vaidman {

/// sin(theta)|000> + cos(theta)|111>. Any finite theta is accepted; the
/// family is usually studied on (0, pi/4].
struct GhzClassParams {
    double theta = std::numbers::pi / 4;

    bool in_reference_range() const { return theta > 0.0 && theta <= std::numbers::pi / 4 + 1e-15; }
};

/// a|100> + b|010> + c|001> with |a|^2 + |b|^2 + |c|^2 = 1.
struct WClassParams {
    Complex a;
    Complex b;
    Complex c;
};

struct WnParams {
    std::int64_t n = 1;
    double gamma = 0.0;
    double delta = 0.0;
};

inline StateVector ghz_class(const GhzClassParams& p) {
    if (!std::isfinite(p.theta)) {
        throw ParameterError("ghz_class: theta must be finite");
    }
    std::array<Complex, 8> a{};
    a[0b000] = std::sin(p.theta);
    a[0b111] = std::cos(p.theta);
    return StateVector(3, a);
}

inline StateVector w_class(const WClassParams& p) {
    double norm = std::norm(p.a) + std::norm(p.b) + std::norm(p.c);
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kNormTolerance) {
        throw StateError("w_class: |a|^2 + |b|^2 + |c|^2 must be 1");
    }
    std::array<Complex, 8> a{};
    a[0b100] = p.a;
    a[0b010] = p.b;
    a[0b001] = p.c;
    return StateVector(3, a);
}

/// Amplitudes (1, sqrt(n) e^{i gamma}, sqrt(n+1) e^{i delta}) / sqrt(2(1+n)).
inline WClassParams wn_amplitudes(const WnParams& p) {
    if (p.n < 1) {
        throw ParameterError("w_n: n must be a positive integer");
    }
    if (!std::isfinite(p.gamma) || !std::isfinite(p.delta)) {
        throw ParameterError("w_n: phases must be finite");
    }
    const double n = static_cast<double>(p.n);
    const double scale = 1.0 / std::sqrt(2.0 * (1.0 + n));
    return {Complex(scale, 0.0), std::polar(std::sqrt(n) * scale, p.gamma),
            std::polar(std::sqrt(n + 1.0) * scale, p.delta)};
}

inline StateVector w_n(const WnParams& p) { return w_class(wn_amplitudes(p)); }

/// (|000> + |111>)/sqrt(2)
inline StateVector standard_ghz() {
    const double r = 1.0 / std::sqrt(2.0);
    std::array<Complex, 8> a{};
    a[0b000] = r;
    a[0b111] = r;
    return StateVector(3, a);
}

/// (|100> + |010> + |001>)/sqrt(3)
inline StateVector standard_w() {
    const double r = 1.0 / std::sqrt(3.0);
    return w_class({r, r, r});
}

}  // namespace vaidman
