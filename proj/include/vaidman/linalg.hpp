#pragma once

// Small dense Hermitian eigen-solver used by the density-matrix checks and the
// mixed-state concurrence. Matrices here are at most 8x8.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "vaidman/errors.hpp"

namespace vaidman {

using Complex = std::complex<double>;

namespace linalg {

/// Sweep cap for the cyclic Jacobi iteration.
inline constexpr int kJacobiMaxSweeps = 200;

struct SymmetricEigen {
    std::vector<double> values;   // unsorted, matches column order of `vectors`
    std::vector<double> vectors;  // row-major n x n, column k is the k-th eigenvector
};

/// Cyclic Jacobi for a real symmetric row-major matrix. Iterates until every
/// off-diagonal element is zero to working precision; throws NumericalError
/// when the sweep cap is reached first.
inline SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t n) {
    auto at = [&](std::vector<double>& m, std::size_t r, std::size_t c) -> double& { return m[r * n + c]; };

    SymmetricEigen out;
    out.vectors.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        at(out.vectors, i, i) = 1.0;
    }
    std::vector<double> d(n), b(n), z(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = b[i] = at(a, i, i);
    }

    auto rotate = [&](std::vector<double>& m, double s, double tau, std::size_t i, std::size_t j, std::size_t k,
                      std::size_t l) {
        double g = at(m, i, j);
        double h = at(m, k, l);
        at(m, i, j) = g - s * (h + g * tau);
        at(m, k, l) = h + s * (g - h * tau);
    };

    for (int sweep = 1; sweep <= kJacobiMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += std::abs(at(a, p, q));
            }
        }
        if (off == 0.0) {
            out.values = std::move(d);
            return out;
        }
        double thresh = sweep < 4 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double g = 100.0 * std::abs(at(a, p, q));
                if (sweep > 4 && std::abs(d[p]) + g == std::abs(d[p]) && std::abs(d[q]) + g == std::abs(d[q])) {
                    at(a, p, q) = 0.0;
                } else if (std::abs(at(a, p, q)) > thresh) {
                    double h = d[q] - d[p];
                    double t;
                    if (std::abs(h) + g == std::abs(h)) {
                        t = at(a, p, q) / h;
                    } else {
                        double theta = 0.5 * h / at(a, p, q);
                        t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                        if (theta < 0.0) {
                            t = -t;
                        }
                    }
                    double c = 1.0 / std::sqrt(1.0 + t * t);
                    double s = t * c;
                    double tau = s / (1.0 + c);
                    h = t * at(a, p, q);
                    z[p] -= h;
                    z[q] += h;
                    d[p] -= h;
                    d[q] += h;
                    at(a, p, q) = 0.0;
                    for (std::size_t j = 0; j < p; ++j) {
                        rotate(a, s, tau, j, p, j, q);
                    }
                    for (std::size_t j = p + 1; j < q; ++j) {
                        rotate(a, s, tau, p, j, j, q);
                    }
                    for (std::size_t j = q + 1; j < n; ++j) {
                        rotate(a, s, tau, p, j, q, j);
                    }
                    for (std::size_t j = 0; j < n; ++j) {
                        rotate(out.vectors, s, tau, j, p, j, q);
                    }
                }
            }
        }
        for (std::size_t p = 0; p < n; ++p) {
            b[p] += z[p];
            d[p] = b[p];
            z[p] = 0.0;
        }
    }
    throw NumericalError("Jacobi eigen-solver did not converge");
}

namespace detail {

// H = A + iB  ->  [[A, -B], [B, A]], a real symmetric matrix whose spectrum is
// that of H with every eigenvalue doubled.
inline std::vector<double> real_embedding(std::span<const Complex> h, std::size_t n) {
    std::size_t m = 2 * n;
    std::vector<double> r(m * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            // Symmetrize so that round-off in the input cannot break the solver's assumptions.
            Complex hij = 0.5 * (h[i * n + j] + std::conj(h[j * n + i]));
            r[i * m + j] = hij.real();
            r[(i + n) * m + (j + n)] = hij.real();
            r[(i + n) * m + j] = hij.imag();
            r[i * m + (j + n)] = -hij.imag();
        }
    }
    return r;
}

}  // namespace detail

/// Eigenvalues of a Hermitian row-major n x n matrix, ascending.
inline std::vector<double> hermitian_eigenvalues(std::span<const Complex> h, std::size_t n) {
    auto eig = jacobi_eigen(detail::real_embedding(h, n), 2 * n);
    std::sort(eig.values.begin(), eig.values.end());
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = 0.5 * (eig.values[2 * k] + eig.values[2 * k + 1]);
    }
    return out;
}

/// Applies a real function to the spectrum of a Hermitian matrix: returns
/// sum_k f(mu_k) |v_k><v_k|.
template <typename Fn>
std::vector<Complex> hermitian_function(std::span<const Complex> h, std::size_t n, Fn&& f) {
    std::size_t m = 2 * n;
    auto eig = jacobi_eigen(detail::real_embedding(h, n), m);
    std::vector<double> fr(m * m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        double fk = f(eig.values[k]);
        if (fk == 0.0) {
            continue;
        }
        for (std::size_t i = 0; i < m; ++i) {
            double vik = eig.vectors[i * m + k] * fk;
            for (std::size_t j = 0; j < m; ++j) {
                fr[i * m + j] += vik * eig.vectors[j * m + k];
            }
        }
    }
    std::vector<Complex> out(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double re = 0.5 * (fr[i * m + j] + fr[(i + n) * m + (j + n)]);
            double im = 0.5 * (fr[(i + n) * m + j] - fr[i * m + (j + n)]);
            out[i * n + j] = Complex(re, im);
        }
    }
    return out;
}

inline std::vector<Complex> matmul(std::span<const Complex> a, std::span<const Complex> b, std::size_t n) {
    std::vector<Complex> c(n * n, Complex(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            Complex aik = a[i * n + k];
            for (std::size_t j = 0; j < n; ++j) {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    return c;
}

}  // namespace linalg
}  // namespace vaidman
