#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "vaidman/qcore.hpp"
#include "vaidman/states.hpp"

using namespace vaidman;
using std::numbers::pi;

namespace {

void expect_state_near(const StateVector& s, std::initializer_list<Complex> ref, double tol = 1e-12) {
    ASSERT_EQ(s.dim(), ref.size());
    std::size_t i = 0;
    for (Complex r : ref) {
        EXPECT_NEAR(s[i].real(), r.real(), tol) << "i=" << i;
        EXPECT_NEAR(s[i].imag(), r.imag(), tol) << "i=" << i;
        ++i;
    }
}

StateVector random_state3(std::mt19937_64& rng) {
    auto v = oracle::random_state<8>(rng);
    return StateVector(3, v);
}

MeasurementBasis random_basis(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, 3);
    std::uniform_real_distribution<double> angle(-pi, pi);
    switch (pick(rng)) {
        case 0:
            return MeasurementBasis::x();
        case 1:
            return MeasurementBasis::y();
        case 2:
            return MeasurementBasis::z();
        default:
            return MeasurementBasis::lambda(angle(rng));
    }
}

oracle::Axis axis_of(const MeasurementBasis& b) {
    switch (b.kind) {
        case BasisKind::X:
            return oracle::Axis::X;
        case BasisKind::Y:
            return oracle::Axis::Y;
        case BasisKind::Z:
            return oracle::Axis::Z;
        case BasisKind::Lambda:
            return oracle::Axis::Lambda;
    }
    return oracle::Axis::Z;
}

}  // namespace

TEST(StateVector, RejectsUnnormalizedAndBadSizes) {
    EXPECT_THROW(StateVector(1, {1.0, 1.0}), StateError);
    EXPECT_THROW(StateVector(2, {1.0, 0.0}), StateError);
    EXPECT_THROW(StateVector(4, std::vector<Complex>(16, 0.25)), StateError);
    EXPECT_THROW(StateVector(1, {std::nan(""), 0.0}), StateError);
    EXPECT_NO_THROW(StateVector(1, {1.0, 1e-6}));  // squared-norm error 1e-12, within tolerance
}

TEST(BasisVectors, X) {
    auto [plus, minus] = basis_vectors(MeasurementBasis::x());
    const double r = 1 / std::sqrt(2.0);
    expect_state_near(plus, {r, r});
    expect_state_near(minus, {r, -r});
}

TEST(BasisVectors, LambdaEndpoints) {
    auto [b0, b1] = basis_vectors(MeasurementBasis::lambda(pi / 2));
    expect_state_near(b0, {1.0, 0.0});
    expect_state_near(b1, {0.0, 1.0});

    auto [c0, c1] = basis_vectors(MeasurementBasis::lambda(0.0));
    expect_state_near(c0, {0.0, -1.0});
    expect_state_near(c1, {1.0, 0.0});
}

TEST(BasisVectors, InvalidLambda) {
    EXPECT_THROW(basis_vectors(MeasurementBasis{BasisKind::Lambda, std::nullopt}), BasisError);
    EXPECT_THROW(basis_vectors(MeasurementBasis::lambda(INFINITY)), BasisError);
    EXPECT_THROW(basis_vectors(MeasurementBasis{BasisKind::X, 0.3}), BasisError);
}

TEST(BasisVectors, OrthonormalForRandomLambdas) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-10, 10);
    std::vector<MeasurementBasis> bases{MeasurementBasis::x(), MeasurementBasis::y(), MeasurementBasis::z()};
    for (int i = 0; i < 100; ++i) bases.push_back(MeasurementBasis::lambda(angle(rng)));
    for (const auto& b : bases) {
        auto [k0, k1] = basis_vectors(b);
        EXPECT_NEAR(std::abs(inner(k0, k1)), 0.0, 1e-12);
        EXPECT_NEAR(k0.norm_squared(), 1.0, 1e-12);
        EXPECT_NEAR(k1.norm_squared(), 1.0, 1e-12);
    }
}

TEST(MeasureSingle, StandardGhzZ) {
    auto br = measure_single(standard_ghz(), 2, MeasurementBasis::z());
    EXPECT_EQ(br[0].sign(), 1);
    EXPECT_NEAR(br[0].probability, 0.5, 1e-12);
    EXPECT_EQ(*br[0].post_state, StateVector::basis_state(3, 0b000));
    EXPECT_EQ(br[1].sign(), -1);
    EXPECT_NEAR(br[1].probability, 0.5, 1e-12);
    expect_state_near(*br[1].post_state, {0, 0, 0, 0, 0, 0, 0, 1.0});
}

TEST(MeasureSingle, StandardWZ) {
    auto br = measure_single(standard_w(), 2, MeasurementBasis::z());
    const double r = 1 / std::sqrt(2.0);
    EXPECT_NEAR(br[0].probability, 2.0 / 3.0, 1e-12);
    expect_state_near(*br[0].post_state, {0, 0, r, 0, r, 0, 0, 0});
    EXPECT_NEAR(br[1].probability, 1.0 / 3.0, 1e-12);
    expect_state_near(*br[1].post_state, {0, 1.0, 0, 0, 0, 0, 0, 0});
}

TEST(MeasureSingle, EigenstateHasEmptyBranch) {
    auto plus = basis_vectors(MeasurementBasis::x()).first;
    auto br = measure_single(plus, 0, MeasurementBasis::x());
    EXPECT_NEAR(br[0].probability, 1.0, 1e-12);
    expect_state_near(*br[0].post_state, {plus[0], plus[1]});
    EXPECT_NEAR(br[1].probability, 0.0, 1e-15);
    EXPECT_FALSE(br[1].post_state.has_value());
    EXPECT_EQ(br[0].label(), "+1");
}

TEST(MeasureSingle, LambdaLabels) {
    auto br = measure_single(standard_w(), 2, MeasurementBasis::lambda(pi / 2));
    EXPECT_EQ(br[0].label(), "b0");
    EXPECT_EQ(br[1].label(), "b1");
}

TEST(MeasureSingle, Errors) {
    EXPECT_THROW(measure_single(standard_ghz(), 3, MeasurementBasis::z()), QubitIndexError);
    EXPECT_THROW(measure_single(standard_ghz(), 0, MeasurementBasis{BasisKind::Lambda, {}}), BasisError);
}

TEST(MeasureSingle, PostStatesNormalizedAndProbabilitiesSumToOne) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        auto s = random_state3(rng);
        for (std::size_t q = 0; q < 3; ++q) {
            auto br = measure_single(s, q, random_basis(rng));
            EXPECT_NEAR(br[0].probability + br[1].probability, 1.0, 1e-9);
            for (const auto& b : br) {
                if (b.post_state) {
                    EXPECT_NEAR(b.post_state->norm_squared(), 1.0, 1e-9);
                }
            }
        }
    }
}

TEST(JointDistribution, GhzParityConstraints) {
    auto ghz = standard_ghz();
    const auto X = MeasurementBasis::x();
    const auto Y = MeasurementBasis::y();
    double plus = 0.0;
    for (const auto& o : joint_distribution(ghz, {X, X, X})) {
        if (o.product() == 1) plus += o.probability;
    }
    EXPECT_NEAR(plus, 1.0, 1e-12);

    double minus = 0.0;
    for (const auto& o : joint_distribution(ghz, {X, Y, Y})) {
        if (o.product() == -1) minus += o.probability;
    }
    EXPECT_NEAR(minus, 1.0, 1e-12);
}

TEST(JointDistribution, ProductStateZ) {
    const auto Z = MeasurementBasis::z();
    auto d = joint_distribution(StateVector::basis_state(3, 0), {Z, Z, Z});
    ASSERT_EQ(d.size(), 8U);
    EXPECT_NEAR(d[0].probability, 1.0, 1e-15);
    EXPECT_EQ(d[0].sign(0), 1);
    EXPECT_EQ(d[0].sign(2), 1);
}

TEST(JointDistribution, BasisCountMismatch) {
    EXPECT_THROW(joint_distribution(standard_ghz(), {MeasurementBasis::x()}), BasisError);
}

TEST(JointDistribution, MatchesKroneckerOracle) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        auto v = oracle::random_state<8>(rng);
        StateVector s(3, v);
        std::array<MeasurementBasis, 3> b{random_basis(rng), random_basis(rng), random_basis(rng)};
        auto d = joint_distribution(s, b);
        double sum = 0;
        for (const auto& o : d) {
            auto k = [&](std::size_t q) {
                return oracle::kets(axis_of(b[q]), b[q].lambda_angle.value_or(0.0));
            };
            double p = oracle::joint_probability(v, k(0), k(1), k(2), o.branch(0), o.branch(1), o.branch(2));
            EXPECT_NEAR(o.probability, p, 1e-12);
            sum += o.probability;
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
}

// Sequential measure_single in every qubit order reproduces joint_distribution.
TEST(JointDistribution, OrderIndependence) {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 50; ++t) {
        auto s = random_state3(rng);
        std::array<MeasurementBasis, 3> b{random_basis(rng), random_basis(rng), random_basis(rng)};
        auto joint = joint_distribution(s, b);
        std::array<std::size_t, 3> order{0, 1, 2};
        do {
            std::array<double, 8> seq{};
            for (const auto& b0 : measure_single(s, order[0], b[order[0]])) {
                if (!b0.post_state) continue;
                for (const auto& b1 : measure_single(*b0.post_state, order[1], b[order[1]])) {
                    if (!b1.post_state) continue;
                    for (const auto& b2 : measure_single(*b1.post_state, order[2], b[order[2]])) {
                        std::size_t idx = 0;
                        idx |= static_cast<std::size_t>(b0.index) << (2 - order[0]);
                        idx |= static_cast<std::size_t>(b1.index) << (2 - order[1]);
                        idx |= static_cast<std::size_t>(b2.index) << (2 - order[2]);
                        seq[idx] += b0.probability * b1.probability * b2.probability;
                    }
                }
            }
            for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(seq[i], joint[i].probability, 1e-9);
        } while (std::next_permutation(order.begin(), order.end()));
    }
}

// Law of total probability: weighting post-measurement joint probabilities by
// branch probability recovers the marginal of the remaining qubits.
TEST(MeasureSingle, ReconstructionIdentity) {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 100; ++t) {
        auto s = random_state3(rng);
        std::array<MeasurementBasis, 3> b{random_basis(rng), random_basis(rng), random_basis(rng)};
        std::size_t q = static_cast<std::size_t>(t % 3);
        auto br = measure_single(s, q, random_basis(rng));
        std::array<double, 8> mixed{};
        for (const auto& branch : br) {
            if (!branch.post_state) continue;
            for (const auto& o : joint_distribution(*branch.post_state, b)) mixed[o.branches] += branch.probability * o.probability;
        }
        // Marginal over qubit q is unchanged by measuring q first.
        auto direct = joint_distribution(s, b);
        std::size_t mask = std::size_t{1} << (2 - q);
        for (std::size_t i = 0; i < 8; ++i) {
            if (i & mask) continue;
            EXPECT_NEAR(mixed[i] + mixed[i | mask], direct[i].probability + direct[i | mask].probability, 1e-9);
        }
    }
}

TEST(ProductExpectation, GhzThetaXXX) {
    const auto X = MeasurementBasis::x();
    for (double theta : {pi / 12, pi / 8, pi / 6, 0.3, pi / 4}) {
        auto s = ghz_class({theta});
        oracle::Vec8 v{};
        for (std::size_t i = 0; i < 8; ++i) v[i] = s[i];
        double brute = oracle::product_expectation(v, oracle::Axis::X, oracle::Axis::X, oracle::Axis::X);
        EXPECT_NEAR(product_expectation(s, {X, X, X}), brute, 1e-12);
        EXPECT_NEAR(brute, std::sin(2 * theta), 1e-12);
    }
}

TEST(ProductExpectation, StandardW) {
    const auto Y = MeasurementBasis::y();
    const auto Z = MeasurementBasis::z();
    auto w = standard_w();
    oracle::Vec8 v{};
    for (std::size_t i = 0; i < 8; ++i) v[i] = w[i];
    double brute = oracle::product_expectation(v, oracle::Axis::Z, oracle::Axis::Y, oracle::Axis::Y);
    EXPECT_NEAR(brute, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(product_expectation(w, {Z, Y, Y}), 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(product_expectation(w, {Z, Z, Z}), -1.0, 1e-12);
}

TEST(ReducedDensity, GhzSingleQubit) {
    auto rho = reduced_density(standard_ghz(), {0});
    EXPECT_NEAR(rho(0, 0).real(), 0.5, 1e-12);
    EXPECT_NEAR(rho(1, 1).real(), 0.5, 1e-12);
    EXPECT_NEAR(std::abs(rho(0, 1)), 0.0, 1e-12);

    const double theta = 0.4;
    auto r2 = reduced_density(ghz_class({theta}), {0});
    EXPECT_NEAR(r2(0, 0).real(), std::sin(theta) * std::sin(theta), 1e-12);
    EXPECT_NEAR(r2(1, 1).real(), std::cos(theta) * std::cos(theta), 1e-12);
}

TEST(ReducedDensity, StandardWPair) {
    auto rho = reduced_density(standard_w(), {0, 1});
    // (1/3)(|10>+|01>)(<10|+<01|) + (1/3)|00><00|, basis order 00, 01, 10, 11.
    const double t = 1.0 / 3.0;
    std::array<std::array<double, 4>, 4> expected{{{t, 0, 0, 0}, {0, t, t, 0}, {0, t, t, 0}, {0, 0, 0, 0}}};
    auto brute = oracle::reduce_pair([] {
        oracle::Vec8 v{};
        auto w = standard_w();
        for (std::size_t i = 0; i < 8; ++i) v[i] = w[i];
        return v;
    }(), 0, 1);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) {
            EXPECT_NEAR(std::abs(rho(r, c) - Complex(expected[r][c])), 0.0, 1e-12);
            EXPECT_NEAR(std::abs(brute[r][c] - Complex(expected[r][c])), 0.0, 1e-12);
        }
}

TEST(ReducedDensity, MatchesBruteForcePairsOnRandomStates) {
    std::mt19937_64 rng(29);
    for (int t = 0; t < 50; ++t) {
        auto v = oracle::random_state<8>(rng);
        StateVector s(3, v);
        for (auto [p, q] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{0, 2}}) {
            auto rho = reduced_density(s, {static_cast<std::size_t>(p), static_cast<std::size_t>(q)});
            auto brute = oracle::reduce_pair(v, p, q);
            for (std::size_t r = 0; r < 4; ++r)
                for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(std::abs(rho(r, c) - brute[r][c]), 0.0, 1e-12);
        }
    }
}

TEST(ReducedDensity, FullSetRoundTrip) {
    std::mt19937_64 rng(31);
    auto s = random_state3(rng);
    auto rho = reduced_density(s, {2, 0, 1});
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 8; ++c) EXPECT_NEAR(std::abs(rho(r, c) - s[r] * std::conj(s[c])), 0.0, 1e-12);
}

TEST(ReducedDensity, Errors) {
    EXPECT_THROW(reduced_density(standard_w(), std::span<const std::size_t>{}), ParameterError);
    EXPECT_THROW(reduced_density(standard_w(), {3}), QubitIndexError);
    EXPECT_THROW(reduced_density(standard_w(), {1, 1}), ParameterError);
}

TEST(DensityMatrix, ValidatesInvariants) {
    EXPECT_THROW(DensityMatrix(1, {0.5, 0.1, 0.0, 0.5}), StateError);    // not Hermitian
    EXPECT_THROW(DensityMatrix(1, {0.6, 0.0, 0.0, 0.6}), StateError);    // trace 1.2
    EXPECT_THROW(DensityMatrix(1, {1.2, 0.0, 0.0, -0.2}), StateError);   // negative eigenvalue
    EXPECT_THROW(DensityMatrix(1, {0.5, 0.6, 0.6, 0.5}), StateError);    // eigenvalues 1.1, -0.1
    EXPECT_NO_THROW(DensityMatrix(1, {0.5, 0.5, 0.5, 0.5}));
}
