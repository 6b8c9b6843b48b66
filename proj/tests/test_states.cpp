#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "vaidman/entanglement.hpp"
#include "vaidman/states.hpp"

using namespace vaidman;
using std::numbers::pi;

TEST(GhzClass, PiOverFourIsStandardGhz) {
    auto a = ghz_class({pi / 4});
    auto b = standard_ghz();
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_NEAR(std::abs(a[i] - b[i]), 0.0, 1e-15);
    }
}

TEST(GhzClass, Evaluations) {
    auto s = ghz_class({pi / 6});
    EXPECT_NEAR(s[0].real(), 0.5, 1e-15);
    EXPECT_NEAR(s[7].real(), std::sqrt(3.0) / 2, 1e-15);
    for (std::size_t i = 1; i < 7; ++i) EXPECT_EQ(s[i], Complex{});

    auto prod = ghz_class({pi / 2});
    EXPECT_NEAR(prod[0].real(), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(prod[7]), 0.0, 1e-15);
}

TEST(GhzClass, ReferenceRangeFlag) {
    EXPECT_TRUE(GhzClassParams{pi / 4}.in_reference_range());
    EXPECT_TRUE(GhzClassParams{0.1}.in_reference_range());
    EXPECT_FALSE(GhzClassParams{0.0}.in_reference_range());
    EXPECT_FALSE(GhzClassParams{pi / 3}.in_reference_range());
    EXPECT_NO_THROW(ghz_class({pi / 3}));
    EXPECT_THROW(ghz_class({NAN}), ParameterError);
}

TEST(WClass, StandardAndProduct) {
    const double r = 1 / std::sqrt(3.0);
    auto w = w_class({r, r, r});
    EXPECT_EQ(w, standard_w());
    EXPECT_NEAR(std::abs(w[0b100] - r), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(w[0b010] - r), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(w[0b001] - r), 0.0, 1e-15);

    auto p = w_class({1.0, 0.0, 0.0});
    EXPECT_EQ(p, StateVector::basis_state(3, 0b100));
}

TEST(WClass, ExactlyThreeSupportedAmplitudes) {
    auto s = w_class({0.5, 0.5, std::sqrt(0.5)});
    for (std::size_t i = 0; i < 8; ++i) {
        bool support = i == 0b100 || i == 0b010 || i == 0b001;
        if (!support) {
            EXPECT_EQ(s[i], Complex{}) << i;
        }
    }
}

TEST(WClass, RejectsUnnormalized) {
    EXPECT_THROW(w_class({1.0, 1.0, 0.0}), StateError);
    EXPECT_THROW(w_class({0.0, 0.0, 0.0}), StateError);
}

TEST(Wn, NEqualsOneAmplitudes) {
    auto s = w_n({1, 0.0, 0.0});
    EXPECT_NEAR(s[0b100].real(), 0.5, 1e-15);
    EXPECT_NEAR(s[0b010].real(), 0.5, 1e-15);
    EXPECT_NEAR(s[0b001].real(), std::sqrt(0.5), 1e-15);
    EXPECT_EQ(s, w_class({0.5, 0.5, std::sqrt(0.5)}));
}

TEST(Wn, ConcurrenceSumAtNOne) {
    EXPECT_NEAR(concurrence_sum(w_n({1, 0.0, 0.0})), 0.5 + std::sqrt(2.0), 1e-9);
    EXPECT_NEAR(concurrence_sum(w_n({1, 0.0, 0.0})), 1.914, 1e-3);
}

TEST(Wn, MatchesWClassBitExactly) {
    for (std::int64_t n : {1, 2, 3, 7, 50, 1000}) {
        for (double g : {0.0, 0.7, -2.1}) {
            for (double d : {0.0, 1.3}) {
                WnParams p{n, g, d};
                EXPECT_EQ(w_n(p), w_class(wn_amplitudes(p)));
                auto a = wn_amplitudes(p);
                const double scale = 1.0 / std::sqrt(2.0 * (1.0 + static_cast<double>(n)));
                EXPECT_NEAR(std::abs(a.a), scale, 1e-15);
                EXPECT_NEAR(std::abs(a.b), std::sqrt(static_cast<double>(n)) * scale, 1e-15);
                EXPECT_NEAR(std::arg(a.b), g, 1e-15);
            }
        }
    }
}

TEST(Wn, LargeNAsymptotics) {
    for (std::int64_t n : {100, 10000, 1000000}) {
        auto s = w_n({n, 0.0, 0.0});
        double expect = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
        EXPECT_NEAR(s[0b100].real() / expect, 1.0, 1.0 / static_cast<double>(n));
    }
}

TEST(Wn, RejectsNonPositiveN) {
    EXPECT_THROW(w_n({0, 0.0, 0.0}), ParameterError);
    EXPECT_THROW(w_n({-3, 0.0, 0.0}), ParameterError);
    EXPECT_THROW(w_n({1, INFINITY, 0.0}), ParameterError);
}
