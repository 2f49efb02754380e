// Copyright 2026 The qcvx Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include "qcvx/oracles.hpp"

namespace qcvx {
namespace {

Vec random_point(std::size_t n, double lo, double hi, Rng &rng) {
    Vec x(n);
    for (double &v : x) {
        v = lo + (hi - lo) * uniform01(rng);
    }
    return x;
}

TEST(Ball, ContainmentAndRadii) {
    const ConvexBody k = ball({1.0, -1.0}, 2.0);
    EXPECT_TRUE(k.contains(Vec{1.0, 1.0}, 0.0));
    EXPECT_FALSE(k.contains(Vec{1.0, 1.0 + 1e-6}, 0.0));
    EXPECT_DOUBLE_EQ(k.condition_number(), 1.0);
    EXPECT_DOUBLE_EQ(k.signed_distance(Vec{4.0, -1.0}), 1.0);
    EXPECT_THROW(ball({0.0}, 0.0), ParamError);
}

TEST(Box, SignedDistanceMatchesClosestPoint) {
    const ConvexBody k = box({0.0, 0.0}, {2.0, 1.0});
    EXPECT_DOUBLE_EQ(k.inner_radius, 0.5);
    EXPECT_DOUBLE_EQ(k.outer_radius, std::sqrt(1.25));
    Rng rng(5);
    for (int i = 0; i < 2000; ++i) {
        const Vec x = random_point(2, -1.0, 3.0, rng);
        const bool in_box = x[0] >= 0.0 && x[0] <= 2.0 && x[1] >= 0.0 && x[1] <= 1.0;
        ASSERT_EQ(k.contains(x, 0.0), in_box);
        if (!in_box) {
            const double dx = std::max({0.0, -x[0], x[0] - 2.0});
            const double dy = std::max({0.0, -x[1], x[1] - 1.0});
            ASSERT_NEAR(k.signed_distance(x), std::hypot(dx, dy), 1e-12);
        }
    }
    EXPECT_THROW(box({0.0}, {0.0}), ParamError);
}

TEST(SmoothedHypercube, SandwichedBetweenItsBalls) {
    for (std::size_t n : {1u, 2u, 3u}) {
        const Vec corner(n, 1.0);
        const ConvexBody k = smoothed_hypercube(corner, 1.0);
        EXPECT_DOUBLE_EQ(k.inner_radius, 0.5);
        Rng rng(n);
        for (int i = 0; i < 3000; ++i) {
            const Vec x = random_point(n, -0.5, 1.5, rng);
            const double r = norm2(sub(x, k.center));
            if (r <= k.inner_radius) {
                ASSERT_TRUE(k.contains(x, 0.0));
            }
            if (r > k.outer_radius) {
                ASSERT_FALSE(k.contains(x, 0.0));
            }
            // contained in the plain cube [x0 - l, x0]
            if (k.contains(x, 0.0)) {
                for (double v : x) {
                    ASSERT_GE(v, -1e-12);
                    ASSERT_LE(v, 1.0 + 1e-12);
                }
            }
        }
        // the outer radius is attained along a diagonal
        Vec far(n);
        const double reach = k.outer_radius / std::sqrt(static_cast<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            far[i] = k.center[i] + reach * (1.0 - 1e-9);
        }
        EXPECT_TRUE(k.contains(far, 0.0));
    }
}

TEST(Objectives, ValuesAndGradients) {
    const ObjectiveFunction lin = linear_objective({1.0, -2.0});
    EXPECT_DOUBLE_EQ(lin.evaluate(Vec{1.0, 1.0}), -1.0);
    EXPECT_DOUBLE_EQ(lin.lipschitz, 2.0);
    const ObjectiveFunction q = quadratic_objective({2.0, 4.0}, {1.0, 0.0}, 10.0);
    EXPECT_DOUBLE_EQ(q.evaluate(Vec{2.0, 1.0}), 3.0);
    EXPECT_EQ(q.gradient(Vec{2.0, 1.0}), (Vec{2.0, 4.0}));
    EXPECT_DOUBLE_EQ(abs_sum_objective(3).evaluate(Vec{-1.0, 0.5, 2.0}), 3.5);
    EXPECT_DOUBLE_EQ(sum_objective(3).evaluate(Vec{-1.0, 0.5, 2.0}), 1.5);
}

TEST(Objectives, MaxNormValueWithPenalty) {
    const std::vector<std::uint8_t> c{1, 0};
    EXPECT_DOUBLE_EQ(max_norm_value(Vec{1.0, 0.0}, c), 0.0);
    EXPECT_DOUBLE_EQ(max_norm_value(Vec{0.25, 0.5}, c), 0.75);
    // outside the cube the distance to the cube is added
    EXPECT_DOUBLE_EQ(max_norm_value(Vec{1.5, -0.5}, c), 1.0);
}

TEST(MembershipOracle, CountsEveryAnsweredQuery) {
    MembershipOracle k(ball({0.0, 0.0}, 1.0));
    EXPECT_EQ(k.query(Vec{0.0, 0.0}), Membership::In);
    EXPECT_EQ(k.query(Vec{2.0, 0.0}), Membership::Out);
    EXPECT_EQ(k.count(), 2u);
    EXPECT_THROW(k.query(Vec{0.0}), InvalidPoint);
    EXPECT_EQ(k.count(), 2u);
    k.reset_count();
    EXPECT_EQ(k.count(), 0u);
}

TEST(MembershipOracle, ExactOracleUsesATightTolerance) {
    MembershipOracle k(ball({0.0}, 1.0));
    EXPECT_TRUE(k.inside(Vec{1.0 + 1e-10}));
    EXPECT_FALSE(k.inside(Vec{1.0 + 1e-8}));
}

TEST(MembershipOracle, AdversarialShellFlipsNearTheBoundary) {
    MembershipOracle k(ball({0.0}, 1.0), 0.1, ShellPolicy::Adversarial);
    EXPECT_FALSE(k.inside(Vec{0.95}));
    EXPECT_TRUE(k.inside(Vec{1.05}));
    EXPECT_TRUE(k.inside(Vec{0.8}));
    EXPECT_FALSE(k.inside(Vec{1.2}));
}

TEST(MembershipOracle, AnswersAreMonotoneInPrecision) {
    // a point accepted at one precision stays accepted at any looser one
    Rng rng(9);
    const ConvexBody body = box({0.0, 0.0}, {1.0, 1.0});
    MembershipOracle tight(body, 1e-9);
    MembershipOracle loose(body, 1e-3);
    for (int i = 0; i < 5000; ++i) {
        const Vec x = random_point(2, -0.01, 1.01, rng);
        if (tight.inside(x)) {
            ASSERT_TRUE(loose.inside(x));
        }
    }
}

TEST(MembershipOracle, RejectsNegativePrecision) {
    EXPECT_THROW(MembershipOracle(ball({0.0}, 1.0), -1.0), ParamError);
}

TEST(EvaluationOracle, NoisePolicies) {
    EvaluationOracle exact(linear_objective({1.0}));
    EXPECT_DOUBLE_EQ(exact.query(Vec{0.3}), 0.3);
    EvaluationOracle rounded(linear_objective({1.0}), 0.05, noise::RoundToGrid{0.1});
    EXPECT_NEAR(rounded.query(Vec{0.33}), 0.3, 1e-15);
    EvaluationOracle shifted(linear_objective({1.0}), 0.05, noise::AdditiveDeterministic{-0.05});
    EXPECT_NEAR(shifted.query(Vec{0.3}), 0.25, 1e-15);
    EXPECT_EQ(shifted.count(), 1u);
    EXPECT_THROW(EvaluationOracle(linear_objective({1.0}), 0.01, noise::AdditiveDeterministic{0.02}), ParamError);
    EXPECT_THROW(EvaluationOracle(linear_objective({1.0}), 0.01, noise::RoundToGrid{0.1}), ParamError);
}

TEST(EvaluationOracle, DomainViolation) {
    ObjectiveFunction f = linear_objective({1.0});
    f.in_domain = [](std::span<const double> x) { return x[0] >= 0.0; };
    EvaluationOracle oracle(f);
    EXPECT_THROW(oracle.query(Vec{-1.0}), DomainError);
    EXPECT_EQ(oracle.count(), 0u);
}

TEST(EpigraphLift, MatchesBruteForceContainment) {
    auto k = std::make_shared<MembershipOracle>(ball({0.0, 0.0}, 1.0));
    auto f = std::make_shared<EvaluationOracle>(abs_sum_objective(2));
    const double cap = 3.0;
    const ConvexBody lifted = lift_epigraph(k, f, cap);
    EXPECT_EQ(lifted.dim, 3u);
    EXPECT_DOUBLE_EQ(lifted.center[0], 1.5);
    Rng rng(21);
    for (int i = 0; i < 4000; ++i) {
        const Vec z = random_point(3, -1.5, 3.5, rng);
        const bool truth = std::hypot(z[1], z[2]) <= 1.0 && std::abs(z[1]) + std::abs(z[2]) <= z[0] && z[0] <= cap;
        const std::uint64_t km = k->count();
        const std::uint64_t fm = f->count();
        const bool got = lifted.contains(z, 0.0);
        ASSERT_EQ(k->count(), km + 1);
        ASSERT_EQ(f->count(), fm + 1);
        // disagreements only within the boundary tolerance
        if (got != truth) {
            ASSERT_LT(std::abs(std::hypot(z[1], z[2]) - 1.0), 1e-8);
        }
        if (norm2(sub(z, lifted.center)) <= lifted.inner_radius) {
            ASSERT_TRUE(got);
        }
        if (norm2(sub(z, lifted.center)) > lifted.outer_radius) {
            ASSERT_FALSE(got);
        }
    }
}

TEST(EpigraphLift, RejectsALowCap) {
    auto k = std::make_shared<MembershipOracle>(ball({0.0}, 1.0));
    auto f = std::make_shared<EvaluationOracle>(linear_objective({1.0}));
    EXPECT_THROW(lift_epigraph(k, f, 0.0), ParamError);
}

} // namespace
} // namespace qcvx
