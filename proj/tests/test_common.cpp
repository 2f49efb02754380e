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

#include <map>

#include "qcvx/common.hpp"

namespace qcvx {
namespace {

TEST(ErrorHierarchy, SubclassesShareTheBase) {
    EXPECT_THROW(throw ParamsInfeasible("x"), ParamError);
    EXPECT_THROW(throw DegenerateGrid("x"), ParamError);
    EXPECT_THROW(throw StateTooLarge("x"), Error);
    EXPECT_THROW(throw ContractViolation("x"), Error);
    EXPECT_THROW(throw ArityError("x"), Error);
}

TEST(VectorHelpers, Norms) {
    const Vec v{3.0, -4.0};
    EXPECT_DOUBLE_EQ(norm2(v), 5.0);
    EXPECT_DOUBLE_EQ(norm1(v), 7.0);
    EXPECT_DOUBLE_EQ(norm_inf(v), 4.0);
    EXPECT_DOUBLE_EQ(dot(v, Vec{1.0, 1.0}), -1.0);
    EXPECT_EQ(add_scaled(v, 2.0, Vec{1.0, 1.0}), (Vec{5.0, -2.0}));
    EXPECT_EQ(sub(v, v), (Vec{0.0, 0.0}));
    EXPECT_EQ(scaled(v, -1.0), (Vec{-3.0, 4.0}));
}

TEST(RequireFinite, RejectsBadPoints) {
    EXPECT_NO_THROW(require_finite(Vec{1.0, 2.0}, 2, "t"));
    EXPECT_THROW(require_finite(Vec{1.0}, 2, "t"), InvalidPoint);
    EXPECT_THROW(require_finite(Vec{1.0, std::nan("")}, 2, "t"), InvalidPoint);
    EXPECT_THROW(require_finite(Vec{1.0, INFINITY}, 2, "t"), InvalidPoint);
}

TEST(Random, StreamsAreSeeded) {
    Rng a(7);
    Rng b(7);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(uniform01(a), uniform01(b));
    }
}

TEST(Random, UniformIndexCoversTheRange) {
    Rng rng(3);
    std::map<std::uint64_t, int> hits;
    for (int i = 0; i < 6000; ++i) {
        const auto v = uniform_index(rng, 5);
        ASSERT_LE(v, 5u);
        ++hits[v];
    }
    ASSERT_EQ(hits.size(), 6u);
    for (const auto &[value, count] : hits) {
        EXPECT_NEAR(count, 1000, 150) << value;
    }
    EXPECT_EQ(uniform_index(rng, 0), 0u);
}

TEST(Random, Uniform01StaysInTheUnitInterval) {
    Rng rng(11);
    double lo = 1.0;
    double hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = uniform01(rng);
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    EXPECT_LT(lo, 0.01);
    EXPECT_GT(hi, 0.99);
}

} // namespace
} // namespace qcvx
