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

#include <set>

#include "qcvx/subgrad.hpp"

namespace qcvx {
namespace {

TEST(GridSample, NodesLieOnTheGridInsideTheBox) {
    Rng rng(2);
    const Vec x{0.5, -0.5};
    std::set<std::pair<long, long>> seen;
    for (int i = 0; i < 2000; ++i) {
        const Vec y = grid_sample(x, 0.1, 0.05, rng);
        for (std::size_t j = 0; j < 2; ++j) {
            ASSERT_LE(std::abs(y[j] - x[j]), 0.1 + 1e-12);
            const double k = (y[j] - x[j] + 0.1) / 0.05;
            ASSERT_NEAR(k, std::round(k), 1e-9);
        }
        seen.emplace(std::lround((y[0] - x[0] + 0.1) / 0.05), std::lround((y[1] - x[1] + 0.1) / 0.05));
    }
    EXPECT_EQ(seen.size(), 25u);
}

TEST(GridSample, DegenerateSpacing) {
    Rng rng(1);
    EXPECT_THROW(grid_sample(Vec{0.0}, 0.1, 0.3, rng), DegenerateGrid);
    EXPECT_THROW(grid_sample(Vec{0.0}, 0.0, 0.1, rng), ParamError);
}

TEST(EffectiveSmoothness, Formula) {
    EXPECT_NEAR(effective_smoothness(8, 1.0, 1.0, 1e-6), 2.0 * 2.0 / 1e-2, 1e-9);
    EXPECT_NEAR(effective_smoothness(1, 3.0, 0.125, 1.0), 2.0 * 3.0 / 0.25, 1e-12);
}

TEST(QuantumSubgradient, PreconditionOnPrecision) {
    EvaluationOracle f(abs_sum_objective(2), 0.1);
    Rng rng(1);
    EXPECT_THROW(quantum_subgradient(f, 0.1, 1.0, Vec{0.0, 0.0}, 0.2, rng), ParamError);
}

TEST(QuantumSubgradient, AccountingAndRange) {
    const double eps = 1e-10;
    EvaluationOracle f(abs_sum_objective(2), eps);
    Rng rng(3);
    const SubgradientResult res = quantum_subgradient(f, eps, 1.0, Vec{0.0, 0.0}, 0.1, rng);
    EXPECT_EQ(res.logical_queries, res.repetitions);
    EXPECT_EQ(res.raw_queries, f.count());
    EXPECT_EQ(res.raw_queries, res.repetitions * res.params.points * res.params.points);
    for (double v : res.gradient) {
        EXPECT_LE(std::abs(v), 1.0);
    }
    EXPECT_LE(norm_inf(sub(res.sampled_center, Vec{0.0, 0.0})), 0.1 + 1e-12);
}

TEST(QuantumSubgradient, SmoothFunctionGivesItsGradient) {
    const double eps = 1e-10;
    const Vec shift{0.3, -0.2};
    EvaluationOracle f(quadratic_objective({1.0, 1.0}, shift, 1.0), eps);
    Rng rng(4);
    const SubgradientResult res = quantum_subgradient(f, eps, 1.0, Vec{0.0, 0.0}, 0.01, rng);
    const Vec truth = sub(res.sampled_center, shift);
    EXPECT_LT(norm_inf(sub(res.gradient, truth)), 2.0 * res.params.lipschitz / static_cast<double>(res.params.points));
}

TEST(Certificate, ExactSubgradientHasNoViolation) {
    const ScalarFunction f = [](std::span<const double> x) { return std::abs(x[0]) + std::abs(x[1]); };
    const auto grid = box_grid(Vec{0.0, 0.0}, 1.0, 11);
    EXPECT_EQ(grid.size(), 121u);
    EXPECT_DOUBLE_EQ(subgradient_certificate_check(f, Vec{0.0, 0.0}, Vec{0.5, -1.0}, 1e-6, 1.0, grid), 0.0);
}

TEST(Certificate, WrongSlopeIsCharged) {
    // f = |x| at 0 with g = 3: worst q = 1 gives excess (3 - 1 - slack) / 1
    const ScalarFunction f = [](std::span<const double> x) { return std::abs(x[0]); };
    const auto grid = box_grid(Vec{0.0}, 1.0, 5);
    const double r1 = 0.01;
    EXPECT_NEAR(subgradient_certificate_check(f, Vec{0.0}, Vec{3.0}, r1, 1.0, grid), 2.0 - 4.0 * r1, 1e-12);
    EXPECT_THROW(subgradient_certificate_check(f, Vec{0.0}, Vec{3.0}, r1, 1.0, {}), ParamError);
}

TEST(Certificate, CeilingFormula) {
    EXPECT_NEAR(certificate_ceiling(1, 1.0, 1e-9, 1.0), 5.0, 1e-9);
    EXPECT_NEAR(certificate_ceiling(8, 2.0, 1.0, 1.0), 5000.0 * 2.0 * 32.0, 1e-6);
}

TEST(FiniteDifference, UsesNPlusOneQueries) {
    EvaluationOracle f(linear_objective({1.0, -2.0, 0.5}), 0.0);
    const Vec g = finite_difference_gradient(f, Vec{0.1, 0.2, 0.3}, 1e-3);
    EXPECT_EQ(f.count(), 4u);
    EXPECT_NEAR(g[0], 1.0, 1e-9);
    EXPECT_NEAR(g[1], -2.0, 1e-9);
    EXPECT_NEAR(g[2], 0.5, 1e-9);
}

TEST(DeviationFromLinearity, ZeroForLinear) {
    const ScalarFunction f = [](std::span<const double> x) { return 2.0 * x[0]; };
    const auto grad = [](std::span<const double>) { return Vec{2.0}; };
    EXPECT_NEAR(deviation_from_linearity(f, grad, Vec{0.0}, Vec{0.7}), 0.0, 1e-12);
}

TEST(QuerySeparation, TableShapeAndCrossover) {
    const auto rows = query_separation_table({1, 2}, {4, 8, 100, 1000000}, 32, 1.0, 0.1, 7);
    ASSERT_EQ(rows.size(), 6u);
    for (const auto &row : rows) {
        EXPECT_EQ(row.classical, row.n + 1);
        EXPECT_EQ(row.register_points, 32u);
        EXPECT_GT(row.quantum_logical, 0u);
        EXPECT_EQ(row.measured, row.n <= 2);
        if (row.measured) {
            EXPECT_EQ(row.quantum_raw, row.quantum_logical * static_cast<std::uint64_t>(std::pow(32.0, row.n)));
        }
    }
    EXPECT_GE(rows[2].quantum_logical, rows[2].classical);
    EXPECT_LT(rows.back().quantum_logical, rows.back().classical);
}

TEST(QuerySeparation, PrecisionHitsTheRegister) {
    for (std::size_t n : {1u, 5u, 1000u}) {
        const double eps = precision_for_register(n, 1.0, 0.1, 32);
        const GradParams p = derive_grad_params(n, 1.0, effective_smoothness(n, 1.0, 0.1, eps), eps);
        EXPECT_EQ(p.points, 32u);
    }
}

} // namespace
} // namespace qcvx
