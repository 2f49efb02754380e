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

/**
 * @file subgrad.hpp
 * Randomized subgradients of non-smooth convex functions, the certificate
 * check used to grade them and the classical finite-difference baseline.
 */
#pragma once

#include "qcvx/qgrad.hpp"

namespace qcvx {

/**
 * Uniform node of the grid {x - r1 + spacing * k} restricted to the box B_inf(x, r1).
 * Uses one bounded draw per coordinate.
 */
inline Vec grid_sample(std::span<const double> x, double r1, double spacing, Rng &rng) {
    if (!(r1 > 0.0) || !(spacing > 0.0)) {
        throw ParamError("grid_sample: r1 and spacing must be positive");
    }
    if (spacing > 2.0 * r1) {
        throw DegenerateGrid("grid_sample: spacing exceeds the box width 2*r1");
    }
    const double steps = std::floor(2.0 * r1 / spacing + 1e-9);
    if (!(steps < 1.8e19)) {
        throw DegenerateGrid("grid_sample: too many grid nodes per axis");
    }
    const auto last = static_cast<std::uint64_t>(steps);
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto k = uniform_index(rng, last);
        y[i] = x[i] - r1 + spacing * static_cast<double>(k);
    }
    return y;
}

/// Smoothness handed to the gradient estimator: 2 n^{1/3} L / (r1^{2/3} eps^{1/3}).
inline double effective_smoothness(std::size_t n, double lipschitz, double r1, double precision) {
    return 2.0 * std::cbrt(static_cast<double>(n)) * lipschitz / (std::pow(r1, 2.0 / 3.0) * std::cbrt(precision));
}

struct SubgradientResult {
    Vec gradient;
    Vec sampled_center;
    double r1 = 0.0;
    double effective_smoothness = 0.0;
    GradParams params;
    std::size_t repetitions = 0;
    std::uint64_t logical_queries = 0;
    std::uint64_t raw_queries = 0;
};

/// Samples a grid point near x and returns the smoothed gradient estimate there.
inline SubgradientResult quantum_subgradient(EvaluationOracle &f, double precision, double lipschitz,
                                             std::span<const double> x, double r1, Rng &rng,
                                             const SimulationOptions &opts = {}) {
    const std::size_t n = x.size();
    if (!(precision > 0.0) || !(r1 > 0.0) || !(lipschitz > 0.0)) {
        throw ParamError("quantum_subgradient: eps, L and r1 must be positive");
    }
    const double limit = std::min(1.0, r1 / static_cast<double>(n * n));
    if (!(precision < limit)) {
        throw ParamError("quantum_subgradient: need eps < min(1, r1/n^2)");
    }
    SubgradientResult out;
    out.r1 = r1;
    out.effective_smoothness = effective_smoothness(n, lipschitz, r1, precision);
    const GradParams params = derive_grad_params(n, lipschitz, out.effective_smoothness, precision);
    out.sampled_center = grid_sample(x, r1, params.grid_size, rng);
    SmoothGradient sg =
        smooth_quantum_gradient(f, precision, lipschitz, out.effective_smoothness, out.sampled_center, rng, opts);
    out.gradient = std::move(sg.gradient);
    out.params = sg.params;
    out.repetitions = sg.repetitions;
    out.logical_queries = sg.logical_queries;
    out.raw_queries = sg.raw_queries;
    return out;
}

/// Upper bound on the expected certificate violation for the sampled subgradient.
inline double certificate_ceiling(std::size_t n, double lipschitz, double precision, double r1) {
    return 5000.0 * lipschitz * std::pow(static_cast<double>(n), 5.0 / 3.0) * std::cbrt(precision) / std::cbrt(r1);
}

using ScalarFunction = std::function<double(std::span<const double>)>;

/**
 * Smallest zeta >= 0 with f(q) >= f(x) + <g, q - x> - zeta ||q - x||_inf - 4 n r1 L
 * over the samples. Samples equal to x are skipped.
 */
inline double subgradient_certificate_check(const ScalarFunction &f, std::span<const double> x,
                                            std::span<const double> g, double r1, double lipschitz,
                                            const std::vector<Vec> &q_samples) {
    if (q_samples.empty()) {
        throw ParamError("subgradient_certificate_check: no samples");
    }
    const double slack = 4.0 * static_cast<double>(x.size()) * r1 * lipschitz;
    const double fx = f(x);
    double worst = 0.0;
    for (const Vec &q : q_samples) {
        require_finite(q, x.size(), "certificate sample");
        const Vec d = sub(q, x);
        const double dist = norm_inf(d);
        if (dist == 0.0) {
            continue;
        }
        const double excess = fx + dot(g, d) - slack - f(q);
        worst = std::max(worst, excess / dist);
    }
    return worst;
}

/// Tensor grid with `per_axis` points per coordinate spanning [x - radius, x + radius].
inline std::vector<Vec> box_grid(std::span<const double> x, double radius, std::size_t per_axis) {
    if (per_axis < 2) {
        throw ParamError("box_grid: need at least two points per axis");
    }
    const std::size_t n = x.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        total *= per_axis;
    }
    std::vector<Vec> pts;
    pts.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        Vec q(n);
        std::size_t rest = idx;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = rest % per_axis;
            rest /= per_axis;
            q[i] = x[i] - radius + 2.0 * radius * static_cast<double>(k) / static_cast<double>(per_axis - 1);
        }
        pts.push_back(std::move(q));
    }
    return pts;
}

/// |f(z) - f(y) - <grad f(y), z - y>|.
inline double deviation_from_linearity(const ScalarFunction &f, const std::function<Vec(std::span<const double>)> &grad,
                                       std::span<const double> y, std::span<const double> z) {
    const Vec g = grad(y);
    return std::abs(f(z) - f(y) - dot(g, sub(z, y)));
}

/// Forward differences (f(x + h e_i) - f(x)) / h with exactly n + 1 evaluation queries.
inline Vec finite_difference_gradient(EvaluationOracle &f, std::span<const double> x, double h) {
    if (!(h > 0.0)) {
        throw ParamError("finite_difference_gradient: step must be positive");
    }
    const double base = f.query(x);
    Vec g(x.size());
    Vec probe(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + h;
        g[i] = (f.query(probe) - base) / h;
        probe[i] = x[i];
    }
    return g;
}

/// One row of the per-subgradient query comparison.
struct QuerySeparationRow {
    std::size_t n = 0;
    double precision = 0.0;
    std::uint64_t register_points = 0;
    std::uint64_t quantum_logical = 0;
    /// Raw simulator evaluations; zero for formula rows.
    std::uint64_t quantum_raw = 0;
    std::uint64_t classical = 0;
    bool measured = false;
};

/**
 * Evaluation precision at which the subgradient routine in dimension n runs with
 * sqrt(n eps beta_eff) / L = 1 / (36 pi N), the middle of the admissible band for
 * a register of N points.
 */
inline double precision_for_register(std::size_t n, double lipschitz, double r1, std::uint64_t points) {
    const double ratio = 1.0 / (36.0 * kPi * static_cast<double>(points));
    const double inner = lipschitz * ratio * ratio / (2.0 * std::pow(static_cast<double>(n), 4.0 / 3.0));
    return std::pow(inner, 1.5) * r1;
}

/**
 * Logical queries per subgradient against the n + 1 forward-difference evaluations.
 * Dimensions in `measured` are run end to end on sum |x_i| at the origin;
 * the rest use the repetition count formula.
 */
inline std::vector<QuerySeparationRow> query_separation_table(const std::vector<std::size_t> &measured,
                                                              const std::vector<std::size_t> &formula,
                                                              std::uint64_t points, double lipschitz, double r1,
                                                              std::uint64_t seed,
                                                              const SimulationOptions &opts = {}) {
    std::vector<QuerySeparationRow> rows;
    auto base_row = [&](std::size_t n) {
        QuerySeparationRow row;
        row.n = n;
        row.precision = precision_for_register(n, lipschitz, r1, points);
        row.classical = n + 1;
        return row;
    };
    for (std::size_t n : measured) {
        QuerySeparationRow row = base_row(n);
        EvaluationOracle f(abs_sum_objective(n), row.precision);
        Rng rng(seed + n);
        const Vec origin(n, 0.0);
        const SubgradientResult res = quantum_subgradient(f, row.precision, lipschitz, origin, r1, rng, opts);
        row.register_points = res.params.points;
        row.quantum_logical = res.logical_queries;
        row.quantum_raw = res.raw_queries;
        row.measured = true;
        rows.push_back(row);
    }
    for (std::size_t n : formula) {
        QuerySeparationRow row = base_row(n);
        const double beta = effective_smoothness(n, lipschitz, r1, row.precision);
        const GradParams params = derive_grad_params(n, lipschitz, beta, row.precision);
        row.register_points = params.points;
        row.quantum_logical = repetitions_for(params.error_scale(), lipschitz);
        rows.push_back(row);
    }
    return rows;
}

} // namespace qcvx
