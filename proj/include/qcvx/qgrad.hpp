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
 * @file qgrad.hpp
 * Statevector simulation of the Fourier-sampling gradient estimator and its
 * repeated, majority-filtered variant.
 */
#pragma once

#include <algorithm>
#include <complex>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "qcvx/oracles.hpp"

namespace qcvx {

using Complex = std::complex<double>;

inline constexpr std::size_t kDefaultStatevectorBudget = std::size_t{1} << 22;
inline constexpr const char *kBudgetEnvVar = "QCVX_MAX_AMPLITUDES";

/// Amplitude cap, taken from QCVX_MAX_AMPLITUDES when set to a positive integer.
inline std::size_t default_statevector_budget() {
    if (const char *env = std::getenv(kBudgetEnvVar)) {
        char *end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<std::size_t>(v);
        }
    }
    return kDefaultStatevectorBudget;
}

struct SimulationOptions {
    std::size_t max_amplitudes = default_statevector_budget();
};

/// Grid and precision parameters of one gradient estimate.
struct GradParams {
    std::size_t n = 0;
    double lipschitz = 0.0;
    double smoothness = 0.0;
    double precision = 0.0;
    /// Side of the evaluation grid, 2 sqrt(precision / (n smoothness)).
    double grid_size = 0.0;
    unsigned bits = 0;
    std::uint64_t points = 0;
    unsigned phase_bits = 0;
    std::uint64_t phase_levels = 0;

    /// sqrt(n * precision * smoothness), the scale every error bound is stated in.
    double error_scale() const {
        return std::sqrt(static_cast<double>(n) * precision * smoothness);
    }
};

/**
 * Picks the smallest register size N = 2^b with 24 pi s / L <= 1/N <= 48 pi s / L
 * (s = sqrt(n eps beta)) and the smallest phase resolution N0 with
 * N eps / (2 L l) <= 1/N0 <= N eps / (L l).
 */
inline GradParams derive_grad_params(std::size_t n, double lipschitz, double smoothness, double precision) {
    if (n == 0 || !(lipschitz > 0.0) || !(smoothness > 0.0) || !(precision > 0.0)) {
        throw ParamError("derive_grad_params: all inputs must be positive");
    }
    GradParams p;
    p.n = n;
    p.lipschitz = lipschitz;
    p.smoothness = smoothness;
    p.precision = precision;
    p.grid_size = 2.0 * std::sqrt(precision / (static_cast<double>(n) * smoothness));
    const double s = p.error_scale();
    const double lower = lipschitz / (48.0 * kPi * s);
    if (!(lower > 1.0)) {
        std::ostringstream msg;
        msg << std::setprecision(17) << "parameters infeasible: need 48*pi*sqrt(n*eps*beta)/L < 1 for a register of "
            << "at least one bit, got " << 1.0 / lower;
        throw ParamsInfeasible(msg.str());
    }
    int b = static_cast<int>(std::ceil(std::log2(lower) - 1e-12));
    b = std::max(b, 1);
    while (std::ldexp(1.0, b) < lower * (1.0 - 1e-12)) {
        ++b;
    }
    if (b > 62) {
        throw ParamsInfeasible("parameters infeasible: register would need more than 62 bits");
    }
    p.bits = static_cast<unsigned>(b);
    p.points = std::uint64_t{1} << p.bits;
    const double need = lipschitz * p.grid_size / (static_cast<double>(p.points) * precision);
    int b0 = std::max(0, static_cast<int>(std::ceil(std::log2(need) - 1e-12)));
    while (std::ldexp(1.0, b0) < need * (1.0 - 1e-12)) {
        ++b0;
    }
    if (b0 > 62) {
        throw ParamsInfeasible("parameters infeasible: phase register would need more than 62 bits");
    }
    p.phase_bits = static_cast<unsigned>(b0);
    p.phase_levels = std::uint64_t{1} << p.phase_bits;
    return p;
}

/// n registers of b qubits each; register j of the flat index has stride N^j.
struct PhaseState {
    std::size_t n = 0;
    unsigned bits = 0;
    std::vector<Complex> amplitudes;

    std::uint64_t points() const { return std::uint64_t{1} << bits; }
    double norm() const {
        double s = 0.0;
        for (const Complex &a : amplitudes) {
            s += std::norm(a);
        }
        return std::sqrt(s);
    }
};

/// N^n, or StateTooLarge once it passes the budget.
inline std::size_t checked_state_size(std::size_t n, std::uint64_t points, std::size_t budget) {
    std::size_t size = 1;
    for (std::size_t j = 0; j < n; ++j) {
        if (size > budget / points) {
            throw StateTooLarge("statevector of " + std::to_string(points) + "^" + std::to_string(n) +
                                " amplitudes exceeds the budget of " + std::to_string(budget));
        }
        size *= points;
    }
    if (size > budget) {
        throw StateTooLarge("statevector exceeds the budget of " + std::to_string(budget));
    }
    return size;
}

/// Group element in {-N/2, ..., N/2 - 1} held by register `reg` of a flat index.
inline std::int64_t register_value(std::size_t index, std::size_t reg, unsigned bits) {
    const std::uint64_t local = (index >> (reg * bits)) & ((std::uint64_t{1} << bits) - 1);
    return static_cast<std::int64_t>(local) - (std::int64_t{1} << (bits - 1));
}

/**
 * Phase state N^{-n/2} sum_x exp(2 pi i F(x)) |x> with
 * F(x) = N/(2 L l) [f(x0 + l x / N) - f(x0)] rounded to the nearest multiple of 1/N0.
 * Issues exactly N^n evaluation queries; the x = 0 node supplies f(x0).
 */
inline PhaseState build_phase_state(EvaluationOracle &f, const GradParams &params, std::span<const double> x0,
                                    const SimulationOptions &opts = {}) {
    if (x0.size() != params.n || f.dim() != params.n) {
        throw InvalidPoint("build_phase_state: dimension mismatch");
    }
    const std::size_t n = params.n;
    const std::uint64_t N = params.points;
    const std::size_t size = checked_state_size(n, N, opts.max_amplitudes);
    const double spacing = params.grid_size / static_cast<double>(N);

    std::vector<double> values(size);
    Vec y(n);
    std::size_t origin = 0;
    for (std::size_t idx = 0; idx < size; ++idx) {
        bool at_origin = true;
        for (std::size_t j = 0; j < n; ++j) {
            const std::int64_t g = register_value(idx, j, params.bits);
            at_origin = at_origin && g == 0;
            y[j] = x0[j] + spacing * static_cast<double>(g);
        }
        if (at_origin) {
            origin = idx;
        }
        values[idx] = f.query(y);
    }

    const double scale = static_cast<double>(N) / (2.0 * params.lipschitz * params.grid_size);
    const double levels = static_cast<double>(params.phase_levels);
    const auto modulus = static_cast<std::int64_t>(params.phase_levels);
    const double amp = std::pow(static_cast<double>(N), -0.5 * static_cast<double>(n));
    PhaseState state{n, params.bits, std::vector<Complex>(size)};
    for (std::size_t idx = 0; idx < size; ++idx) {
        const double phase = scale * (values[idx] - values[origin]);
        const auto ticks = static_cast<std::int64_t>(std::nearbyint(phase * levels));
        const std::int64_t wrapped = ((ticks % modulus) + modulus) % modulus;
        state.amplitudes[idx] = std::polar(amp, 2.0 * kPi * static_cast<double>(wrapped) / levels);
    }
    return state;
}

namespace detail {

/// In-place y[k] = sum_x v[x] exp(-2 pi i x k / N) / sqrt(N), N a power of two.
inline void inverse_dft_unitary(std::vector<Complex> &v) {
    const std::size_t N = v.size();
    for (std::size_t i = 1, j = 0; i < N; ++i) {
        std::size_t bit = N >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(v[i], v[j]);
        }
    }
    for (std::size_t len = 2; len <= N; len <<= 1) {
        const double angle = -2.0 * kPi / static_cast<double>(len);
        for (std::size_t start = 0; start < N; start += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Complex w = std::polar(1.0, angle * static_cast<double>(k));
                const Complex a = v[start + k];
                const Complex b = v[start + k + len / 2] * w;
                v[start + k] = a + b;
                v[start + k + len / 2] = a - b;
            }
        }
    }
    const double norm = 1.0 / std::sqrt(static_cast<double>(N));
    for (Complex &a : v) {
        a *= norm;
    }
}

} // namespace detail

/**
 * Inverse Fourier transform over G = {-N/2, ..., N/2 - 1} on one register,
 * computed as (-1)^{N/2} U QFT_N^{-1} U with U|x> = exp(i pi x)|x>.
 * The (-1)^{N/2} factor is the global phase that makes the identity exact.
 */
inline void inverse_qft_G(PhaseState &state, std::size_t reg) {
    if (reg >= state.n) {
        throw ParamError("inverse_qft_G: register index out of range");
    }
    const std::size_t N = static_cast<std::size_t>(state.points());
    const std::size_t stride = std::size_t{1} << (reg * state.bits);
    const double global = (N / 2) % 2 == 0 ? 1.0 : -1.0;
    std::vector<Complex> fiber(N);
    for (std::size_t base = 0; base < state.amplitudes.size(); ++base) {
        if ((base / stride) % N != 0) {
            continue;
        }
        for (std::size_t x = 0; x < N; ++x) {
            const double u = (x % 2 == 0) ? 1.0 : -1.0;
            fiber[x] = u * state.amplitudes[base + x * stride];
        }
        detail::inverse_dft_unitary(fiber);
        for (std::size_t x = 0; x < N; ++x) {
            const double u = (x % 2 == 0) ? 1.0 : -1.0;
            state.amplitudes[base + x * stride] = global * u * fiber[x];
        }
    }
}

inline std::vector<double> outcome_probabilities(const PhaseState &state) {
    std::vector<double> probs(state.amplitudes.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        probs[i] = std::norm(state.amplitudes[i]);
    }
    return probs;
}

/// Samples a flat outcome index by cumulative inversion of one uniform draw.
inline std::size_t sample_outcome(const PhaseState &state, Rng &rng) {
    double total = 0.0;
    for (const Complex &a : state.amplitudes) {
        total += std::norm(a);
    }
    const double target = uniform01(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < state.amplitudes.size(); ++i) {
        acc += std::norm(state.amplitudes[i]);
        if (target < acc) {
            return i;
        }
    }
    return state.amplitudes.size() - 1;
}

/// CSV with one column per register (outcome in G) and the outcome probability.
inline void write_outcome_csv(std::ostream &out, const PhaseState &state) {
    for (std::size_t j = 0; j < state.n; ++j) {
        out << "k" << (j + 1) << ',';
    }
    out << "probability\n";
    const auto probs = outcome_probabilities(state);
    out << std::setprecision(17);
    for (std::size_t idx = 0; idx < probs.size(); ++idx) {
        for (std::size_t j = 0; j < state.n; ++j) {
            out << register_value(idx, j, state.bits) << ',';
        }
        out << probs[idx] << '\n';
    }
}

struct GradEstimate {
    Vec gradient;
    std::vector<std::int64_t> outcome;
    GradParams params;
    std::uint64_t logical_queries = 0;
    std::uint64_t raw_queries = 0;
};

/// Phase state after the per-register inverse transform, ready to measure.
inline PhaseState measured_state(EvaluationOracle &f, const GradParams &params, std::span<const double> x0,
                                 const SimulationOptions &opts = {}) {
    PhaseState state = build_phase_state(f, params, x0, opts);
    for (std::size_t j = 0; j < params.n; ++j) {
        inverse_qft_G(state, j);
    }
    return state;
}

inline void require_oracle_precision(const EvaluationOracle &f, double precision) {
    if (f.precision() > precision) {
        throw ParamError("evaluation oracle precision exceeds the requested eps");
    }
}

/// One Fourier-sampling gradient estimate; one logical phase query, N^n raw evaluations.
inline GradEstimate gradient_estimate(EvaluationOracle &f, double precision, double lipschitz, double smoothness,
                                      std::span<const double> x0, Rng &rng, const SimulationOptions &opts = {}) {
    require_oracle_precision(f, precision);
    const GradParams params = derive_grad_params(x0.size(), lipschitz, smoothness, precision);
    checked_state_size(params.n, params.points, opts.max_amplitudes);
    const std::uint64_t before = f.count();
    const PhaseState state = measured_state(f, params, x0, opts);
    const std::size_t idx = sample_outcome(state, rng);

    GradEstimate est;
    est.params = params;
    est.logical_queries = 1;
    est.raw_queries = f.count() - before;
    est.outcome.resize(params.n);
    est.gradient.resize(params.n);
    const double unit = 2.0 * lipschitz / static_cast<double>(params.points);
    for (std::size_t j = 0; j < params.n; ++j) {
        est.outcome[j] = register_value(idx, j, params.bits);
        est.gradient[j] = unit * static_cast<double>(est.outcome[j]);
    }
    return est;
}

/// Smallest T >= 1 with 2 exp(-T^2 / 24) <= 750 s / L.
inline std::size_t repetitions_for(double error_scale, double lipschitz) {
    const double rhs = 750.0 * error_scale / lipschitz;
    std::size_t t = 1;
    if (rhs < 2.0) {
        t = static_cast<std::size_t>(std::ceil(std::sqrt(24.0 * std::log(2.0 / rhs))));
        t = std::max<std::size_t>(t, 1);
        while (t > 1 && 2.0 * std::exp(-static_cast<double>((t - 1) * (t - 1)) / 24.0) <= rhs) {
            --t;
        }
        while (2.0 * std::exp(-static_cast<double>(t * t) / 24.0) > rhs) {
            ++t;
        }
    }
    return t;
}

/**
 * Per coordinate: if more than half of the estimates fall in a window of the
 * given width, the median of the densest such window; otherwise 0. Clamped to [-L, L].
 */
inline Vec aggregate_estimates(const std::vector<Vec> &estimates, double width, double lipschitz) {
    if (estimates.empty()) {
        throw ParamError("aggregate_estimates: no estimates");
    }
    const std::size_t n = estimates.front().size();
    const std::size_t t = estimates.size();
    Vec out(n, 0.0);
    std::vector<double> column(t);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < t; ++r) {
            column[r] = estimates[r][i];
        }
        std::sort(column.begin(), column.end());
        std::size_t best_lo = 0;
        std::size_t best_count = 0;
        std::size_t hi = 0;
        for (std::size_t lo = 0; lo < t; ++lo) {
            hi = std::max(hi, lo);
            while (hi + 1 < t && column[hi + 1] - column[lo] <= width) {
                ++hi;
            }
            if (hi - lo + 1 > best_count) {
                best_count = hi - lo + 1;
                best_lo = lo;
            }
        }
        if (2 * best_count > t) {
            const std::size_t mid = best_lo + best_count / 2;
            const double median =
                best_count % 2 == 1 ? column[mid] : 0.5 * (column[mid - 1] + column[mid]);
            out[i] = std::clamp(median, -lipschitz, lipschitz);
        }
    }
    return out;
}

struct SmoothGradient {
    Vec gradient;
    std::size_t repetitions = 0;
    GradParams params;
    std::uint64_t logical_queries = 0;
    std::uint64_t raw_queries = 0;
};

/// Repeats gradient_estimate T times and keeps the per-coordinate majority median.
inline SmoothGradient smooth_quantum_gradient(EvaluationOracle &f, double precision, double lipschitz,
                                              double smoothness, std::span<const double> x, Rng &rng,
                                              const SimulationOptions &opts = {}) {
    require_oracle_precision(f, precision);
    const GradParams params = derive_grad_params(x.size(), lipschitz, smoothness, precision);
    checked_state_size(params.n, params.points, opts.max_amplitudes);
    const std::size_t reps = repetitions_for(params.error_scale(), lipschitz);
    SmoothGradient out;
    out.params = params;
    out.repetitions = reps;
    std::vector<Vec> estimates;
    estimates.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        GradEstimate est = gradient_estimate(f, precision, lipschitz, smoothness, x, rng, opts);
        out.logical_queries += est.logical_queries;
        out.raw_queries += est.raw_queries;
        estimates.push_back(std::move(est.gradient));
    }
    out.gradient = aggregate_estimates(estimates, 3000.0 * params.error_scale(), lipschitz);
    return out;
}

struct StateDistance {
    double two_norm_gap = 0.0;
    double trace_distance = 0.0;
};

/**
 * Distance between the prepared phase state and the ideal
 * N^{-n/2} sum_x exp(2 pi i g.x / (2L)) |x> for an analytic gradient g.
 */
inline StateDistance state_distance_diagnostic(EvaluationOracle &f, std::span<const double> gradient,
                                               const GradParams &params, std::span<const double> x0,
                                               const SimulationOptions &opts = {}) {
    if (gradient.size() != params.n) {
        throw InvalidPoint("state_distance_diagnostic: gradient dimension mismatch");
    }
    const PhaseState actual = build_phase_state(f, params, x0, opts);
    const double amp = std::pow(static_cast<double>(params.points), -0.5 * static_cast<double>(params.n));
    double gap2 = 0.0;
    Complex overlap{0.0, 0.0};
    for (std::size_t idx = 0; idx < actual.amplitudes.size(); ++idx) {
        double phase = 0.0;
        for (std::size_t j = 0; j < params.n; ++j) {
            phase += gradient[j] * static_cast<double>(register_value(idx, j, params.bits));
        }
        const Complex ideal = std::polar(amp, 2.0 * kPi * phase / (2.0 * params.lipschitz));
        gap2 += std::norm(actual.amplitudes[idx] - ideal);
        overlap += std::conj(actual.amplitudes[idx]) * ideal;
    }
    StateDistance d;
    d.two_norm_gap = std::sqrt(gap2);
    d.trace_distance = 2.0 * std::sqrt(std::max(0.0, 1.0 - std::norm(overlap)));
    return d;
}

} // namespace qcvx
