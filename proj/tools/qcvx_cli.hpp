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
 * @file qcvx_cli.hpp
 * Experiment harness behind the `qcvx` executable. Every subcommand writes a
 * single CSV: a `#` line echoing the version and resolved configuration, the
 * column header, the rows, then optional `# summary` lines.
 */
#pragma once

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "config.hpp"
#include "qcvx.hpp"

namespace qcvx::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNoConvergence = 3, kContractViolation = 4 };

/// Bad or missing command-line input.
class UsageError : public Error {
  public:
    using Error::Error;
};

inline std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

inline std::string num(std::uint64_t v) { return std::to_string(v); }

inline std::string join(std::span<const double> values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            s += ';';
        }
        s += num(values[i]);
    }
    return s;
}

inline std::string bits_text(std::span<const std::uint8_t> b) {
    std::string s;
    for (std::uint8_t v : b) {
        s += v ? '1' : '0';
    }
    return s;
}

inline std::string one_based(const Permutation &p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i > 0) {
            s += ';';
        }
        s += std::to_string(p[i] + 1);
    }
    return s;
}

inline Vec parse_list(const std::string &text, const std::string &what) {
    Vec out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            throw UsageError(what + ": empty list entry");
        }
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception &) {
            throw UsageError(what + ": '" + item + "' is not a number");
        }
        if (used != item.size()) {
            throw UsageError(what + ": '" + item + "' is not a number");
        }
        out.push_back(v);
    }
    return out;
}

/// Accepts "101" or "1,0,1".
inline Bits parse_bits(const std::string &text, const std::string &what) {
    Bits out;
    for (char ch : text) {
        if (ch == '0' || ch == '1') {
            out.push_back(ch == '1' ? 1 : 0);
        } else if (ch != ',') {
            throw UsageError(what + ": expected a string of 0 and 1");
        }
    }
    if (out.empty()) {
        throw UsageError(what + ": empty bit string");
    }
    return out;
}

inline Vec list_or_zeros(const std::string &text, std::size_t n, const std::string &what) {
    if (text.empty()) {
        return Vec(n, 0.0);
    }
    Vec v = parse_list(text, what);
    if (v.size() != n) {
        throw UsageError(what + ": expected " + std::to_string(n) + " entries");
    }
    return v;
}

inline Bits random_bits(std::size_t n, Rng &rng) {
    Bits b(n);
    for (auto &v : b) {
        v = static_cast<std::uint8_t>(rng() >> 63);
    }
    return b;
}

using Echo = std::vector<std::pair<std::string, std::string>>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> summary;
};

inline void write_table(std::ostream &out, const std::string &command, const Echo &echo, const Table &table) {
    out << "# qcvx " << kVersion << ' ' << command;
    for (const auto &[key, value] : echo) {
        out << ' ' << key << '=' << value;
    }
    out << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << table.columns[i];
    }
    out << '\n';
    for (const auto &row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << row[i];
        }
        out << '\n';
    }
    for (const auto &line : table.summary) {
        out << "# summary " << line << '\n';
    }
}

struct CommonOptions {
    std::uint64_t seed = 1;
    std::size_t trials = 0;
    std::string out;
};

// ---------------------------------------------------------------- gradest

struct GradestOptions : CommonOptions {
    std::size_t n = 1;
    double lipschitz = 1.0;
    double smoothness = 1.0;
    double eps = 0.0;
    std::string objective = "quadratic";
    std::string grad;
    std::string x0;
    bool smooth = false;
    std::string noise = "exact";
    std::string dist_out;
};

inline NoisePolicy noise_from_name(const std::string &name, double eps) {
    if (name == "exact") {
        return noise::Exact{};
    }
    if (name == "round") {
        return noise::RoundToGrid{2.0 * eps};
    }
    if (name == "offset") {
        return noise::AdditiveDeterministic{eps};
    }
    throw UsageError("--noise must be exact, round or offset");
}

inline int cmd_gradest(const GradestOptions &o, std::ostream &out) {
    if (!(o.eps > 0.0)) {
        throw UsageError("gradest: --eps is required and must be positive");
    }
    const Vec x0 = list_or_zeros(o.x0, o.n, "--x0");
    Vec grad = list_or_zeros(o.grad, o.n, "--grad");
    ObjectiveFunction obj;
    if (o.objective == "linear") {
        obj = linear_objective(grad);
    } else if (o.objective == "constant") {
        grad.assign(o.n, 0.0);
        obj = linear_objective(grad);
    } else if (o.objective == "quadratic") {
        Vec shift(o.n);
        for (std::size_t i = 0; i < o.n; ++i) {
            shift[i] = x0[i] - grad[i] / o.smoothness;
        }
        obj = quadratic_objective(Vec(o.n, o.smoothness), shift, o.lipschitz);
    } else {
        throw UsageError("--objective must be linear, quadratic or constant");
    }
    const NoisePolicy policy = noise_from_name(o.noise, o.eps);
    const GradParams params = derive_grad_params(o.n, o.lipschitz, o.smoothness, o.eps);
    const double threshold = 1500.0 * params.error_scale();
    const double ceiling = 3000.0 * std::pow(static_cast<double>(o.n), 1.5) * std::sqrt(o.eps * o.smoothness);

    Table table;
    table.columns = {"seed", "coordinate", "estimate", "true_gradient", "abs_error", "over_threshold"};
    std::uint64_t failures = 0;
    std::uint64_t logical = 0;
    std::uint64_t raw = 0;
    double l1_total = 0.0;
    for (std::size_t t = 0; t < o.trials; ++t) {
        const std::uint64_t seed = o.seed + t;
        Rng rng(seed);
        EvaluationOracle f(obj, o.eps, policy);
        Vec est;
        if (o.smooth) {
            SmoothGradient sg = smooth_quantum_gradient(f, o.eps, o.lipschitz, o.smoothness, x0, rng);
            logical += sg.logical_queries;
            raw += sg.raw_queries;
            est = std::move(sg.gradient);
        } else {
            GradEstimate ge = gradient_estimate(f, o.eps, o.lipschitz, o.smoothness, x0, rng);
            logical += ge.logical_queries;
            raw += ge.raw_queries;
            est = std::move(ge.gradient);
        }
        for (std::size_t i = 0; i < o.n; ++i) {
            const double err = std::abs(est[i] - grad[i]);
            const bool over = err > threshold;
            failures += over ? 1 : 0;
            l1_total += err;
            table.rows.push_back({num(seed), num(std::uint64_t{i + 1}), num(est[i]), num(grad[i]), num(err),
                                  over ? "1" : "0"});
        }
    }
    const double trials = static_cast<double>(std::max<std::size_t>(o.trials, 1));
    table.summary.push_back("trials=" + num(std::uint64_t{o.trials}) + " register_points=" + num(params.points) +
                            " phase_levels=" + num(params.phase_levels));
    table.summary.push_back("failure_rate=" + num(static_cast<double>(failures) / (trials * static_cast<double>(o.n))) +
                            " threshold=" + num(threshold));
    table.summary.push_back("mean_l1_error=" + num(l1_total / trials) + " l1_ceiling=" + num(ceiling));
    table.summary.push_back("logical_queries=" + num(logical) + " raw_queries=" + num(raw));

    const Echo echo{{"n", num(std::uint64_t{o.n})},
                    {"L", num(o.lipschitz)},
                    {"beta", num(o.smoothness)},
                    {"eps", num(o.eps)},
                    {"objective", o.objective},
                    {"grad", join(grad)},
                    {"x0", join(x0)},
                    {"smooth", o.smooth ? "1" : "0"},
                    {"noise", o.noise},
                    {"seed", num(o.seed)},
                    {"trials", num(std::uint64_t{o.trials})}};
    write_table(out, "gradest", echo, table);

    if (!o.dist_out.empty()) {
        std::ofstream dist(o.dist_out);
        if (!dist) {
            throw UsageError("cannot open --dist-out file '" + o.dist_out + "'");
        }
        EvaluationOracle f(obj, o.eps, policy);
        write_outcome_csv(dist, measured_state(f, params, x0));
    }
    return kOk;
}

// ---------------------------------------------------------------- subgrad

struct SubgradOptions : CommonOptions {
    std::size_t n = 1;
    double eps = 0.0;
    double r1 = 0.0;
    double lipschitz = 1.0;
    std::string objective = "abs_sum";
    std::string x;
    std::size_t q_points = 1000;
    double q_radius = 1.0;
    double fd_step = 0.0;
    bool table = false;
    std::uint64_t table_points = 32;
    unsigned table_max_exp = 6;
};

inline int cmd_subgrad_table(const SubgradOptions &o, std::ostream &out) {
    const double r1 = o.r1 > 0.0 ? o.r1 : 0.1;
    std::vector<std::size_t> formula{4, 5, 6, 7, 8, 9};
    std::size_t dim = 10;
    for (unsigned e = 1; e <= o.table_max_exp; ++e, dim *= 10) {
        formula.push_back(dim);
    }
    const auto rows = query_separation_table({1, 2, 3}, formula, o.table_points, o.lipschitz, r1, o.seed);
    Table table;
    table.columns = {"n",           "source",         "register_points", "precision",
                     "quantum_logical_queries", "quantum_raw_queries", "finite_difference_queries", "quantum_fewer"};
    for (const auto &row : rows) {
        table.rows.push_back({num(std::uint64_t{row.n}), row.measured ? "measured" : "formula", num(row.register_points),
                              num(row.precision), num(row.quantum_logical), row.measured ? num(row.quantum_raw) : "",
                              num(row.classical), row.quantum_logical < row.classical ? "1" : "0"});
    }
    const Echo echo{{"table", "1"},
                    {"L", num(o.lipschitz)},
                    {"r1", num(r1)},
                    {"table_points", num(o.table_points)},
                    {"table_max_exp", num(std::uint64_t{o.table_max_exp})},
                    {"seed", num(o.seed)}};
    write_table(out, "subgrad", echo, table);
    return kOk;
}

inline int cmd_subgrad(const SubgradOptions &o, std::ostream &out) {
    if (o.table) {
        return cmd_subgrad_table(o, out);
    }
    if (!(o.eps > 0.0) || !(o.r1 > 0.0)) {
        throw UsageError("subgrad: --eps and --r1 are required and must be positive");
    }
    const Vec x = list_or_zeros(o.x, o.n, "--x");
    ObjectiveFunction obj;
    if (o.objective == "abs_sum") {
        obj = abs_sum_objective(o.n);
    } else if (o.objective == "quadratic") {
        obj = quadratic_objective(Vec(o.n, 1.0), Vec(o.n, 0.0), o.lipschitz);
    } else {
        throw UsageError("--objective must be abs_sum or quadratic");
    }
    const auto per_axis = static_cast<std::size_t>(
        std::max(2.0, std::round(std::pow(static_cast<double>(o.q_points), 1.0 / static_cast<double>(o.n)))));
    const std::vector<Vec> grid = box_grid(x, o.q_radius, per_axis);
    const double ceiling = certificate_ceiling(o.n, o.lipschitz, o.eps, o.r1);
    const double step = o.fd_step > 0.0 ? o.fd_step : std::sqrt(o.eps);

    Table table;
    table.columns = {"seed",           "zeta_hat",      "zeta_ceiling", "logical_queries", "raw_queries",
                     "classical_queries", "gradient", "fd_gradient",  "sampled_center"};
    double zeta_total = 0.0;
    for (std::size_t t = 0; t < o.trials; ++t) {
        const std::uint64_t seed = o.seed + t;
        Rng rng(seed);
        EvaluationOracle f(obj, o.eps);
        const SubgradientResult res = quantum_subgradient(f, o.eps, o.lipschitz, x, o.r1, rng);
        const double zeta = subgradient_certificate_check(obj.evaluate, x, res.gradient, o.r1, o.lipschitz, grid);
        zeta_total += zeta;
        EvaluationOracle fd(obj, o.eps);
        const Vec fd_grad = finite_difference_gradient(fd, x, step);
        table.rows.push_back({num(seed), num(zeta), num(ceiling), num(res.logical_queries), num(res.raw_queries),
                              num(fd.count()), join(res.gradient), join(fd_grad), join(res.sampled_center)});
    }
    const double trials = static_cast<double>(std::max<std::size_t>(o.trials, 1));
    table.summary.push_back("mean_zeta_hat=" + num(zeta_total / trials) + " zeta_ceiling=" + num(ceiling) +
                            " q_points=" + num(std::uint64_t{grid.size()}));
    const Echo echo{{"n", num(std::uint64_t{o.n})},   {"eps", num(o.eps)},
                    {"r1", num(o.r1)},                {"L", num(o.lipschitz)},
                    {"objective", o.objective},       {"x", join(x)},
                    {"q_points", num(std::uint64_t{o.q_points})}, {"q_radius", num(o.q_radius)},
                    {"fd_step", num(step)},           {"seed", num(o.seed)},
                    {"trials", num(std::uint64_t{o.trials})}};
    write_table(out, "subgrad", echo, table);
    return kOk;
}

// ---------------------------------------------------------------- optimize

struct OptimizeCliOptions : CommonOptions {
    std::string family;
    std::size_t n = 2;
    double radius = 1.0;
    std::string center;
    std::string lo;
    std::string hi;
    std::string x0;
    double side = 1.0;
    std::string s;
    std::string c;
    std::string objective;
    std::string direction;
    double eps = 1e-2;
    double delta = 1e-14;
    std::uint64_t max_iter = 0;
    std::string engine = "fd";
    std::string cut = "central";
    std::optional<FamilySpec> body_spec;
    std::optional<FamilySpec> objective_spec;
};

inline FamilySpec body_from_flags(const OptimizeCliOptions &o) {
    FamilySpec spec{o.family, {}};
    auto put_list = [&](const std::string &key, const std::string &text) {
        if (!text.empty()) {
            spec.params[key] = parse_list(text, "--" + key);
        }
    };
    auto put_bits = [&](const std::string &key, const std::string &text) {
        if (text.empty()) {
            throw UsageError("--" + key + " is required for family " + o.family);
        }
        const Bits b = parse_bits(text, "--" + key);
        spec.params[key] = Vec(b.begin(), b.end());
    };
    if (o.family == "ball") {
        spec.params["n"] = {static_cast<double>(o.n)};
        spec.params["radius"] = {o.radius};
        put_list("center", o.center);
    } else if (o.family == "box") {
        put_list("lo", o.lo.empty() ? std::string() : o.lo);
        put_list("hi", o.hi.empty() ? std::string() : o.hi);
        if (o.lo.empty() || o.hi.empty()) {
            throw UsageError("--lo and --hi are required for family box");
        }
    } else if (o.family == "smoothed_hypercube") {
        spec.params["x0"] = list_or_zeros(o.x0, o.n, "--x0");
        if (o.x0.empty()) {
            spec.params["x0"] = Vec(o.n, 1.0);
        }
        spec.params["l"] = {o.side};
    } else if (o.family == "sum_coords") {
        put_bits("s", o.s);
    } else if (o.family == "max_norm") {
        put_bits("c", o.c);
    } else if (o.family == "combined") {
        put_bits("s", o.s);
        put_bits("c", o.c);
    } else if (o.family.empty()) {
        throw UsageError("optimize: --family or a config 'body' table is required");
    } else {
        throw UsageError("unknown --family '" + o.family + "'");
    }
    return spec;
}

inline ObjectiveFunction objective_from_flags(const OptimizeCliOptions &o, std::size_t n) {
    const std::string name = o.objective.empty() ? "linear" : o.objective;
    ParamTable p;
    p["n"] = {static_cast<double>(n)};
    if (name == "linear") {
        Vec dir(n, 0.0);
        dir[0] = 1.0;
        if (!o.direction.empty()) {
            dir = list_or_zeros(o.direction, n, "--direction");
        }
        p["c"] = dir;
    } else if (name == "quadratic") {
        p["curvature"] = Vec(n, 2.0);
        p["shift"] = o.center.empty() ? Vec(n, 0.0) : list_or_zeros(o.center, n, "--center");
        p["lipschitz"] = {4.0 * (o.radius + 1.0)};
    } else if (name == "max_norm") {
        const Bits b = parse_bits(o.c, "--c");
        p["c"] = Vec(b.begin(), b.end());
    }
    return make_objective(name, p);
}

inline int cmd_optimize(const OptimizeCliOptions &o, std::ostream &out) {
    if (!(o.eps > 0.0) || !(o.delta >= 0.0)) {
        throw UsageError("optimize: --eps must be positive and --delta non-negative");
    }
    const FamilySpec body_spec = o.body_spec ? *o.body_spec : body_from_flags(o);
    Problem problem = make_problem(body_spec.family, body_spec.params);
    ObjectiveFunction obj;
    if (problem.objective) {
        obj = *problem.objective;
    } else if (o.objective_spec) {
        obj = make_objective(o.objective_spec->family, o.objective_spec->params);
    } else {
        obj = objective_from_flags(o, problem.body.dim);
    }
    if (obj.dim != problem.body.dim) {
        throw UsageError("optimize: objective and body dimensions differ");
    }
    std::optional<double> optimum = problem.optimum;
    if (!optimum && body_spec.family == "ball" && obj.name == "linear") {
        const Vec dir = obj.gradient(problem.body.center);
        optimum = dot(dir, problem.body.center) - problem.body.inner_radius * norm2(dir);
    }

    MinimizeOptions mo;
    mo.cap = problem.cap.value_or(std::numeric_limits<double>::quiet_NaN());
    mo.ellipsoid.max_iterations = o.max_iter;
    if (o.cut == "shallow") {
        mo.ellipsoid.cut = CutMode::Shallow;
    } else if (o.cut != "central") {
        throw UsageError("--cut must be central or shallow");
    }
    if (o.engine == "quantum") {
        mo.separation.engine = SubgradientEngine::Quantum;
    } else if (o.engine != "fd") {
        throw UsageError("--engine must be fd or quantum");
    }

    Table table;
    table.columns = {"seed",       "body",       "objective",          "eps",
                     "value",      "optimum",    "abs_error",          "converged",
                     "iterations", "separation_queries", "membership_queries", "evaluation_queries",
                     "x"};
    bool stalled = false;
    const std::size_t runs = std::max<std::size_t>(o.trials, 1);
    for (std::size_t t = 0; t < runs; ++t) {
        const std::uint64_t seed = o.seed + t;
        Rng rng(seed);
        auto k = std::make_shared<MembershipOracle>(problem.body, o.delta);
        auto f = std::make_shared<EvaluationOracle>(obj, 0.0);
        OptimizeReport report;
        try {
            report = minimize_convex(k, f, o.eps, rng, mo);
        } catch (const NoConvergence &e) {
            report = e.report();
            stalled = true;
        }
        const bool have_value = std::isfinite(report.value);
        table.rows.push_back({num(seed), problem.body.name, obj.name, num(o.eps),
                              have_value ? num(report.value) : "",
                              optimum ? num(*optimum) : "",
                              (optimum && have_value) ? num(std::abs(report.value - *optimum)) : "",
                              report.converged ? "1" : "0", num(report.iterations), num(report.separation_queries),
                              num(report.membership_queries), num(report.evaluation_queries), join(report.x)});
    }
    Echo echo{{"body", body_spec.family}};
    for (const auto &[key, values] : body_spec.params) {
        echo.emplace_back("body." + key, join(values));
    }
    echo.insert(echo.end(), {{"objective", obj.name},
                             {"eps", num(o.eps)},
                             {"delta", num(o.delta)},
                             {"engine", o.engine},
                             {"cut", o.cut},
                             {"max_iter", num(o.max_iter)},
                             {"seed", num(o.seed)},
                             {"trials", num(std::uint64_t{runs})}});
    write_table(out, "optimize", echo, table);
    return stalled ? kNoConvergence : kOk;
}

// ---------------------------------------------------------------- lowerbound

struct LowerboundOptions : CommonOptions {
    std::size_t n = 3;
    std::string mode = "all";
    std::string s;
    std::string c;
    double eps = 1.0 / 3.0;
    unsigned bits = 10;
};

inline Vec uniform_point(std::size_t n, double lo, double hi, Rng &rng) {
    Vec x(n);
    for (double &v : x) {
        v = lo + (hi - lo) * uniform01(rng);
    }
    return x;
}

inline int cmd_lowerbound(const LowerboundOptions &o, std::ostream &out) {
    if (o.n == 0) {
        throw UsageError("lowerbound: --n must be positive");
    }
    const bool all = o.mode == "all";
    if (!all && o.mode != "sum_coords" && o.mode != "max_norm" && o.mode != "discretization" &&
        o.mode != "combined") {
        throw UsageError("--mode must be all, sum_coords, max_norm, discretization or combined");
    }
    Rng rng(o.seed);
    const Bits s = o.s.empty() ? random_bits(o.n, rng) : parse_bits(o.s, "--s");
    const Bits c = o.c.empty() ? random_bits(o.n, rng) : parse_bits(o.c, "--c");
    if (s.size() != o.n || c.size() != o.n) {
        throw UsageError("lowerbound: --s and --c must have n bits");
    }
    const std::size_t probes = o.trials;

    Table table;
    table.columns = {"instance",           "n",                  "hidden",           "recovered",
                     "probes",             "mismatches",         "membership_queries", "evaluation_queries",
                     "wildcard_queries",   "decision_queries"};
    const std::string n_text = num(std::uint64_t{o.n});

    if (all || o.mode == "sum_coords") {
        WildcardInstance inst(s);
        const ConvexBody body = sum_coords_body(s);
        std::uint64_t mismatches = 0;
        for (std::size_t i = 0; i < probes; ++i) {
            const Vec x = uniform_point(o.n, -3.0, 3.0, rng);
            mismatches += sum_coords_membership(inst, x) != body.contains(x, 0.0) ? 1 : 0;
        }
        MembershipOracle k(body);
        const RecoveryResult rec = solve_sum_coords_via_membership(k);
        table.rows.push_back({"sum_coords", n_text, bits_text(s), bits_text(rec.recovered), num(std::uint64_t{probes}),
                              num(mismatches), num(k.count()), "0", num(inst.count()), "0"});
    }
    if (all || o.mode == "max_norm") {
        WildcardInstance inst(c);
        std::uint64_t mismatches = 0;
        std::uint64_t decisions = 0;
        for (std::size_t i = 0; i < probes; ++i) {
            const Vec x = uniform_point(o.n, 0.0, 1.0, rng);
            const double t = uniform01(rng);
            const double truth = max_norm_eval(c, x);
            mismatches += max_norm_decision_via_wildcard(inst, x, t) != (truth <= t) ? 1 : 0;
            const double est = binary_search_eval(
                [&](double level) {
                    ++decisions;
                    return max_norm_decision_via_wildcard(inst, x, level);
                },
                o.bits);
            mismatches += std::abs(est - truth) > std::ldexp(1.0, -static_cast<int>(o.bits)) ? 1 : 0;
        }
        EvaluationOracle f(max_norm_objective(c));
        const RecoveryResult rec = solve_max_norm_via_wildcards(f);
        table.rows.push_back({"max_norm", n_text, bits_text(c), bits_text(rec.recovered), num(std::uint64_t{probes}),
                              num(mismatches), "0", num(f.count()), num(inst.count()), num(decisions)});
    }
    if (all || o.mode == "discretization") {
        const double noise = 1.0 / (5.0 * static_cast<double>(o.n) + 1.0);
        EvaluationOracle up(max_norm_objective(c), noise, noise::AdditiveDeterministic{noise});
        EvaluationOracle down(max_norm_objective(c), noise, noise::AdditiveDeterministic{-noise});
        std::uint64_t mismatches = 0;
        for (std::size_t i = 0; i < probes; ++i) {
            const Vec x = uniform_point(o.n, 0.0, 1.0, rng);
            EvaluationOracle &f = (i % 2 == 0) ? up : down;
            try {
                const double v = discretized_eval(x, f).value;
                mismatches += std::abs(v - max_norm_eval(c, x)) > 1e-12 ? 1 : 0;
            } catch (const ContractViolation &) {
                ++mismatches;
            }
        }
        table.rows.push_back({"discretization", n_text, bits_text(c), "", num(std::uint64_t{probes}), num(mismatches),
                              "0", num(up.count() + down.count()), "0", "0"});
    }
    bool stalled = false;
    if (all || o.mode == "combined") {
        CombinedInstance inst = combined_instance(s, c);
        auto k = std::make_shared<MembershipOracle>(inst.body, 1e-14);
        auto f = std::make_shared<EvaluationOracle>(inst.objective);
        MinimizeOptions mo;
        mo.cap = inst.cap;
        OptimizeReport report;
        try {
            report = minimize_convex(k, f, o.eps, rng, mo);
        } catch (const NoConvergence &e) {
            report = e.report();
            stalled = true;
        }
        std::string recovered;
        if (report.x.size() == 2 * o.n) {
            const auto [rs, rc] = recover_combined(report.x, o.n);
            recovered = bits_text(rs) + "|" + bits_text(rc);
        }
        table.rows.push_back({"combined", n_text, bits_text(s) + "|" + bits_text(c), recovered, "1",
                              recovered == bits_text(s) + "|" + bits_text(c) ? "0" : "1",
                              num(report.membership_queries), num(report.evaluation_queries), "0", "0"});
    }
    const Echo echo{{"n", n_text},
                    {"mode", o.mode},
                    {"s", bits_text(s)},
                    {"c", bits_text(c)},
                    {"eps", num(o.eps)},
                    {"bits", num(std::uint64_t{o.bits})},
                    {"seed", num(o.seed)},
                    {"trials", num(std::uint64_t{probes})}};
    write_table(out, "lowerbound", echo, table);
    return stalled ? kNoConvergence : kOk;
}

// ---------------------------------------------------------------- discretize

struct DiscretizeOptions : CommonOptions {
    std::string x;
    std::string c;
    double noise = 0.0;
    bool worked_example = false;
};

inline std::vector<std::string> trace_row(std::span<const double> x, const Bits &c, const DiscretizationTrace &tr) {
    return {num(std::uint64_t{x.size()}),
            join(x),
            bits_text(c),
            bits_text(tr.side),
            one_based(tr.order),
            join(tr.snapped),
            num(tr.oracle_value),
            std::to_string(tr.rank),
            std::to_string(tr.selected + 1),
            tr.complement ? "1" : "0",
            num(tr.value),
            num(max_norm_eval(c, x))};
}

inline int cmd_discretize(const DiscretizeOptions &o, std::ostream &out) {
    Table table;
    table.columns = {"n",           "x",    "c",        "side",     "order",    "snapped",
                     "oracle_value", "rank", "selected", "complement", "value", "exact_value"};
    std::vector<std::pair<Vec, Bits>> cases;
    if (o.worked_example) {
        const Vec x{0.7, 0.6, 0.1};
        for (const Bits &c : {Bits{0, 0, 1}, Bits{0, 0, 0}, Bits{1, 0, 0}, Bits{1, 1, 0}}) {
            cases.emplace_back(x, c);
        }
    } else {
        if (o.x.empty() || o.c.empty()) {
            throw UsageError("discretize: --x and --c are required (or --worked-example)");
        }
        cases.emplace_back(parse_list(o.x, "--x"), parse_bits(o.c, "--c"));
        if (cases.back().first.size() != cases.back().second.size()) {
            throw UsageError("discretize: --x and --c differ in length");
        }
    }
    for (const auto &[x, c] : cases) {
        EvaluationOracle f(max_norm_objective(c), std::abs(o.noise), noise::AdditiveDeterministic{o.noise});
        table.rows.push_back(trace_row(x, c, discretized_eval(x, f)));
    }
    const Echo echo{{"x", o.worked_example ? "0.7;0.6;0.1" : join(cases.front().first)},
                    {"c", o.worked_example ? "" : bits_text(cases.front().second)},
                    {"noise", num(o.noise)},
                    {"worked_example", o.worked_example ? "1" : "0"}};
    write_table(out, "discretize", echo, table);
    return kOk;
}

// ---------------------------------------------------------------- entry point

inline void add_common(CLI::App *sub, CommonOptions &common, std::string &config_path, std::size_t default_trials) {
    common.trials = default_trials;
    sub->add_option("--config", config_path, "YAML run config; flags given on the command line take precedence");
    sub->add_option("--seed", common.seed, "Base seed; trial t uses seed + t");
    sub->add_option("--trials", common.trials, "Number of seeded trials or probes");
    sub->add_option("--out", common.out, "Output CSV path (default: stdout)");
}

/// Runs one command line; returns the process exit code.
inline int run(std::vector<std::string> args, std::ostream &out, std::ostream &err) {
    CLI::App app{"qcvx: seeded experiments for query-counted convex optimization"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::string config_path;
    GradestOptions gradest;
    SubgradOptions subgrad;
    OptimizeCliOptions optimize;
    LowerboundOptions lowerbound;
    DiscretizeOptions discretize;

    auto *g = app.add_subcommand("gradest", "Fourier-sampling gradient estimates against an analytic gradient");
    add_common(g, gradest, config_path, 300);
    g->add_option("--n", gradest.n, "Dimension");
    g->add_option("--L", gradest.lipschitz, "Max-norm gradient bound");
    g->add_option("--beta", gradest.smoothness, "Smoothness bound");
    g->add_option("--eps", gradest.eps, "Evaluation precision (required)");
    g->add_option("--objective", gradest.objective, "linear, quadratic or constant");
    g->add_option("--grad", gradest.grad, "Gradient at x0, comma separated (default 0)");
    g->add_option("--x0", gradest.x0, "Base point, comma separated (default 0)");
    g->add_flag("--smooth", gradest.smooth, "Use the repeated majority-median estimator");
    g->add_option("--noise", gradest.noise, "Evaluation noise: exact, round or offset");
    g->add_option("--dist-out", gradest.dist_out, "Also write the outcome distribution CSV here");

    auto *sg = app.add_subcommand("subgrad", "Randomized subgradients, certificate check and query table");
    add_common(sg, subgrad, config_path, 100);
    sg->add_option("--n", subgrad.n, "Dimension");
    sg->add_option("--eps", subgrad.eps, "Evaluation precision (required)");
    sg->add_option("--r1", subgrad.r1, "Sampling box half-width (required)");
    sg->add_option("--L", subgrad.lipschitz, "Max-norm subgradient bound");
    sg->add_option("--objective", subgrad.objective, "abs_sum or quadratic");
    sg->add_option("--x", subgrad.x, "Base point, comma separated (default 0)");
    sg->add_option("--q-points", subgrad.q_points, "Approximate size of the certificate grid");
    sg->add_option("--q-radius", subgrad.q_radius, "Half-width of the certificate grid");
    sg->add_option("--fd-step", subgrad.fd_step, "Finite-difference step (default sqrt(eps))");
    sg->add_flag("--table", subgrad.table, "Emit the per-subgradient query comparison table instead");
    sg->add_option("--table-points", subgrad.table_points, "Register size used for the table");
    sg->add_option("--table-max-exp", subgrad.table_max_exp, "Largest power of ten in the table");

    auto *op = app.add_subcommand("optimize", "Membership + evaluation oracles to an approximate minimizer");
    add_common(op, optimize, config_path, 1);
    op->add_option("--family", optimize.family, "ball, box, smoothed_hypercube, sum_coords, max_norm or combined");
    op->add_option("--n", optimize.n, "Dimension for ball and smoothed_hypercube");
    op->add_option("--radius", optimize.radius, "Ball radius");
    op->add_option("--center", optimize.center, "Ball center, comma separated");
    op->add_option("--lo", optimize.lo, "Box lower corner");
    op->add_option("--hi", optimize.hi, "Box upper corner");
    op->add_option("--x0", optimize.x0, "Smoothed hypercube corner");
    op->add_option("--l", optimize.side, "Smoothed hypercube side");
    op->add_option("--s", optimize.s, "Hidden bits of the shifted box");
    op->add_option("--c", optimize.c, "Hidden bits of the max-norm objective");
    op->add_option("--objective", optimize.objective, "linear, sum, abs_sum, quadratic or max_norm");
    op->add_option("--direction", optimize.direction, "Linear objective coefficients");
    op->add_option("--eps", optimize.eps, "Target accuracy");
    op->add_option("--delta", optimize.delta, "Membership precision");
    op->add_option("--max-iter", optimize.max_iter, "Iteration cap (0 = automatic)");
    op->add_option("--engine", optimize.engine, "Separation subgradient engine: fd or quantum");
    op->add_option("--cut", optimize.cut, "central or shallow");

    auto *lb = app.add_subcommand("lowerbound", "Hidden-string reductions and recovery");
    add_common(lb, lowerbound, config_path, 1000);
    lb->add_option("--n", lowerbound.n, "Length of the hidden strings");
    lb->add_option("--mode", lowerbound.mode, "all, sum_coords, max_norm, discretization or combined");
    lb->add_option("--s", lowerbound.s, "Hidden bits for the shifted box (default: from seed)");
    lb->add_option("--c", lowerbound.c, "Hidden bits for the max-norm objective (default: from seed)");
    lb->add_option("--eps", lowerbound.eps, "Accuracy for the combined instance");
    lb->add_option("--bits", lowerbound.bits, "Decision queries per binary-search evaluation");

    auto *ds = app.add_subcommand("discretize", "One exact max-norm value from one low-precision query");
    add_common(ds, discretize, config_path, 1);
    ds->add_option("--x", discretize.x, "Point in the unit cube, comma separated");
    ds->add_option("--c", discretize.c, "Hidden bits");
    ds->add_option("--noise", discretize.noise, "Deterministic oracle offset");
    ds->add_flag("--worked-example", discretize.worked_example, "Emit the four-case table for x = (0.7, 0.6, 0.1)");

    std::optional<ConfigFile> config;
    try {
        for (std::size_t i = 0; i < args.size(); ++i) {
            std::string path;
            if (args[i] == "--config" && i + 1 < args.size()) {
                path = args[i + 1];
                args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            } else if (args[i].rfind("--config=", 0) == 0) {
                path = args[i].substr(9);
                args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            } else {
                continue;
            }
            config = load_config(path);
            config_path = path;
            break;
        }
        if (config) {
            const auto sub = std::find_if(args.begin(), args.end(), [](const std::string &a) { return a.rfind('-', 0) != 0; });
            const auto at = sub == args.end() ? args.end() : sub + 1;
            args.insert(at, config->flag_tokens.begin(), config->flag_tokens.end());
            optimize.body_spec = config->body;
            optimize.objective_spec = config->objective;
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    std::ofstream file;
    auto sink = [&](const CommonOptions &common) -> std::ostream & {
        if (common.out.empty()) {
            return out;
        }
        file.open(common.out);
        if (!file) {
            throw UsageError("cannot open --out file '" + common.out + "'");
        }
        return file;
    };

    try {
        if (g->parsed()) {
            return cmd_gradest(gradest, sink(gradest));
        }
        if (sg->parsed()) {
            return cmd_subgrad(subgrad, sink(subgrad));
        }
        if (op->parsed()) {
            return cmd_optimize(optimize, sink(optimize));
        }
        if (lb->parsed()) {
            return cmd_lowerbound(lowerbound, sink(lowerbound));
        }
        return cmd_discretize(discretize, sink(discretize));
    } catch (const UsageError &e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const NoConvergence &e) {
        err << "no convergence: " << e.what() << '\n';
        return kNoConvergence;
    } catch (const ParamError &e) {
        err << "parameter error: " << e.what() << '\n';
        return kUsage;
    } catch (const StateTooLarge &e) {
        err << "parameter error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error &e) {
        err << "contract violation: " << e.what() << '\n';
        return kContractViolation;
    }
}

inline int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

} // namespace qcvx::cli
