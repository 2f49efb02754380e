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
 * @file lowerbound.hpp
 * Hidden-string instances and the reductions between their oracles: subset
 * (wildcard) queries, the shifted-box membership problem, the max-norm
 * evaluation problem and its discretization, and the combined instance.
 */
#pragma once

#include <numeric>

#include "qcvx/oracles.hpp"

namespace qcvx {

using Bits = std::vector<std::uint8_t>;
/// Zero-based permutation; perm[k] is the index placed at position k.
using Permutation = std::vector<std::size_t>;

/// Answers whether the hidden string restricted to a subset of indices equals a given string.
class WildcardInstance {
  public:
    explicit WildcardInstance(Bits hidden) : hidden_(std::move(hidden)) {}

    WildcardInstance(const WildcardInstance &) = delete;
    WildcardInstance &operator=(const WildcardInstance &) = delete;

    bool query(std::span<const std::size_t> subset, std::span<const std::uint8_t> values) {
        if (subset.size() != values.size()) {
            throw ArityError("wildcard query: subset and values differ in length");
        }
        bool match = true;
        for (std::size_t k = 0; k < subset.size(); ++k) {
            if (subset[k] >= hidden_.size()) {
                throw ParamError("wildcard query: index out of range");
            }
            match = match && hidden_[subset[k]] == values[k];
        }
        count_.fetch_add(1, std::memory_order_relaxed);
        return match;
    }

    std::size_t size() const { return hidden_.size(); }
    const Bits &hidden() const { return hidden_; }
    std::uint64_t count() const { return count_.load(std::memory_order_relaxed); }

  private:
    Bits hidden_;
    std::atomic<std::uint64_t> count_{0};
};

/// The box [s - 2, s + 1]^n for a bit string s.
inline ConvexBody sum_coords_body(const Bits &s) {
    Vec lo(s.size());
    Vec hi(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        lo[i] = static_cast<double>(s[i]) - 2.0;
        hi[i] = static_cast<double>(s[i]) + 1.0;
    }
    ConvexBody k = box(lo, hi);
    k.name = "sum_coords";
    return k;
}

/**
 * Membership in [s - 2, s + 1]^n through at most one subset query: coordinates in
 * [-2, -1) force s_i = 0, coordinates in (1, 2] force s_i = 1, [-1, 1] fits either.
 */
inline bool sum_coords_membership(WildcardInstance &inst, std::span<const double> x) {
    require_finite(x, inst.size(), "sum_coords_membership");
    std::vector<std::size_t> subset;
    Bits values;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] >= -2.0 && x[i] < -1.0) {
            subset.push_back(i);
            values.push_back(0);
        } else if (x[i] > 1.0 && x[i] <= 2.0) {
            subset.push_back(i);
            values.push_back(1);
        } else if (!(x[i] >= -1.0 && x[i] <= 1.0)) {
            return false;
        }
    }
    return inst.query(subset, values);
}

/// 1 where the coordinate is at least the threshold.
inline Bits round_sgn(std::span<const double> x, double threshold) {
    Bits out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = x[i] >= threshold ? 1 : 0;
    }
    return out;
}

inline double max_norm_eval(std::span<const std::uint8_t> c, std::span<const double> x) {
    if (c.size() != x.size()) {
        throw InvalidPoint("max_norm_eval: dimension mismatch");
    }
    return max_norm_value(x, c);
}

/**
 * Whether max_i |x_i - c_i| <= t for x in the unit cube, through at most one
 * subset query. A coordinate with x_i <= t allows c_i = 0; one with
 * 1 - x_i <= t allows c_i = 1.
 */
inline bool max_norm_decision_via_wildcard(WildcardInstance &inst, std::span<const double> x, double t) {
    require_finite(x, inst.size(), "max_norm_decision_via_wildcard");
    if (!(t >= 0.0 && t <= 1.0)) {
        throw DomainError("max_norm_decision_via_wildcard: threshold outside [0, 1]");
    }
    std::vector<std::size_t> subset;
    Bits values;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= 0.0 && x[i] <= 1.0)) {
            throw DomainError("max_norm_decision_via_wildcard: point outside the unit cube");
        }
        const bool zero_ok = x[i] <= t;
        const bool one_ok = 1.0 - x[i] <= t;
        if (zero_ok && one_ok) {
            continue;
        }
        if (!zero_ok && !one_ok) {
            return false;
        }
        subset.push_back(i);
        values.push_back(one_ok ? 1 : 0);
    }
    return inst.query(subset, values);
}

using DecisionOracle = std::function<bool(double)>;

/// Bisects [0, 1] with exactly `bits` threshold decisions; returns the final midpoint.
inline double binary_search_eval(const DecisionOracle &at_most, unsigned bits) {
    if (bits < 1) {
        throw ParamError("binary_search_eval: need at least one bit");
    }
    double lo = 0.0;
    double hi = 1.0;
    for (unsigned i = 0; i < bits; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (at_most(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct Ordering {
    Bits side;
    Permutation order;
};

/**
 * side_i = [x_i >= 1 - x_i]; order sorts max(x_i, 1 - x_i) decreasingly.
 * Ties put side 1 before side 0, then the lower index.
 */
inline Ordering ord(std::span<const double> x) {
    Ordering o;
    const std::size_t n = x.size();
    o.side.resize(n);
    Vec top(n);
    for (std::size_t i = 0; i < n; ++i) {
        o.side[i] = x[i] >= 1.0 - x[i] ? 1 : 0;
        top[i] = o.side[i] ? x[i] : 1.0 - x[i];
    }
    o.order.resize(n);
    std::iota(o.order.begin(), o.order.end(), std::size_t{0});
    std::stable_sort(o.order.begin(), o.order.end(), [&](std::size_t a, std::size_t b) {
        if (top[a] != top[b]) {
            return top[a] > top[b];
        }
        if (o.side[a] != o.side[b]) {
            return o.side[a] > o.side[b];
        }
        return a < b;
    });
    return o;
}

inline Permutation inverse_permutation(const Permutation &p) {
    Permutation inv(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        inv[p[k]] = k;
    }
    return inv;
}

/// Point with coordinate rank_i/(2n+1) when side_i = 0 and 1 - rank_i/(2n+1) otherwise (ranks from 1).
inline Vec chi(const Bits &side, const Permutation &rank) {
    const std::size_t n = side.size();
    if (rank.size() != n) {
        throw ParamError("chi: side and rank lengths differ");
    }
    std::vector<bool> seen(n, false);
    for (std::size_t v : rank) {
        if (v >= n || seen[v]) {
            throw ParamError("chi: rank is not a permutation");
        }
        seen[v] = true;
    }
    const double denom = 2.0 * static_cast<double>(n) + 1.0;
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double level = static_cast<double>(rank[i] + 1) / denom;
        out[i] = side[i] ? 1.0 - level : level;
    }
    return out;
}

struct DiscretizationTrace {
    Bits side;
    Permutation order;
    Vec snapped;
    double oracle_value = 0.0;
    std::int64_t rank = 0;
    /// Coordinate whose distance to its hidden bit is the answer.
    std::size_t selected = 0;
    /// True when the answer is the near-side distance of the last-ranked coordinate.
    bool complement = false;
    double value = 0.0;
};

/**
 * Exact max-norm value at x from one low-precision evaluation at the snapped
 * point chi(side, order^{-1}), whose value is a multiple of 1/(2n+1).
 */
inline DiscretizationTrace discretized_eval(std::span<const double> x, EvaluationOracle &f) {
    const std::size_t n = x.size();
    require_finite(x, f.dim(), "discretized_eval");
    if (f.precision() > 1.0 / (5.0 * static_cast<double>(n))) {
        throw ParamError("discretized_eval: oracle precision must be at most 1/(5n)");
    }
    for (double v : x) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DomainError("discretized_eval: point outside the unit cube");
        }
    }
    DiscretizationTrace tr;
    Ordering o = ord(x);
    tr.side = std::move(o.side);
    tr.order = std::move(o.order);
    tr.snapped = chi(tr.side, inverse_permutation(tr.order));
    tr.oracle_value = f.query(tr.snapped);
    const double denom = 2.0 * static_cast<double>(n) + 1.0;
    tr.rank = static_cast<std::int64_t>(std::nearbyint(denom * (1.0 - tr.oracle_value)));
    if (tr.rank < 1 || tr.rank > static_cast<std::int64_t>(n) + 1) {
        throw ContractViolation("discretized_eval: rounded rank " + std::to_string(tr.rank) +
                                " outside 1..n+1; the oracle is not within 1/(5n)");
    }
    if (tr.rank == static_cast<std::int64_t>(n) + 1) {
        tr.selected = tr.order[n - 1];
        tr.complement = true;
        const double xi = x[tr.selected];
        tr.value = tr.side[tr.selected] ? 1.0 - xi : xi;
    } else {
        tr.selected = tr.order[static_cast<std::size_t>(tr.rank - 1)];
        const double xi = x[tr.selected];
        tr.value = tr.side[tr.selected] ? xi : 1.0 - xi;
    }
    return tr;
}

struct RecoveryResult {
    Bits recovered;
    std::uint64_t wildcard_equivalent_queries = 0;
    std::uint64_t oracle_queries = 0;
};

/**
 * One subset query answered by one max-norm evaluation: the probe takes the
 * given values on the subset and 1/2 elsewhere, and matches iff its value is 0 or 1/2.
 */
inline bool wildcard_via_max_norm(EvaluationOracle &f, std::span<const std::size_t> subset,
                                  std::span<const std::uint8_t> values) {
    if (subset.size() != values.size()) {
        throw ArityError("wildcard_via_max_norm: subset and values differ in length");
    }
    Vec probe(f.dim(), 0.5);
    for (std::size_t k = 0; k < subset.size(); ++k) {
        if (subset[k] >= probe.size()) {
            throw ParamError("wildcard_via_max_norm: index out of range");
        }
        probe[subset[k]] = static_cast<double>(values[k]);
    }
    const double v = f.query(probe);
    const bool match = std::abs(v) <= 1e-12 || std::abs(v - 0.5) <= 1e-12;
    if (!match && std::abs(v - 1.0) > 1e-12) {
        throw ContractViolation("wildcard_via_max_norm: probe value " + std::to_string(v) +
                                " is not one of 0, 1/2, 1");
    }
    return match;
}

/// Recovers c with one singleton subset probe per coordinate.
inline RecoveryResult solve_max_norm_via_wildcards(EvaluationOracle &f) {
    const std::size_t n = f.dim();
    const std::uint64_t before = f.count();
    RecoveryResult res;
    res.recovered.resize(n);
    const std::uint8_t one = 1;
    for (std::size_t i = 0; i < n; ++i) {
        res.recovered[i] = wildcard_via_max_norm(f, std::span(&i, 1), std::span(&one, 1)) ? 1 : 0;
        ++res.wildcard_equivalent_queries;
    }
    res.oracle_queries = f.count() - before;
    return res;
}

/// Recovers s from membership in [s - 2, s + 1]^n: the point 1.5 e_i is inside iff s_i = 1.
inline RecoveryResult solve_sum_coords_via_membership(MembershipOracle &k) {
    const std::size_t n = k.dim();
    const std::uint64_t before = k.count();
    RecoveryResult res;
    res.recovered.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec probe(n, 0.0);
        probe[i] = 1.5;
        res.recovered[i] = k.inside(probe) ? 1 : 0;
        ++res.wildcard_equivalent_queries;
    }
    res.oracle_queries = k.count() - before;
    return res;
}

/// Box [s - 2, s + 1]^n x [0, 1]^n with objective sum of the first block plus the max-norm of the second.
struct CombinedInstance {
    ConvexBody body;
    ObjectiveFunction objective;
    Vec minimizer;
    double min_value = 0.0;
    /// Upper bound on the objective over the body.
    double cap = 0.0;
};

inline CombinedInstance combined_instance(const Bits &s, const Bits &c) {
    if (s.size() != c.size() || s.empty()) {
        throw ParamError("combined_instance: s and c must have equal, positive length");
    }
    const std::size_t n = s.size();
    Vec lo(2 * n);
    Vec hi(2 * n);
    CombinedInstance inst;
    inst.minimizer.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        lo[i] = static_cast<double>(s[i]) - 2.0;
        hi[i] = static_cast<double>(s[i]) + 1.0;
        lo[n + i] = 0.0;
        hi[n + i] = 1.0;
        inst.minimizer[i] = lo[i];
        inst.minimizer[n + i] = static_cast<double>(c[i]);
        inst.min_value += lo[i];
        inst.cap += hi[i];
    }
    inst.cap += 1.0;
    inst.body = box(lo, hi);
    inst.body.name = "combined";
    ObjectiveFunction f;
    f.dim = 2 * n;
    f.name = "combined";
    f.evaluate = [c, n](std::span<const double> x) {
        double s_part = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s_part += x[i];
        }
        return s_part + max_norm_value(x.subspan(n), c);
    };
    f.lipschitz = 2.0;
    f.lower_bound = inst.min_value;
    f.upper_bound = inst.cap;
    inst.objective = std::move(f);
    return inst;
}

/// Reads (s, c) off an approximate minimizer of the combined instance.
inline std::pair<Bits, Bits> recover_combined(std::span<const double> x, std::size_t n) {
    if (x.size() != 2 * n) {
        throw InvalidPoint("recover_combined: expected a point of dimension 2n");
    }
    return {round_sgn(x.subspan(0, n), -1.5), round_sgn(x.subspan(n), 0.5)};
}

} // namespace qcvx
