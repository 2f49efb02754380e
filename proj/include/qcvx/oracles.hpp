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
 * @file oracles.hpp
 * Convex bodies, objectives and the counted membership/evaluation oracles over them.
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <variant>

#include "qcvx/common.hpp"

namespace qcvx {

/// Boundary tolerance used by a membership oracle with zero precision.
inline constexpr double kBoundaryTolerance = 1e-9;

/**
 * A convex body known through a containment predicate plus the ball
 * sandwich B(center, inner_radius) ⊆ K ⊆ B(center, outer_radius).
 */
struct ConvexBody {
    std::size_t dim = 0;
    std::string name;
    Vec center;
    double inner_radius = 0.0;
    double outer_radius = 0.0;
    /// True when x lies in K expanded by tol.
    std::function<bool(std::span<const double>, double)> contains;
    /// Signed Euclidean distance to the boundary (negative inside); empty when unknown.
    std::function<double(std::span<const double>)> signed_distance;

    double condition_number() const { return outer_radius / inner_radius; }
};

inline ConvexBody ball(Vec center, double radius) {
    if (!(radius > 0.0)) {
        throw ParamError("ball: radius must be positive");
    }
    ConvexBody k;
    k.dim = center.size();
    k.name = "ball";
    k.center = center;
    k.inner_radius = radius;
    k.outer_radius = radius;
    k.signed_distance = [center, radius](std::span<const double> x) { return norm2(sub(x, center)) - radius; };
    k.contains = [sd = k.signed_distance](std::span<const double> x, double tol) { return sd(x) <= tol; };
    return k;
}

namespace detail {

inline double box_signed_distance(std::span<const double> x, std::span<const double> mid,
                                  std::span<const double> half) {
    double outside = 0.0;
    double inside = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = std::abs(x[i] - mid[i]) - half[i];
        if (d > 0.0) {
            outside += d * d;
        }
        inside = std::max(inside, d);
    }
    return outside > 0.0 ? std::sqrt(outside) : inside;
}

} // namespace detail

/// Axis-aligned box [lo, hi].
inline ConvexBody box(const Vec &lo, const Vec &hi) {
    if (lo.size() != hi.size() || lo.empty()) {
        throw ParamError("box: bounds must have equal, positive length");
    }
    Vec mid(lo.size());
    Vec half(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(hi[i] > lo[i])) {
            throw ParamError("box: every side must have positive width");
        }
        mid[i] = 0.5 * (lo[i] + hi[i]);
        half[i] = 0.5 * (hi[i] - lo[i]);
    }
    ConvexBody k;
    k.dim = lo.size();
    k.name = "box";
    k.center = mid;
    k.inner_radius = *std::min_element(half.begin(), half.end());
    k.outer_radius = norm2(half);
    k.signed_distance = [mid, half](std::span<const double> x) { return detail::box_signed_distance(x, mid, half); };
    k.contains = [sd = k.signed_distance](std::span<const double> x, double tol) { return sd(x) <= tol; };
    return k;
}

/**
 * The cube [x0 - l, x0] with rounded edges: the inner box
 * [x0 - 2nl/(2n+1), x0 - l/(2n+1)] thickened by a ball of radius l/(2n+1).
 */
inline ConvexBody smoothed_hypercube(const Vec &x0, double l) {
    if (!(l > 0.0) || x0.empty()) {
        throw ParamError("smoothed_hypercube: need l > 0 and n >= 1");
    }
    const std::size_t n = x0.size();
    const double denom = 2.0 * static_cast<double>(n) + 1.0;
    const double radius = l / denom;
    const double half_width = 0.5 * (2.0 * static_cast<double>(n) - 1.0) * l / denom;
    Vec mid(n);
    Vec half(n, half_width);
    for (std::size_t i = 0; i < n; ++i) {
        mid[i] = x0[i] - 0.5 * l;
    }
    ConvexBody k;
    k.dim = n;
    k.name = "smoothed_hypercube";
    k.center = mid;
    k.inner_radius = 0.5 * l;
    k.outer_radius = std::sqrt(static_cast<double>(n)) * half_width + radius;
    k.signed_distance = [mid, half, radius](std::span<const double> x) {
        return detail::box_signed_distance(x, mid, half) - radius;
    };
    k.contains = [sd = k.signed_distance](std::span<const double> x, double tol) { return sd(x) <= tol; };
    return k;
}

/**
 * A convex objective with subgradients bounded by `lipschitz` in the max norm,
 * so |f(y) - f(x)| <= lipschitz * ||y - x||_1.
 */
struct ObjectiveFunction {
    std::size_t dim = 0;
    std::string name;
    std::function<double(std::span<const double>)> evaluate;
    /// Gradient or a subgradient; empty when not available.
    std::function<Vec(std::span<const double>)> gradient;
    double lipschitz = 0.0;
    double lower_bound = -std::numeric_limits<double>::infinity();
    double upper_bound = std::numeric_limits<double>::infinity();
    /// Empty means the whole space.
    std::function<bool(std::span<const double>)> in_domain;
};

inline ObjectiveFunction linear_objective(Vec c) {
    ObjectiveFunction f;
    f.dim = c.size();
    f.name = "linear";
    f.evaluate = [c](std::span<const double> x) { return dot(c, x); };
    f.gradient = [c](std::span<const double>) { return c; };
    f.lipschitz = norm_inf(c);
    return f;
}

/// Sum of coordinates.
inline ObjectiveFunction sum_objective(std::size_t n) {
    ObjectiveFunction f = linear_objective(Vec(n, 1.0));
    f.name = "sum";
    return f;
}

/// Sum of absolute values; the gradient uses sign(0) = 0.
inline ObjectiveFunction abs_sum_objective(std::size_t n) {
    ObjectiveFunction f;
    f.dim = n;
    f.name = "abs_sum";
    f.evaluate = [](std::span<const double> x) { return norm1(x); };
    f.gradient = [](std::span<const double> x) {
        Vec g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            g[i] = static_cast<double>((x[i] > 0.0) - (x[i] < 0.0));
        }
        return g;
    };
    f.lipschitz = 1.0;
    f.lower_bound = 0.0;
    return f;
}

/**
 * 0.5 * sum_i curvature_i (x_i - shift_i)^2. The caller supplies the max-norm
 * gradient bound valid on the region of interest.
 */
inline ObjectiveFunction quadratic_objective(Vec curvature, Vec shift, double lipschitz) {
    if (curvature.size() != shift.size()) {
        throw ParamError("quadratic_objective: curvature and shift lengths differ");
    }
    ObjectiveFunction f;
    f.dim = curvature.size();
    f.name = "quadratic";
    f.evaluate = [curvature, shift](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - shift[i];
            s += 0.5 * curvature[i] * d * d;
        }
        return s;
    };
    f.gradient = [curvature, shift](std::span<const double> x) {
        Vec g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            g[i] = curvature[i] * (x[i] - shift[i]);
        }
        return g;
    };
    f.lipschitz = lipschitz;
    f.lower_bound = 0.0;
    return f;
}

inline double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

/**
 * max_i |clamp(x_i) - c_i| + sum_i |clamp(x_i) - x_i| for a hidden bit string c,
 * with clamp onto [0, 1]. Minimized exactly at x = c.
 */
inline double max_norm_value(std::span<const double> x, std::span<const std::uint8_t> c) {
    double peak = 0.0;
    double excess = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double p = clamp_unit(x[i]);
        peak = std::max(peak, std::abs(p - static_cast<double>(c[i])));
        excess += std::abs(p - x[i]);
    }
    return peak + excess;
}

inline ObjectiveFunction max_norm_objective(std::vector<std::uint8_t> c) {
    ObjectiveFunction f;
    f.dim = c.size();
    f.name = "max_norm";
    f.evaluate = [c](std::span<const double> x) { return max_norm_value(x, c); };
    f.lipschitz = 1.0;
    f.lower_bound = 0.0;
    return f;
}

enum class Membership { In, Out };

/// How a membership oracle answers inside the uncertainty shell |signed distance| <= precision.
enum class ShellPolicy { Exact, Adversarial };

namespace noise {
struct Exact {};
/// Round to the nearest multiple of step (ties to even).
struct RoundToGrid {
    double step = 0.0;
};
struct AdditiveDeterministic {
    double offset = 0.0;
};
} // namespace noise

using NoisePolicy = std::variant<noise::Exact, noise::RoundToGrid, noise::AdditiveDeterministic>;

/// Largest deviation a noise policy can introduce.
inline double noise_magnitude(const NoisePolicy &policy) {
    struct Visitor {
        double operator()(const noise::Exact &) const { return 0.0; }
        double operator()(const noise::RoundToGrid &p) const { return 0.5 * p.step; }
        double operator()(const noise::AdditiveDeterministic &p) const { return std::abs(p.offset); }
    };
    return std::visit(Visitor{}, policy);
}

inline double apply_noise(const NoisePolicy &policy, double value) {
    struct Visitor {
        double v;
        double operator()(const noise::Exact &) const { return v; }
        double operator()(const noise::RoundToGrid &p) const { return std::nearbyint(v / p.step) * p.step; }
        double operator()(const noise::AdditiveDeterministic &p) const { return v + p.offset; }
    };
    return std::visit(Visitor{value}, policy);
}

/// Membership oracle with a thread-safe query counter.
class MembershipOracle {
  public:
    explicit MembershipOracle(ConvexBody body, double precision = 0.0, ShellPolicy shell = ShellPolicy::Exact)
        : body_(std::move(body)), precision_(precision), shell_(shell) {
        if (!(precision_ >= 0.0)) {
            throw ParamError("MembershipOracle: precision must be non-negative");
        }
        if (!body_.contains) {
            throw ParamError("MembershipOracle: body has no containment predicate");
        }
    }

    MembershipOracle(const MembershipOracle &) = delete;
    MembershipOracle &operator=(const MembershipOracle &) = delete;

    Membership query(std::span<const double> x) {
        require_finite(x, body_.dim, "membership query");
        bool inside;
        if (precision_ == 0.0) {
            inside = body_.contains(x, kBoundaryTolerance);
        } else if (shell_ == ShellPolicy::Adversarial && body_.signed_distance) {
            const double sd = body_.signed_distance(x);
            inside = sd <= 0.0;
            if (std::abs(sd) <= precision_) {
                inside = !inside;
            }
        } else {
            inside = body_.contains(x, std::min(precision_, kBoundaryTolerance));
        }
        count_.fetch_add(1, std::memory_order_relaxed);
        return inside ? Membership::In : Membership::Out;
    }

    bool inside(std::span<const double> x) { return query(x) == Membership::In; }

    const ConvexBody &body() const { return body_; }
    std::size_t dim() const { return body_.dim; }
    double precision() const { return precision_; }
    ShellPolicy shell() const { return shell_; }
    std::uint64_t count() const { return count_.load(std::memory_order_relaxed); }
    void reset_count() { count_.store(0, std::memory_order_relaxed); }

  private:
    ConvexBody body_;
    double precision_;
    ShellPolicy shell_;
    std::atomic<std::uint64_t> count_{0};
};

/// Evaluation oracle returning f(x) up to the configured noise, with a thread-safe counter.
class EvaluationOracle {
  public:
    explicit EvaluationOracle(ObjectiveFunction f, double precision = 0.0, NoisePolicy policy = noise::Exact{})
        : f_(std::move(f)), precision_(precision), policy_(policy) {
        if (!(precision_ >= 0.0)) {
            throw ParamError("EvaluationOracle: precision must be non-negative");
        }
        if (noise_magnitude(policy_) > precision_) {
            throw ParamError("EvaluationOracle: noise policy exceeds the declared precision");
        }
        if (!f_.evaluate) {
            throw ParamError("EvaluationOracle: objective has no evaluator");
        }
    }

    EvaluationOracle(const EvaluationOracle &) = delete;
    EvaluationOracle &operator=(const EvaluationOracle &) = delete;

    double query(std::span<const double> x) {
        require_finite(x, f_.dim, "evaluation query");
        if (f_.in_domain && !f_.in_domain(x)) {
            throw DomainError("evaluation query outside the objective's domain");
        }
        const double v = apply_noise(policy_, f_.evaluate(x));
        count_.fetch_add(1, std::memory_order_relaxed);
        return v;
    }

    const ObjectiveFunction &objective() const { return f_; }
    std::size_t dim() const { return f_.dim; }
    double precision() const { return precision_; }
    const NoisePolicy &policy() const { return policy_; }
    std::uint64_t count() const { return count_.load(std::memory_order_relaxed); }
    void reset_count() { count_.store(0, std::memory_order_relaxed); }

  private:
    ObjectiveFunction f_;
    double precision_;
    NoisePolicy policy_;
    std::atomic<std::uint64_t> count_{0};
};

/**
 * Epigraph {(t, x) : x in K, f(x) <= t <= cap} of f over K, with the height
 * coordinate first. Every containment test issues one query to each oracle.
 *
 * The ball sandwich is computed from f at K's center through the raw
 * objective; that setup value is geometry metadata and is not counted.
 */
inline ConvexBody lift_epigraph(std::shared_ptr<MembershipOracle> k, std::shared_ptr<EvaluationOracle> f,
                                double cap) {
    if (!k || !f || k->dim() != f->dim()) {
        throw ParamError("lift_epigraph: oracles missing or dimensions differ");
    }
    const ConvexBody &base = k->body();
    const ObjectiveFunction &obj = f->objective();
    const std::size_t n = base.dim;
    const double at_center = obj.evaluate(base.center);
    if (!(cap > at_center)) {
        throw ParamError("lift_epigraph: cap must exceed f at the body center");
    }
    const double spread = std::sqrt(static_cast<double>(n)) * obj.lipschitz;
    const double floor_value = std::max(obj.lower_bound, at_center - spread * base.outer_radius);
    const double mid = 0.5 * (at_center + cap);

    ConvexBody lifted;
    lifted.dim = n + 1;
    lifted.name = "epigraph(" + base.name + "," + obj.name + ")";
    lifted.center.reserve(n + 1);
    lifted.center.push_back(mid);
    lifted.center.insert(lifted.center.end(), base.center.begin(), base.center.end());
    lifted.inner_radius = std::min(base.inner_radius, (cap - at_center) / (2.0 * (1.0 + spread)));
    const double vertical = std::max(cap - mid, mid - floor_value);
    lifted.outer_radius = std::sqrt(base.outer_radius * base.outer_radius + vertical * vertical);
    lifted.contains = [k, f, cap](std::span<const double> z, double tol) {
        const auto x = z.subspan(1);
        const bool in_base = k->inside(x);
        double value;
        try {
            value = f->query(x);
        } catch (const DomainError &) {
            return false;
        }
        return in_base && value <= z[0] + tol && z[0] <= cap + tol;
    };
    return lifted;
}

} // namespace qcvx
