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
 * @file reductions.hpp
 * Membership to separation through the height function, and separation to
 * optimization through an ellipsoid method.
 */
#pragma once

#include <Eigen/Dense>
#include <optional>

#include "qcvx/subgrad.hpp"

namespace qcvx {

struct HeightValue {
    double value = 0.0;
    std::uint64_t queries = 0;
};

/// Unit vector from the body center toward p.
inline Vec direction_from_center(const ConvexBody &body, std::span<const double> p) {
    Vec d = sub(p, body.center);
    const double len = norm2(d);
    if (!(len > 0.0)) {
        throw ParamError("height function: p coincides with the body center");
    }
    for (double &v : d) {
        v /= len;
    }
    return d;
}

/// Membership precision assumed by the reductions; a zero-precision oracle still classifies with a tolerance.
inline double effective_membership_precision(const MembershipOracle &k) {
    return k.precision() > 0.0 ? k.precision() : kBoundaryTolerance;
}

/**
 * Minus the largest t with x + t * dir in K, where dir points from the center
 * toward p. Bisects t over [0, 2R] after confirming x itself is inside, down to
 * a bracket of eps / (7 kappa).
 */
inline HeightValue height_eval(MembershipOracle &k, std::span<const double> p, std::span<const double> x, double eps) {
    const ConvexBody &body = k.body();
    require_finite(p, body.dim, "height_eval p");
    require_finite(x, body.dim, "height_eval x");
    const double kappa = body.condition_number();
    if (!(eps > 0.0) || eps < 7.0 * kappa * k.precision()) {
        throw ParamError("height_eval: need eps > 0 and eps >= 7*kappa*delta");
    }
    const Vec dir = direction_from_center(body, p);
    const double resolution = eps / (7.0 * kappa);
    const std::uint64_t before = k.count();
    if (!k.inside(x)) {
        throw BracketError("height_eval: start point is outside the body");
    }
    double lo = 0.0;
    double hi = 2.0 * body.outer_radius;
    Vec probe(x.size());
    while (hi - lo > resolution) {
        const double mid = 0.5 * (lo + hi);
        for (std::size_t i = 0; i < probe.size(); ++i) {
            probe[i] = x[i] + mid * dir[i];
        }
        if (k.inside(probe)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {-0.5 * (lo + hi), k.count() - before};
}

/// The height function toward p as an objective, 3 kappa-Lipschitz near the center.
inline ObjectiveFunction height_objective(std::shared_ptr<MembershipOracle> k, Vec p, double eps) {
    const ConvexBody &body = k->body();
    ObjectiveFunction f;
    f.dim = body.dim;
    f.name = "height";
    f.lipschitz = 3.0 * body.condition_number();
    f.lower_bound = -2.0 * body.outer_radius;
    f.upper_bound = 2.0 * body.outer_radius;
    f.evaluate = [k, p = std::move(p), eps](std::span<const double> x) { return height_eval(*k, p, x, eps).value; };
    return f;
}

/// {y : <normal, y - anchor> >= -margin}; the normal is a unit vector pointing into the body.
struct Halfspace {
    Vec normal;
    Vec anchor;
    double margin = 0.0;

    bool contains(std::span<const double> y) const { return dot(normal, sub(y, anchor)) >= -margin; }
};

enum class SeparationBranch { Inside, OuterBall, Subgradient };

struct SeparationAnswer {
    SeparationBranch branch = SeparationBranch::Inside;
    std::optional<Halfspace> halfspace;
    /// Unnormalized subgradient and margin of the emitted cut.
    Vec raw_gradient;
    double raw_margin = 0.0;
    double failure_probability = 0.0;
    std::uint64_t membership_queries = 0;

    bool inside() const { return branch == SeparationBranch::Inside; }
};

enum class SubgradientEngine { Quantum, FiniteDifference };

struct SeparationOptions {
    SubgradientEngine engine = SubgradientEngine::Quantum;
    /// Height evaluation precision; 0 selects 7 kappa delta.
    double height_precision = 0.0;
    SimulationOptions simulation{};
};

namespace detail {

/**
 * Central-difference gradient at a uniform point of B_inf(center, r1). A point is
 * rejected when the forward and backward slopes of some coordinate disagree,
 * which flags a kink within one step; after 32 rejections the last estimate is kept.
 */
inline Vec checked_difference_gradient(EvaluationOracle &f, std::span<const double> center, double r1, double step,
                                       double precision, Rng &rng) {
    const std::size_t n = center.size();
    const double tol = 8.0 * precision / step + 1e-4;
    Vec g(n);
    Vec y(n);
    for (int attempt = 0; attempt < 32; ++attempt) {
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = center[i] + r1 * (2.0 * uniform01(rng) - 1.0);
        }
        const double mid = f.query(y);
        bool smooth = true;
        Vec probe = y;
        for (std::size_t i = 0; i < n; ++i) {
            probe[i] = y[i] + step;
            const double fwd = f.query(probe);
            probe[i] = y[i] - step;
            const double bwd = f.query(probe);
            probe[i] = y[i];
            g[i] = (fwd - bwd) / (2.0 * step);
            smooth = smooth && std::abs(fwd + bwd - 2.0 * mid) / step <= tol;
        }
        if (smooth) {
            break;
        }
    }
    return g;
}

} // namespace detail

/// Cut margin (30000 R + 25) n^3 eps^{1/6} kappa^2 / rho of the sampled-subgradient branch.
inline double separation_margin(std::size_t n, double outer_radius, double kappa, double eps, double rho) {
    const double dim = static_cast<double>(n);
    return (30000.0 * outer_radius + 25.0) * dim * dim * dim * std::pow(eps, 1.0 / 6.0) * kappa * kappa / rho;
}

/**
 * Three-way separation: Inside when the oracle accepts p, the outer-ball cut
 * when p is beyond R, otherwise a cut from a subgradient of the height
 * function taken around the body center.
 */
inline SeparationAnswer separating_halfspace(const std::shared_ptr<MembershipOracle> &k, std::span<const double> p,
                                             double rho, Rng &rng, const SeparationOptions &opts = {}) {
    const ConvexBody &body = k->body();
    const std::size_t n = body.dim;
    const double kappa = body.condition_number();
    const double delta = effective_membership_precision(*k);
    if (!(delta < std::min(body.inner_radius, 1.0) / (7.0 * kappa))) {
        throw ParamError("separating_halfspace: need delta < min(r, 1) / (7 kappa)");
    }
    if (!(rho > 0.0 && rho < 1.0)) {
        throw ParamError("separating_halfspace: failure probability must be in (0, 1)");
    }
    const std::uint64_t before = k->count();
    SeparationAnswer ans;
    ans.failure_probability = rho;
    if (k->inside(p)) {
        ans.branch = SeparationBranch::Inside;
        ans.membership_queries = k->count() - before;
        return ans;
    }
    const Vec outward = direction_from_center(body, p);
    const Vec p_vec(p.begin(), p.end());
    if (norm2(sub(p, body.center)) > body.outer_radius) {
        ans.branch = SeparationBranch::OuterBall;
        ans.halfspace = Halfspace{scaled(outward, -1.0), p_vec, 0.0};
        ans.raw_gradient = outward;
        ans.membership_queries = k->count() - before;
        return ans;
    }

    const double eps = opts.height_precision > 0.0 ? opts.height_precision : 7.0 * kappa * delta;
    if (eps < 7.0 * kappa * delta) {
        throw ParamError("separating_halfspace: height precision below 7*kappa*delta");
    }
    const double lipschitz = 3.0 * kappa;
    const double r1 = static_cast<double>(n) * std::sqrt(eps);
    EvaluationOracle height(height_objective(k, p_vec, eps), eps);
    Vec g;
    double raw_margin;
    if (opts.engine == SubgradientEngine::Quantum) {
        g = quantum_subgradient(height, eps, lipschitz, body.center, r1, rng, opts.simulation).gradient;
        raw_margin = separation_margin(n, body.outer_radius, kappa, eps, rho);
    } else {
        g = detail::checked_difference_gradient(height, body.center, r1, std::sqrt(eps) / 8.0, eps, rng);
        raw_margin = 4.0 * static_cast<double>(n) * r1 * lipschitz;
    }
    ans.branch = SeparationBranch::Subgradient;
    ans.raw_gradient = g;
    ans.raw_margin = raw_margin;
    const double len = norm2(g);
    if (len > 0.0) {
        ans.halfspace = Halfspace{scaled(g, -1.0 / len), p_vec, raw_margin / len};
    } else {
        ans.halfspace = Halfspace{scaled(outward, -1.0), p_vec, std::numeric_limits<double>::infinity()};
    }
    ans.membership_queries = k->count() - before;
    return ans;
}

enum class CutMode { Central, Shallow };

struct OptimizeReport {
    Vec x;
    double value = std::numeric_limits<double>::infinity();
    /// Certified lower bound on the linear objective over the localized region.
    double lower_bound = -std::numeric_limits<double>::infinity();
    bool converged = false;
    std::uint64_t separation_queries = 0;
    std::uint64_t membership_queries = 0;
    std::uint64_t evaluation_queries = 0;
    std::uint64_t iterations = 0;
    /// log det of the ellipsoid matrix after each iteration.
    std::vector<double> log_volume;
};

/// Iteration cap reached; carries the best point found so far.
class NoConvergence : public Error {
  public:
    NoConvergence(const std::string &what, OptimizeReport report) : Error(what), report_(std::move(report)) {}
    const OptimizeReport &report() const { return report_; }

  private:
    OptimizeReport report_;
};

using SeparationProcedure = std::function<SeparationAnswer(std::span<const double>)>;

struct EllipsoidOptions {
    CutMode cut = CutMode::Central;
    /// 0 picks a cap from the dimension and the radii.
    std::uint64_t max_iterations = 0;
};

/**
 * Ellipsoid method for min c.x over K, starting from B(center, R). Feasible
 * centers trigger objective cuts at the incumbent value; infeasible ones use
 * the separating halfspace. Stops once the incumbent is within eps ||c|| of
 * the ellipsoid's lower bound on c.x.
 */
inline OptimizeReport optimize_linear(const SeparationProcedure &separation, std::span<const double> c,
                                      std::span<const double> center, double outer_radius, double inner_radius,
                                      double eps, const EllipsoidOptions &opts = {}) {
    const std::size_t d = c.size();
    if (d == 0 || center.size() != d || !(outer_radius > 0.0) || !(inner_radius > 0.0) || !(eps > 0.0)) {
        throw ParamError("optimize_linear: invalid dimensions, radii or eps");
    }
    using Eigen::MatrixXd;
    using Eigen::VectorXd;
    const double dd = static_cast<double>(d);
    const double cnorm = norm2(c);
    std::uint64_t cap = opts.max_iterations;
    if (cap == 0) {
        const double spread = std::log(outer_radius * outer_radius / (inner_radius * eps) + 1.0);
        cap = static_cast<std::uint64_t>(std::ceil(8.0 * (dd + 1.0) * dd * std::max(spread, 1.0))) + 200;
    }

    VectorXd z = Eigen::Map<const VectorXd>(center.data(), static_cast<Eigen::Index>(d));
    MatrixXd P = MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)) *
                 (outer_radius * outer_radius);
    const VectorXd cv = Eigen::Map<const VectorXd>(c.data(), static_cast<Eigen::Index>(d));
    double log_det = dd * std::log(outer_radius * outer_radius);

    OptimizeReport report;
    Vec zs(d);
    for (std::uint64_t it = 0; it < cap; ++it) {
        VectorXd::Map(zs.data(), static_cast<Eigen::Index>(d)) = z;
        const SeparationAnswer ans = separation(zs);
        ++report.separation_queries;
        ++report.iterations;

        VectorXd a;
        double offset;
        if (ans.inside()) {
            const double val = cv.dot(z);
            if (val < report.value) {
                report.value = val;
                report.x = zs;
            }
            a = cv;
            offset = report.value;
        } else {
            const Halfspace &h = *ans.halfspace;
            a = -Eigen::Map<const VectorXd>(h.normal.data(), static_cast<Eigen::Index>(d));
            const double slack = (opts.cut == CutMode::Shallow && std::isfinite(h.margin)) ? h.margin : 0.0;
            offset = a.dot(Eigen::Map<const VectorXd>(h.anchor.data(), static_cast<Eigen::Index>(d))) + slack;
        }

        const VectorXd Pa = P * a;
        const double width = std::sqrt(std::max(a.dot(Pa), 0.0));
        if (!(width > 0.0)) {
            report.log_volume.push_back(log_det);
            break;
        }
        const double alpha = (a.dot(z) - offset) / width;
        if (alpha >= 1.0) {
            // The whole ellipsoid violates the cut.
            report.log_volume.push_back(log_det);
            if (std::isfinite(report.value)) {
                report.lower_bound = report.value;
                report.converged = true;
            }
            break;
        }
        if (alpha > -1.0 / dd) {
            const VectorXd step = Pa / width;
            if (d == 1) {
                const double half = width / std::abs(a[0]);
                const double lo = z[0] - half;
                const double hi = z[0] + half;
                const double bound = offset / a[0];
                const double nlo = a[0] > 0.0 ? lo : std::max(lo, bound);
                const double nhi = a[0] > 0.0 ? std::min(hi, bound) : hi;
                z[0] = 0.5 * (nlo + nhi);
                P(0, 0) = 0.25 * (nhi - nlo) * (nhi - nlo);
            } else {
                const double tau = (1.0 + dd * alpha) / (dd + 1.0);
                const double sigma = 2.0 * (1.0 + dd * alpha) / ((dd + 1.0) * (1.0 + alpha));
                const double stretch = dd * dd * (1.0 - alpha * alpha) / (dd * dd - 1.0);
                z -= tau * step;
                P = stretch * (P - sigma * step * step.transpose());
                P = 0.5 * (P + P.transpose()).eval();
            }
            const Eigen::LLT<MatrixXd> llt(P);
            if (llt.info() != Eigen::Success) {
                report.log_volume.push_back(log_det);
                break;
            }
            double next = 0.0;
            for (Eigen::Index i = 0; i < P.rows(); ++i) {
                next += 2.0 * std::log(llt.matrixL()(i, i));
            }
            log_det = next;
        }
        report.log_volume.push_back(log_det);

        if (std::isfinite(report.value)) {
            const double spread = std::sqrt(std::max(cv.dot(P * cv), 0.0));
            report.lower_bound = cv.dot(z) - spread;
            if (report.value - report.lower_bound <= eps * cnorm) {
                report.converged = true;
                break;
            }
        }
    }
    if (!report.converged) {
        throw NoConvergence("optimize_linear: iteration cap reached without a certified eps-optimal point",
                            std::move(report));
    }
    return report;
}

struct OptimizeOptions {
    EllipsoidOptions ellipsoid{};
    SeparationOptions separation{SubgradientEngine::FiniteDifference, 0.0, {}};
    double failure_probability = 0.2;
};

/// min c.x over the body behind a membership oracle, with separation built from membership.
inline OptimizeReport optimize_over_body(const std::shared_ptr<MembershipOracle> &k, std::span<const double> c,
                                         double eps, Rng &rng, const OptimizeOptions &opts = {}) {
    const ConvexBody &body = k->body();
    const std::uint64_t before = k->count();
    const SeparationProcedure sep = [&](std::span<const double> p) {
        return separating_halfspace(k, p, opts.failure_probability, rng, opts.separation);
    };
    try {
        OptimizeReport report =
            optimize_linear(sep, c, body.center, body.outer_radius, body.inner_radius, eps, opts.ellipsoid);
        report.membership_queries = k->count() - before;
        return report;
    } catch (NoConvergence &e) {
        OptimizeReport report = e.report();
        report.membership_queries = k->count() - before;
        throw NoConvergence(e.what(), std::move(report));
    }
}

struct MinimizeOptions : OptimizeOptions {
    /// Cap on the lifted height coordinate; NaN picks f(center) + sqrt(n) L R + 1.
    double cap = std::numeric_limits<double>::quiet_NaN();
};

/**
 * min f over K by minimizing the height coordinate over the epigraph
 * {(t, x) : x in K, f(x) <= t <= cap}. Each lifted membership test costs one
 * membership and one evaluation query; both totals are reported.
 */
inline OptimizeReport minimize_convex(const std::shared_ptr<MembershipOracle> &k,
                                      const std::shared_ptr<EvaluationOracle> &f, double eps, Rng &rng,
                                      const MinimizeOptions &opts = {}) {
    const ConvexBody &body = k->body();
    const ObjectiveFunction &obj = f->objective();
    double cap = opts.cap;
    if (std::isnan(cap)) {
        cap = obj.evaluate(body.center) +
              std::sqrt(static_cast<double>(body.dim)) * obj.lipschitz * body.outer_radius + 1.0;
    }
    auto lifted = std::make_shared<MembershipOracle>(lift_epigraph(k, f, cap), k->precision(), k->shell());
    Vec c(body.dim + 1, 0.0);
    c[0] = 1.0;
    const std::uint64_t k_before = k->count();
    const std::uint64_t f_before = f->count();
    auto project = [&](OptimizeReport report) {
        report.membership_queries = k->count() - k_before;
        report.evaluation_queries = f->count() - f_before;
        if (!report.x.empty()) {
            report.x.erase(report.x.begin());
            report.value = obj.evaluate(report.x);
        }
        return report;
    };
    try {
        return project(optimize_over_body(lifted, c, eps, rng, opts));
    } catch (NoConvergence &e) {
        throw NoConvergence(e.what(), project(e.report()));
    }
}

} // namespace qcvx
