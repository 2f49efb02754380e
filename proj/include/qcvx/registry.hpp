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

// Named body and objective families, built from flat numeric parameter tables.
#pragma once

#include <map>
#include <optional>

#include "qcvx/lowerbound.hpp"

namespace qcvx {

/// Parameter name -> numeric values (scalars are length-one vectors).
using ParamTable = std::map<std::string, Vec>;

struct Problem {
    ConvexBody body;
    std::optional<ObjectiveFunction> objective;
    /// Optimal value when the family knows it.
    std::optional<double> optimum;
    Vec minimizer;
    std::optional<double> cap;
};

namespace detail {

inline const Vec &param(const ParamTable &p, const std::string &family, const std::string &key) {
    const auto it = p.find(key);
    if (it == p.end() || it->second.empty()) {
        throw ParamError(family + ": missing parameter '" + key + "'");
    }
    return it->second;
}

inline double scalar(const ParamTable &p, const std::string &family, const std::string &key) {
    const Vec &v = param(p, family, key);
    if (v.size() != 1) {
        throw ParamError(family + ": parameter '" + key + "' must be a scalar");
    }
    return v[0];
}

inline double scalar_or(const ParamTable &p, const std::string &key, double fallback) {
    const auto it = p.find(key);
    return it == p.end() || it->second.empty() ? fallback : it->second[0];
}

inline Bits bits(const ParamTable &p, const std::string &family, const std::string &key) {
    Bits out;
    for (double v : param(p, family, key)) {
        if (v != 0.0 && v != 1.0) {
            throw ParamError(family + ": parameter '" + key + "' must contain only 0 and 1");
        }
        out.push_back(v == 1.0 ? 1 : 0);
    }
    return out;
}

inline std::size_t dimension(const ParamTable &p, const std::string &family) {
    const double n = scalar(p, family, "n");
    if (!(n >= 1.0) || n != std::floor(n)) {
        throw ParamError(family + ": n must be a positive integer");
    }
    return static_cast<std::size_t>(n);
}

} // namespace detail

inline const std::vector<std::string> &body_families() {
    static const std::vector<std::string> names{"ball",      "box",      "smoothed_hypercube",
                                                "sum_coords", "max_norm", "combined"};
    return names;
}

/**
 * Builds a named family. sum_coords, max_norm and combined also carry their
 * objective, optimum and minimizer.
 */
inline Problem make_problem(const std::string &family, const ParamTable &p) {
    Problem out;
    if (family == "ball") {
        Vec center = p.count("center") ? detail::param(p, family, "center") : Vec(detail::dimension(p, family), 0.0);
        out.body = ball(std::move(center), detail::scalar_or(p, "radius", 1.0));
    } else if (family == "box") {
        out.body = box(detail::param(p, family, "lo"), detail::param(p, family, "hi"));
    } else if (family == "smoothed_hypercube") {
        out.body = smoothed_hypercube(detail::param(p, family, "x0"), detail::scalar(p, family, "l"));
    } else if (family == "sum_coords") {
        const Bits s = detail::bits(p, family, "s");
        out.body = sum_coords_body(s);
        out.objective = sum_objective(s.size());
        out.optimum = 0.0;
        for (std::uint8_t v : s) {
            out.minimizer.push_back(static_cast<double>(v) - 2.0);
            *out.optimum += static_cast<double>(v) - 2.0;
        }
    } else if (family == "max_norm") {
        const Bits c = detail::bits(p, family, "c");
        out.body = box(Vec(c.size(), 0.0), Vec(c.size(), 1.0));
        out.body.name = "max_norm";
        out.objective = max_norm_objective(c);
        out.optimum = 0.0;
        out.minimizer.assign(c.begin(), c.end());
    } else if (family == "combined") {
        CombinedInstance inst = combined_instance(detail::bits(p, family, "s"), detail::bits(p, family, "c"));
        out.body = std::move(inst.body);
        out.objective = std::move(inst.objective);
        out.optimum = inst.min_value;
        out.minimizer = std::move(inst.minimizer);
        out.cap = inst.cap;
    } else {
        throw ParamError("unknown body family '" + family + "'");
    }
    return out;
}

inline const std::vector<std::string> &objective_families() {
    static const std::vector<std::string> names{"linear", "sum", "abs_sum", "quadratic", "max_norm"};
    return names;
}

inline ObjectiveFunction make_objective(const std::string &family, const ParamTable &p) {
    if (family == "linear") {
        return linear_objective(detail::param(p, family, "c"));
    }
    if (family == "sum") {
        return sum_objective(detail::dimension(p, family));
    }
    if (family == "abs_sum") {
        return abs_sum_objective(detail::dimension(p, family));
    }
    if (family == "quadratic") {
        return quadratic_objective(detail::param(p, family, "curvature"), detail::param(p, family, "shift"),
                                   detail::scalar(p, family, "lipschitz"));
    }
    if (family == "max_norm") {
        return max_norm_objective(detail::bits(p, family, "c"));
    }
    throw ParamError("unknown objective family '" + family + "'");
}

} // namespace qcvx
