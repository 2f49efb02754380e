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
 * @file common.hpp
 * Vector helpers, the error hierarchy and the shared random source.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcvx {

inline constexpr const char *kVersion = "0.1.0";

using Vec = std::vector<double>;
using Rng = std::mt19937_64;

inline constexpr double kPi = std::numbers::pi;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A query point has the wrong dimension or a non-finite coordinate.
class InvalidPoint : public Error {
  public:
    using Error::Error;
};

/// An evaluation point lies outside the objective's domain.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A caller-supplied parameter is out of range.
class ParamError : public Error {
  public:
    using Error::Error;
};

/// The derived grid/precision parameters violate one of the sizing inequalities.
class ParamsInfeasible : public ParamError {
  public:
    using ParamError::ParamError;
};

/// The simulated statevector would exceed the configured amplitude budget.
class StateTooLarge : public Error {
  public:
    using Error::Error;
};

/// The sampling grid spacing is wider than the sampling box.
class DegenerateGrid : public ParamError {
  public:
    using ParamError::ParamError;
};

/// The bisection start point is not inside the body.
class BracketError : public Error {
  public:
    using Error::Error;
};

/// A subset query was issued with mismatched index/value lengths.
class ArityError : public Error {
  public:
    using Error::Error;
};

/// An oracle answer is outside the set of values its contract permits.
class ContractViolation : public Error {
  public:
    using Error::Error;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm1(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) {
        s += std::abs(v);
    }
    return s;
}

inline double norm_inf(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) {
        s = std::max(s, std::abs(v));
    }
    return s;
}

inline Vec sub(std::span<const double> a, std::span<const double> b) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] - b[i];
    }
    return out;
}

inline Vec add_scaled(std::span<const double> a, double t, std::span<const double> b) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] + t * b[i];
    }
    return out;
}

inline Vec scaled(std::span<const double> a, double t) {
    Vec out(a.begin(), a.end());
    for (double &v : out) {
        v *= t;
    }
    return out;
}

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Rng &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, bound] by rejection, so the stream is portable across standard libraries.
inline std::uint64_t uniform_index(Rng &rng, std::uint64_t bound) {
    if (bound == UINT64_MAX) {
        return rng();
    }
    const std::uint64_t range = bound + 1;
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range);
    std::uint64_t v = rng();
    while (v >= limit) {
        v = rng();
    }
    return v % range;
}

inline void require_finite(std::span<const double> x, std::size_t dim, const char *who) {
    if (x.size() != dim) {
        throw InvalidPoint(std::string(who) + ": expected dimension " + std::to_string(dim) + ", got " +
                           std::to_string(x.size()));
    }
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw InvalidPoint(std::string(who) + ": non-finite coordinate");
        }
    }
}

} // namespace qcvx
