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

// Run-config files: top-level keys mirror command-line flags, and the
// optional `body` and `objective` tables name a registered family.
#pragma once

#include <yaml-cpp/yaml.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcvx/registry.hpp"

namespace qcvx::cli {

struct FamilySpec {
    std::string family;
    ParamTable params;
};

struct ConfigFile {
    /// Flag-style tokens ("--key=value") for every top-level scalar or list.
    std::vector<std::string> flag_tokens;
    std::optional<FamilySpec> body;
    std::optional<FamilySpec> objective;
};

namespace detail {

inline std::string scalar_text(const YAML::Node &node, const std::string &key) {
    if (node.IsScalar()) {
        return node.Scalar();
    }
    if (node.IsSequence()) {
        std::string joined;
        for (std::size_t i = 0; i < node.size(); ++i) {
            if (!node[i].IsScalar()) {
                throw ParamError("config: '" + key + "' must be a scalar or a flat list");
            }
            if (i > 0) {
                joined += ',';
            }
            joined += node[i].Scalar();
        }
        return joined;
    }
    throw ParamError("config: '" + key + "' must be a scalar or a flat list");
}

inline FamilySpec family_spec(const YAML::Node &node, const std::string &table) {
    if (!node.IsMap() || !node["family"]) {
        throw ParamError("config: table '" + table + "' needs a 'family' key");
    }
    FamilySpec spec;
    spec.family = node["family"].as<std::string>();
    for (const auto &kv : node) {
        const auto key = kv.first.as<std::string>();
        if (key == "family") {
            continue;
        }
        Vec values;
        if (kv.second.IsScalar()) {
            values.push_back(kv.second.as<double>());
        } else if (kv.second.IsSequence()) {
            for (const auto &item : kv.second) {
                values.push_back(item.as<double>());
            }
        } else {
            throw ParamError("config: '" + table + "." + key + "' must be a number or a list of numbers");
        }
        spec.params[key] = std::move(values);
    }
    return spec;
}

} // namespace detail

inline ConfigFile parse_config(const YAML::Node &root) {
    if (!root.IsMap()) {
        throw ParamError("config: top level must be a table");
    }
    ConfigFile cfg;
    for (const auto &kv : root) {
        const auto key = kv.first.as<std::string>();
        if (key == "body") {
            cfg.body = detail::family_spec(kv.second, key);
        } else if (key == "objective") {
            cfg.objective = detail::family_spec(kv.second, key);
        } else {
            cfg.flag_tokens.push_back("--" + key + "=" + detail::scalar_text(kv.second, key));
        }
    }
    return cfg;
}

inline ConfigFile load_config(const std::string &path) {
    try {
        return parse_config(YAML::LoadFile(path));
    } catch (const YAML::Exception &e) {
        throw ParamError("config: cannot read '" + path + "': " + e.what());
    }
}

} // namespace qcvx::cli
