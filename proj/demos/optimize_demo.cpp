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


// Minimizes a linear objective over a ball through membership and evaluation oracles.

#include <iostream>

#include "qcvx.hpp"

int main() {
    using namespace qcvx;
    auto body = std::make_shared<MembershipOracle>(ball({0.5, -0.5}, 1.0), 1e-14);
    auto objective = std::make_shared<EvaluationOracle>(linear_objective({1.0, 2.0}));
    Rng rng(1);
    const OptimizeReport report = minimize_convex(body, objective, 1e-3, rng);
    std::cout << "value " << report.value << " at (" << report.x[0] << ", " << report.x[1] << ")\n";
    std::cout << "membership queries " << body->count() << ", evaluation queries " << objective->count() << "\n";
    return 0;
}
