// Copyright 2020 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ARO_INSTANCE_HPP
#define ARO_INSTANCE_HPP

#include <algorithm>
#include <string>
#include <utility>

#include "aro/core.hpp"
#include "aro/objectives.hpp"

namespace aro {

/// Stochastic items, an objective family and a feasibility constraint.
struct Instance {
  std::string id;
  GroundSet ground;
  ObjectiveFamily objectives;
  FeasibleFamily constraint;

  Instance() = default;
  Instance(GroundSet g, ObjectiveFamily objs, FeasibleFamily c,
           std::string name = {})
      : id(std::move(name)),
        ground(std::move(g)),
        objectives(std::move(objs)),
        constraint(std::move(c)) {
    validate();
  }

  int n() const { return ground.size(); }
  int m() const { return static_cast<int>(objectives.size()); }

  /// Smallest eps across the family.
  double epsilon() const {
    double eps = 1.0;
    for (const auto& p : objectives) eps = std::min(eps, p.epsilon);
    return eps;
  }

  bool all_submodular() const {
    return std::all_of(objectives.begin(), objectives.end(),
                       [](const NearlySubmodularPair& p) { return p.epsilon == 1.0; });
  }

  void validate() const {
    if (objectives.empty()) throw InstanceError("objectives: must be nonempty");
    for (std::size_t i = 0; i < objectives.size(); ++i) {
      const std::string where = "objectives[" + std::to_string(i) + "]";
      const auto& p = objectives[i];
      if (!(p.epsilon > 0.0 && p.epsilon <= 1.0)) {
        throw InstanceError(where + ".epsilon: must lie in (0, 1]");
      }
      p.f.validate(ground, where + ".f");
      p.g.validate(ground, where + ".g");
    }
    if (constraint.size() != ground.size()) {
      throw InstanceError("constraint: ground-set size does not match items");
    }
  }
};

}  // namespace aro

#endif  // ARO_INSTANCE_HPP
