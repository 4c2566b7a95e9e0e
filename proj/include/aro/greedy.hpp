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

//
//  Lazy greedy over a downward-closed family for an item-level set
//  function given as a callable Mask -> double.
//

#ifndef ARO_GREEDY_HPP
#define ARO_GREEDY_HPP

#include <limits>
#include <queue>
#include <vector>

#include "aro/core.hpp"

namespace aro {

struct GreedyResult {
  ItemSet set;
  double value = 0.0;
  /// Items in the order they were added.
  std::vector<int> order;
  int evaluations = 0;
};

/// Repeatedly adds the feasible item with the largest marginal gain until
/// no feasible item has a positive gain. Stale gains are kept as upper
/// bounds and only refreshed when they reach the top of the queue (exact
/// for submodular functions). Ties go to the lower item id.
template <class SetValue>
GreedyResult lazy_greedy(const FeasibleFamily& family, SetValue&& value,
                         double min_gain = 1e-12) {
  struct Entry {
    double gain;
    int item;
    int round;
    bool operator<(const Entry& o) const {
      if (gain != o.gain) return gain < o.gain;
      return item > o.item;
    }
  };
  GreedyResult out;
  Mask current = 0;
  double current_value = value(Mask{0});
  ++out.evaluations;
  std::priority_queue<Entry> heap;
  for (int e = 0; e < family.size(); ++e) {
    heap.push({std::numeric_limits<double>::infinity(), e, -1});
  }
  int round = 0;
  while (!heap.empty()) {
    Entry top = heap.top();
    heap.pop();
    const Mask with = current | (Mask{1} << top.item);
    // Downward closure: once infeasible, infeasible for every superset.
    if (!family.contains_mask(with)) continue;
    if (top.round == round) {
      if (!(top.gain > min_gain)) break;
      current = with;
      current_value += top.gain;
      out.order.push_back(top.item);
      ++round;
      continue;
    }
    const double gain = value(with) - current_value;
    ++out.evaluations;
    heap.push({gain, top.item, round});
  }
  out.set = from_mask(current);
  out.value = value(current);
  return out;
}

/// Best feasible set by enumeration; ties go to the smaller mask.
template <class SetValue>
std::pair<ItemSet, double> exhaustive_best(const FeasibleFamily& family,
                                           SetValue&& value,
                                           std::size_t cap = std::size_t{1} << 20) {
  Mask best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (Mask m : family.enumerate(cap)) {
    const double v = value(m);
    if (v > best_value) {
      best_value = v;
      best = m;
    }
  }
  return {from_mask(best), best_value};
}

}  // namespace aro

#endif  // ARO_GREEDY_HPP
