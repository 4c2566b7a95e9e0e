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
//  JSON instance files.
//
//  {
//    "id": "name",
//    "items": [{"id": 0, "label": "a"}, ...],
//    "priors": [[0.5, 0.5], [1.0], ...],
//    "objectives": [{"f": {"kind": ..., "params": {...}},
//                    "g": {...},          (optional, defaults to f)
//                    "epsilon": 1.0}],    (optional, defaults to 1)
//    "constraint": {"type": "uniform", "k": 2}
//                | {"type": "partition", "parts": [[0, 1], [2]],
//                   "capacities": [1, 1]}
//                | {"type": "explicit", "sets": [[0], [1], [0, 1]]}
//  }
//
//  Reward kinds and params ("coverage" and "saturating" are read as aliases):
//    modular            {"weights": [[w(e, s), ...], ...]}
//    weighted-coverage  {"element_weights": [...], "covers": [[[u, ...], ...], ...]}
//    saturating-sum     {"weights": [...], "cap": c}
//    perturbed          {"base": {kind, params}, "epsilon": eps, "levels": L}
//

#ifndef ARO_IO_HPP
#define ARO_IO_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "aro/core.hpp"
#include "aro/instance.hpp"
#include "aro/objectives.hpp"

namespace aro {

using Json = nlohmann::json;

namespace detail {

inline const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw InstanceError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw InstanceError(where + "." + key + ": missing");
  return *it;
}

template <class T>
T as(const Json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const Json::exception&) {
    throw InstanceError(where + ": wrong type");
  }
}

}  // namespace detail

inline Json reward_to_json(const RewardFunction& f) {
  return std::visit(
      [](const auto& r) -> Json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ModularReward>) {
          return {{"kind", "modular"}, {"params", {{"weights", r.weights}}}};
        } else if constexpr (std::is_same_v<T, CoverageReward>) {
          return {{"kind", "weighted-coverage"},
                  {"params",
                   {{"element_weights", r.element_weights}, {"covers", r.covers}}}};
        } else if constexpr (std::is_same_v<T, SaturatingReward>) {
          return {{"kind", "saturating-sum"},
                  {"params", {{"weights", r.weights}, {"cap", r.cap}}}};
        } else if constexpr (std::is_same_v<T, PerturbedReward>) {
          return {{"kind", "perturbed"},
                  {"params",
                   {{"base", reward_to_json(*r.base)},
                    {"epsilon", r.epsilon},
                    {"levels", r.levels}}}};
        } else {
          throw InstanceError("reward kind '" + r.name + "' cannot be serialized");
        }
      },
      f.variant());
}

inline RewardFunction reward_from_json(const Json& j, const std::string& where) {
  const auto kind = detail::as<std::string>(detail::field(j, "kind", where), where + ".kind");
  const Json& p = detail::field(j, "params", where);
  const std::string pw = where + ".params";
  using Table = std::vector<std::vector<double>>;
  if (kind == "modular") {
    return ModularReward{
        detail::as<Table>(detail::field(p, "weights", pw), pw + ".weights")};
  }
  if (kind == "weighted-coverage" || kind == "coverage") {
    CoverageReward r;
    r.element_weights = detail::as<std::vector<double>>(
        detail::field(p, "element_weights", pw), pw + ".element_weights");
    r.covers = detail::as<std::vector<std::vector<std::vector<int>>>>(
        detail::field(p, "covers", pw), pw + ".covers");
    return r;
  }
  if (kind == "saturating-sum" || kind == "saturating") {
    SaturatingReward r;
    r.weights = detail::as<Table>(detail::field(p, "weights", pw), pw + ".weights");
    r.cap = detail::as<double>(detail::field(p, "cap", pw), pw + ".cap");
    return r;
  }
  if (kind == "perturbed") {
    return RewardFunction::perturbed(
        reward_from_json(detail::field(p, "base", pw), pw + ".base"),
        detail::as<double>(detail::field(p, "epsilon", pw), pw + ".epsilon"),
        detail::as<int>(detail::field(p, "levels", pw), pw + ".levels"));
  }
  throw InstanceError(where + ".kind: unknown reward kind '" + kind + "'");
}

inline Json family_to_json(const FeasibleFamily& c) {
  switch (c.kind()) {
    case FeasibleFamily::Kind::kUniform:
      return {{"type", "uniform"}, {"k", c.capacities()[0]}};
    case FeasibleFamily::Kind::kPartition:
      return {{"type", "partition"}, {"parts", c.parts()}, {"capacities", c.capacities()}};
    case FeasibleFamily::Kind::kExplicit: {
      Json sets = Json::array();
      for (Mask m : c.explicit_masks()) {
        if (m != 0) sets.push_back(from_mask(m));
      }
      return {{"type", "explicit"}, {"sets", sets}};
    }
  }
  return {};
}

inline FeasibleFamily family_from_json(const Json& j, int n) {
  const std::string where = "constraint";
  const auto type = detail::as<std::string>(detail::field(j, "type", where), where + ".type");
  if (type == "uniform") {
    return FeasibleFamily::uniform(
        n, detail::as<int>(detail::field(j, "k", where), where + ".k"));
  }
  if (type == "partition") {
    return FeasibleFamily::partition(
        n,
        detail::as<std::vector<ItemSet>>(detail::field(j, "parts", where), where + ".parts"),
        detail::as<std::vector<int>>(detail::field(j, "capacities", where),
                                     where + ".capacities"));
  }
  if (type == "explicit") {
    return FeasibleFamily::explicit_sets(
        n, detail::as<std::vector<ItemSet>>(detail::field(j, "sets", where), where + ".sets"));
  }
  throw InstanceError(where + ".type: unknown constraint type '" + type + "'");
}

inline Json instance_to_json(const Instance& inst) {
  Json j;
  j["id"] = inst.id;
  Json items = Json::array();
  for (const auto& it : inst.ground.items()) {
    Json item{{"id", it.id}};
    if (!it.label.empty()) item["label"] = it.label;
    items.push_back(item);
  }
  j["items"] = items;
  Json priors = Json::array();
  for (const auto& p : inst.ground.priors()) priors.push_back(p.probs);
  j["priors"] = priors;
  Json objectives = Json::array();
  for (const auto& pair : inst.objectives) {
    Json o{{"f", reward_to_json(pair.f)}, {"epsilon", pair.epsilon}};
    const bool same = pair.epsilon == 1.0 &&
                      reward_to_json(pair.g) == o["f"];
    if (!same) o["g"] = reward_to_json(pair.g);
    objectives.push_back(o);
  }
  j["objectives"] = objectives;
  j["constraint"] = family_to_json(inst.constraint);
  return j;
}

inline Instance instance_from_json(const Json& j) {
  if (!j.is_object()) throw InstanceError("instance: expected a JSON object");
  std::vector<Item> items;
  const Json& ji = detail::field(j, "items", "instance");
  if (!ji.is_array()) throw InstanceError("items: expected an array");
  for (std::size_t k = 0; k < ji.size(); ++k) {
    const std::string where = "items[" + std::to_string(k) + "]";
    Item it;
    it.id = detail::as<int>(detail::field(ji[k], "id", where), where + ".id");
    if (ji[k].contains("label")) {
      it.label = detail::as<std::string>(ji[k]["label"], where + ".label");
    }
    items.push_back(it);
  }
  std::vector<StatePrior> priors;
  const Json& jp = detail::field(j, "priors", "instance");
  if (!jp.is_array()) throw InstanceError("priors: expected an array");
  for (std::size_t k = 0; k < jp.size(); ++k) {
    priors.push_back({static_cast<int>(k),
                      detail::as<std::vector<double>>(
                          jp[k], "priors[" + std::to_string(k) + "]")});
  }
  GroundSet ground(std::move(items), std::move(priors));

  ObjectiveFamily objectives;
  const Json& jo = detail::field(j, "objectives", "instance");
  if (!jo.is_array()) throw InstanceError("objectives: expected an array");
  for (std::size_t k = 0; k < jo.size(); ++k) {
    const std::string where = "objectives[" + std::to_string(k) + "]";
    NearlySubmodularPair pair;
    pair.f = reward_from_json(detail::field(jo[k], "f", where), where + ".f");
    pair.g = jo[k].contains("g") ? reward_from_json(jo[k]["g"], where + ".g") : pair.f;
    pair.epsilon =
        jo[k].contains("epsilon") ? detail::as<double>(jo[k]["epsilon"], where + ".epsilon")
                                  : 1.0;
    objectives.push_back(std::move(pair));
  }
  FeasibleFamily constraint =
      family_from_json(detail::field(j, "constraint", "instance"), ground.size());
  std::string id = j.contains("id") ? detail::as<std::string>(j["id"], "id") : "";
  return Instance(std::move(ground), std::move(objectives), std::move(constraint),
                  std::move(id));
}

inline Instance parse_instance(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InstanceError(std::string("instance: invalid JSON: ") + e.what());
  }
  return instance_from_json(j);
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError("instance: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  Instance inst = parse_instance(ss.str());
  if (inst.id.empty()) inst.id = path;
  return inst;
}

inline std::string dump_instance(const Instance& inst) {
  return instance_to_json(inst).dump(2) + "\n";
}

inline void save_instance(const std::string& path, const Instance& inst) {
  std::ofstream out(path);
  if (!out) throw InstanceError("cannot write '" + path + "'");
  out << dump_instance(inst);
}

}  // namespace aro

#endif  // ARO_IO_HPP
