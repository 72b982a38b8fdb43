#include "yolo/interp/interpret.hpp"

#include <cmath>
#include <sstream>

#include "yolo/common/error.hpp"

namespace yolo::interp {
namespace {

using envs::EnvId;
using nlohmann::json;

json vec_json(EnvId env, const Vec2& v) {
  if (env == EnvId::kLbf) return json::array({static_cast<long long>(v[0]), static_cast<long long>(v[1])});
  return json::array({v[0], v[1]});
}

Vec2 vec_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw InterpretationError(std::string("expected a 2-vector for ") + what);
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw InterpretationError(std::string("missing field '") + key + "'");
  return *it;
}

constexpr const char* kLbfSource = R"(# State interpretation for Level-Based Foraging (lbf).
#
# The environment emits a flat vector S_v. Layout, in order:
#
#   index        component          meaning
#   3*i + 0      agent i row        grid row, 0 at the top (NORTH decreases it)
#   3*i + 1      agent i col        grid column, 0 at the left (EAST increases it)
#   3*i + 2      agent i level      agent skill level
#   3*N + 3*j+0  food j row
#   3*N + 3*j+1  food j col
#   3*N + 3*j+2  food j level       0 once the food has been collected
#
# N = {n_agents} agents, M = {n_targets} foods.
# A food is collected when the agents issuing LOAD while orthogonally adjacent
# to it have a summed level >= the food level. Actions: NONE, NORTH, SOUTH,
# WEST, EAST, LOAD.

def interpret(s_v):
    agents = [{"id": i,
               "position": [int(s_v[3*i]), int(s_v[3*i+1])],
               "level": int(s_v[3*i+2])} for i in range(N)]
    targets = [{"id": j, "kind": "food",
                "position": [int(s_v[3*N+3*j]), int(s_v[3*N+3*j+1])],
                "level": int(s_v[3*N+3*j+2]),
                "active": s_v[3*N+3*j+2] > 0} for j in range(M)]
    relative = []
    for a in agents:
        row = []
        for t in targets:
            dr = t["position"][0] - a["position"][0]
            dc = t["position"][1] - a["position"][1]
            row.append({"offset": [dr, dc],
                        "distance": abs(dr) + abs(dc),   # Manhattan
                        "adjacent": abs(dr) + abs(dc) == 1})
        relative.append(row)
    return {"env": "lbf", "agents": agents, "targets": targets,
            "relative": relative}
)";

constexpr const char* kMpeSource = R"(# State interpretation for the particle world, simple spread (mpe_spread).
#
# The environment emits a flat vector S_v. Layout, in order:
#
#   index        component            meaning
#   4*i + 0      agent i x            position, world units, +x to the right
#   4*i + 1      agent i y            position, world units, +y upwards
#   4*i + 2      agent i vx           velocity x, world units/step
#   4*i + 3      agent i vy           velocity y, world units/step
#   4*N + 2*j+0  landmark j x
#   4*N + 2*j+1  landmark j y
#
# N = {n_agents} agents and {n_targets} landmarks. The team is rewarded for every
# landmark being covered by some agent and penalised for agent collisions.
# Actions: no_action, move_left, move_right, move_down, move_up.

import math

def interpret(s_v):
    agents = [{"id": i,
               "position": [s_v[4*i], s_v[4*i+1]],
               "velocity": [s_v[4*i+2], s_v[4*i+3]]} for i in range(N)]
    targets = [{"id": j, "kind": "landmark",
                "position": [s_v[4*N+2*j], s_v[4*N+2*j+1]],
                "active": True} for j in range(N)]
    relative = []
    for a in agents:
        row = []
        for t in targets:
            dx = t["position"][0] - a["position"][0]
            dy = t["position"][1] - a["position"][1]
            row.append({"offset": [dx, dy],
                        "distance": math.hypot(dx, dy)})   # Euclidean
        relative.append(row)
    return {"env": "mpe_spread", "agents": agents, "targets": targets,
            "relative": relative}
)";

void replace_all(std::string& text, const std::string& key, const std::string& value) {
  for (std::size_t pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size())) {
    text.replace(pos, key.size(), value);
  }
}

}  // namespace

Relation relate(EnvId env, const Vec2& agent, const Vec2& target) {
  Relation r;
  r.offset = {target[0] - agent[0], target[1] - agent[1]};
  if (env == EnvId::kLbf) {
    r.distance = std::abs(r.offset[0]) + std::abs(r.offset[1]);
    r.adjacent = r.distance == 1.0;
  } else {
    r.distance = std::hypot(r.offset[0], r.offset[1]);
  }
  return r;
}

InterpretedState interpret(const envs::GlobalState& state, const envs::EnvSpec& spec) {
  if (state.values.size() != spec.state_size()) {
    throw InterpretationError("state of length " + std::to_string(state.values.size()) +
                              " does not match the " + std::string(envs::to_string(spec.env_id)) +
                              " layout of length " + std::to_string(spec.state_size()));
  }
  const auto& v = state.values;
  const int n = spec.n_agents;
  const int m = spec.n_targets;
  InterpretedState out;
  out.env = spec.env_id;
  out.agents.reserve(n);
  out.targets.reserve(m);
  if (spec.env_id == EnvId::kLbf) {
    for (int i = 0; i < n; ++i) {
      AgentView a;
      a.id = i;
      a.position = {v[3 * i], v[3 * i + 1]};
      a.level = static_cast<int>(v[3 * i + 2]);
      out.agents.push_back(a);
    }
    for (int j = 0; j < m; ++j) {
      TargetView t;
      t.id = j;
      t.kind = TargetKind::kFood;
      t.position = {v[3 * n + 3 * j], v[3 * n + 3 * j + 1]};
      t.level = static_cast<int>(v[3 * n + 3 * j + 2]);
      t.active = v[3 * n + 3 * j + 2] > 0.0;
      out.targets.push_back(t);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      AgentView a;
      a.id = i;
      a.position = {v[4 * i], v[4 * i + 1]};
      a.velocity = Vec2{v[4 * i + 2], v[4 * i + 3]};
      out.agents.push_back(a);
    }
    for (int j = 0; j < m; ++j) {
      TargetView t;
      t.id = j;
      t.kind = TargetKind::kLandmark;
      t.position = {v[4 * n + 2 * j], v[4 * n + 2 * j + 1]};
      out.targets.push_back(t);
    }
  }
  out.relative.assign(n, std::vector<Relation>(m));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) out.relative[i][j] = relate(spec.env_id, out.agents[i].position, out.targets[j].position);
  }
  return out;
}

std::string interpretation_source(const envs::EnvSpec& spec) {
  std::string text;
  switch (spec.env_id) {
    case EnvId::kLbf:
      text = kLbfSource;
      break;
    case EnvId::kMpeSpread:
      text = kMpeSource;
      break;
    default:
      throw InterpretationError("no interpretation source for this environment");
  }
  replace_all(text, "{n_agents}", std::to_string(spec.n_agents));
  replace_all(text, "{n_targets}", std::to_string(spec.n_targets));
  return text;
}

json to_json(const InterpretedState& state) {
  const EnvId env = state.env;
  json agents = json::array();
  for (const auto& a : state.agents) {
    json ja = {{"id", a.id}, {"position", vec_json(env, a.position)}};
    if (a.level) ja["level"] = *a.level;
    if (a.velocity) ja["velocity"] = vec_json(env, *a.velocity);
    agents.push_back(std::move(ja));
  }
  json targets = json::array();
  for (const auto& t : state.targets) {
    json jt = {{"id", t.id},
               {"kind", t.kind == TargetKind::kFood ? "food" : "landmark"},
               {"position", vec_json(env, t.position)},
               {"active", t.active}};
    if (t.level) jt["level"] = *t.level;
    targets.push_back(std::move(jt));
  }
  json relative = json::array();
  for (const auto& row : state.relative) {
    json jr = json::array();
    for (const auto& r : row) {
      json rel = {{"offset", vec_json(env, r.offset)}};
      if (env == EnvId::kLbf) {
        rel["distance"] = static_cast<long long>(r.distance);
        rel["adjacent"] = r.adjacent;
      } else {
        rel["distance"] = r.distance;
      }
      jr.push_back(std::move(rel));
    }
    relative.push_back(std::move(jr));
  }
  return {{"env", std::string(envs::to_string(env))},
          {"agents", std::move(agents)},
          {"targets", std::move(targets)},
          {"relative", std::move(relative)}};
}

std::string serialize(const InterpretedState& state) { return to_json(state).dump(); }

InterpretedState from_json(const json& j) {
  if (!j.is_object()) throw InterpretationError("interpreted state must be an object");
  InterpretedState out;
  try {
    out.env = envs::env_id_from_string(field(j, "env").get<std::string>());
  } catch (const ConfigError& e) {
    throw InterpretationError(e.what());
  } catch (const json::exception& e) {
    throw InterpretationError(std::string("bad env field: ") + e.what());
  }
  try {
    for (const auto& ja : field(j, "agents")) {
      AgentView a;
      a.id = field(ja, "id").get<int>();
      a.position = vec_from(field(ja, "position"), "agent position");
      if (ja.contains("level")) a.level = ja["level"].get<int>();
      if (ja.contains("velocity")) a.velocity = vec_from(ja["velocity"], "agent velocity");
      out.agents.push_back(a);
    }
    for (const auto& jt : field(j, "targets")) {
      TargetView t;
      t.id = field(jt, "id").get<int>();
      const auto kind = field(jt, "kind").get<std::string>();
      if (kind == "food") {
        t.kind = TargetKind::kFood;
      } else if (kind == "landmark") {
        t.kind = TargetKind::kLandmark;
      } else {
        throw InterpretationError("unknown target kind '" + kind + "'");
      }
      t.position = vec_from(field(jt, "position"), "target position");
      t.active = field(jt, "active").get<bool>();
      if (jt.contains("level")) t.level = jt["level"].get<int>();
      out.targets.push_back(t);
    }
    for (const auto& jr : field(j, "relative")) {
      std::vector<Relation> row;
      for (const auto& rel : jr) {
        Relation r;
        r.offset = vec_from(field(rel, "offset"), "relative offset");
        r.distance = field(rel, "distance").get<double>();
        if (rel.contains("adjacent")) r.adjacent = rel["adjacent"].get<bool>();
        row.push_back(r);
      }
      out.relative.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw InterpretationError(std::string("malformed interpreted state: ") + e.what());
  }
  if (out.relative.size() != out.agents.size()) throw InterpretationError("relative matrix has wrong row count");
  for (const auto& row : out.relative) {
    if (row.size() != out.targets.size()) throw InterpretationError("relative matrix has wrong column count");
  }
  return out;
}

}  // namespace yolo::interp
