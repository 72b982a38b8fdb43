#include "yolo/llmgen/prompt.hpp"

#include <array>
#include <cstdio>

#include <openssl/evp.h>

#include "yolo/common/error.hpp"
#include "yolo/interp/interpret.hpp"
#include "yolo/plan/external.hpp"

namespace yolo::llmgen {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) out += (k ? ", " : "") + items[k];
  return out;
}

std::string lbf_description(const envs::EnvSpec& spec) {
  return "Environment: Level-Based Foraging on a " + std::to_string(spec.grid_size) + "x" +
         std::to_string(spec.grid_size) + " grid with " + std::to_string(spec.n_agents) + " agents and " +
         std::to_string(spec.n_targets) +
         " food items. Every agent and food has a level. A food is collected when agents standing next to it "
         "(up, down, left or right, not diagonal) choose LOAD in the same step and the sum of their levels is at "
         "least the food's level. Foods here need every agent to load together. Agents and foods occupy cells "
         "exclusively; a move into an occupied cell or off the grid leaves the agent in place. The team is rewarded "
         "only when food is collected, in proportion to its level, and the episode ends when all food is gone or "
         "after " +
         std::to_string(spec.episode_limit) + " steps.\nLow-level actions: " + join(spec.action_set) +
         ". NORTH decreases the row, WEST decreases the column.\nTask: collect all food as fast as possible.";
}

std::string mpe_description(const envs::EnvSpec& spec) {
  return "Environment: cooperative navigation (simple spread) with " + std::to_string(spec.n_agents) +
         " agents and " + std::to_string(spec.n_targets) +
         " landmarks in a continuous 2D world. Agents accelerate in the chosen direction and their velocity is "
         "damped every step. The team reward is the negative sum, over landmarks, of the distance to the closest "
         "agent, minus a penalty for each pair of agents that collide. Episodes last " +
         std::to_string(spec.episode_limit) + " steps.\nLow-level actions: " + join(spec.action_set) +
         ".\nTask: cover every landmark with a different agent while avoiding collisions.";
}

constexpr const char* kGuideline =
    "Guideline: describe a strategy for the team in a few numbered steps. Say how each agent should choose its "
    "goal from the current state, how agents should coordinate so that no effort is wasted, and what to do when "
    "an agent is already in place. Refer only to information present in the state.";

std::string output_contract(const envs::EnvSpec& spec) {
  return "Write a Python 3 program that reads requests from standard input and writes responses to standard "
         "output, one JSON object per line, flushing after every line. The first line is a handshake such as "
         "{\"protocol\":\"" +
         std::string(plan::kProtocolVersion) +
         "\",\"env\":...,\"n_agents\":...,\"assignment_set\":[...]}; answer it with {\"ok\":true}. Every later "
         "line is {\"seq\":n,\"state\":S} where S is the interpreted state described above; answer with "
         "{\"seq\":n,\"assignments\":[...]} holding exactly one label per agent, in agent order, each taken from: " +
         join(spec.assignment_set) +
         ". Use only the standard library, never print anything else, and exit when standard input closes. Return "
         "the whole program in a single fenced code block tagged python.";
}

}  // namespace

PromptBundle make_bundle(const envs::EnvSpec& spec) {
  PromptBundle b;
  b.env_description = spec.env_id == envs::EnvId::kLbf ? lbf_description(spec) : mpe_description(spec);
  b.guideline = kGuideline;
  b.interpretation_source = interp::interpretation_source(spec);
  b.output_contract = output_contract(spec);
  return b;
}

std::string strategy_prompt(const PromptBundle& bundle) {
  if (bundle.env_description.empty() || bundle.guideline.empty()) {
    throw ContractViolation("strategy prompt needs an environment description and a guideline");
  }
  return bundle.env_description + "\n\n" + bundle.guideline + "\n";
}

std::string planning_prompt(const PromptBundle& bundle) {
  if (bundle.env_description.empty() || bundle.interpretation_source.empty() || bundle.output_contract.empty()) {
    throw ContractViolation("planning prompt needs description, interpretation source and output contract");
  }
  std::string p = bundle.env_description + "\n\n";
  if (bundle.strategy && !bundle.strategy->empty()) p += "Strategy:\n" + *bundle.strategy + "\n\n";
  p += "The state is interpreted as follows:\n" + bundle.interpretation_source + "\n\n";
  p += "Write a planning function that assigns each agent a high-level task every step.\n" + bundle.output_contract +
       "\n";
  return p;
}

std::string serialize(const PromptBundle& b) {
  json j = {{"env_description", b.env_description},
            {"guideline", b.guideline},
            {"strategy", b.strategy ? json(*b.strategy) : json(nullptr)},
            {"interpretation_source", b.interpretation_source},
            {"output_contract", b.output_contract}};
  return j.dump();
}

PromptBundle bundle_from_json(const json& j) {
  PromptBundle b;
  try {
    b.env_description = j.at("env_description").get<std::string>();
    b.guideline = j.at("guideline").get<std::string>();
    if (!j.at("strategy").is_null()) b.strategy = j.at("strategy").get<std::string>();
    b.interpretation_source = j.at("interpretation_source").get<std::string>();
    b.output_contract = j.at("output_contract").get<std::string>();
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("malformed prompt bundle: ") + e.what());
  }
  return b;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(buf, sizeof buf, "%02x", digest[k]);
    hex += buf;
  }
  return hex;
}

std::string prompt_hash(std::string_view prompt, std::string_view model_id) {
  std::string data(model_id);
  data += '\n';
  data += prompt;
  return sha256_hex(data);
}

}  // namespace yolo::llmgen
