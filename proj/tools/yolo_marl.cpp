#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "yolo/common/error.hpp"
#include "yolo/envs/environment.hpp"
#include "yolo/harness/commands.hpp"
#include "yolo/harness/config.hpp"
#include "yolo/plan/external.hpp"

using namespace yolo;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent RL with planner-aligned reward shaping"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool offline = false;
  std::string output_dir;
  bool explain = false;
  app.add_option("--config", config_path, "run configuration (JSON)");
  app.add_option("--seed", seed, "single seed, replacing the configured list");
  app.add_flag("--offline", offline, "forbid network access");
  app.add_option("--output-dir", output_dir, "where runs, reports or docs are written");
  app.add_flag("--explain-config", explain, "describe every configuration field and exit");

  auto* train = app.add_subcommand("train", "train one run per seed");
  std::optional<long> total_steps;
  train->add_option("--total-steps", total_steps, "override total_steps");

  auto* eval = app.add_subcommand("eval", "evaluate the greedy policy of a run directory");
  std::string run_dir;
  int episodes = 32;
  eval->add_option("run_dir", run_dir)->required();
  eval->add_option("--episodes", episodes);

  auto* compare = app.add_subcommand("compare", "compare baseline and shaped runs");
  std::vector<std::string> baseline, yolo_runs;
  std::vector<long> checkpoints;
  compare->add_option("--baseline", baseline)->required();
  compare->add_option("--yolo", yolo_runs)->required();
  compare->add_option("--checkpoints", checkpoints, "steps to report; default every shared step");

  auto* generate = app.add_subcommand("generate", "generate a planning function with a language model");
  std::string env_name = "lbf";
  int agents = 0;
  std::vector<std::string> stub_files;
  bool live = false, skip_strategy = false;
  std::string artifact_dir, model, endpoint, key_env;
  std::optional<int> max_retries;
  generate->add_option("--env", env_name, "lbf or mpe_spread");
  generate->add_option("--agents", agents, "agent count (mpe_spread)");
  generate->add_option("--stub", stub_files, "files replayed as model replies, in order");
  generate->add_flag("--live", live, "call the configured HTTP endpoint");
  generate->add_flag("--skip-strategy", skip_strategy, "leave the strategy stage out");
  generate->add_option("--artifact-dir", artifact_dir);
  generate->add_option("--model", model);
  generate->add_option("--endpoint", endpoint);
  generate->add_option("--api-key-env", key_env, "environment variable holding the API key");
  generate->add_option("--max-retries", max_retries);

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of network gradients");
  int n_nets = 100;
  bool wrong_sign = false;
  gradcheck->add_option("--nets", n_nets);
  gradcheck->add_flag("--inject-wrong-sign", wrong_sign, "flip the analytic gradient (self-test)");

  auto* serve = app.add_subcommand("serve-planner", "serve the reference planner over stdin/stdout");
  auto* docs = app.add_subcommand("docs", "write docs/state-layouts.md");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : harness::kExitConfig;
  }

  if (explain) {
    std::cout << harness::explain_config();
    return 0;
  }
  if (*serve) return plan::serve_reference_planner(std::cin, std::cout);
  if (*docs) {
    const fs::path dir = output_dir.empty() ? fs::path("docs") : fs::path(output_dir);
    fs::create_directories(dir);
    std::ofstream(dir / "state-layouts.md") << envs::render_state_layouts_markdown();
    std::cout << (dir / "state-layouts.md").string() << "\n";
    return 0;
  }
  if (*gradcheck) {
    nn::GradientHook hook;
    if (wrong_sign) hook = [](std::vector<double>& g) {
        for (double& v : g) v = -v;
      };
    return harness::cmd_gradcheck(n_nets, seed.value_or(0), std::cout, hook);
  }
  if (*compare) {
    std::vector<fs::path> b(baseline.begin(), baseline.end()), y(yolo_runs.begin(), yolo_runs.end());
    return harness::cmd_compare(b, y, checkpoints, output_dir.empty() ? fs::path("reports") : fs::path(output_dir),
                                std::cout, std::cerr);
  }
  if (*eval) return harness::cmd_eval(run_dir, episodes, seed.value_or(0), std::cout, std::cerr);

  harness::RunConfig config;
  try {
    if (!config_path.empty()) config = harness::load_run_config(config_path);
    if (seed) config.seeds = {*seed};
    if (!output_dir.empty()) config.output_dir = output_dir;
    if (total_steps) config.total_steps = *total_steps;
    if (offline) config.llm.offline = true;
    config.validate();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return harness::kExitConfig;
  }

  if (*train) return harness::cmd_train(config, std::cout, std::cerr);

  if (*generate) {
    harness::GenerateOptions options;
    options.llm = config.llm;
    options.artifact_dir = artifact_dir.empty() ? config.artifact_dir : fs::path(artifact_dir);
    options.skip_strategy = skip_strategy;
    options.validation_seed = seed.value_or(0);
    if (!model.empty()) options.llm.model_id = model;
    if (!endpoint.empty()) options.llm.endpoint = endpoint;
    if (!key_env.empty()) options.llm.api_key_env = key_env;
    if (max_retries) options.llm.max_retries = *max_retries;
    try {
      options.env = config.env;
      options.env.id = envs::env_id_from_string(env_name);
      if (agents > 0) options.env.mpe.n_agents = agents;
    } catch (const Error& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return harness::kExitConfig;
    }
    std::unique_ptr<llmgen::Transport> transport;
    if (options.llm.offline) {
      transport = std::make_unique<llmgen::RefusingTransport>();
    } else if (!stub_files.empty()) {
      std::vector<std::string> replies;
      try {
        for (const auto& f : stub_files) replies.push_back(read_file(f));
      } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return harness::kExitConfig;
      }
      transport = std::make_unique<llmgen::StubTransport>(std::move(replies));
    } else if (live) {
      transport = std::make_unique<llmgen::HttpTransport>(options.llm);
    } else {
      std::cerr << "config error: choose a transport with --live, --stub or --offline\n";
      return harness::kExitConfig;
    }
    return harness::cmd_generate(options, *transport, std::cout, std::cerr);
  }

  std::cout << app.help();
  return 0;
}
