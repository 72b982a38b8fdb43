#include "yolo/harness/commands.hpp"

#include <fstream>
#include <ostream>

#include "yolo/common/error.hpp"
#include "yolo/common/seed.hpp"
#include "yolo/harness/compare.hpp"
#include "yolo/harness/run.hpp"
#include "yolo/marl/policy.hpp"

namespace yolo::harness {

int cmd_generate(const GenerateOptions& options, llmgen::Transport& transport, std::ostream& out, std::ostream& err) {
  try {
    options.env.validate();
    llmgen::ArtifactStore store(options.artifact_dir);
    llmgen::PipelineOptions pipeline;
    pipeline.skip_strategy = options.skip_strategy;
    pipeline.generation.validation_seed = options.validation_seed;
    pipeline.generation.validation.work_dir = options.artifact_dir / ".validate";
    const auto result = llmgen::run_pipeline(options.env, options.llm, transport, store, pipeline);
    const auto& g = result.generation;
    err << (g.cache_hit ? "cache hit, no API calls\n"
                        : "generated in " + std::to_string(g.attempts) + " attempt(s), validated on " +
                              std::to_string(g.report.n_samples) + " states\n");
    out << g.artifact.prompt_hash << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const OfflineError& e) {
    err << "no cached artifact: " << e.what() << "\n";
    return kExitGeneration;
  } catch (const Error& e) {
    err << "generation failed: " << e.what() << "\n";
    return kExitGeneration;
  }
}

int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    for (const auto& run : train_runs(config)) {
      const double last = run.metrics.empty() ? 0.0 : run.metrics.back().mean_eval_return;
      out << run.dir.string() << "  seed " << run.seed << "  final mean eval return " << last
          << (run.fell_back ? "  (fell back to reference planner)" : "") << "\n";
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TrainingAborted& e) {
    err << "training aborted: " << e.what() << "\n";
    return kExitTraining;
  } catch (const PlannerProtocolError& e) {
    err << "training aborted: " << e.what() << "\n";
    return kExitTraining;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_eval(const std::filesystem::path& run_dir, int episodes, std::uint64_t seed, std::ostream& out,
             std::ostream& err) {
  try {
    const RunConfig config = load_run_dir_config(run_dir);
    const auto policy = load_policy(run_dir);
    const auto r = marl::evaluate(*policy, config.env, episodes, derive_seed(seed, 0xe7a1));
    out << "episodes " << episodes << "  mean " << r.mean_return << "  min " << r.min_return << "  max "
        << r.max_return << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_compare(const std::vector<std::filesystem::path>& baseline, const std::vector<std::filesystem::path>& yolo,
                const std::vector<long>& checkpoints, const std::filesystem::path& output_dir, std::ostream& out,
                std::ostream& err) {
  try {
    const auto report = compare_runs(baseline, yolo, checkpoints);
    std::filesystem::create_directories(output_dir);
    const std::string stem = report.env + "-" + report.algorithm;
    std::ofstream(output_dir / (stem + "-comparison.csv")) << report_csv(report);
    std::ofstream(output_dir / (stem + "-comparison.svg")) << report_svg(report);
    out << report_table(report);
    return kExitOk;
  } catch (const Error& e) {
    err << "comparison failed: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_gradcheck(int n_nets, std::uint64_t seed, std::ostream& out, const nn::GradientHook& hook) {
  const auto report = nn::run_gradcheck_suite(n_nets, seed, hook);
  out << report.to_string();
  out << (report.passed() ? "PASS" : "FAIL") << "  max relative error " << report.max_rel_error << "\n";
  return report.passed() ? kExitOk : kExitFailure;
}

}  // namespace yolo::harness
