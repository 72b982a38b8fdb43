#include "yolo/llmgen/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <regex>

#include "yolo/common/error.hpp"

namespace yolo::llmgen {

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ChatRequest make_request(const LlmConfig& config, std::string prompt) {
  return ChatRequest{config.model_id, std::move(prompt), config.temperature, config.max_tokens};
}

}  // namespace

std::string generate_strategy(const PromptBundle& bundle, const LlmConfig& config, Transport& transport,
                              ArtifactStore& store, envs::EnvId env) {
  const std::string prompt = strategy_prompt(bundle);
  const std::string hash = prompt_hash(prompt, config.model_id);
  if (auto cached = store.get_strategy(env, hash)) return *cached;
  if (config.offline) throw OfflineError("offline mode: strategy generation needs the network");
  std::string text = transport.complete(make_request(config, prompt));
  store.put_strategy(env, hash, text);
  return text;
}

std::optional<CodeBlock> extract_code_block(std::string_view completion) {
  static const std::regex fence(R"(```([A-Za-z0-9_+-]*)[ \t]*\r?\n([\s\S]*?)```)");
  const std::string text(completion);
  std::smatch m;
  if (!std::regex_search(text, m, fence)) return std::nullopt;
  return CodeBlock{m[1].str(), m[2].str()};
}

std::vector<std::string> launch_for(const CodeBlock& block) {
  if (block.language.empty() || block.language == "python" || block.language == "python3" ||
      block.language == "py") {
    return {"python3", std::string(plan::kSourcePlaceholder)};
  }
  throw GenerationError("unsupported planner language '" + block.language + "'");
}

GenerationResult generate_planning_function(const PromptBundle& bundle, const LlmConfig& config,
                                            const envs::EnvConfig& env, Transport& transport, ArtifactStore& store,
                                            const GenerationOptions& options) {
  const std::string base_prompt = planning_prompt(bundle);
  const std::string hash = prompt_hash(base_prompt, config.model_id);
  GenerationResult result;
  if (auto cached = store.get(env.id, hash)) {
    result.artifact = *cached;
    result.cache_hit = true;
    return result;
  }
  if (config.offline) throw OfflineError("offline mode: no cached artifact for prompt " + hash);

  std::string prompt = base_prompt;
  std::string last_failure;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    ++result.attempts;
    const std::string completion = transport.complete(make_request(config, prompt));
    const auto block = extract_code_block(completion);
    std::string failure;
    if (!block) {
      failure = "The reply contained no fenced code block.";
    } else {
      plan::PlanningArtifact artifact;
      artifact.kind = plan::ArtifactKind::kExternal;
      artifact.env_id = env.id;
      artifact.source_text = block->code;
      artifact.strategy_text = bundle.strategy.value_or("");
      artifact.prompt_hash = hash;
      artifact.created_at = options.clock ? options.clock() : utc_now();
      artifact.model_id = config.model_id;
      try {
        artifact.launch = launch_for(*block);
      } catch (const GenerationError& e) {
        failure = e.what();
      }
      if (failure.empty()) {
        result.report = plan::validate_artifact(artifact, env, options.n_validation_samples, options.validation_seed,
                                                options.validation);
        if (result.report.passed()) {
          store.put(artifact);
          result.artifact = std::move(artifact);
          return result;
        }
        failure = result.report.summary();
      }
    }
    last_failure = failure;
    prompt = base_prompt + "\nYour previous program failed validation: " + failure +
             "\nReturn a corrected program in the same format.\n";
  }
  throw GenerationError("planning function generation failed after " + std::to_string(result.attempts) +
                        " attempts: " + last_failure);
}

PipelineResult run_pipeline(const envs::EnvConfig& env, const LlmConfig& config, Transport& transport,
                            ArtifactStore& store, const PipelineOptions& options) {
  config.validate();
  PromptBundle bundle = make_bundle(envs::make_spec(env));
  PipelineResult out;
  if (!options.skip_strategy) {
    struct Counter final : Transport {
      Transport& inner;
      int calls = 0;
      explicit Counter(Transport& t) : inner(t) {}
      std::string complete(const ChatRequest& r) override {
        ++calls;
        return inner.complete(r);
      }
    } counter(transport);
    bundle.strategy = generate_strategy(bundle, config, counter, store, env.id);
    out.strategy_calls = counter.calls;
    out.strategy = bundle.strategy;
  }
  out.generation = generate_planning_function(bundle, config, env, transport, store, options.generation);
  return out;
}

}  // namespace yolo::llmgen
