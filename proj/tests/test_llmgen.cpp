#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "yolo/common/error.hpp"
#include "yolo/envs/environment.hpp"
#include "yolo/llmgen/pipeline.hpp"
#include "yolo/llmgen/prompt.hpp"
#include "yolo/llmgen/store.hpp"
#include "yolo/llmgen/transport.hpp"

using namespace yolo;
using namespace yolo::envs;
using namespace yolo::llmgen;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("yolo_test_llmgen_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string fenced(const std::string& code) { return "Here is the planner.\n```python\n" + code + "```\nDone.\n"; }

// Hands the session to the built-in reference planner.
std::string reference_program() {
  return fenced("import os\nos.execv(" + nlohmann::json(YOLO_CLI_PATH).dump() + ", [" +
                nlohmann::json(YOLO_CLI_PATH).dump() + ", \"serve-planner\"])\n");
}

std::string invalid_label_program() {
  return fenced(
      "import json, sys\n"
      "hs = json.loads(sys.stdin.readline())\n"
      "print(json.dumps({\"ok\": True}), flush=True)\n"
      "for line in sys.stdin:\n"
      "    req = json.loads(line)\n"
      "    print(json.dumps({\"seq\": req[\"seq\"], \"assignments\": [\"Food9\"] * hs[\"n_agents\"]}), flush=True)\n");
}

GenerationOptions fast_options(const fs::path& dir) {
  GenerationOptions o;
  o.n_validation_samples = 100;
  o.validation.work_dir = dir / "validate";
  o.clock = [] { return std::string("2024-06-20T00:00:00Z"); };
  return o;
}

}  // namespace

TEST(Prompt, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_NE(prompt_hash("p", "model-a"), prompt_hash("p", "model-b"));
}

TEST(Prompt, BundleIsDeterministicAndRoundTrips) {
  for (const auto& spec : {make_spec(EnvConfig{}), make_spec(EnvConfig{EnvId::kMpeSpread, {}, {}, 0})}) {
    const auto a = make_bundle(spec);
    EXPECT_EQ(serialize(a), serialize(make_bundle(spec)));
    EXPECT_EQ(bundle_from_json(nlohmann::json::parse(serialize(a))), a);
    EXPECT_FALSE(a.strategy.has_value());
    EXPECT_NE(a.output_contract.find("yolo-marl-plan/1"), std::string::npos);
  }
}

TEST(Prompt, PlanningPromptChainsSectionsInOrder) {
  auto b = make_bundle(make_spec(EnvConfig{}));
  b.strategy = "STRATEGY-MARKER";
  const auto p = planning_prompt(b);
  const auto d = p.find(b.env_description);
  const auto s = p.find("STRATEGY-MARKER");
  const auto i = p.find(b.interpretation_source);
  const auto c = p.find(b.output_contract);
  ASSERT_NE(d, std::string::npos);
  ASSERT_NE(s, std::string::npos);
  ASSERT_NE(i, std::string::npos);
  ASSERT_NE(c, std::string::npos);
  EXPECT_LT(d, s);
  EXPECT_LT(s, i);
  EXPECT_LT(i, c);
  EXPECT_EQ(strategy_prompt(b).find("STRATEGY-MARKER"), std::string::npos);
}

TEST(Prompt, EmptySectionIsRejected) {
  auto b = make_bundle(make_spec(EnvConfig{}));
  b.interpretation_source.clear();
  EXPECT_THROW(planning_prompt(b), ContractViolation);
}

TEST(Transport, ReplyShapes) {
  EXPECT_EQ(parse_reply(R"({"content":[{"type":"text","text":"hello"}]})"), "hello");
  EXPECT_EQ(parse_reply(R"({"choices":[{"message":{"content":"hi"}}]})"), "hi");
  EXPECT_THROW(parse_reply(R"({"error":"nope"})"), NetworkError);
  EXPECT_THROW(parse_reply("not json"), NetworkError);
  const auto body = nlohmann::json::parse(request_body(ChatRequest{"m", "prompt text", 0.0, 100}));
  EXPECT_EQ(body["model"], "m");
  EXPECT_EQ(body["max_tokens"], 100);
  EXPECT_EQ(body["messages"][0]["content"], "prompt text");
}

TEST(Transport, HttpRefusesOfflineAndMissingKey) {
  LlmConfig c;
  c.offline = true;
  HttpTransport offline(c);
  EXPECT_THROW(offline.complete(ChatRequest{}), OfflineError);
  c.offline = false;
  c.api_key_env = "YOLO_TEST_SURELY_UNSET_KEY";
  HttpTransport keyless(c);
  EXPECT_THROW(keyless.complete(ChatRequest{}), NetworkError);
}

TEST(Transport, StubRefusingCounting) {
  StubTransport stub({"a", "b"});
  CountingTransport counted(stub);
  EXPECT_EQ(counted.complete(ChatRequest{"m", "p1"}), "a");
  EXPECT_EQ(counted.complete(ChatRequest{"m", "p2"}), "b");
  EXPECT_THROW(counted.complete(ChatRequest{}), NetworkError);
  EXPECT_EQ(counted.attempts(), 3);
  EXPECT_EQ(counted.successes(), 2);
  EXPECT_EQ(stub.requests()[1].prompt, "p2");
  RefusingTransport refuse;
  EXPECT_THROW(refuse.complete(ChatRequest{}), NetworkError);
  EXPECT_EQ(refuse.attempts(), 1);
}

TEST(Config, LlmValidation) {
  LlmConfig c;
  EXPECT_EQ(c.model_id, "claude-3-5-sonnet-20240620");
  EXPECT_EQ(c.max_retries, 3);
  c.max_retries = -1;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(CodeBlock, Extraction) {
  const auto b = extract_code_block("text\n```python\nprint(1)\n```\n```js\nx\n```");
  ASSERT_TRUE(b.has_value());
  EXPECT_EQ(b->language, "python");
  EXPECT_EQ(b->code, "print(1)\n");
  EXPECT_EQ(launch_for(*b), (std::vector<std::string>{"python3", "{source}"}));
  EXPECT_FALSE(extract_code_block("no code here").has_value());
  EXPECT_THROW(launch_for(CodeBlock{"rust", "fn main(){}"}), GenerationError);
}

TEST(Strategy, OfflineRefusesWithoutTouchingTransport) {
  ArtifactStore store(fresh_dir("strategy_offline"));
  LlmConfig c;
  c.offline = true;
  RefusingTransport t;
  EXPECT_THROW(generate_strategy(make_bundle(make_spec(EnvConfig{})), c, t, store, EnvId::kLbf), OfflineError);
  EXPECT_EQ(t.attempts(), 0);
}

TEST(Strategy, StubTextPersistedUnderPromptHash) {
  ArtifactStore store(fresh_dir("strategy_stub"));
  const LlmConfig c;
  const auto bundle = make_bundle(make_spec(EnvConfig{}));
  StubTransport t({"Both agents go to the nearest food together."});
  EXPECT_EQ(generate_strategy(bundle, c, t, store, EnvId::kLbf), "Both agents go to the nearest food together.");
  const auto hash = prompt_hash(strategy_prompt(bundle), c.model_id);
  EXPECT_EQ(store.get_strategy(EnvId::kLbf, hash), "Both agents go to the nearest food together.");
  EXPECT_EQ(generate_strategy(bundle, c, t, store, EnvId::kLbf), "Both agents go to the nearest food together.");
  EXPECT_EQ(t.requests().size(), 1u);
}

TEST(Generation, ValidPlannerIsStoredAndCached) {
  const auto dir = fresh_dir("gen_valid");
  ArtifactStore store(dir / "artifacts");
  const LlmConfig c;
  const EnvConfig env;
  const auto bundle = make_bundle(make_spec(env));
  StubTransport t({reference_program()});
  const auto r = generate_planning_function(bundle, c, env, t, store, fast_options(dir));
  EXPECT_FALSE(r.cache_hit);
  EXPECT_EQ(r.attempts, 1);
  EXPECT_TRUE(r.report.passed());
  EXPECT_EQ(r.artifact.kind, plan::ArtifactKind::kExternal);
  EXPECT_EQ(r.artifact.prompt_hash, prompt_hash(planning_prompt(bundle), c.model_id));
  EXPECT_EQ(r.artifact.model_id, c.model_id);
  EXPECT_EQ(r.artifact.created_at, "2024-06-20T00:00:00Z");
  EXPECT_EQ(store.get(EnvId::kLbf, r.artifact.prompt_hash), r.artifact);
  EXPECT_TRUE(fs::exists(dir / "artifacts" / "lbf" / r.artifact.prompt_hash / "planner_source.txt"));

  const auto again = generate_planning_function(bundle, c, env, t, store, fast_options(dir));
  EXPECT_TRUE(again.cache_hit);
  EXPECT_EQ(again.attempts, 0);
  EXPECT_EQ(again.artifact, r.artifact);
  EXPECT_EQ(t.requests().size(), 1u);

  LlmConfig offline = c;
  offline.offline = true;
  RefusingTransport refuse;
  EXPECT_TRUE(generate_planning_function(bundle, offline, env, refuse, store, fast_options(dir)).cache_hit);
  EXPECT_EQ(refuse.attempts(), 0);
}

TEST(Generation, InvalidLabelsExhaustRetries) {
  const auto dir = fresh_dir("gen_invalid");
  ArtifactStore store(dir / "artifacts");
  LlmConfig c;
  c.max_retries = 3;
  const EnvConfig env;
  StubTransport t(std::vector<std::string>(10, invalid_label_program()));
  EXPECT_THROW(generate_planning_function(make_bundle(make_spec(env)), c, env, t, store, fast_options(dir)),
               GenerationError);
  EXPECT_EQ(t.requests().size(), 4u);
  EXPECT_TRUE(store.list(EnvId::kLbf).empty());
  EXPECT_NE(t.requests()[1].prompt.find("failed validation"), std::string::npos);
  EXPECT_EQ(t.requests()[1].prompt.find(t.requests()[0].prompt), 0u);
}

TEST(Generation, RecoversOnRetry) {
  const auto dir = fresh_dir("gen_retry");
  ArtifactStore store(dir / "artifacts");
  const LlmConfig c;
  const EnvConfig env;
  StubTransport t({"I cannot write code today.", reference_program()});
  const auto r = generate_planning_function(make_bundle(make_spec(env)), c, env, t, store, fast_options(dir));
  EXPECT_EQ(r.attempts, 2);
  EXPECT_TRUE(r.report.passed());
}

TEST(Generation, OfflineWithoutCacheRefuses) {
  const auto dir = fresh_dir("gen_offline");
  ArtifactStore store(dir / "artifacts");
  LlmConfig c;
  c.offline = true;
  RefusingTransport t;
  EXPECT_THROW(generate_planning_function(make_bundle(make_spec(EnvConfig{})), c, EnvConfig{}, t, store,
                                          fast_options(dir)),
               OfflineError);
  EXPECT_EQ(t.attempts(), 0);
}

TEST(Pipeline, OneCallPerStage) {
  const auto dir = fresh_dir("pipeline");
  ArtifactStore store(dir / "artifacts");
  const LlmConfig c;
  StubTransport stub({"Strategy: approach the closest food together, then load.", reference_program()});
  CountingTransport counted(stub);
  PipelineOptions o;
  o.generation = fast_options(dir);
  const auto r = run_pipeline(EnvConfig{}, c, counted, store, o);
  EXPECT_EQ(r.strategy_calls, 1);
  EXPECT_EQ(r.generation.attempts, 1);
  EXPECT_EQ(counted.successes(), 2);
  EXPECT_EQ(r.generation.artifact.strategy_text, r.strategy);
  EXPECT_NE(stub.requests()[1].prompt.find("approach the closest food together"), std::string::npos);

  const auto again = run_pipeline(EnvConfig{}, c, counted, store, o);
  EXPECT_EQ(again.strategy_calls, 0);
  EXPECT_TRUE(again.generation.cache_hit);
  EXPECT_EQ(counted.attempts(), 2);
}

TEST(Pipeline, SkipStrategyLeavesStrategyEmpty) {
  const auto dir = fresh_dir("pipeline_skip");
  ArtifactStore store(dir / "artifacts");
  const LlmConfig c;
  StubTransport stub({reference_program()});
  PipelineOptions o;
  o.skip_strategy = true;
  o.generation = fast_options(dir);
  const auto r = run_pipeline(EnvConfig{}, c, stub, store, o);
  EXPECT_FALSE(r.strategy.has_value());
  EXPECT_EQ(r.strategy_calls, 0);
  EXPECT_EQ(r.generation.artifact.strategy_text.value_or(""), "");
  EXPECT_EQ(stub.requests().size(), 1u);
  EXPECT_EQ(stub.requests()[0].prompt.find("Strategy:"), std::string::npos);
}

TEST(Store, RoundTripListLatestFind) {
  ArtifactStore store(fresh_dir("store"));
  EXPECT_TRUE(store.list(EnvId::kLbf).empty());
  EXPECT_FALSE(store.latest(EnvId::kLbf).has_value());
  plan::PlanningArtifact a;
  a.kind = plan::ArtifactKind::kExternal;
  a.source_text = "print()";
  a.prompt_hash = sha256_hex("one");
  a.model_id = "m";
  a.created_at = "2024-01-01T00:00:00Z";
  a.launch = {"python3", "{source}"};
  a.strategy_text = "s";
  auto b = a;
  b.prompt_hash = sha256_hex("two");
  b.created_at = "2024-02-01T00:00:00Z";
  EXPECT_EQ(store.put(a), a.prompt_hash);
  store.put(b);
  EXPECT_EQ(store.get(EnvId::kLbf, a.prompt_hash), a);
  EXPECT_EQ(store.list(EnvId::kLbf).size(), 2u);
  EXPECT_EQ(store.latest(EnvId::kLbf), b);
  EXPECT_EQ(store.find(b.prompt_hash), b);
  EXPECT_FALSE(store.find(sha256_hex("three")).has_value());
  EXPECT_FALSE(store.get(EnvId::kMpeSpread, a.prompt_hash).has_value());
  EXPECT_THROW(store.put(plan::PlanningArtifact::reference(EnvId::kLbf)), ContractViolation);
}

TEST(Store, TamperedFileRaisesIntegrityError) {
  const auto root = fresh_dir("store_tamper");
  ArtifactStore store(root);
  plan::PlanningArtifact a;
  a.kind = plan::ArtifactKind::kExternal;
  a.source_text = "print('planner')";
  a.prompt_hash = sha256_hex("x");
  a.model_id = "m";
  a.launch = {"python3", "{source}"};
  store.put(a);
  const auto file = root / "lbf" / (a.prompt_hash + ".json");
  std::string bytes;
  {
    std::ifstream in(file, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  const auto pos = bytes.find("planner");
  ASSERT_NE(pos, std::string::npos);
  bytes[pos] ^= 0x01;
  {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out << bytes;
  }
  try {
    store.get(EnvId::kLbf, a.prompt_hash);
    FAIL();
  } catch (const IntegrityError& e) {
    EXPECT_NE(std::string(e.what()).find(file.filename().string()), std::string::npos);
  }
}
