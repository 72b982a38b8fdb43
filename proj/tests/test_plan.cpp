#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "yolo/common/error.hpp"
#include "yolo/envs/environment.hpp"
#include "yolo/interp/interpret.hpp"
#include "yolo/plan/artifact.hpp"
#include "yolo/plan/external.hpp"
#include "yolo/plan/planner.hpp"
#include "yolo/plan/reference.hpp"
#include "yolo/plan/validate.hpp"

using namespace yolo;
using namespace yolo::envs;
using namespace yolo::plan;
using interp::interpret;

namespace {

EnvConfig mpe_config(int n = 3) {
  EnvConfig c;
  c.id = EnvId::kMpeSpread;
  c.mpe.n_agents = n;
  return c;
}

std::filesystem::path work_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("yolo_test_plan_" + name);
  std::filesystem::create_directories(dir);
  return dir;
}

PlanningArtifact process_artifact(EnvId env, std::vector<std::string> argv) {
  PlanningArtifact a;
  a.kind = ArtifactKind::kExternal;
  a.env_id = env;
  a.source_text = "fixture";
  a.prompt_hash = "fixture";
  a.model_id = "fixture";
  a.created_at = "2024-01-01T00:00:00Z";
  a.launch = std::move(argv);
  return a;
}

std::string fixture(const std::string& name) { return std::string(YOLO_FIXTURES_DIR) + "/" + name; }

PlanningArtifact python_fixture(EnvId env, const std::string& name, std::vector<std::string> extra = {}) {
  std::vector<std::string> argv{"python3", fixture(name)};
  argv.insert(argv.end(), extra.begin(), extra.end());
  return process_artifact(env, argv);
}

PlanningArtifact served_reference(EnvId env) { return process_artifact(env, {YOLO_CLI_PATH, "serve-planner"}); }

std::set<int> as_set(const ActionSet& s) {
  const auto v = s.to_vector();
  return {v.begin(), v.end()};
}

// Shortest free-path distance from every cell to the free cells beside food j,
// by repeated relaxation.
std::vector<int> oracle_distances(const GlobalState& g, int n_agents, int self, int j, int grid) {
  const int big = 1 << 20;
  const int n_foods = (static_cast<int>(g.values.size()) - 3 * n_agents) / 3;
  std::vector<bool> blocked(grid * grid, false);
  for (int i = 0; i < n_agents; ++i) {
    if (i != self) blocked[int(g.values[3 * i]) * grid + int(g.values[3 * i + 1])] = true;
  }
  for (int f = 0; f < n_foods; ++f) {
    const int b = 3 * n_agents + 3 * f;
    if (g.values[b + 2] > 0) blocked[int(g.values[b]) * grid + int(g.values[b + 1])] = true;
  }
  const int fr = int(g.values[3 * n_agents + 3 * j]), fc = int(g.values[3 * n_agents + 3 * j + 1]);
  std::vector<int> d(grid * grid, big);
  for (int r = 0; r < grid; ++r) {
    for (int c = 0; c < grid; ++c) {
      if (!blocked[r * grid + c] && std::abs(r - fr) + std::abs(c - fc) == 1) d[r * grid + c] = 0;
    }
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (int r = 0; r < grid; ++r) {
      for (int c = 0; c < grid; ++c) {
        if (blocked[r * grid + c]) continue;
        for (auto [dr, dc] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
          const int nr = r + dr, nc = c + dc;
          if (nr < 0 || nr >= grid || nc < 0 || nc >= grid || blocked[nr * grid + nc]) continue;
          if (d[nr * grid + nc] + 1 < d[r * grid + c]) {
            d[r * grid + c] = d[nr * grid + nc] + 1;
            changed = true;
          }
        }
      }
    }
  }
  for (int k = 0; k < grid * grid; ++k) {
    if (blocked[k]) d[k] = -1;
  }
  return d;
}

}  // namespace

TEST(Assignment, LabelsRoundTrip) {
  for (const auto& c : {EnvConfig{}, mpe_config(4)}) {
    const auto spec = make_spec(c);
    for (const auto& label : spec.assignment_set) {
      const auto a = parse_assignment(label, spec);
      ASSERT_TRUE(a.has_value()) << label;
      EXPECT_EQ(a->label(), label);
    }
  }
  EXPECT_FALSE(parse_assignment("Food7", make_spec(EnvConfig{})).has_value());
  EXPECT_FALSE(parse_assignment("Landmark0", make_spec(EnvConfig{})).has_value());
  EXPECT_FALSE(parse_assignment("Load", make_spec(mpe_config())).has_value());
}

TEST(Reference, LbfBothAdjacentLoad) {
  const auto spec = make_spec(EnvConfig{});
  const auto s = interpret(GlobalState{{2, 2, 1, 3, 3, 1, 2, 3, 2, 6, 6, 2}}, spec);
  EXPECT_EQ(plan_reference(s, spec), (AssignmentVector{Assignment::load(), Assignment::load()}));
}

TEST(Reference, LbfAllCollectedNone) {
  const auto spec = make_spec(EnvConfig{});
  const auto s = interpret(GlobalState{{2, 2, 1, 3, 3, 1, 2, 3, 0, 6, 6, 0}}, spec);
  EXPECT_EQ(plan_reference(s, spec), (AssignmentVector{Assignment::none(), Assignment::none()}));
}

TEST(Reference, LbfSharedNearestFood) {
  const auto spec = make_spec(EnvConfig{});
  // summed distances: food0 (1,1) -> 2+12 = 14, food1 (5,5) -> 6+4 = 10
  const auto s = interpret(GlobalState{{1, 3, 1, 7, 7, 1, 1, 1, 2, 5, 5, 2}}, spec);
  EXPECT_EQ(plan_reference(s, spec), (AssignmentVector{Assignment::food(1), Assignment::food(1)}));
  // a single adjacent agent is not enough to Load
  const auto t = interpret(GlobalState{{2, 3, 1, 7, 7, 1, 3, 3, 2, 6, 1, 2}}, spec);
  EXPECT_EQ(plan_reference(t, spec), (AssignmentVector{Assignment::food(0), Assignment::food(0)}));
}

TEST(Reference, MpeIdentityMatching) {
  const auto spec = make_spec(mpe_config());
  const auto s = interpret(
      GlobalState{{-0.6, -0.5, 0, 0, 0.4, -0.4, 0, 0, 0.1, 0.6, 0, 0, -0.5, -0.5, 0.5, -0.5, 0.0, 0.5}}, spec);
  EXPECT_EQ(plan_reference(s, spec),
            (AssignmentVector{Assignment::landmark(0), Assignment::landmark(1), Assignment::landmark(2)}));
}

TEST(Reference, MpeGreedyTakesGlobalClosestFirst) {
  const auto spec = make_spec(mpe_config());
  // agent 1 sits on landmark 0; agent 0 is next closest to landmark 0 but must settle for landmark 2
  const auto s = interpret(
      GlobalState{{0.1, 0.0, 0, 0, 0.0, 0.0, 0, 0, 0.9, -0.9, 0, 0, 0.0, 0.0, 0.9, -0.8, 0.0, 0.5}}, spec);
  EXPECT_EQ(plan_reference(s, spec),
            (AssignmentVector{Assignment::landmark(2), Assignment::landmark(0), Assignment::landmark(1)}));
}

TEST(Admissible, LbfDiagonalTarget) {
  const auto spec = make_spec(EnvConfig{});
  const auto s = interpret(GlobalState{{2, 2, 1, 7, 0, 1, 0, 4, 2, 6, 6, 2}}, spec);
  EXPECT_EQ(as_set(admissible_actions(s, 0, Assignment::food(0), spec)), (std::set<int>{kNorth, kEast}));
}

TEST(Admissible, LbfAdjacentLoadOrWait) {
  const auto spec = make_spec(EnvConfig{});
  const auto s = interpret(GlobalState{{2, 2, 1, 7, 0, 1, 2, 3, 2, 6, 6, 2}}, spec);
  EXPECT_EQ(as_set(admissible_actions(s, 0, Assignment::food(0), spec)), (std::set<int>{kLoad, kNone}));
  EXPECT_EQ(as_set(admissible_actions(s, 0, Assignment::load(), spec)), (std::set<int>{kLoad}));
  EXPECT_EQ(as_set(admissible_actions(s, 0, Assignment::none(), spec)), (std::set<int>{kNone}));
}

TEST(Admissible, LbfInactiveFoodDegeneratesToNone) {
  const auto spec = make_spec(EnvConfig{});
  const auto s = interpret(GlobalState{{2, 2, 1, 7, 0, 1, 0, 4, 0, 6, 6, 2}}, spec);
  EXPECT_EQ(as_set(admissible_actions(s, 0, Assignment::food(0), spec)), (std::set<int>{kNone}));
}

TEST(Admissible, LbfRoutesAroundBlockingPartner) {
  const auto spec = make_spec(EnvConfig{});
  // agent 0 at (2,1), partner at (2,2), food at (2,4): EAST is blocked, the
  // free approach cells are (2,3), (1,4), (3,4), all 4 away via NORTH or SOUTH
  const auto s = interpret(GlobalState{{2, 1, 1, 2, 2, 1, 2, 4, 2, 6, 6, 2}}, spec);
  EXPECT_EQ(as_set(admissible_actions(s, 0, Assignment::food(0), spec)), (std::set<int>{kNorth, kSouth}));
}

TEST(Admissible, MpeAxisRule) {
  const auto spec = make_spec(mpe_config());
  const auto s = interpret(
      GlobalState{{0, 0, 0, 0, 0.9, 0.9, 0, 0, -0.9, -0.9, 0, 0, 0.5, 0.5, 0.03, -0.4, 0.02, -0.01}}, spec);
  EXPECT_EQ(as_set(admissible_actions(s, 0, Assignment::landmark(0), spec)), (std::set<int>{kMoveRight, kMoveUp}));
  EXPECT_EQ(as_set(admissible_actions(s, 0, Assignment::landmark(1), spec)), (std::set<int>{kMoveDown}));
  EXPECT_EQ(as_set(admissible_actions(s, 0, Assignment::landmark(2), spec)), (std::set<int>{kNoAction}));
  EXPECT_EQ(as_set(admissible_actions(s, 0, Assignment::no_action(), spec)), (std::set<int>{kNoAction}));
}

TEST(Admissible, ManyToManyWitnesses) {
  const auto spec = make_spec(EnvConfig{});
  // foods (0,4) and (1,6) both lie north-east of agent 0
  const auto s = interpret(GlobalState{{3, 2, 1, 7, 0, 1, 0, 4, 2, 1, 6, 2}}, spec);
  const auto to0 = admissible_actions(s, 0, Assignment::food(0), spec);
  const auto to1 = admissible_actions(s, 0, Assignment::food(1), spec);
  EXPECT_GE(to0.size(), 2);
  EXPECT_TRUE(to0.contains(kEast) && to1.contains(kEast));
}

// Checks admissible moves against an independently computed free-path
// distance, and against the plain Manhattan rule where nothing is in the way.
TEST(Admissible, LbfMovesFollowShortestFreePath) {
  const EnvConfig c;
  const auto spec = make_spec(c);
  const int grid = c.lbf.grid_size;
  int violations = 0, unobstructed = 0, detours = 0;
  for (const auto& g : sample_states(c, 10000, 8)) {
    const auto s = interpret(g, spec);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        if (!s.targets[j].active) continue;
        const auto got = admissible_actions(s, i, Assignment::food(j), spec);
        const auto& rel = s.relative[i][j];
        if (rel.adjacent) {
          violations += as_set(got) != std::set<int>{kLoad, kNone};
          continue;
        }
        const auto d = oracle_distances(g, 2, i, j, grid);
        const int r = int(g.values[3 * i]), col = int(g.values[3 * i + 1]);
        std::set<int> expected;
        const std::pair<int, std::pair<int, int>> moves[] = {
            {kNorth, {-1, 0}}, {kSouth, {1, 0}}, {kWest, {0, -1}}, {kEast, {0, 1}}};
        const int here = d[r * grid + col];
        for (const auto& [action, delta] : moves) {
          const int nr = r + delta.first, nc = col + delta.second;
          if (nr < 0 || nr >= grid || nc < 0 || nc >= grid) continue;
          const int there = d[nr * grid + nc];
          if (there >= 0 && there == here - 1) expected.insert(action);
        }
        std::set<int> manhattan;
        if (rel.offset[0] < 0) manhattan.insert(kNorth);
        if (rel.offset[0] > 0) manhattan.insert(kSouth);
        if (rel.offset[1] < 0) manhattan.insert(kWest);
        if (rel.offset[1] > 0) manhattan.insert(kEast);
        if (expected.empty()) expected = manhattan;
        violations += as_set(got) != expected;
        violations += got.empty();

        bool clear = true;
        const int fr = int(s.targets[j].position[0]), fc = int(s.targets[j].position[1]);
        for (int rr = std::min(r, fr); rr <= std::max(r, fr); ++rr) {
          for (int cc = std::min(col, fc); cc <= std::max(col, fc); ++cc) {
            if (rr == r && cc == col) continue;
            if (rr == fr && cc == fc) continue;
            for (int k = 0; k < 2; ++k) {
              if (k != i && int(g.values[3 * k]) == rr && int(g.values[3 * k + 1]) == cc) clear = false;
            }
            for (int f = 0; f < 2; ++f) {
              const int b = 6 + 3 * f;
              if (g.values[b + 2] > 0 && int(g.values[b]) == rr && int(g.values[b + 1]) == cc) clear = false;
            }
          }
        }
        if (clear) {
          ++unobstructed;
          violations += as_set(got) != manhattan;
        } else if (as_set(got) != manhattan) {
          ++detours;
        }
      }
    }
  }
  EXPECT_EQ(violations, 0);
  EXPECT_GT(unobstructed, 1000);
  EXPECT_GT(detours, 0);
}

TEST(Reference, TotalityFuzz) {
  for (const auto& c : {EnvConfig{}, mpe_config(), mpe_config(4)}) {
    const auto spec = make_spec(c);
    int violations = 0;
    for (const auto& g : sample_states(c, 10000, 21)) {
      const auto s = interpret(g, spec);
      const auto plan = plan_reference(s, spec);
      violations += static_cast<int>(plan.size()) != spec.n_agents;
      for (int i = 0; i < spec.n_agents; ++i) {
        violations += !is_valid(plan[i], spec);
        for (const auto& label : spec.assignment_set) {
          const auto acts = admissible_actions(s, i, *parse_assignment(label, spec), spec);
          violations += acts.empty();
          for (int a : acts.to_vector()) violations += a < 0 || a >= spec.n_actions();
        }
      }
      if (c.id == EnvId::kMpeSpread) {
        std::set<int> used;
        for (const auto& a : plan) used.insert(a.target);
        violations += static_cast<int>(used.size()) != spec.n_agents || used.count(-1);
      }
    }
    EXPECT_EQ(violations, 0);
  }
}

TEST(Protocol, ParseResponse) {
  const auto spec = make_spec(EnvConfig{});
  EXPECT_EQ(parse_response(R"({"seq":4,"assignments":["Food1","Load"]})", 4, spec),
            (AssignmentVector{Assignment::food(1), Assignment::load()}));
  EXPECT_THROW(parse_response(R"({"seq":4,"assignments":["Food7","Load"]})", 4, spec), InvalidAssignmentLabel);
  EXPECT_THROW(parse_response(R"({"seq":5,"assignments":["None","None"]})", 4, spec), PlannerProtocolError);
  EXPECT_THROW(parse_response(R"({"seq":4,"assignments":["None"]})", 4, spec), PlannerProtocolError);
  EXPECT_THROW(parse_response("nope", 4, spec), PlannerProtocolError);
}

TEST(Protocol, HandshakeMessage) {
  const auto j = nlohmann::json::parse(handshake_message(make_spec(EnvConfig{})));
  EXPECT_EQ(j["protocol"], "yolo-marl-plan/1");
  EXPECT_EQ(j["env"], "lbf");
  EXPECT_EQ(j["n_agents"], 2);
  EXPECT_EQ(j["assignment_set"], (nlohmann::json{"None", "Food0", "Food1", "Load"}));
}

TEST(Protocol, FixedStubPlanner) {
  const auto spec = make_spec(EnvConfig{});
  PlannerSession session({"python3", fixture("first_label_planner.py")}, spec);
  const auto s = interpret(make_environment(EnvConfig{})->reset(0), spec);
  EXPECT_EQ(run_external_planner(session, s), (AssignmentVector{Assignment::none(), Assignment::none()}));
  EXPECT_EQ(run_external_planner(session, s), (AssignmentVector{Assignment::none(), Assignment::none()}));
}

TEST(Protocol, BadLabelKeepsSessionAlive) {
  const auto spec = make_spec(EnvConfig{});
  PlannerSession session({"python3", fixture("bad_label_planner.py"), "2"}, spec);
  const auto s = interpret(make_environment(EnvConfig{})->reset(0), spec);
  EXPECT_THROW(session.request(s), InvalidAssignmentLabel);
  EXPECT_TRUE(session.usable());
  EXPECT_EQ(session.request(s).size(), 2u);
}

TEST(Protocol, BadSequenceIsProtocolError) {
  const auto spec = make_spec(EnvConfig{});
  PlannerSession session({"python3", fixture("bad_seq_planner.py")}, spec);
  const auto s = interpret(make_environment(EnvConfig{})->reset(0), spec);
  try {
    session.request(s);
    FAIL();
  } catch (const InvalidAssignmentLabel&) {
    FAIL();
  } catch (const PlannerTimeout&) {
    FAIL();
  } catch (const PlannerProtocolError&) {
  }
  EXPECT_FALSE(session.usable());
}

TEST(Protocol, GarbageIsProtocolError) {
  const auto spec = make_spec(EnvConfig{});
  PlannerSession session({"python3", fixture("garbage_planner.py")}, spec);
  const auto s = interpret(make_environment(EnvConfig{})->reset(0), spec);
  EXPECT_THROW(session.request(s), PlannerProtocolError);
}

TEST(Protocol, SlowPlannerTimesOut) {
  const auto spec = make_spec(EnvConfig{});
  PlannerSession session({"python3", fixture("slow_planner.py")}, spec, std::chrono::milliseconds(300));
  const auto s = interpret(make_environment(EnvConfig{})->reset(0), spec);
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_THROW(session.request(s), PlannerTimeout);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::seconds(3));
}

TEST(Protocol, MissingProgramFailsToStart) {
  EXPECT_THROW(PlannerSession({"/nonexistent/planner"}, make_spec(EnvConfig{})), PlannerProtocolError);
}

TEST(Protocol, ServedReferenceRoundTrip) {
  std::istringstream in(handshake_message(make_spec(EnvConfig{})) + "\n" +
                        request_message(0, interpret(GlobalState{{2, 2, 1, 3, 3, 1, 2, 3, 2, 6, 6, 2}},
                                                     make_spec(EnvConfig{}))) +
                        "\n");
  std::ostringstream out;
  EXPECT_EQ(serve_reference_planner(in, out), 0);
  std::istringstream lines(out.str());
  std::string hs, resp;
  std::getline(lines, hs);
  std::getline(lines, resp);
  EXPECT_EQ(nlohmann::json::parse(hs)["ok"], true);
  EXPECT_EQ(parse_response(resp, 0, make_spec(EnvConfig{})),
            (AssignmentVector{Assignment::load(), Assignment::load()}));
}

TEST(Protocol, SubprocessReferenceMatchesInProcess) {
  for (const auto& c : {EnvConfig{}, mpe_config()}) {
    const auto spec = make_spec(c);
    auto external = make_planner(served_reference(c.id), spec, work_dir("equiv"));
    int mismatches = 0;
    for (const auto& g : sample_states(c, 1000, 99)) {
      const auto s = interpret(g, spec);
      mismatches += external->plan(s) != plan_reference(s, spec);
    }
    EXPECT_EQ(mismatches, 0);
  }
}

TEST(Artifact, JsonRoundTripAndProvenanceRules) {
  const auto ref = PlanningArtifact::reference(EnvId::kMpeSpread);
  EXPECT_NO_THROW(ref.check());
  EXPECT_EQ(artifact_from_json(to_json(ref)), ref);
  auto ext = python_fixture(EnvId::kLbf, "first_label_planner.py");
  ext.strategy_text = "go";
  EXPECT_NO_THROW(ext.check());
  EXPECT_EQ(artifact_from_json(to_json(ext)), ext);
  ext.model_id.reset();
  EXPECT_THROW(ext.check(), ContractViolation);
  auto bad_ref = ref;
  bad_ref.prompt_hash = "abc";
  EXPECT_THROW(bad_ref.check(), ContractViolation);
}

TEST(Artifact, MaterializeSubstitutesSource) {
  auto a = process_artifact(EnvId::kLbf, {"python3", "{source}"});
  a.source_text = "print('hi')\n";
  const auto dir = work_dir("materialize");
  const auto argv = materialize_launch(a, dir);
  ASSERT_EQ(argv.size(), 2u);
  EXPECT_EQ(argv[1], (dir / "planner_source.txt").string());
  std::ifstream in(argv[1]);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(text, a.source_text);
}

TEST(Validate, ReferencePasses) {
  for (const auto& c : {EnvConfig{}, mpe_config()}) {
    const auto report = validate_artifact(PlanningArtifact::reference(c.id), c, 100, 1);
    EXPECT_TRUE(report.passed());
    EXPECT_EQ(report.failures(), 0);
    EXPECT_EQ(report.checked, 100);
  }
}

TEST(Validate, BadLabelsCountedExactly) {
  const EnvConfig c;
  ValidationOptions opts;
  opts.work_dir = work_dir("validate");
  const auto all = validate_artifact(python_fixture(c.id, "bad_label_planner.py"), c, 100, 1, opts);
  EXPECT_FALSE(all.passed());
  EXPECT_EQ(all.invalid_labels, 100);
  EXPECT_EQ(all.failures(), 100);
  // seq 0..99, every third one bad
  const auto some = validate_artifact(python_fixture(c.id, "bad_label_planner.py", {"3"}), c, 100, 1, opts);
  EXPECT_EQ(some.invalid_labels, 34);
  EXPECT_EQ(some.checked, 66);
  EXPECT_EQ(some.failures(), 34);
}

TEST(Validate, SlowPlannerReportsTimeouts) {
  const EnvConfig c;
  ValidationOptions opts;
  opts.work_dir = work_dir("validate_slow");
  opts.timeout = std::chrono::milliseconds(200);
  const auto r = validate_artifact(python_fixture(c.id, "slow_planner.py"), c, 10, 1, opts);
  EXPECT_FALSE(r.passed());
  EXPECT_GE(r.timeouts, 1);
  EXPECT_EQ(r.timeouts, opts.max_restarts + 1);
  EXPECT_EQ(r.skipped, 10 - r.timeouts);
  EXPECT_FALSE(r.summary().empty());
}

TEST(Validate, CrashingPlannerIsCapturedNotThrown) {
  const EnvConfig c;
  ValidationOptions opts;
  opts.work_dir = work_dir("validate_crash");
  const auto r = validate_artifact(process_artifact(c.id, {"/nonexistent/planner"}), c, 5, 1, opts);
  EXPECT_FALSE(r.passed());
  EXPECT_GE(r.exceptions + r.protocol_errors, 1);
  EXPECT_EQ(r.checked, 0);
}

TEST(Validate, SampleStatesAreDeterministic) {
  EXPECT_EQ(sample_states(EnvConfig{}, 50, 4), sample_states(EnvConfig{}, 50, 4));
  EXPECT_NE(sample_states(EnvConfig{}, 50, 4), sample_states(EnvConfig{}, 50, 5));
}
