#ifndef YOLO_PLAN_EXTERNAL_HPP_
#define YOLO_PLAN_EXTERNAL_HPP_

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <sys/types.h>

#include "yolo/envs/environment.hpp"
#include "yolo/interp/interpret.hpp"
#include "yolo/plan/assignment.hpp"

namespace yolo::plan {

// Planner wire protocol v1: one JSON object per line over the child's
// stdin/stdout.
//
//   runner -> planner  {"protocol":"yolo-marl-plan/1","env":...,"n_agents":K,"assignment_set":[...]}
//   planner -> runner  {"ok":true}
//   runner -> planner  {"seq":n,"state":<canonical interpreted state>}
//   planner -> runner  {"seq":n,"assignments":["Food0","Load",...]}
inline constexpr std::string_view kProtocolVersion = "yolo-marl-plan/1";
inline constexpr std::chrono::milliseconds kDefaultPlannerTimeout{1000};

std::string handshake_message(const envs::EnvSpec& spec);
std::string request_message(std::uint64_t seq, const interp::InterpretedState& state);

// Validates a response line against the expected sequence number and the
// spec's assignment set. Throws PlannerProtocolError.
AssignmentVector parse_response(std::string_view line, std::uint64_t expected_seq, const envs::EnvSpec& spec);

// A running external planner process. One request in flight at a time.
// Launching performs the handshake; the destructor closes the channel and
// reaps the child.
class PlannerSession {
 public:
  PlannerSession(const std::vector<std::string>& argv, envs::EnvSpec spec,
                 std::chrono::milliseconds timeout = kDefaultPlannerTimeout);
  ~PlannerSession();

  PlannerSession(const PlannerSession&) = delete;
  PlannerSession& operator=(const PlannerSession&) = delete;

  // Throws PlannerTimeout when no full response line arrives in time and
  // PlannerProtocolError for anything malformed. Either leaves the session
  // unusable.
  AssignmentVector request(const interp::InterpretedState& state);

  bool usable() const { return !broken_; }

 private:
  void send_line(const std::string& line);
  std::string read_line();
  void shutdown() noexcept;

  envs::EnvSpec spec_;
  std::chrono::milliseconds timeout_;
  pid_t pid_ = -1;
  int fd_ = -1;
  std::string buffer_;
  std::uint64_t seq_ = 0;
  bool broken_ = false;
};

// Serves the reference planner over the protocol until EOF. Returns a
// process exit code.
int serve_reference_planner(std::istream& in, std::ostream& out);

}  // namespace yolo::plan

#endif  // YOLO_PLAN_EXTERNAL_HPP_
