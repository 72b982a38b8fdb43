#include "yolo/plan/external.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <istream>
#include <ostream>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "yolo/common/error.hpp"
#include "yolo/plan/reference.hpp"

namespace yolo::plan {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr std::size_t kMaxLineBytes = 1 << 20;

}  // namespace

std::string handshake_message(const envs::EnvSpec& spec) {
  json j = {{"protocol", std::string(kProtocolVersion)},
            {"env", std::string(envs::to_string(spec.env_id))},
            {"n_agents", spec.n_agents},
            {"assignment_set", spec.assignment_set}};
  return j.dump();
}

std::string request_message(std::uint64_t seq, const interp::InterpretedState& state) {
  json j = {{"seq", seq}, {"state", interp::to_json(state)}};
  return j.dump();
}

AssignmentVector parse_response(std::string_view line, std::uint64_t expected_seq, const envs::EnvSpec& spec) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw PlannerProtocolError(std::string("response is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("seq") || !j["seq"].is_number_unsigned()) {
    throw PlannerProtocolError("response lacks an unsigned 'seq'");
  }
  if (j["seq"].get<std::uint64_t>() != expected_seq) {
    throw PlannerProtocolError("sequence mismatch: expected " + std::to_string(expected_seq) + ", got " +
                               j["seq"].dump());
  }
  if (!j.contains("assignments") || !j["assignments"].is_array()) {
    throw PlannerProtocolError("response lacks an 'assignments' array");
  }
  const auto& labels = j["assignments"];
  if (static_cast<int>(labels.size()) != spec.n_agents) {
    throw PlannerProtocolError("expected " + std::to_string(spec.n_agents) + " assignments, got " +
                               std::to_string(labels.size()));
  }
  AssignmentVector out;
  out.reserve(labels.size());
  for (const auto& label : labels) {
    if (!label.is_string()) throw PlannerProtocolError("assignment labels must be strings, got " + label.dump());
    auto parsed = parse_assignment(label.get<std::string>(), spec);
    if (!parsed) throw InvalidAssignmentLabel("invalid assignment label '" + label.get<std::string>() + "'");
    out.push_back(*parsed);
  }
  return out;
}

PlannerSession::PlannerSession(const std::vector<std::string>& argv, envs::EnvSpec spec,
                               std::chrono::milliseconds timeout)
    : spec_(std::move(spec)), timeout_(timeout) {
  if (argv.empty()) throw PlannerProtocolError("empty planner command");
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
    throw PlannerProtocolError(std::string("socketpair failed: ") + std::strerror(errno));
  }
  std::vector<char*> cargv;
  cargv.reserve(argv.size() + 1);
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  pid_ = ::fork();
  if (pid_ < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw PlannerProtocolError(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid_ == 0) {
    ::dup2(fds[1], STDIN_FILENO);
    ::dup2(fds[1], STDOUT_FILENO);
    ::execvp(cargv[0], cargv.data());
    ::_exit(127);
  }
  ::close(fds[1]);
  fd_ = fds[0];

  try {
    send_line(handshake_message(spec_));
    const std::string reply = read_line();
    json j;
    try {
      j = json::parse(reply);
    } catch (const json::exception&) {
      throw PlannerProtocolError("handshake reply is not valid JSON: " + reply);
    }
    if (!j.is_object() || j.value("ok", false) != true) {
      throw PlannerProtocolError("planner rejected the handshake: " + reply);
    }
  } catch (...) {
    shutdown();
    throw;
  }
}

PlannerSession::~PlannerSession() { shutdown(); }

void PlannerSession::shutdown() noexcept {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
  if (pid_ > 0) {
    int status = 0;
    bool reaped = false;
    for (int i = 0; i < 20 && !reaped; ++i) {
      reaped = ::waitpid(pid_, &status, WNOHANG) == pid_;
      if (!reaped) std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (!reaped) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
    pid_ = -1;
  }
  broken_ = true;
}

void PlannerSession::send_line(const std::string& line) {
  std::string data = line + "\n";
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      broken_ = true;
      throw PlannerProtocolError(std::string("planner channel closed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::string PlannerSession::read_line() {
  const auto deadline = Clock::now() + timeout_;
  for (;;) {
    const auto newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      std::string line = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (buffer_.size() > kMaxLineBytes) {
      broken_ = true;
      throw PlannerProtocolError("planner response line too long");
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (remaining.count() <= 0) {
      broken_ = true;
      throw PlannerTimeout("planner did not answer within " + std::to_string(timeout_.count()) + " ms");
    }
    pollfd p{fd_, POLLIN, 0};
    const int ready = ::poll(&p, 1, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      broken_ = true;
      throw PlannerProtocolError(std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) continue;
    char chunk[4096];
    const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      broken_ = true;
      throw PlannerProtocolError(std::string("read from planner failed: ") + std::strerror(errno));
    }
    if (n == 0) {
      broken_ = true;
      throw PlannerProtocolError("planner exited or closed its output");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

AssignmentVector PlannerSession::request(const interp::InterpretedState& state) {
  if (broken_) throw PlannerProtocolError("planner session is no longer usable");
  const std::uint64_t seq = seq_++;
  send_line(request_message(seq, state));
  const std::string line = read_line();
  try {
    return parse_response(line, seq, spec_);
  } catch (const InvalidAssignmentLabel&) {
    // The channel is still in sync; only this answer is unusable.
    throw;
  } catch (const PlannerProtocolError&) {
    broken_ = true;
    throw;
  }
}

int serve_reference_planner(std::istream& in, std::ostream& out) {
  std::string line;
  if (!std::getline(in, line)) return 1;
  envs::EnvSpec spec;
  try {
    const json hs = json::parse(line);
    if (hs.at("protocol").get<std::string>() != kProtocolVersion) {
      out << json{{"ok", false}, {"error", "unsupported protocol"}}.dump() << std::endl;
      return 2;
    }
    envs::EnvConfig config;
    config.id = envs::env_id_from_string(hs.at("env").get<std::string>());
    const int n_agents = hs.at("n_agents").get<int>();
    const auto labels = hs.at("assignment_set").get<std::vector<std::string>>();
    int n_targets = 0;
    for (const auto& l : labels) n_targets += (l.rfind("Food", 0) == 0 || l.rfind("Landmark", 0) == 0) ? 1 : 0;
    config.lbf.n_agents = n_agents;
    config.lbf.n_foods = n_targets;
    config.mpe.n_agents = n_agents;
    spec = envs::make_spec(config);
    if (spec.assignment_set != labels) {
      out << json{{"ok", false}, {"error", "assignment set mismatch"}}.dump() << std::endl;
      return 2;
    }
  } catch (const std::exception& e) {
    out << json{{"ok", false}, {"error", e.what()}}.dump() << std::endl;
    return 2;
  }
  out << json{{"ok", true}}.dump() << std::endl;

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const json req = json::parse(line);
      const auto state = interp::from_json(req.at("state"));
      const auto plan = plan_reference(state, spec);
      json labels = json::array();
      for (const auto& a : plan) labels.push_back(a.label());
      out << json{{"seq", req.at("seq")}, {"assignments", labels}}.dump() << std::endl;
    } catch (const std::exception& e) {
      out << json{{"error", e.what()}}.dump() << std::endl;
    }
  }
  return 0;
}

}  // namespace yolo::plan
