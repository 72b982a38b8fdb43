#ifndef YOLO_LLMGEN_TRANSPORT_HPP_
#define YOLO_LLMGEN_TRANSPORT_HPP_

#include <deque>
#include <memory>
#include <string>
#include <vector>

namespace yolo::llmgen {

struct LlmConfig {
  std::string endpoint = "https://api.anthropic.com/v1/messages";
  std::string model_id = "claude-3-5-sonnet-20240620";
  // Name of the environment variable holding the key, never the key itself.
  std::string api_key_env = "ANTHROPIC_API_KEY";
  double temperature = 0.0;
  int max_tokens = 4096;
  int max_retries = 3;
  bool offline = false;

  void validate() const;  // throws ConfigError
};

struct ChatRequest {
  std::string model_id;
  std::string prompt;
  double temperature = 0.0;
  int max_tokens = 4096;
};

// One chat completion per call. Throws NetworkError on failure.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

// Vendor-agnostic JSON over HTTPS. The body carries model, max_tokens,
// temperature and a single user message; the reply text is read from
// content[0].text or choices[0].message.content.
class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(LlmConfig config);
  std::string complete(const ChatRequest& request) override;

 private:
  LlmConfig config_;
};

std::string request_body(const ChatRequest& request);
// Throws NetworkError if neither reply shape is present.
std::string parse_reply(std::string_view body);

// Replays canned replies in order; throws NetworkError once exhausted.
class StubTransport final : public Transport {
 public:
  explicit StubTransport(std::vector<std::string> replies);
  std::string complete(const ChatRequest& request) override;

  const std::vector<ChatRequest>& requests() const { return requests_; }

 private:
  std::deque<std::string> replies_;
  std::vector<ChatRequest> requests_;
};

// Every call is an error; counts how often it was attempted.
class RefusingTransport final : public Transport {
 public:
  std::string complete(const ChatRequest& request) override;
  int attempts() const { return attempts_; }

 private:
  int attempts_ = 0;
};

// Wraps another transport and counts attempted and successful calls.
class CountingTransport final : public Transport {
 public:
  explicit CountingTransport(Transport& inner) : inner_(inner) {}
  std::string complete(const ChatRequest& request) override;
  int attempts() const { return attempts_; }
  int successes() const { return successes_; }

 private:
  Transport& inner_;
  int attempts_ = 0;
  int successes_ = 0;
};

}  // namespace yolo::llmgen

#endif  // YOLO_LLMGEN_TRANSPORT_HPP_
