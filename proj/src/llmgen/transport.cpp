#include "yolo/llmgen/transport.hpp"

#include <cstdlib>
#include <regex>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "yolo/common/error.hpp"

namespace yolo::llmgen {

using nlohmann::json;

void LlmConfig::validate() const {
  if (endpoint.empty()) throw ConfigError("llm.endpoint: must not be empty");
  if (model_id.empty()) throw ConfigError("llm.model_id: must not be empty");
  if (api_key_env.empty()) throw ConfigError("llm.api_key_env: must name an environment variable");
  if (!(temperature >= 0.0 && temperature <= 2.0)) throw ConfigError("llm.temperature: must be in [0, 2]");
  if (max_tokens < 1) throw ConfigError("llm.max_tokens: must be >= 1");
  if (max_retries < 0) throw ConfigError("llm.max_retries: must be >= 0");
}

std::string request_body(const ChatRequest& r) {
  json body = {{"model", r.model_id},
               {"max_tokens", r.max_tokens},
               {"temperature", r.temperature},
               {"messages", json::array({{{"role", "user"}, {"content", r.prompt}}})}};
  return body.dump();
}

std::string parse_reply(std::string_view body) {
  const json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw NetworkError("reply is not JSON");
  if (j.contains("content") && j["content"].is_array()) {
    std::string text;
    for (const auto& part : j["content"]) {
      if (part.value("type", "text") == "text" && part.contains("text")) text += part["text"].get<std::string>();
    }
    return text;
  }
  if (j.contains("choices") && j["choices"].is_array() && !j["choices"].empty()) {
    const auto& msg = j["choices"][0];
    if (msg.contains("message") && msg["message"].contains("content")) {
      return msg["message"]["content"].get<std::string>();
    }
  }
  throw NetworkError("reply has neither content nor choices");
}

HttpTransport::HttpTransport(LlmConfig config) : config_(std::move(config)) { config_.validate(); }

std::string HttpTransport::complete(const ChatRequest& request) {
  if (config_.offline) throw OfflineError("offline mode: HTTP transport refused");
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') throw NetworkError("environment variable " + config_.api_key_env + " is not set");

  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, url)) throw NetworkError("malformed endpoint " + config_.endpoint);
  httplib::Client client(m[1].str());
  client.set_read_timeout(120, 0);
  client.set_connection_timeout(30, 0);
  const std::string path = m[2].matched ? m[2].str() : "/";
  const httplib::Headers headers = {{"x-api-key", key},
                                    {"authorization", std::string("Bearer ") + key},
                                    {"anthropic-version", "2023-06-01"}};
  auto res = client.Post(path, headers, request_body(request), "application/json");
  if (!res) throw NetworkError("request failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw NetworkError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500));
  }
  return parse_reply(res->body);
}

StubTransport::StubTransport(std::vector<std::string> replies) : replies_(replies.begin(), replies.end()) {}

std::string StubTransport::complete(const ChatRequest& request) {
  requests_.push_back(request);
  if (replies_.empty()) throw NetworkError("stub transport has no replies left");
  std::string reply = std::move(replies_.front());
  replies_.pop_front();
  return reply;
}

std::string RefusingTransport::complete(const ChatRequest&) {
  ++attempts_;
  throw NetworkError("network access refused");
}

std::string CountingTransport::complete(const ChatRequest& request) {
  ++attempts_;
  std::string reply = inner_.complete(request);
  ++successes_;
  return reply;
}

}  // namespace yolo::llmgen
