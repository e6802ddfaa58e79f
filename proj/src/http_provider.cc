#include <chrono>
#include <cstdlib>
#include <regex>
#include <thread>

#include "httplib.h"
#include "mwp/correct.h"

namespace mwp {
namespace {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Url split_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ProviderError("invalid endpoint URL: " + url);
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

}  // namespace

HttpProvider::HttpProvider(ProviderConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw ProviderError("http provider: endpoint is required");
  if (config_.model.empty()) throw ProviderError("http provider: model is required");
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (config_.endpoint.rfind("https://", 0) == 0)
    throw ProviderError("http provider: built without TLS support, https endpoints are unavailable");
#endif
  split_url(config_.endpoint);
}

std::string HttpProvider::correct(const std::string& prompt) {
  const Url url = split_url(config_.endpoint);
  nlohmann::json body{{"model", config_.model},
                      {"temperature", config_.deterministic ? 0.0 : 1.0},
                      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key != nullptr && *key != '\0')
    headers.emplace("Authorization", std::string("Bearer ") + key);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::seconds(1 << std::min(attempt - 1, 5)));
    httplib::Client client(url.origin);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);
    client.set_write_timeout(config_.timeout_seconds);
    auto res = client.Post(url.path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) throw ProviderError("http provider: HTTP " + std::to_string(res->status) + ": " + res->body);
    try {
      const auto j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ProviderError(std::string("http provider: malformed response: ") + e.what());
    }
  }
  throw ProviderError("http provider: giving up after " + std::to_string(config_.max_retries + 1) +
                      " attempts: " + last_error);
}

}  // namespace mwp
