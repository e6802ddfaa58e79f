// Optional grammar correction of templated texts by an external
// text-generation service, with integrity checks on the completion.
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mwp/dataset.h"

namespace mwp {

// Network or service failure, distinct from a discarded completion.
class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProviderConfig {
  std::string endpoint;  // full chat-completions URL
  std::string model;
  std::string api_key_env = "MWP_API_KEY";
  int timeout_seconds = 60;
  int max_retries = 3;
  bool deterministic = true;  // temperature 0

  nlohmann::ordered_json to_json() const;
};

class CorrectionProvider {
 public:
  virtual ~CorrectionProvider() = default;
  // Must be safe to call concurrently.
  virtual std::string correct(const std::string& prompt) = 0;
  virtual std::string name() const = 0;
};

// Echoes the problem text embedded in the prompt.
class IdentityProvider : public CorrectionProvider {
 public:
  std::string correct(const std::string& prompt) override;
  std::string name() const override { return "identity"; }
};

// Applies a function to the embedded problem text. Used for fault injection.
class FunctionProvider : public CorrectionProvider {
 public:
  explicit FunctionProvider(std::function<std::string(const std::string&)> fn, std::string name = "function")
      : fn_(std::move(fn)), name_(std::move(name)) {}
  std::string correct(const std::string& prompt) override;
  std::string name() const override { return name_; }

 private:
  std::function<std::string(const std::string&)> fn_;
  std::string name_;
};

// OpenAI-style chat-completions endpoint. Retries transient failures, then
// throws ProviderError.
class HttpProvider : public CorrectionProvider {
 public:
  explicit HttpProvider(ProviderConfig config);
  std::string correct(const std::string& prompt) override;
  std::string name() const override { return "http"; }

 private:
  ProviderConfig config_;
};

std::string build_prompt(const std::string& templated_text);

// Inverse of build_prompt; nullopt when the prompt has another shape.
std::optional<std::string> problem_from_prompt(const std::string& prompt);

const std::vector<std::string>& relational_keywords();

struct IntegrityReport {
  bool sentence_count_ok = false;
  bool relational_terms_ok = false;
  bool numbers_ok = false;

  bool pass() const { return sentence_count_ok && relational_terms_ok && numbers_ok; }
  // First failing check: "sentence_count", "relational", "numbers"; empty on pass.
  std::string reason() const;
};

IntegrityReport integrity_check(const std::string& original, const std::string& corrected);

struct Discarded {
  std::string reason;
  std::string completion;
};

using CorrectionOutcome = std::variant<ProblemInstance, Discarded>;

// Corrects the templated text. Throws ProviderError on provider failure.
CorrectionOutcome correct_problem(const ProblemInstance& p, CorrectionProvider& provider);

}  // namespace mwp
