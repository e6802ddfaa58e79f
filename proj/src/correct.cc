#include "mwp/correct.h"

#include <algorithm>
#include <cctype>
#include <regex>

#include "mwp/render.h"

namespace mwp {
namespace {

const std::string kPromptHead = "Correct all grammatical mistakes that appear in the following math word problem: ";
const std::string kPromptTail =
    "\nFix any awkward or redundant phrasing. Pay close attention to incorrect plural forms. Do NOT solve the "
    "problem. Do NOT compute any intermediate solutions. Do NOT make any changes to the numerical values or implied "
    "mathematical operations. Only output the corrected math word problem and nothing else. Do NOT restate the "
    "original problem. Do NOT include \"Corrected Version:\" or any description of the task.";

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::size_t> keyword_counts(const std::string& text) {
  // Multi-word keywords are matched with any run of whitespace between words.
  static const std::vector<std::regex> patterns = [] {
    std::vector<std::regex> out;
    for (const auto& k : relational_keywords())
      out.emplace_back("\\b" + std::regex_replace(k, std::regex(" "), "\\s+") + "\\b");
    return out;
  }();
  const std::string t = lower(text);
  std::vector<std::size_t> counts;
  for (const auto& re : patterns)
    counts.push_back(static_cast<std::size_t>(std::distance(std::sregex_iterator(t.begin(), t.end(), re),
                                                            std::sregex_iterator())));
  return counts;
}

std::vector<std::string> numerals(const std::string& text) {
  static const std::regex digits("[0-9]+");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), digits); it != std::sregex_iterator(); ++it)
    out.push_back(it->str());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

nlohmann::ordered_json ProviderConfig::to_json() const {
  return {{"endpoint", endpoint},
          {"model", model},
          {"api_key_env", api_key_env},
          {"timeout_seconds", timeout_seconds},
          {"max_retries", max_retries},
          {"temperature", deterministic ? 0.0 : 1.0}};
}

std::string IdentityProvider::correct(const std::string& prompt) {
  auto text = problem_from_prompt(prompt);
  if (!text) throw ProviderError("identity provider: unrecognized prompt");
  return *text;
}

std::string FunctionProvider::correct(const std::string& prompt) {
  auto text = problem_from_prompt(prompt);
  if (!text) throw ProviderError(name_ + " provider: unrecognized prompt");
  return fn_(*text);
}

std::string build_prompt(const std::string& templated_text) { return kPromptHead + templated_text + kPromptTail; }

std::optional<std::string> problem_from_prompt(const std::string& prompt) {
  if (prompt.size() < kPromptHead.size() + kPromptTail.size()) return std::nullopt;
  if (prompt.compare(0, kPromptHead.size(), kPromptHead) != 0) return std::nullopt;
  if (prompt.compare(prompt.size() - kPromptTail.size(), kPromptTail.size(), kPromptTail) != 0) return std::nullopt;
  return prompt.substr(kPromptHead.size(), prompt.size() - kPromptHead.size() - kPromptTail.size());
}

const std::vector<std::string>& relational_keywords() {
  static const std::vector<std::string> keywords{"more", "fewer", "less", "times as many", "times more"};
  return keywords;
}

std::string IntegrityReport::reason() const {
  if (!sentence_count_ok) return "sentence_count";
  if (!relational_terms_ok) return "relational";
  if (!numbers_ok) return "numbers";
  return "";
}

IntegrityReport integrity_check(const std::string& original, const std::string& corrected) {
  IntegrityReport r;
  r.sentence_count_ok = split_sentences(original).size() == split_sentences(corrected).size();
  r.relational_terms_ok = keyword_counts(original) == keyword_counts(corrected);
  r.numbers_ok = numerals(original) == numerals(corrected);
  return r;
}

CorrectionOutcome correct_problem(const ProblemInstance& p, CorrectionProvider& provider) {
  const std::string completion = trim(provider.correct(build_prompt(p.templated_text)));
  if (completion.empty()) return Discarded{"empty", completion};
  const IntegrityReport report = integrity_check(p.templated_text, completion);
  if (!report.pass()) return Discarded{report.reason(), completion};
  ProblemInstance out = p;
  if (completion != p.templated_text)
    out.corrected_text = completion;
  else
    out.corrected_text.reset();
  return out;
}

}  // namespace mwp
