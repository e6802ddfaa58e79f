// Scoring of model predictions against a paired dataset: answer extraction,
// per-condition accuracy, CATE, paired t-test, step-count strata.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mwp/dataset.h"
#include "mwp/stats.h"

namespace mwp {

struct Extraction {
  std::optional<std::int64_t> value;
  bool fraction_followed = false;  // "17.5" extracts 17 and sets this
};

// First maximal digit run, absorbing ",ddd" thousands groups. Signs are
// ignored and a decimal point ends the number.
Extraction extract_answer_detail(const std::string& output_text);
std::optional<std::int64_t> extract_answer(const std::string& output_text);

struct Prediction {
  std::string problem_id;
  std::string output_text;
};

// JSON Lines of {problem_id, output_text}; a leading header record is skipped.
std::vector<Prediction> read_predictions(std::istream& in);

class ScoreError : public std::runtime_error {
 public:
  explicit ScoreError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct PairOutcome {
  std::string pair_id;
  int n_steps = 0;
  int y_x = 0;
  int y_xprime = 0;
};

struct ScoreResult {
  std::vector<PairOutcome> outcomes;  // dataset pair order
  std::size_t fractional_outputs = 0;
};

// Y = 1 iff the extracted answer equals the gold answer. Throws ScoreError
// listing missing, duplicate and unknown prediction ids.
ScoreResult score(const std::vector<ProblemPair>& pairs, const std::vector<Prediction>& predictions);

// Mean of Y(x) - Y(x') in percentage points, from integer counts.
double cate(const std::vector<PairOutcome>& outcomes);

struct Stratum {
  int n_steps = 0;
  std::size_t n = 0;
  double cate = 0;
};

std::vector<Stratum> stratify_by_steps(const std::vector<PairOutcome>& outcomes);

struct EvalReport {
  TestKind test = TestKind::kConsistency;
  std::size_t n = 0;
  std::size_t count_x = 0;
  std::size_t count_xprime = 0;
  double acc_x = 0;
  double acc_xprime = 0;
  double cate = 0;
  TTestResult t;
  std::size_t fractional_outputs = 0;
  std::optional<std::vector<Stratum>> strata;

  nlohmann::ordered_json to_json(const nlohmann::ordered_json& header) const;
  std::string to_table() const;
};

// Requires at least two pairs.
EvalReport evaluate(TestKind test, const ScoreResult& scored, bool stratify);

}  // namespace mwp
