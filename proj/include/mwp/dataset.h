// Problem instances, matched pairs, and the JSON Lines dataset format.
//
// Line 1: {"header": {...}}. Every following line is one problem with the
// fields id, pair_id, test, condition, text, templated_text, mental_model,
// derivation, gold_answer, n_steps. The two members of a pair are adjacent,
// condition x first.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mwp/formalism.h"
#include "mwp/structgen.h"

namespace mwp {

inline constexpr std::string_view kToolName = "mwpbench";
inline constexpr std::string_view kToolVersion = "0.1.0";

class DatasetError : public std::runtime_error {
 public:
  DatasetError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ProblemInstance {
  std::string id;
  std::string pair_id;
  TestKind test = TestKind::kConsistency;
  Condition condition = Condition::kX;
  std::string templated_text;
  std::optional<std::string> corrected_text;
  MentalModel mental_model;
  nlohmann::ordered_json derivation;  // serialized Derivation
  std::int64_t gold_answer = 0;
  int n_steps = 0;

  const std::string& text() const { return corrected_text ? *corrected_text : templated_text; }
};

struct ProblemPair {
  ProblemInstance x;
  ProblemInstance xprime;
};

// {"tool", "version", "seed", "config"}
nlohmann::ordered_json make_header(std::uint64_t seed, const nlohmann::ordered_json& config);

nlohmann::ordered_json to_json(const ProblemInstance& p);
ProblemInstance problem_from_json(const nlohmann::ordered_json& j);

struct Dataset {
  nlohmann::ordered_json header;  // contents of the "header" record
  std::vector<ProblemInstance> problems;
};

void write_dataset(std::ostream& out, const nlohmann::ordered_json& header, const std::vector<ProblemPair>& pairs);
std::string dataset_to_string(const nlohmann::ordered_json& header, const std::vector<ProblemPair>& pairs);

// Throws DatasetError naming the offending line.
Dataset read_dataset(std::istream& in);

// Groups adjacent (x, xprime) members sharing a pair_id. Throws DatasetError
// (line numbers count the header as line 1).
std::vector<ProblemPair> pairs_of(const Dataset& d);

}  // namespace mwp
