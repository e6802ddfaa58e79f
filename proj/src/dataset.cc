#include "mwp/dataset.h"

#include <istream>
#include <ostream>
#include <sstream>

namespace mwp {
namespace {

const std::vector<std::string>& problem_fields() {
  static const std::vector<std::string> fields{"id",           "pair_id",   "test",        "condition", "text",
                                               "templated_text", "mental_model", "derivation", "gold_answer", "n_steps"};
  return fields;
}

}  // namespace

nlohmann::ordered_json make_header(std::uint64_t seed, const nlohmann::ordered_json& config) {
  nlohmann::ordered_json h;
  h["tool"] = kToolName;
  h["version"] = kToolVersion;
  h["seed"] = seed;
  h["config"] = config;
  return h;
}

nlohmann::ordered_json to_json(const ProblemInstance& p) {
  nlohmann::ordered_json j;
  j["id"] = p.id;
  j["pair_id"] = p.pair_id;
  j["test"] = to_string(p.test);
  j["condition"] = to_string(p.condition);
  j["text"] = p.text();
  j["templated_text"] = p.templated_text;
  j["mental_model"] = to_json(p.mental_model);
  j["derivation"] = p.derivation;
  j["gold_answer"] = p.gold_answer;
  j["n_steps"] = p.n_steps;
  return j;
}

ProblemInstance problem_from_json(const nlohmann::ordered_json& j) {
  if (!j.is_object()) throw std::invalid_argument("problem record must be an object");
  for (const auto& f : problem_fields())
    if (!j.contains(f)) throw std::invalid_argument("missing field \"" + f + "\"");
  if (j.size() != problem_fields().size()) throw std::invalid_argument("unexpected extra fields");

  ProblemInstance p;
  p.id = j.at("id").get<std::string>();
  p.pair_id = j.at("pair_id").get<std::string>();
  const auto test = parse_test_kind(j.at("test").get<std::string>());
  if (!test) throw std::invalid_argument("unknown test \"" + j.at("test").get<std::string>() + "\"");
  p.test = *test;
  const auto cond = parse_condition(j.at("condition").get<std::string>());
  if (!cond) throw std::invalid_argument("unknown condition \"" + j.at("condition").get<std::string>() + "\"");
  p.condition = *cond;
  p.templated_text = j.at("templated_text").get<std::string>();
  const std::string text = j.at("text").get<std::string>();
  if (text != p.templated_text) p.corrected_text = text;
  p.mental_model = mental_model_from_json(nlohmann::json::parse(j.at("mental_model").dump()));
  p.derivation = j.at("derivation");
  p.gold_answer = j.at("gold_answer").get<std::int64_t>();
  p.n_steps = j.at("n_steps").get<int>();
  return p;
}

void write_dataset(std::ostream& out, const nlohmann::ordered_json& header, const std::vector<ProblemPair>& pairs) {
  out << nlohmann::ordered_json{{"header", header}}.dump() << '\n';
  for (const auto& pair : pairs) {
    out << to_json(pair.x).dump() << '\n';
    out << to_json(pair.xprime).dump() << '\n';
  }
}

std::string dataset_to_string(const nlohmann::ordered_json& header, const std::vector<ProblemPair>& pairs) {
  std::ostringstream out;
  write_dataset(out, header, pairs);
  return out.str();
}

Dataset read_dataset(std::istream& in) {
  Dataset d;
  std::string line;
  std::size_t n = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DatasetError(n, std::string("invalid JSON: ") + e.what());
    }
    if (!have_header) {
      if (!j.is_object() || !j.contains("header") || j.size() != 1)
        throw DatasetError(n, "first line must be a header record");
      d.header = j.at("header");
      have_header = true;
      continue;
    }
    try {
      d.problems.push_back(problem_from_json(j));
    } catch (const std::exception& e) {
      throw DatasetError(n, e.what());
    }
  }
  if (!have_header) throw DatasetError(0, "empty dataset");
  return d;
}

std::vector<ProblemPair> pairs_of(const Dataset& d) {
  std::vector<ProblemPair> out;
  if (d.problems.size() % 2 != 0)
    throw DatasetError(d.problems.size() + 1, "odd number of problems; pairs must be complete");
  for (std::size_t i = 0; i < d.problems.size(); i += 2) {
    const auto& a = d.problems[i];
    const auto& b = d.problems[i + 1];
    if (a.condition != Condition::kX) throw DatasetError(i + 2, "expected condition x");
    if (b.condition != Condition::kXPrime) throw DatasetError(i + 3, "expected condition xprime");
    if (a.pair_id != b.pair_id) throw DatasetError(i + 3, "pair members have different pair_id");
    out.push_back({a, b});
  }
  return out;
}

}  // namespace mwp
