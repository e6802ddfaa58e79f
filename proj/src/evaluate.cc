#include "mwp/evaluate.h"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <set>
#include <unordered_map>

namespace mwp {
namespace {

bool digit(const std::string& s, std::size_t i) { return i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); }

double percent(std::size_t count, std::size_t n) { return 100.0 * static_cast<double>(count) / static_cast<double>(n); }

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : "; ") + s;
  return out;
}

std::string format_p(double p) {
  if (p < 0.001) return "<0.001";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", p);
  return buf;
}

}  // namespace

Extraction extract_answer_detail(const std::string& s) {
  Extraction out;
  std::size_t i = 0;
  while (i < s.size() && !digit(s, i)) ++i;
  if (i == s.size()) return out;
  std::string number;
  while (digit(s, i)) number += s[i++];
  while (i < s.size() && s[i] == ',' && digit(s, i + 1) && digit(s, i + 2) && digit(s, i + 3) &&
         !digit(s, i + 4)) {
    number.append(s, i + 1, 3);
    i += 4;
  }
  if (i < s.size() && s[i] == '.' && digit(s, i + 1)) out.fraction_followed = true;
  std::size_t lead = number.find_first_not_of('0');
  const std::string significant = lead == std::string::npos ? "0" : number.substr(lead);
  if (significant.size() > 18) return out;
  out.value = std::stoll(significant);
  return out;
}

std::optional<std::int64_t> extract_answer(const std::string& output_text) {
  return extract_answer_detail(output_text).value;
}

std::vector<Prediction> read_predictions(std::istream& in) {
  std::vector<Prediction> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (n == 1 && j.is_object() && j.contains("header")) continue;
      out.push_back({j.at("problem_id").get<std::string>(), j.at("output_text").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw DatasetError(n, std::string("invalid prediction record: ") + e.what());
    }
  }
  return out;
}

ScoreError::ScoreError(std::vector<std::string> problems)
    : std::runtime_error("prediction ids do not match the dataset: " + join(problems)), problems_(std::move(problems)) {}

ScoreResult score(const std::vector<ProblemPair>& pairs, const std::vector<Prediction>& predictions) {
  std::unordered_map<std::string, const Prediction*> by_id;
  std::vector<std::string> problems;
  for (const auto& p : predictions)
    if (!by_id.emplace(p.problem_id, &p).second) problems.push_back("duplicate prediction id " + p.problem_id);

  std::set<std::string> known;
  ScoreResult out;
  const auto outcome = [&](const ProblemInstance& inst) {
    known.insert(inst.id);
    auto it = by_id.find(inst.id);
    if (it == by_id.end()) {
      problems.push_back("missing prediction for " + inst.id);
      return 0;
    }
    const Extraction e = extract_answer_detail(it->second->output_text);
    if (e.fraction_followed) ++out.fractional_outputs;
    return e.value && *e.value == inst.gold_answer ? 1 : 0;
  };
  for (const auto& pair : pairs) {
    PairOutcome o;
    o.pair_id = pair.x.pair_id;
    o.n_steps = pair.x.n_steps;
    o.y_x = outcome(pair.x);
    o.y_xprime = outcome(pair.xprime);
    out.outcomes.push_back(o);
  }
  for (const auto& p : predictions)
    if (!known.count(p.problem_id)) problems.push_back("unknown prediction id " + p.problem_id);
  if (!problems.empty()) throw ScoreError(std::move(problems));
  return out;
}

double cate(const std::vector<PairOutcome>& outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("cate: no pairs");
  long long diff = 0;
  for (const auto& o : outcomes) diff += o.y_x - o.y_xprime;
  return 100.0 * static_cast<double>(diff) / static_cast<double>(outcomes.size());
}

std::vector<Stratum> stratify_by_steps(const std::vector<PairOutcome>& outcomes) {
  std::map<int, std::vector<PairOutcome>> groups;
  for (const auto& o : outcomes) groups[o.n_steps].push_back(o);
  std::vector<Stratum> out;
  for (const auto& [steps, group] : groups) out.push_back({steps, group.size(), cate(group)});
  return out;
}

EvalReport evaluate(TestKind test, const ScoreResult& scored, bool stratify) {
  EvalReport r;
  r.test = test;
  r.n = scored.outcomes.size();
  std::vector<double> diffs;
  for (const auto& o : scored.outcomes) {
    r.count_x += static_cast<std::size_t>(o.y_x);
    r.count_xprime += static_cast<std::size_t>(o.y_xprime);
    diffs.push_back(o.y_x - o.y_xprime);
  }
  r.t = paired_t_test(diffs);
  r.acc_x = percent(r.count_x, r.n);
  r.acc_xprime = percent(r.count_xprime, r.n);
  r.cate = cate(scored.outcomes);
  r.fractional_outputs = scored.fractional_outputs;
  if (stratify) r.strata = stratify_by_steps(scored.outcomes);
  return r;
}

nlohmann::ordered_json EvalReport::to_json(const nlohmann::ordered_json& header) const {
  nlohmann::ordered_json j;
  j["header"] = header;
  j["test"] = mwp::to_string(test);
  j["n"] = n;
  j["acc_x"] = acc_x;
  j["acc_xprime"] = acc_xprime;
  j["counts"] = {{"x", count_x}, {"xprime", count_xprime}};
  j["cate"] = cate;
  j["t"] = t.t;
  j["df"] = t.df;
  j["p"] = t.p;
  j["fractional_outputs"] = fractional_outputs;
  if (strata) {
    j["strata"] = nlohmann::ordered_json::array();
    for (const auto& s : *strata) j["strata"].push_back({{"n_steps", s.n_steps}, {"n", s.n}, {"cate", s.cate}});
  }
  return j;
}

std::string EvalReport::to_table() const {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-24s %6s %8s %8s %8s %8s\n", "test", "n", "Acc x", "Acc x'", "CATE", "p-val");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-24s %6zu %8.1f %8.1f %8.1f %8s\n", std::string(mwp::to_string(test)).c_str(), n,
                acc_x, acc_xprime, cate, format_p(t.p).c_str());
  out += buf;
  if (strata) {
    std::snprintf(buf, sizeof buf, "\n%-24s %6s %8s\n", "steps", "n", "CATE");
    out += buf;
    for (const auto& s : *strata) {
      std::snprintf(buf, sizeof buf, "%-24d %6zu %8.1f\n", s.n_steps, s.n, s.cate);
      out += buf;
    }
  }
  return out;
}

}  // namespace mwp
