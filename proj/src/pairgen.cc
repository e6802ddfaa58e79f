#include "mwp/pairgen.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <regex>
#include <set>
#include <thread>

namespace mwp {
namespace {

using K = PropertyKey;

template <typename F>
void parallel_for(std::size_t n, int jobs, F&& body) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::uint64_t test_stream(TestKind t) { return static_cast<std::uint64_t>(t) + 1; }

ProblemInstance make_instance(TestKind test, Condition cond, const MentalModel& mm, const std::string& text) {
  ProblemInstance p;
  p.test = test;
  p.condition = cond;
  p.templated_text = text;
  p.mental_model = mm;
  const Derivation d = derive(mm);
  p.derivation = to_json(d);
  p.gold_answer = d.answer;
  p.n_steps = static_cast<int>(count_steps(mm.forms));
  return p;
}

Binding merged(Binding a, const Binding& b) {
  a.insert(b.begin(), b.end());
  return a;
}

struct PairCorrection {
  std::optional<ProblemPair> pair;
  std::vector<CorrectionLogEntry> log;
};

PairCorrection correct_pair(const ProblemPair& pair, std::size_t index, CorrectionProvider& provider) {
  PairCorrection out;
  ProblemPair corrected = pair;
  bool discarded = false;
  for (ProblemInstance* member : {&corrected.x, &corrected.xprime}) {
    CorrectionLogEntry e;
    e.pair_index = index;
    e.pair_id = member->pair_id;
    e.problem_id = member->id;
    CorrectionOutcome r = correct_problem(*member, provider);
    if (auto* d = std::get_if<Discarded>(&r)) {
      e.status = "discarded";
      e.reason = d->reason;
      e.completion = d->completion;
      discarded = true;
    } else {
      *member = std::get<ProblemInstance>(std::move(r));
      e.status = member->corrected_text ? "corrected" : "unchanged";
      e.completion = member->text();
    }
    out.log.push_back(std::move(e));
  }
  if (!discarded) out.pair = std::move(corrected);
  return out;
}

struct Slot {
  ProblemPair pair;
  std::vector<CorrectionLogEntry> log;
  std::size_t replaced = 0;
};

Slot finalize(const PairGenerator& gen, TestKind test, std::uint64_t seed, std::size_t index, std::uint32_t retry,
              const ProblemPair& first, CorrectionProvider* provider) {
  Slot slot;
  ProblemPair pair = first;
  for (;;) {
    if (provider == nullptr) {
      slot.pair = std::move(pair);
      return slot;
    }
    PairCorrection c = correct_pair(pair, index, *provider);
    slot.log.insert(slot.log.end(), c.log.begin(), c.log.end());
    if (c.pair) {
      slot.pair = std::move(*c.pair);
      return slot;
    }
    if (static_cast<int>(++slot.replaced) > gen.options().max_replacements)
      throw InstantiationError("pair " + std::to_string(index) + ": every replacement was discarded by correction");
    pair = gen.build_pair(test, seed, index, ++retry);
  }
}

BuildResult collect(std::vector<Slot>& slots) {
  BuildResult out;
  for (auto& s : slots) {
    out.pairs.push_back(std::move(s.pair));
    out.log.insert(out.log.end(), s.log.begin(), s.log.end());
    out.replaced += s.replaced;
  }
  return out;
}

// Agents each form mentions for the first time, in argument order.
std::vector<std::vector<std::string>> introduced_agents(const MentalModel& mm) {
  std::set<std::string> seen;
  std::vector<std::vector<std::string>> out;
  for (const auto& lf : mm.forms) {
    std::vector<std::string> fresh;
    for (const auto& [k, v] : lf.args)
      if (is_agent_key(k) && seen.insert(value_to_string(v)).second) fresh.push_back(value_to_string(v));
    out.push_back(std::move(fresh));
  }
  return out;
}

MentalModel without_quantities(MentalModel mm) {
  for (auto& lf : mm.forms) lf.args.erase(K::kQuantity);
  return mm;
}

std::string mask_digits(const std::string& s) {
  static const std::regex digits("[0-9]+");
  return std::regex_replace(s, digits, "#");
}

class Auditor {
 public:
  Auditor(TestKind test, const Renderer& renderer, const NumberRange& range)
      : test_(test), renderer_(renderer), range_(range) {
    for (const char* check : {"record", "model", "pattern", "quantity_range", "intermediate_range", "faithfulness",
                              "pair_answer"})
      report_.violations[check] = 0;
    switch (test) {
      case TestKind::kConsistency:
        for (const char* check : {"pair_model", "pair_sentence_diff", "pair_orientation"}) report_.violations[check] = 0;
        break;
      case TestKind::kTransferVsComparison:
        for (const char* check : {"pair_equations", "pair_agents"}) report_.violations[check] = 0;
        break;
      case TestKind::kCarry:
        for (const char* check : {"carry_counts", "carry_digits", "carry_text"}) report_.violations[check] = 0;
        break;
    }
  }

  void pair(std::size_t index, const ProblemPair& p) {
    ++report_.pairs;
    const bool x_ok = problem(index, p.x, Condition::kX);
    const bool xp_ok = problem(index, p.xprime, Condition::kXPrime);
    if (p.x.pair_id != p.xprime.pair_id) flag("record", index, "pair members have different pair ids");
    if (p.x.gold_answer != p.xprime.gold_answer) flag("pair_answer", index, "answers differ");
    if (!x_ok || !xp_ok) return;
    switch (test_) {
      case TestKind::kConsistency: consistency(index, p); break;
      case TestKind::kTransferVsComparison: tc(index, p); break;
      case TestKind::kCarry: carry(index, p); break;
    }
  }

  AuditReport take() { return std::move(report_); }

 private:
  void flag(const std::string& check, std::size_t index, const std::string& msg) {
    ++report_.violations[check];
    if (report_.messages.size() < 100) report_.messages.push_back("pair " + std::to_string(index) + ": " + check + ": " + msg);
  }

  // Returns false when the model is unusable for the pair checks.
  bool problem(std::size_t index, const ProblemInstance& p, Condition cond) {
    const std::string who = std::string(to_string(cond)) + ": ";
    if (p.test != test_) flag("record", index, who + "wrong test");
    if (p.condition != cond) flag("record", index, who + "wrong condition");
    if (p.id != p.pair_id + "-" + std::string(to_string(cond))) flag("record", index, who + "id does not match pair id");

    const auto problems = validate_model(p.mental_model);
    if (!problems.empty()) {
      flag("model", index, who + problems.front());
      return false;
    }
    Derivation d;
    try {
      d = derive(p.mental_model);
    } catch (const DerivationError& e) {
      flag("model", index, who + e.what());
      return false;
    }
    if (to_json(d) != p.derivation) flag("model", index, who + "derivation does not match the mental model");
    if (d.answer != p.gold_answer) flag("model", index, who + "gold answer does not match the derivation");
    if (static_cast<std::size_t>(p.n_steps) != count_steps(p.mental_model.forms))
      flag("model", index, who + "n_steps does not match the mental model");

    if (auto v = pattern_violation(test_, cond, p.mental_model.forms)) flag("pattern", index, who + *v);
    if (test_ != TestKind::kCarry) {
      for (const auto& lf : p.mental_model.forms) {
        const auto q = lf.quantity();
        if (q < range_.quantity_min || q > range_.quantity_max)
          flag("quantity_range", index, who + "quantity " + std::to_string(q) + " out of range");
      }
    }
    for (const auto& s : d.steps)
      if (s.result < range_.intermediate_min || s.result > range_.intermediate_max)
        flag("intermediate_range", index, who + "intermediate " + std::to_string(s.result) + " out of range");

    if (!renderer_.check_faithfulness(p.templated_text, p.mental_model))
      flag("faithfulness", index, who + "templated text does not parse back to the mental model");
    return true;
  }

  void consistency(std::size_t index, const ProblemPair& p) {
    if (!(p.x.mental_model == p.xprime.mental_model)) flag("pair_model", index, "mental models differ");
    const auto& forms = p.x.mental_model.forms;
    std::size_t cmp = forms.size();
    for (std::size_t i = 0; i < forms.size(); ++i)
      if (forms[i].predicate == Predicate::kComparison) cmp = i;
    const auto a = split_sentences(p.x.templated_text);
    const auto b = split_sentences(p.xprime.templated_text);
    std::vector<std::size_t> diff;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
      if (a[i] != b[i]) diff.push_back(i);
    if (a.size() != b.size() || diff != std::vector<std::size_t>{cmp})
      flag("pair_sentence_diff", index, "texts must differ exactly at the comparison sentence");

    if (cmp == forms.size()) return;
    const auto targets = form_targets(p.x.mental_model);
    const auto orientation = [&](const ProblemInstance& inst) -> std::optional<Orientation> {
      try {
        const auto parsed = renderer_.parse(inst.templated_text);
        return comparison_orientation(renderer_.templates().at(parsed.plan.forms[cmp]), *targets[cmp],
                                      inst.mental_model.forms[cmp]);
      } catch (const ParseError&) {
        return std::nullopt;
      }
    };
    if (orientation(p.x) != Orientation::kConsistent) flag("pair_orientation", index, "x comparison is not consistent");
    if (orientation(p.xprime) != Orientation::kInconsistent)
      flag("pair_orientation", index, "xprime comparison is not inconsistent");
  }

  void tc(std::size_t index, const ProblemPair& p) {
    if (p.x.derivation != p.xprime.derivation) flag("pair_equations", index, "equation sequences differ");
    if (introduced_agents(p.x.mental_model) != introduced_agents(p.xprime.mental_model))
      flag("pair_agents", index, "sentences introduce different agents");
  }

  void carry(std::size_t index, const ProblemPair& p) {
    const auto count = [&](const ProblemInstance& inst) -> std::optional<int> {
      const Derivation d = derive(inst.mental_model);
      if (d.steps.size() != 1) return std::nullopt;
      const Equation& e = d.steps[0].equation;
      for (std::int64_t v : {e.y.value, e.z.value, d.answer})
        if (v < 100 || v > 999) flag("carry_digits", index, std::string(to_string(inst.condition)) + ": " +
                                                                 std::to_string(v) + " is not three-digit");
      try {
        return carry_profile(static_cast<int>(e.y.value), static_cast<int>(e.z.value), e.op).count;
      } catch (const CarryError&) {
        return std::nullopt;
      }
    };
    const auto cx = count(p.x);
    const auto cxp = count(p.xprime);
    if (!cx || *cx != 0) flag("carry_counts", index, "x member must have no carry");
    if (!cxp || *cxp < 1) flag("carry_counts", index, "xprime member must have at least one carry");
    if (mask_digits(p.x.templated_text) != mask_digits(p.xprime.templated_text) ||
        !(without_quantities(p.x.mental_model) == without_quantities(p.xprime.mental_model)))
      flag("carry_text", index, "members differ beyond their numerals");
  }

  TestKind test_;
  const Renderer& renderer_;
  NumberRange range_;
  AuditReport report_;
};

}  // namespace

nlohmann::ordered_json GenerationOptions::to_json() const {
  return {{"quantity_min", range.quantity_min},
          {"quantity_max", range.quantity_max},
          {"intermediate_min", range.intermediate_min},
          {"intermediate_max", range.intermediate_max},
          {"max_number_attempts", range.max_attempts},
          {"max_replacements", max_replacements},
          {"max_build_attempts", max_build_attempts}};
}

std::string make_pair_id(std::uint64_t seed, std::size_t index, std::uint32_t retry) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(mix_seed(seed, {static_cast<std::uint64_t>(index), retry})));
  return buf;
}

std::optional<std::uint32_t> find_retry(std::uint64_t seed, std::size_t index, const std::string& pair_id,
                                        std::uint32_t limit) {
  for (std::uint32_t r = 0; r < limit; ++r)
    if (make_pair_id(seed, index, r) == pair_id) return r;
  return std::nullopt;
}

PairGenerator::PairGenerator(const Vocabulary& vocab, const TemplateLibrary& templates, GenerationOptions options)
    : vocab_(vocab), options_(std::move(options)), renderer_(templates, vocab) {}

ProblemPair PairGenerator::build_pair(TestKind test, std::uint64_t seed, std::size_t index, std::uint32_t retry) const {
  Rng rng(mix_seed(seed, {test_stream(test), static_cast<std::uint64_t>(index), retry}));
  ProblemPair pair;
  switch (test) {
    case TestKind::kConsistency: pair = consistency_pair(rng); break;
    case TestKind::kTransferVsComparison: pair = tc_pair(rng); break;
    case TestKind::kCarry: pair = carry_pair(rng); break;
  }
  pair.x.pair_id = pair.xprime.pair_id = make_pair_id(seed, index, retry);
  pair.x.id = pair.x.pair_id + "-x";
  pair.xprime.id = pair.xprime.pair_id + "-xprime";
  return pair;
}

ProblemPair PairGenerator::consistency_pair(Rng& rng) const {
  std::string last;
  for (int attempt = 0; attempt < options_.max_build_attempts; ++attempt) {
    try {
      const ProblemStructure s = gen_consistency_structure(rng);
      const Binding lexical = instantiate_lexical(s, vocab_, rng);
      const MentalModel mm = substitute(s, merged(lexical, instantiate_numbers(s, rng, options_.range)));
      const auto [consistent, inconsistent] = renderer_.render_consistency_pair(mm, rng);
      return {make_instance(TestKind::kConsistency, Condition::kX, mm, consistent),
              make_instance(TestKind::kConsistency, Condition::kXPrime, mm, inconsistent)};
    } catch (const InstantiationError& e) {
      last = e.what();
    } catch (const RenderError& e) {
      last = e.what();
    }
  }
  throw InstantiationError("consistency pair: " + last);
}

ProblemPair PairGenerator::tc_pair(Rng& rng) const {
  std::string last;
  for (int attempt = 0; attempt < options_.max_build_attempts; ++attempt) {
    try {
      const auto [transfers, comparisons] = gen_tc_structures(rng);
      const Binding b = merged(instantiate_lexical(transfers, vocab_, rng),
                               instantiate_numbers(transfers, rng, options_.range));
      const MentalModel mt = substitute(transfers, b);
      const MentalModel mc = substitute(comparisons, b);
      const std::string tt = renderer_.render_problem(mt, rng);
      const std::string tc = renderer_.render_problem(mc, rng);
      return {make_instance(TestKind::kTransferVsComparison, Condition::kX, mt, tt),
              make_instance(TestKind::kTransferVsComparison, Condition::kXPrime, mc, tc)};
    } catch (const InstantiationError& e) {
      last = e.what();
    } catch (const RenderError& e) {
      last = e.what();
    }
  }
  throw InstantiationError("transfer_vs_comparison pair: " + last);
}

ProblemPair PairGenerator::carry_pair(Rng& rng) const {
  std::string last;
  for (int attempt = 0; attempt < options_.max_build_attempts; ++attempt) {
    try {
      const ProblemStructure s = gen_carry_structure(rng);
      const ArithOp op = carry_operation(s);
      const Binding lexical = instantiate_lexical(s, vocab_, rng);
      const CarryPair operands = instantiate_carry_pair(op, rng, options_.range.max_attempts);
      const MentalModel plain = substitute(s, merged(lexical, carry_binding(s, operands.no_carry)));
      const MentalModel carried = substitute(s, merged(lexical, carry_binding(s, operands.carry)));
      const RenderPlan plan = renderer_.sample_plan(plain, rng);
      return {make_instance(TestKind::kCarry, Condition::kX, plain, renderer_.render(plain, plan)),
              make_instance(TestKind::kCarry, Condition::kXPrime, carried, renderer_.render(carried, plan))};
    } catch (const InstantiationError& e) {
      last = e.what();
    } catch (const RenderError& e) {
      last = e.what();
    }
  }
  throw InstantiationError("carry pair: " + last);
}

nlohmann::ordered_json CorrectionLogEntry::to_json() const {
  return {{"pair_index", pair_index}, {"pair_id", pair_id}, {"problem_id", problem_id},
          {"status", status},         {"reason", reason},   {"completion", completion}};
}

BuildResult build_dataset(const PairGenerator& gen, TestKind test, std::size_t n_pairs, std::uint64_t seed,
                          CorrectionProvider* provider) {
  if (n_pairs == 0) throw std::invalid_argument("n_pairs must be at least 1");
  std::vector<Slot> slots(n_pairs);
  parallel_for(n_pairs, gen.options().jobs, [&](std::size_t i) {
    slots[i] = finalize(gen, test, seed, i, 0, gen.build_pair(test, seed, i, 0), provider);
  });
  return collect(slots);
}

BuildResult correct_dataset(const PairGenerator& gen, TestKind test, std::uint64_t seed,
                            const std::vector<ProblemPair>& pairs, CorrectionProvider& provider) {
  const auto limit = static_cast<std::uint32_t>(gen.options().max_replacements + 1) * 4;
  std::vector<Slot> slots(pairs.size());
  parallel_for(pairs.size(), gen.options().jobs, [&](std::size_t i) {
    const auto retry = find_retry(seed, i, pairs[i].x.pair_id, limit);
    if (!retry)
      throw InstantiationError("pair " + std::to_string(i) + " (" + pairs[i].x.pair_id +
                               ") was not generated from this seed");
    slots[i] = finalize(gen, test, seed, i, *retry, pairs[i], &provider);
  });
  return collect(slots);
}

std::size_t AuditReport::total() const {
  std::size_t n = 0;
  for (const auto& [k, v] : violations) n += v;
  return n;
}

nlohmann::ordered_json AuditReport::to_json() const {
  nlohmann::ordered_json j;
  j["pairs"] = pairs;
  j["total_violations"] = total();
  j["violations"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : violations) j["violations"][k] = v;
  j["messages"] = messages;
  return j;
}

AuditReport validate_dataset(const std::vector<ProblemPair>& pairs, TestKind test, const Renderer& renderer,
                             const NumberRange& range) {
  Auditor a(test, renderer, range);
  for (std::size_t i = 0; i < pairs.size(); ++i) a.pair(i, pairs[i]);
  return a.take();
}

std::vector<AuditItem> audit_sample(std::size_t n_pairs, std::size_t n, std::uint64_t seed) {
  if (n > n_pairs) throw std::invalid_argument("audit sample larger than the dataset");
  std::vector<std::size_t> order(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) order[i] = i;
  Rng rng(mix_seed(seed, {0xa0d17ULL}));
  for (std::size_t i = n_pairs; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
  std::vector<AuditItem> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({order[i], i < 10 ? "control" : "sample"});
  return out;
}

}  // namespace mwp
