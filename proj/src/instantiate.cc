#include "mwp/instantiate.h"

#include <algorithm>
#include <map>
#include <set>

namespace mwp {
namespace {

using K = PropertyKey;

struct EntityNeeds {
  std::optional<std::string> attribute;  // placeholder
  std::optional<std::string> unit;       // placeholder
};

template <typename T>
const T& draw_unused(const std::vector<T>& candidates, Rng& rng) {
  return candidates[rng.index(candidates.size())];
}

}  // namespace

Binding instantiate_lexical(const ProblemStructure& s, const Vocabulary& v, Rng& rng) {
  std::vector<std::string> agents;
  std::vector<std::string> entities;
  std::map<std::string, EntityNeeds> needs;
  const auto note = [](std::vector<std::string>& list, const std::string& ph) {
    if (std::find(list.begin(), list.end(), ph) == list.end()) list.push_back(ph);
  };
  for (const auto& lf : s.forms) {
    for (const auto& [k, val] : lf.args) {
      const auto* ph = std::get_if<std::string>(&val);
      if (ph == nullptr || k == K::kType) continue;
      if (is_agent_key(k)) note(agents, *ph);
      if (is_entity_key(k)) note(entities, *ph);
    }
    if (lf.predicate == Predicate::kContainer) {
      auto& n = needs[value_to_string(lf.args.at(K::kEntity))];
      if (lf.has(K::kAttribute)) n.attribute = value_to_string(lf.args.at(K::kAttribute));
      if (lf.has(K::kUnit)) n.unit = value_to_string(lf.args.at(K::kUnit));
    }
  }

  Binding b;
  std::set<std::string> used_agents;
  for (const auto& ph : agents) {
    std::vector<std::string> free;
    for (const auto& a : v.agents())
      if (!used_agents.count(a)) free.push_back(a);
    if (free.empty()) throw InstantiationError("vocabulary exhausted: not enough distinct agents");
    const std::string& pick = draw_unused(free, rng);
    used_agents.insert(pick);
    b[ph] = pick;
  }

  std::set<std::string> used_entities;
  std::set<std::string> used_attributes;
  std::set<std::string> used_units;
  for (const auto& ph : entities) {
    const EntityNeeds& n = needs[ph];
    std::vector<const EntityInfo*> free;
    for (const auto& e : v.entities()) {
      if (used_entities.count(e.name)) continue;
      if (n.unit && e.units.empty()) continue;
      if (n.attribute && e.attributes.empty()) continue;
      free.push_back(&e);
    }
    if (free.empty()) throw InstantiationError("vocabulary exhausted: no entity available for " + ph);
    const EntityInfo& e = *draw_unused(free, rng);
    used_entities.insert(e.name);
    b[ph] = e.name;

    const auto modifier = [&](const std::optional<std::string>& slot, const std::vector<std::string>& options,
                              std::set<std::string>& used) {
      if (!slot) return;
      auto it = b.find(*slot);
      if (it != b.end()) return;
      std::vector<std::string> choice;
      for (const auto& o : options)
        if (!used.count(o)) choice.push_back(o);
      if (choice.empty()) throw InstantiationError("vocabulary exhausted: no value for " + *slot);
      const std::string& pick = draw_unused(choice, rng);
      used.insert(pick);
      b[*slot] = pick;
    };
    modifier(n.attribute, e.attributes, used_attributes);
    modifier(n.unit, e.units, used_units);
  }
  return b;
}

Binding instantiate_numbers(const ProblemStructure& s, Rng& rng, const NumberRange& range) {
  std::vector<std::string> slots;
  for (const auto& lf : s.forms) {
    auto it = lf.args.find(K::kQuantity);
    if (it == lf.args.end()) continue;
    if (const auto* ph = std::get_if<std::string>(&it->second)) slots.push_back(*ph);
  }

  for (int attempt = 0; attempt < range.max_attempts; ++attempt) {
    Binding b;
    for (const auto& ph : slots) b[ph] = rng.uniform(range.quantity_min, range.quantity_max);
    MentalModel numeric{substitute_partial(s, b).forms};
    try {
      const Derivation d = derive(numeric);
      const bool in_range = std::all_of(d.steps.begin(), d.steps.end(), [&](const ReasoningStep& st) {
        return st.result >= range.intermediate_min && st.result <= range.intermediate_max;
      });
      if (in_range) return b;
    } catch (const DerivationError&) {
      // negative intermediate or inexact division: redraw
    }
  }
  throw InstantiationError("no numeric instantiation found within " + std::to_string(range.max_attempts) +
                           " attempts");
}

CarryPair instantiate_carry_pair(ArithOp op, Rng& rng, int max_attempts) {
  if (op != ArithOp::kAdd && op != ArithOp::kSubtract)
    throw std::invalid_argument("instantiate_carry_pair: op must be + or -");
  constexpr std::int64_t kLo = 100;
  constexpr std::int64_t kHi = 999;
  constexpr int kOperandAttempts = 1000;

  // Addition: a, b >= 100 and a + b <= 999. Subtraction: b >= 100, a <= 999,
  // a - b >= 100.
  const std::int64_t answer_lo = op == ArithOp::kAdd ? 2 * kLo : kLo;
  const std::int64_t answer_hi = op == ArithOp::kAdd ? kHi : kHi - kLo;

  const auto sample = [&](std::int64_t answer, bool want_carry) -> std::optional<CarryOperands> {
    for (int i = 0; i < kOperandAttempts; ++i) {
      CarryOperands o;
      o.answer = answer;
      if (op == ArithOp::kAdd) {
        o.container = rng.uniform(kLo, answer - kLo);
        o.comparison = answer - o.container;
      } else {
        o.comparison = rng.uniform(kLo, kHi - answer);
        o.container = answer + o.comparison;
      }
      const int count = carry_profile(static_cast<int>(o.container), static_cast<int>(o.comparison), op).count;
      if ((count > 0) == want_carry) return o;
    }
    return std::nullopt;
  };

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const std::int64_t answer = rng.uniform(answer_lo, answer_hi);
    auto plain = sample(answer, false);
    if (!plain) continue;
    auto carried = sample(answer, true);
    if (!carried) continue;
    return {*plain, *carried};
  }
  throw InstantiationError("no carry pair found within " + std::to_string(max_attempts) + " attempts");
}

Binding carry_binding(const ProblemStructure& s, const CarryOperands& operands) {
  if (s.forms.size() != 2) throw InstantiationError("carry_binding: not a carry structure");
  Binding b;
  b[value_to_string(s.forms[0].args.at(K::kQuantity))] = operands.container;
  b[value_to_string(s.forms[1].args.at(K::kQuantity))] = operands.comparison;
  return b;
}

}  // namespace mwp
