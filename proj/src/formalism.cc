#include "mwp/formalism.h"

#include <algorithm>
#include <array>
#include <set>

namespace mwp {
namespace {

constexpr std::array<std::pair<Predicate, std::string_view>, 4> kPredicateNames{{
    {Predicate::kContainer, "container"},
    {Predicate::kTransfer, "transfer"},
    {Predicate::kComparison, "comparison"},
    {Predicate::kRate, "rate"},
}};

constexpr std::array<std::pair<PropertyKey, std::string_view>, 12> kKeyNames{{
    {PropertyKey::kAgent, "agent"},
    {PropertyKey::kAgentA, "agentA"},
    {PropertyKey::kAgentB, "agentB"},
    {PropertyKey::kReceiverAgent, "receiver_agent"},
    {PropertyKey::kSenderAgent, "sender_agent"},
    {PropertyKey::kEntity, "entity"},
    {PropertyKey::kEntityA, "entityA"},
    {PropertyKey::kEntityB, "entityB"},
    {PropertyKey::kAttribute, "attribute"},
    {PropertyKey::kUnit, "unit"},
    {PropertyKey::kQuantity, "quantity"},
    {PropertyKey::kType, "type"},
}};

struct Schema {
  std::vector<PropertyKey> required;
  std::vector<PropertyKey> optional;
};

const Schema& schema_for(Predicate p) {
  using K = PropertyKey;
  static const Schema container{{K::kAgent, K::kQuantity, K::kEntity}, {K::kAttribute, K::kUnit}};
  static const Schema transfer{{K::kQuantity, K::kEntity}, {K::kReceiverAgent, K::kSenderAgent}};
  static const Schema comparison{{K::kType, K::kAgentA, K::kAgentB, K::kQuantity, K::kEntity}, {}};
  static const Schema rate{{K::kAgent, K::kQuantity, K::kEntityA, K::kEntityB}, {}};
  switch (p) {
    case Predicate::kContainer: return container;
    case Predicate::kTransfer: return transfer;
    case Predicate::kComparison: return comparison;
    case Predicate::kRate: return rate;
  }
  return container;
}

std::string placeholder_prefix(PropertyKey k) {
  if (is_agent_key(k)) return "agent";
  if (is_entity_key(k)) return "entity";
  if (k == PropertyKey::kAttribute) return "attribute";
  if (k == PropertyKey::kUnit) return "unit";
  return "q";
}

using Known = std::set<std::pair<std::string, std::string>>;

// Applies one form to the set of known quantities; returns the target of the
// reasoning step, nullopt for containers. Sets `ok` false when unresolvable.
std::optional<QuestionTarget> advance(const LogicalForm& lf, Known& known, bool& ok) {
  const auto tok = [&](PropertyKey k) { return value_to_string(lf.args.at(k)); };
  switch (lf.predicate) {
    case Predicate::kContainer:
      known.insert({tok(PropertyKey::kAgent), tok(PropertyKey::kEntity)});
      return std::nullopt;
    case Predicate::kTransfer: {
      const std::string entity = tok(PropertyKey::kEntity);
      std::optional<std::string> target;
      int known_agents = 0;
      for (PropertyKey k : {PropertyKey::kReceiverAgent, PropertyKey::kSenderAgent}) {
        if (!lf.has(k)) continue;
        if (known.count({tok(k), entity})) {
          ++known_agents;
          target = tok(k);
        }
      }
      if (known_agents != 1) {
        ok = false;
        return std::nullopt;
      }
      return QuestionTarget{*target, entity};
    }
    case Predicate::kComparison: {
      const std::string entity = tok(PropertyKey::kEntity);
      const std::string a = tok(PropertyKey::kAgentA);
      const std::string b = tok(PropertyKey::kAgentB);
      const bool ka = known.count({a, entity}) != 0;
      const bool kb = known.count({b, entity}) != 0;
      if (ka == kb) {
        ok = false;
        return std::nullopt;
      }
      QuestionTarget t{ka ? b : a, entity};
      known.insert({t.agent, t.entity});
      return t;
    }
    case Predicate::kRate: {
      const std::string agent = tok(PropertyKey::kAgent);
      const std::string ea = tok(PropertyKey::kEntityA);
      const std::string eb = tok(PropertyKey::kEntityB);
      const bool ka = known.count({agent, ea}) != 0;
      const bool kb = known.count({agent, eb}) != 0;
      if (ka == kb) {
        ok = false;
        return std::nullopt;
      }
      QuestionTarget t{agent, kb ? ea : eb};
      known.insert({t.agent, t.entity});
      return t;
    }
  }
  ok = false;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Predicate p) {
  for (const auto& [k, name] : kPredicateNames)
    if (k == p) return name;
  return "?";
}

std::string_view to_string(PropertyKey key) {
  for (const auto& [k, name] : kKeyNames)
    if (k == key) return name;
  return "?";
}

std::optional<Predicate> parse_predicate(std::string_view s) {
  for (const auto& [k, name] : kPredicateNames)
    if (name == s) return k;
  return std::nullopt;
}

std::optional<PropertyKey> parse_property_key(std::string_view s) {
  for (const auto& [k, name] : kKeyNames)
    if (name == s) return k;
  return std::nullopt;
}

bool is_agent_key(PropertyKey k) {
  return k == PropertyKey::kAgent || k == PropertyKey::kAgentA || k == PropertyKey::kAgentB ||
         k == PropertyKey::kReceiverAgent || k == PropertyKey::kSenderAgent;
}

bool is_entity_key(PropertyKey k) {
  return k == PropertyKey::kEntity || k == PropertyKey::kEntityA || k == PropertyKey::kEntityB;
}

std::string value_to_string(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return std::to_string(std::get<std::int64_t>(v));
}

const std::string& LogicalForm::token(PropertyKey k) const {
  auto it = args.find(k);
  if (it == args.end())
    throw FormalismError("missing " + std::string(to_string(k)));
  const auto* s = std::get_if<std::string>(&it->second);
  if (s == nullptr)
    throw FormalismError(std::string(to_string(k)) + " is not a token");
  return *s;
}

std::int64_t LogicalForm::quantity() const {
  auto it = args.find(PropertyKey::kQuantity);
  if (it == args.end()) throw FormalismError("missing quantity");
  const auto* q = std::get_if<std::int64_t>(&it->second);
  if (q == nullptr) throw FormalismError("quantity is not an explicit number");
  return *q;
}

std::optional<std::string> LogicalForm::optional_token(PropertyKey k) const {
  if (!has(k)) return std::nullopt;
  return token(k);
}

std::vector<std::string> validate_form(const LogicalForm& lf, FormLevel level) {
  std::vector<std::string> out;
  const Schema& schema = schema_for(lf.predicate);
  for (PropertyKey k : schema.required)
    if (!lf.has(k)) out.push_back("missing " + std::string(to_string(k)));
  for (const auto& [k, v] : lf.args) {
    const bool known = std::count(schema.required.begin(), schema.required.end(), k) ||
                       std::count(schema.optional.begin(), schema.optional.end(), k);
    if (!known) {
      out.push_back("unexpected argument " + std::string(to_string(k)));
      continue;
    }
    if (k == PropertyKey::kQuantity) {
      if (level == FormLevel::kModel) {
        const auto* q = std::get_if<std::int64_t>(&v);
        if (q == nullptr)
          out.push_back("quantity must be an explicit number");
        else if (*q < 0)
          out.push_back("negative quantity");
      } else if (!std::holds_alternative<std::string>(v)) {
        out.push_back("quantity must be a placeholder");
      }
      continue;
    }
    const auto* s = std::get_if<std::string>(&v);
    if (s == nullptr || s->empty()) {
      out.push_back(std::string(to_string(k)) + " must be a non-empty token");
      continue;
    }
    if (k == PropertyKey::kType && *s != kAdditive && *s != kMultiplicative)
      out.push_back("invalid comparison type " + *s);
  }
  if (lf.predicate == Predicate::kTransfer && !lf.has(PropertyKey::kReceiverAgent) &&
      !lf.has(PropertyKey::kSenderAgent))
    out.push_back("missing agent");
  const auto same = [&](PropertyKey a, PropertyKey b) {
    return lf.has(a) && lf.has(b) && lf.args.at(a) == lf.args.at(b);
  };
  if (same(PropertyKey::kReceiverAgent, PropertyKey::kSenderAgent))
    out.push_back("receiver_agent and sender_agent coincide");
  if (same(PropertyKey::kAgentA, PropertyKey::kAgentB)) out.push_back("agentA and agentB coincide");
  if (same(PropertyKey::kEntityA, PropertyKey::kEntityB)) out.push_back("entityA and entityB coincide");
  return out;
}

std::vector<std::string> validate_model(const MentalModel& mm) {
  std::vector<std::string> out;
  if (mm.forms.empty()) {
    out.push_back("empty mental model");
    return out;
  }
  if (mm.forms.front().predicate != Predicate::kContainer)
    out.push_back("first form is not a container");
  for (std::size_t i = 0; i < mm.forms.size(); ++i)
    for (const auto& v : validate_form(mm.forms[i]))
      out.push_back("form " + std::to_string(i) + ": " + v);
  return out;
}

std::optional<QuestionTarget> final_query(const std::vector<LogicalForm>& forms) {
  Known known;
  std::optional<QuestionTarget> last;
  for (const auto& lf : forms) {
    bool ok = true;
    last = advance(lf, known, ok);
    if (!ok) return std::nullopt;
  }
  return last;
}

std::pair<ProblemStructure, Binding> abstract(const MentalModel& mm) {
  const auto violations = validate_model(mm);
  if (!violations.empty()) throw FormalismError("invalid mental model: " + violations.front());

  ProblemStructure s;
  Binding b;
  std::map<std::string, int> counters;
  std::map<std::pair<std::string, std::string>, std::string> seen;  // (prefix, token) -> placeholder
  const auto fresh = [&](const std::string& prefix) {
    return prefix + std::to_string(++counters[prefix]);
  };

  for (const auto& lf : mm.forms) {
    LogicalForm out{lf.predicate, {}};
    for (const auto& [k, v] : lf.args) {
      if (k == PropertyKey::kType) {
        out.args[k] = v;
        continue;
      }
      const std::string prefix = placeholder_prefix(k);
      if (k == PropertyKey::kQuantity) {
        const std::string ph = fresh(prefix);
        b[ph] = v;
        out.args[k] = ph;
        continue;
      }
      const std::string tok = std::get<std::string>(v);
      auto [it, inserted] = seen.try_emplace({prefix, tok});
      if (inserted) {
        it->second = fresh(prefix);
        b[it->second] = tok;
      }
      out.args[k] = it->second;
    }
    s.forms.push_back(std::move(out));
  }

  if (auto q = final_query(mm.forms)) {
    s.question.agent = seen.at({"agent", q->agent});
    s.question.entity = seen.at({"entity", q->entity});
  } else {
    throw FormalismError("invalid mental model: last form does not derive a queryable quantity");
  }
  return {std::move(s), std::move(b)};
}

namespace {

LogicalForm substitute_form(const LogicalForm& lf, const Binding& b, bool partial) {
  LogicalForm out{lf.predicate, {}};
  for (const auto& [k, v] : lf.args) {
    const auto* ph = std::get_if<std::string>(&v);
    if (k == PropertyKey::kType || ph == nullptr) {
      out.args[k] = v;
      continue;
    }
    auto it = b.find(*ph);
    if (it == b.end()) {
      if (partial) {
        out.args[k] = v;
        continue;
      }
      throw FormalismError("unbound placeholder " + *ph);
    }
    const bool want_int = k == PropertyKey::kQuantity;
    if (want_int != std::holds_alternative<std::int64_t>(it->second))
      throw FormalismError("type mismatch for placeholder " + *ph + ": expected " +
                           (want_int ? "an integer" : "a token"));
    out.args[k] = it->second;
  }
  return out;
}

}  // namespace

MentalModel substitute(const ProblemStructure& s, const Binding& b) {
  MentalModel mm;
  mm.forms.reserve(s.forms.size());
  for (const auto& lf : s.forms) mm.forms.push_back(substitute_form(lf, b, false));
  return mm;
}

ProblemStructure substitute_partial(const ProblemStructure& s, const Binding& b) {
  ProblemStructure out;
  out.forms.reserve(s.forms.size());
  for (const auto& lf : s.forms) out.forms.push_back(substitute_form(lf, b, true));
  out.question = s.question;
  for (std::string* field : {&out.question.agent, &out.question.entity}) {
    auto it = b.find(*field);
    if (it != b.end() && std::holds_alternative<std::string>(it->second))
      *field = std::get<std::string>(it->second);
  }
  return out;
}

std::size_t count_steps(const std::vector<LogicalForm>& forms) {
  return static_cast<std::size_t>(std::count_if(forms.begin(), forms.end(), [](const LogicalForm& lf) {
    return lf.predicate != Predicate::kContainer;
  }));
}

nlohmann::ordered_json to_json(const LogicalForm& lf) {
  nlohmann::ordered_json args = nlohmann::ordered_json::object();
  for (const auto& [k, v] : lf.args) {
    if (const auto* s = std::get_if<std::string>(&v))
      args[std::string(to_string(k))] = *s;
    else
      args[std::string(to_string(k))] = std::get<std::int64_t>(v);
  }
  nlohmann::ordered_json j;
  j["predicate"] = std::string(to_string(lf.predicate));
  j["args"] = std::move(args);
  return j;
}

nlohmann::ordered_json to_json(const MentalModel& mm) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& lf : mm.forms) arr.push_back(to_json(lf));
  return arr;
}

LogicalForm logical_form_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("predicate") || !j.contains("args"))
    throw FormalismError("logical form must be an object with predicate and args");
  const auto& pj = j.at("predicate");
  if (!pj.is_string()) throw FormalismError("predicate must be a string");
  auto pred = parse_predicate(pj.get<std::string>());
  if (!pred) throw FormalismError("unknown predicate " + pj.get<std::string>());
  LogicalForm lf{*pred, {}};
  const auto& args = j.at("args");
  if (!args.is_object()) throw FormalismError("args must be an object");
  for (const auto& [name, v] : args.items()) {
    auto key = parse_property_key(name);
    if (!key) throw FormalismError("unknown property " + name);
    if (v.is_string())
      lf.args[*key] = v.get<std::string>();
    else if (v.is_number_integer())
      lf.args[*key] = v.get<std::int64_t>();
    else
      throw FormalismError("property " + name + " must be a string or an integer");
  }
  return lf;
}

MentalModel mental_model_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw FormalismError("mental model must be an array");
  MentalModel mm;
  for (const auto& f : j) mm.forms.push_back(logical_form_from_json(f));
  return mm;
}

}  // namespace mwp
