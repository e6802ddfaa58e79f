#include "mwp/solver.h"

#include <map>
#include <optional>
#include <utility>

namespace mwp {
namespace {

struct Quantity {
  std::int64_t value;
  Premise source;
};

using State = std::map<std::pair<std::string, std::string>, Quantity>;

std::int64_t apply(ArithOp op, std::int64_t y, std::int64_t z) {
  std::int64_t r = 0;
  switch (op) {
    case ArithOp::kAdd:
      if (__builtin_add_overflow(y, z, &r)) throw DerivationError("overflow");
      break;
    case ArithOp::kSubtract:
      r = y - z;
      break;
    case ArithOp::kMultiply:
      if (__builtin_mul_overflow(y, z, &r)) throw DerivationError("overflow");
      break;
    case ArithOp::kDivide:
      if (z == 0) throw DerivationError("division by zero");
      if (y % z != 0)
        throw DerivationError("non-integer division " + std::to_string(y) + " / " + std::to_string(z));
      r = y / z;
      break;
  }
  if (r < 0)
    throw DerivationError("negative intermediate " + std::to_string(y) + " " + symbol(op) + " " +
                          std::to_string(z));
  return r;
}

}  // namespace

char symbol(ArithOp op) {
  switch (op) {
    case ArithOp::kAdd: return '+';
    case ArithOp::kSubtract: return '-';
    case ArithOp::kMultiply: return '*';
    case ArithOp::kDivide: return '/';
  }
  return '?';
}

bool Equation::well_formed() const {
  return (lhs.is_variable ? 1 : 0) + (y.is_variable ? 1 : 0) + (z.is_variable ? 1 : 0) == 1;
}

std::string Equation::to_string() const {
  const auto term = [](const Term& t) { return t.is_variable ? std::string("x") : std::to_string(t.value); };
  return term(lhs) + " = " + term(y) + " " + symbol(op) + " " + term(z);
}

Derivation derive(const MentalModel& mm) {
  const auto violations = validate_model(mm);
  if (!violations.empty()) throw DerivationError("invalid mental model: " + violations.front());

  State state;
  Derivation d;
  const auto lookup = [&](const std::string& agent, const std::string& entity) -> const Quantity* {
    auto it = state.find({agent, entity});
    return it == state.end() ? nullptr : &it->second;
  };

  for (std::size_t i = 0; i < mm.forms.size(); ++i) {
    const LogicalForm& lf = mm.forms[i];
    const std::int64_t q = lf.quantity();
    const Premise axiom{Premise::Kind::kAxiom, i};

    if (lf.predicate == Predicate::kContainer) {
      state[{lf.token(PropertyKey::kAgent), lf.token(PropertyKey::kEntity)}] = {q, axiom};
      continue;
    }

    const Quantity* known = nullptr;
    ArithOp op = ArithOp::kAdd;
    QuestionTarget target;

    switch (lf.predicate) {
      case Predicate::kTransfer: {
        const std::string& entity = lf.token(PropertyKey::kEntity);
        const auto receiver = lf.optional_token(PropertyKey::kReceiverAgent);
        const auto sender = lf.optional_token(PropertyKey::kSenderAgent);
        const Quantity* r = receiver ? lookup(*receiver, entity) : nullptr;
        const Quantity* s = sender ? lookup(*sender, entity) : nullptr;
        if (r != nullptr && s != nullptr)
          throw DerivationError("form " + std::to_string(i) +
                                ": transfer between two agents with known quantities");
        if (r == nullptr && s == nullptr)
          throw DerivationError("form " + std::to_string(i) + ": unresolvable transfer");
        known = r != nullptr ? r : s;
        op = r != nullptr ? ArithOp::kAdd : ArithOp::kSubtract;
        target = {r != nullptr ? *receiver : *sender, entity};
        break;
      }
      case Predicate::kComparison: {
        const std::string& entity = lf.token(PropertyKey::kEntity);
        const std::string& a = lf.token(PropertyKey::kAgentA);
        const std::string& b = lf.token(PropertyKey::kAgentB);
        const bool additive = lf.token(PropertyKey::kType) == kAdditive;
        const Quantity* qa = lookup(a, entity);
        const Quantity* qb = lookup(b, entity);
        if (qa != nullptr && qb != nullptr)
          throw DerivationError("form " + std::to_string(i) + ": comparison of two known quantities");
        if (qa == nullptr && qb == nullptr)
          throw DerivationError("form " + std::to_string(i) + ": unresolvable comparison");
        // agentB = agentA + q (additive) or agentA * q (multiplicative).
        if (qa != nullptr) {
          known = qa;
          op = additive ? ArithOp::kAdd : ArithOp::kMultiply;
          target = {b, entity};
        } else {
          known = qb;
          op = additive ? ArithOp::kSubtract : ArithOp::kDivide;
          target = {a, entity};
        }
        break;
      }
      case Predicate::kRate: {
        // agent's entityA = q * agent's entityB
        const std::string& agent = lf.token(PropertyKey::kAgent);
        const std::string& ea = lf.token(PropertyKey::kEntityA);
        const std::string& eb = lf.token(PropertyKey::kEntityB);
        const Quantity* qa = lookup(agent, ea);
        const Quantity* qb = lookup(agent, eb);
        if (qa != nullptr && qb != nullptr)
          throw DerivationError("form " + std::to_string(i) + ": rate between two known quantities");
        if (qa == nullptr && qb == nullptr)
          throw DerivationError("form " + std::to_string(i) + ": unresolvable rate");
        if (qb != nullptr) {
          known = qb;
          op = ArithOp::kMultiply;
          target = {agent, ea};
        } else {
          known = qa;
          op = ArithOp::kDivide;
          target = {agent, eb};
        }
        break;
      }
      case Predicate::kContainer:
        break;
    }

    ReasoningStep step;
    step.equation = {Term::variable(), op, Term::number(known->value), Term::number(q)};
    step.premises = {known->source, axiom};
    step.result = apply(op, known->value, q);
    step.form_index = i;
    step.target = target;
    state[{target.agent, target.entity}] = {step.result, Premise{Premise::Kind::kStep, d.steps.size()}};
    d.steps.push_back(std::move(step));
  }

  if (d.steps.empty() || d.steps.back().form_index + 1 != mm.forms.size())
    throw DerivationError("last form is not a reasoning step");
  d.answer = d.steps.back().result;
  return d;
}

bool is_linear(const Derivation& d) {
  for (const auto& step : d.steps) {
    int derived = 0;
    for (const auto& p : step.premises)
      if (p.kind == Premise::Kind::kStep) ++derived;
    if (derived > 1) return false;
  }
  return true;
}

nlohmann::ordered_json to_json(const Derivation& d) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& s : d.steps) {
    nlohmann::ordered_json j;
    j["equation"] = s.equation.to_string();
    j["result"] = s.result;
    arr.push_back(std::move(j));
  }
  return arr;
}

CarryProfile carry_profile(int a, int b, ArithOp op) {
  if (op != ArithOp::kAdd && op != ArithOp::kSubtract)
    throw CarryError("carry_profile: only + and - are supported");
  if (a < 0 || a > 999 || b < 0 || b > 999) throw CarryError("carry_profile: operand out of range [0, 999]");
  if (op == ArithOp::kSubtract && a < b) throw CarryError("carry_profile: negative result");

  CarryProfile p;
  p.op = op;
  int incoming = 0;
  for (int col = 0; col < 3; ++col) {
    const int da = a % 10;
    const int db = b % 10;
    a /= 10;
    b /= 10;
    bool out;
    if (op == ArithOp::kAdd)
      out = da + db + incoming >= 10;
    else
      out = da - incoming < db;
    p.columns[col] = out;
    incoming = out ? 1 : 0;
    if (out) ++p.count;
  }
  return p;
}

}  // namespace mwp
