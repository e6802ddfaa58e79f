#include "mwp/structgen.h"

#include <map>
#include <regex>
#include <set>

namespace mwp {
namespace {

using K = PropertyKey;

class PlaceholderPool {
 public:
  std::string next(const std::string& prefix) { return prefix + std::to_string(++counters_[prefix]); }
  std::string agent() { return next("agent"); }
  std::string entity() { return next("entity"); }
  std::string quantity() { return next("q"); }

 private:
  std::map<std::string, int> counters_;
};

LogicalForm container(PlaceholderPool& pool, const std::string& agent, const std::string& entity) {
  LogicalForm lf{Predicate::kContainer, {}};
  lf.args[K::kAgent] = agent;
  lf.args[K::kEntity] = entity;
  lf.args[K::kQuantity] = pool.quantity();
  return lf;
}

// Each entity is paired with an attribute, a unit, or neither.
void assign_descriptor(LogicalForm& container_form, PlaceholderPool& pool, Rng& rng) {
  switch (rng.uniform(0, 2)) {
    case 0:
      container_form.args[K::kAttribute] = pool.next("attribute");
      break;
    case 1:
      container_form.args[K::kUnit] = pool.next("unit");
      break;
    default:
      break;
  }
}

LogicalForm transfer(const std::string& quantity, const std::optional<std::string>& receiver,
                     const std::optional<std::string>& sender, const std::string& entity) {
  LogicalForm lf{Predicate::kTransfer, {}};
  if (receiver) lf.args[K::kReceiverAgent] = *receiver;
  if (sender) lf.args[K::kSenderAgent] = *sender;
  lf.args[K::kEntity] = entity;
  lf.args[K::kQuantity] = quantity;
  return lf;
}

LogicalForm comparison(const std::string& quantity, std::string_view type, const std::string& agent_a,
                       const std::string& agent_b, const std::string& entity) {
  LogicalForm lf{Predicate::kComparison, {}};
  lf.args[K::kType] = std::string(type);
  lf.args[K::kAgentA] = agent_a;
  lf.args[K::kAgentB] = agent_b;
  lf.args[K::kEntity] = entity;
  lf.args[K::kQuantity] = quantity;
  return lf;
}

char letter(Predicate p) {
  switch (p) {
    case Predicate::kContainer: return 'C';
    case Predicate::kTransfer: return 'T';
    case Predicate::kComparison: return 'K';
    case Predicate::kRate: return 'R';
  }
  return '?';
}

}  // namespace

std::string_view to_string(TestKind t) {
  switch (t) {
    case TestKind::kConsistency: return "consistency";
    case TestKind::kTransferVsComparison: return "transfer_vs_comparison";
    case TestKind::kCarry: return "carry";
  }
  return "?";
}

std::optional<TestKind> parse_test_kind(std::string_view s) {
  for (TestKind t : {TestKind::kConsistency, TestKind::kTransferVsComparison, TestKind::kCarry})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

std::string_view to_string(Condition c) { return c == Condition::kX ? "x" : "xprime"; }

std::optional<Condition> parse_condition(std::string_view s) {
  if (s == "x") return Condition::kX;
  if (s == "xprime") return Condition::kXPrime;
  return std::nullopt;
}

const TestSpec& test_spec(TestKind t) {
  static const TestSpec consistency{TestKind::kConsistency, 1, 5, "C[TR]{0,2}K[TR]{0,2}"};
  static const TestSpec tc{TestKind::kTransferVsComparison, 1, 5, "C(T{1,5}|K{1,5})"};
  static const TestSpec carry{TestKind::kCarry, 1, 1, "CK"};
  switch (t) {
    case TestKind::kConsistency: return consistency;
    case TestKind::kTransferVsComparison: return tc;
    case TestKind::kCarry: return carry;
  }
  return consistency;
}

std::optional<std::string> pattern_violation(TestKind test, Condition condition,
                                             const std::vector<LogicalForm>& forms) {
  std::string letters;
  for (const auto& lf : forms) letters.push_back(letter(lf.predicate));

  std::string pattern = test_spec(test).pattern;
  if (test == TestKind::kTransferVsComparison)
    pattern = condition == Condition::kX ? "CT{1,5}" : "CK{1,5}";
  if (!std::regex_match(letters, std::regex(pattern)))
    return "predicate sequence " + letters + " does not match " + pattern;

  const auto steps = static_cast<int>(count_steps(forms));
  if (steps < test_spec(test).min_steps || steps > test_spec(test).max_steps)
    return "step count " + std::to_string(steps) + " out of range";

  std::set<std::string> agents;
  for (const auto& lf : forms) {
    for (const auto& [k, v] : lf.args)
      if (is_agent_key(k)) agents.insert(value_to_string(v));
    if (lf.predicate == Predicate::kComparison && test != TestKind::kConsistency &&
        value_to_string(lf.args.at(K::kType)) != kAdditive)
      return "comparison must be additive";
    if (test == TestKind::kConsistency && lf.predicate == Predicate::kTransfer &&
        lf.has(K::kReceiverAgent) && lf.has(K::kSenderAgent))
      return "transfer introduces a counterparty agent";
    if (test != TestKind::kConsistency && lf.predicate == Predicate::kRate)
      return "rate not allowed in this test";
  }
  // One agent from the container plus one per agent-introducing sentence.
  const std::size_t expected_agents = test == TestKind::kConsistency ? 2 : static_cast<std::size_t>(steps) + 1;
  if (agents.size() != expected_agents)
    return "expected " + std::to_string(expected_agents) + " distinct agents, found " +
           std::to_string(agents.size());
  return std::nullopt;
}

ProblemStructure gen_consistency_structure(Rng& rng) {
  const int total = static_cast<int>(rng.uniform(1, 5));
  std::vector<std::pair<int, int>> splits;
  for (int pre = 0; pre <= 2; ++pre) {
    const int post = total - 1 - pre;
    if (post >= 0 && post <= 2) splits.emplace_back(pre, post);
  }
  const auto [pre, post] = rng.pick(splits);

  PlaceholderPool pool;
  ProblemStructure s;
  const std::string agent1 = pool.agent();
  std::string entity = pool.entity();
  s.forms.push_back(container(pool, agent1, entity));
  assign_descriptor(s.forms.back(), pool, rng);

  // Transfers have no counterparty so that only the comparison introduces an
  // agent; rates introduce the only new entities.
  const auto other = [&](const std::string& agent) {
    if (rng.coin()) {
      if (rng.coin())
        s.forms.push_back(transfer(pool.quantity(), agent, std::nullopt, entity));
      else
        s.forms.push_back(transfer(pool.quantity(), std::nullopt, agent, entity));
    } else {
      const std::string fresh = pool.entity();
      LogicalForm lf{Predicate::kRate, {}};
      lf.args[K::kAgent] = agent;
      lf.args[K::kEntityA] = fresh;
      lf.args[K::kEntityB] = entity;
      lf.args[K::kQuantity] = pool.quantity();
      s.forms.push_back(std::move(lf));
      entity = fresh;
    }
  };

  for (int i = 0; i < pre; ++i) other(agent1);

  const std::string agent2 = pool.agent();
  const std::string_view type = rng.coin() ? kAdditive : kMultiplicative;
  if (rng.coin())
    s.forms.push_back(comparison(pool.quantity(), type, agent1, agent2, entity));  // new agent is agentB
  else
    s.forms.push_back(comparison(pool.quantity(), type, agent2, agent1, entity));  // new agent is agentA

  for (int i = 0; i < post; ++i) other(agent2);

  s.question = {agent2, entity};
  return s;
}

std::pair<ProblemStructure, ProblemStructure> gen_tc_structures(Rng& rng) {
  const int k = static_cast<int>(rng.uniform(1, 5));
  PlaceholderPool pool;
  ProblemStructure transfers;
  ProblemStructure comparisons;

  const std::string agent1 = pool.agent();
  const std::string entity = pool.entity();
  transfers.forms.push_back(container(pool, agent1, entity));
  assign_descriptor(transfers.forms.back(), pool, rng);
  comparisons.forms.push_back(transfers.forms.back());

  std::string previous = agent1;
  for (int i = 0; i < k; ++i) {
    const std::string fresh = pool.agent();
    const bool gain = rng.coin();
    // Shared quantity placeholder and direction: both compute previous +/- q.
    const std::string q = pool.quantity();
    LogicalForm t = gain ? transfer(q, agent1, fresh, entity) : transfer(q, fresh, agent1, entity);
    LogicalForm c = gain ? comparison(q, kAdditive, previous, fresh, entity)
                         : comparison(q, kAdditive, fresh, previous, entity);
    transfers.forms.push_back(std::move(t));
    comparisons.forms.push_back(std::move(c));
    previous = fresh;
  }
  transfers.question = {agent1, entity};
  comparisons.question = {previous, entity};
  return {std::move(transfers), std::move(comparisons)};
}

ProblemStructure gen_carry_structure(Rng& rng) {
  PlaceholderPool pool;
  ProblemStructure s;
  const std::string agent1 = pool.agent();
  const std::string entity = pool.entity();
  s.forms.push_back(container(pool, agent1, entity));
  assign_descriptor(s.forms.back(), pool, rng);
  const std::string agent2 = pool.agent();
  if (rng.coin())
    s.forms.push_back(comparison(pool.quantity(), kAdditive, agent1, agent2, entity));
  else
    s.forms.push_back(comparison(pool.quantity(), kAdditive, agent2, agent1, entity));
  s.question = {agent2, entity};
  return s;
}

ArithOp carry_operation(const ProblemStructure& s) {
  if (s.forms.size() != 2 || s.forms[1].predicate != Predicate::kComparison)
    throw std::invalid_argument("carry_operation: not a carry structure");
  const LogicalForm& cmp = s.forms[1];
  return cmp.args.at(K::kAgentB) == s.forms[0].args.at(K::kAgent) ? ArithOp::kSubtract : ArithOp::kAdd;
}

}  // namespace mwp
