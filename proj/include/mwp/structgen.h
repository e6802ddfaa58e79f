// Problem-structure samplers for the three bias tests.
//
//   consistency:            container (transfer|rate){0,2} comparison (transfer|rate){0,2}
//   transfer vs comparison: container transfer{k}  /  container comparison{k},  k in [1, 5]
//   carry:                  container comparison(additive)
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mwp/formalism.h"
#include "mwp/rng.h"
#include "mwp/solver.h"

namespace mwp {

enum class TestKind { kConsistency, kTransferVsComparison, kCarry };

// x is the condition under which human learners do better: consistent
// phrasing, transfer, no carry.
enum class Condition { kX, kXPrime };

std::string_view to_string(TestKind t);
std::optional<TestKind> parse_test_kind(std::string_view s);
std::string_view to_string(Condition c);
std::optional<Condition> parse_condition(std::string_view s);

struct TestSpec {
  TestKind test;
  int min_steps;
  int max_steps;
  // Regular pattern over predicate letters (C container, T transfer,
  // K comparison, R rate).
  std::string pattern;
};

const TestSpec& test_spec(TestKind t);

// Returns a description of the first pattern violation, or nullopt when the
// forms conform to the test's pattern for the given condition.
std::optional<std::string> pattern_violation(TestKind test, Condition condition,
                                             const std::vector<LogicalForm>& forms);

ProblemStructure gen_consistency_structure(Rng& rng);

// (transfer structure, comparison structure) sharing agent and quantity
// placeholders sentence by sentence.
std::pair<ProblemStructure, ProblemStructure> gen_tc_structures(Rng& rng);

// The operator is sampled: querying agentB gives container + q, querying
// agentA gives container - q.
ProblemStructure gen_carry_structure(Rng& rng);

// + or - depending on which comparison side the question queries.
ArithOp carry_operation(const ProblemStructure& s);

}  // namespace mwp
