// Binds problem structures to vocabulary tokens and numbers.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>

#include "mwp/formalism.h"
#include "mwp/rng.h"
#include "mwp/solver.h"
#include "mwp/vocabulary.h"

namespace mwp {

class InstantiationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NumberRange {
  std::int64_t quantity_min = 2;
  std::int64_t quantity_max = 20;
  std::int64_t intermediate_min = 0;
  std::int64_t intermediate_max = 999;
  int max_attempts = 10000;
};

// Distinct placeholders receive distinct tokens. Entities paired with a unit
// or attribute are drawn only from entities that support one, and the unit or
// attribute is drawn from that entity's own list.
Binding instantiate_lexical(const ProblemStructure& s, const Vocabulary& v, Rng& rng);

// Draws one quantity per predicate independently and uniformly from the
// quantity range, then re-derives; any draw whose intermediates leave the
// intermediate range (or that divides inexactly) is rejected and redrawn.
// Throws InstantiationError after max_attempts rejections.
Binding instantiate_numbers(const ProblemStructure& s, Rng& rng, const NumberRange& range = {});

struct CarryOperands {
  std::int64_t container = 0;   // first operand (quantity of the known agent)
  std::int64_t comparison = 0;  // second operand (comparison quantity)
  std::int64_t answer = 0;
};

struct CarryPair {
  CarryOperands no_carry;
  CarryOperands carry;
};

// Samples an answer uniformly in the band where operands and answer are all
// three-digit, then rejection-samples one operand pair without any carry and
// one with at least one carry. A new answer is drawn when either side cannot
// be found. Throws InstantiationError if no answer works within the cap.
CarryPair instantiate_carry_pair(ArithOp op, Rng& rng, int max_attempts = 10000);

// Binding for a carry structure's two quantity placeholders.
Binding carry_binding(const ProblemStructure& s, const CarryOperands& operands);

}  // namespace mwp
