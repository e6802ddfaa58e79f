// Symbolic-expression level: one-variable equations derived from the concept
// forms of a mental model, their evaluation, linearity, and carry analysis.
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mwp/formalism.h"

namespace mwp {

enum class ArithOp { kAdd, kSubtract, kMultiply, kDivide };

char symbol(ArithOp op);

// A value or the single unknown of an equation.
struct Term {
  bool is_variable = false;
  std::int64_t value = 0;

  static Term variable() { return {true, 0}; }
  static Term number(std::int64_t v) { return {false, v}; }

  friend bool operator==(const Term&, const Term&) = default;
};

// lhs = y op z with exactly one variable among the three terms.
struct Equation {
  Term lhs;
  ArithOp op = ArithOp::kAdd;
  Term y;
  Term z;

  bool well_formed() const;
  // "x = 15 + 18"
  std::string to_string() const;

  friend bool operator==(const Equation&, const Equation&) = default;
};

struct Premise {
  enum class Kind { kAxiom, kStep };
  Kind kind = Kind::kAxiom;
  std::size_t index = 0;  // form index for axioms, step index for steps

  friend bool operator==(const Premise&, const Premise&) = default;
};

struct ReasoningStep {
  Equation equation;
  std::vector<Premise> premises;
  std::int64_t result = 0;
  std::size_t form_index = 0;
  QuestionTarget target;  // quantity the step solves for
};

struct Derivation {
  std::vector<ReasoningStep> steps;
  std::int64_t answer = 0;
};

class DerivationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evaluates the forms strictly in sentence order. Container forms are axioms;
// every other form yields one step. Throws DerivationError on an unresolvable
// reference, a negative intermediate, or inexact division.
Derivation derive(const MentalModel& mm);

// True iff every step has at most one non-axiom premise.
bool is_linear(const Derivation& d);

// Serialized form: [{"equation": "x = 15 + 18", "result": 33}, ...]
nlohmann::ordered_json to_json(const Derivation& d);

struct CarryProfile {
  // units, tens, hundreds
  std::array<bool, 3> columns{};
  int count = 0;
  ArithOp op = ArithOp::kAdd;
};

class CarryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Schoolbook column simulation for three-digit operands. Addition carries out
// of a column when digit sum plus incoming carry reaches 10; subtraction
// borrows when the minuend digit minus the incoming borrow is below the
// subtrahend digit. Requires 0 <= a, b <= 999, and a >= b for subtraction.
CarryProfile carry_profile(int a, int b, ArithOp op);

}  // namespace mwp
