// Logical representation of arithmetic word problems.
//
// A LogicalForm is one predicate applied to property arguments and carries the
// semantics of one sentence. A MentalModel is the ordered sequence of forms of
// a whole problem. A ProblemStructure is the same sequence with every value
// (except the comparison `type`) replaced by a placeholder; a Binding maps the
// placeholders back to values.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace mwp {

enum class Predicate { kContainer, kTransfer, kComparison, kRate };

// Declaration order is the canonical argument order (serialization and
// placeholder numbering both follow it).
enum class PropertyKey {
  kAgent,
  kAgentA,
  kAgentB,
  kReceiverAgent,
  kSenderAgent,
  kEntity,
  kEntityA,
  kEntityB,
  kAttribute,
  kUnit,
  kQuantity,
  kType,
};

inline constexpr std::string_view kAdditive = "additive";
inline constexpr std::string_view kMultiplicative = "multiplicative";

std::string_view to_string(Predicate p);
std::string_view to_string(PropertyKey k);
std::optional<Predicate> parse_predicate(std::string_view s);
std::optional<PropertyKey> parse_property_key(std::string_view s);

bool is_agent_key(PropertyKey k);
bool is_entity_key(PropertyKey k);

// Token (vocabulary word or placeholder) or a non-negative quantity.
using Value = std::variant<std::string, std::int64_t>;

std::string value_to_string(const Value& v);

class FormalismError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LogicalForm {
  Predicate predicate = Predicate::kContainer;
  std::map<PropertyKey, Value> args;

  bool has(PropertyKey k) const { return args.count(k) != 0; }
  // Throws FormalismError when the argument is absent or not a token.
  const std::string& token(PropertyKey k) const;
  // Throws FormalismError when the argument is absent or not an integer.
  std::int64_t quantity() const;
  std::optional<std::string> optional_token(PropertyKey k) const;

  friend bool operator==(const LogicalForm&, const LogicalForm&) = default;
};

struct MentalModel {
  std::vector<LogicalForm> forms;

  friend bool operator==(const MentalModel&, const MentalModel&) = default;
};

// The (agent, entity) whose quantity a question asks about.
struct QuestionTarget {
  std::string agent;
  std::string entity;

  friend bool operator==(const QuestionTarget&, const QuestionTarget&) = default;
};

struct ProblemStructure {
  std::vector<LogicalForm> forms;
  // Refers to the quantity derived by the last form.
  QuestionTarget question;

  friend bool operator==(const ProblemStructure&, const ProblemStructure&) = default;
};

using Binding = std::map<std::string, Value>;

enum class FormLevel {
  kModel,      // quantities must be explicit non-negative integers
  kStructure,  // quantities must be placeholders
};

// Table-driven schema check. Returns human-readable violations, empty when the
// form is well formed.
std::vector<std::string> validate_form(const LogicalForm& lf,
                                       FormLevel level = FormLevel::kModel);

// validate_form over every form plus the model-level rules (non-empty, first
// form is a container).
std::vector<std::string> validate_model(const MentalModel& mm);

// Symbolically tracks which (agent, entity) quantities are known after each
// form and returns the one produced by the last form. Returns nullopt when a
// form cannot be resolved or the last form is not a reasoning step.
std::optional<QuestionTarget> final_query(const std::vector<LogicalForm>& forms);

// Replaces every value with a canonical placeholder. Equal tokens share a
// placeholder; every quantity slot gets its own. Throws FormalismError on an
// invalid mental model.
std::pair<ProblemStructure, Binding> abstract(const MentalModel& mm);

// Inverse of abstract. Throws FormalismError on an unbound placeholder or when
// a token is bound to a quantity slot (or an integer to a token slot).
MentalModel substitute(const ProblemStructure& s, const Binding& b);

// Substitutes only the placeholders present in `b`, leaving others intact.
// Used to evaluate a structure's arithmetic before lexical instantiation.
ProblemStructure substitute_partial(const ProblemStructure& s, const Binding& b);

std::size_t count_steps(const std::vector<LogicalForm>& forms);

nlohmann::ordered_json to_json(const LogicalForm& lf);
nlohmann::ordered_json to_json(const MentalModel& mm);
LogicalForm logical_form_from_json(const nlohmann::json& j);
MentalModel mental_model_from_json(const nlohmann::json& j);

}  // namespace mwp
