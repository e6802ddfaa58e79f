// Templated English rendering of mental models and the inverse parser used to
// check that a text is faithful to its mental model.
//
// Template file: UTF-8 JSON array of {"predicate", "pattern", "flags"}.
// `predicate` is a predicate name or "question". Slots are written
// "{agentA}", "{quantity}", "{entity:plural}", "{entityB:singular}". Entity
// slots render the full noun phrase, including the unit and attribute of the
// entity as declared by its container ("kilograms of red apples").
// Comparison templates carry flags {"type": additive|multiplicative,
// "subject": agentA|agentB}; transfer templates may carry {"subject": ...}.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mwp/formalism.h"
#include "mwp/rng.h"
#include "mwp/vocabulary.h"

namespace mwp {

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RenderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { kNoParse, kAmbiguous };
  ParseError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

enum class NounForm { kPlural, kSingular };

struct TemplatePiece {
  bool is_slot = false;
  std::string literal;            // literal text when !is_slot
  PropertyKey key{};              // slot key
  NounForm noun = NounForm::kPlural;
};

struct Template {
  // nullopt for question templates.
  std::optional<Predicate> predicate;
  std::string pattern;
  std::map<std::string, std::string> flags;
  std::vector<TemplatePiece> pieces;

  bool is_question() const { return !predicate.has_value(); }
  std::set<PropertyKey> slots() const;
  std::optional<std::string> flag(const std::string& name) const;
};

// Throws TemplateError when the pattern has adjacent slots, unknown keys,
// malformed braces, or a slot set that does not match the predicate schema.
Template make_template(const std::string& predicate, const std::string& pattern,
                       std::map<std::string, std::string> flags = {});

class TemplateLibrary {
 public:
  TemplateLibrary() = default;
  explicit TemplateLibrary(std::vector<Template> templates);

  static TemplateLibrary from_json(const nlohmann::json& j);
  static TemplateLibrary load(const std::filesystem::path& path);
  static const TemplateLibrary& builtin();

  const std::vector<Template>& templates() const { return templates_; }
  const Template& at(std::size_t i) const { return templates_.at(i); }

  // Indices of templates whose slot set and flags fit the form.
  std::vector<std::size_t> candidates(const LogicalForm& lf) const;
  std::vector<std::size_t> questions() const;

 private:
  std::vector<Template> templates_;
};

enum class Orientation { kConsistent, kInconsistent };

// A comparison sentence is consistent when its grammatical subject is the
// agent whose quantity the comparison solves for.
Orientation comparison_orientation(const Template& t, const QuestionTarget& solved, const LogicalForm& lf);

// What each form solves for, from the known quantities alone; nullopt for
// containers. Throws RenderError when a form cannot be resolved.
std::vector<std::optional<QuestionTarget>> form_targets(const MentalModel& mm);

struct RenderConstraints {
  // form index -> required orientation of that comparison sentence
  std::map<std::size_t, Orientation> orientation;
};

// One template index per form plus the question template.
struct RenderPlan {
  std::vector<std::size_t> forms;
  std::size_t question = 0;

  friend bool operator==(const RenderPlan&, const RenderPlan&) = default;
};

class Renderer {
 public:
  Renderer(const TemplateLibrary& templates, const Vocabulary& vocab) : templates_(templates), vocab_(vocab) {}

  const TemplateLibrary& templates() const { return templates_; }
  const Vocabulary& vocab() const { return vocab_; }

  // Uniform template per form (within the pinned orientation where
  // constrained) and a uniform question template.
  RenderPlan sample_plan(const MentalModel& mm, Rng& rng, const RenderConstraints& constraints = {}) const;

  // One sentence per form, in order, followed by the question.
  std::vector<std::string> render_sentences(const MentalModel& mm, const RenderPlan& plan) const;
  std::string render(const MentalModel& mm, const RenderPlan& plan) const;

  std::string render_problem(const MentalModel& mm, Rng& rng, const RenderConstraints& constraints = {}) const;

  // Texts that share every sentence except the comparison, which is
  // consistent in the first and inconsistent in the second.
  std::pair<std::string, std::string> render_consistency_pair(const MentalModel& mm, Rng& rng) const;

  struct ParseResult {
    MentalModel model;
    RenderPlan plan;
  };

  // Recovers the unique mental model whose rendering under some template
  // choice reproduces the text. Throws ParseError.
  ParseResult parse(const std::string& text) const;

  bool check_faithfulness(const std::string& text, const MentalModel& mm) const;

 private:
  const TemplateLibrary& templates_;
  const Vocabulary& vocab_;
};

// Splits on '.', '?' or '!' followed by whitespace or end of text.
std::vector<std::string> split_sentences(const std::string& text);

}  // namespace mwp
