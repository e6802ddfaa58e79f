#include "mwp/render.h"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "mwp/builtin_data.h"

namespace mwp {
namespace {

using K = PropertyKey;

struct Descriptor {
  std::optional<std::string> attribute;
  std::optional<std::string> unit;

  friend bool operator==(const Descriptor&, const Descriptor&) = default;
};

using DescriptorMap = std::map<std::string, Descriptor>;

DescriptorMap descriptors_of(const MentalModel& mm) {
  DescriptorMap out;
  for (const auto& lf : mm.forms) {
    if (lf.predicate != Predicate::kContainer) continue;
    out.emplace(lf.token(K::kEntity),
                Descriptor{lf.optional_token(K::kAttribute), lf.optional_token(K::kUnit)});
  }
  return out;
}

std::set<K> expected_slots(const LogicalForm& lf) {
  std::set<K> out;
  for (const auto& [k, v] : lf.args)
    if (k != K::kAttribute && k != K::kUnit && k != K::kType) out.insert(k);
  return out;
}

std::string noun_phrase(const Vocabulary& vocab, const std::string& entity, const Descriptor& d, NounForm form) {
  std::string out;
  if (d.unit) {
    out = (form == NounForm::kPlural ? Vocabulary::unit_plural(*d.unit) : *d.unit) + " of ";
    if (d.attribute) out += *d.attribute + " ";
    return out + vocab.entity_plural(entity);
  }
  if (d.attribute) out = *d.attribute + " ";
  return out + (form == NounForm::kPlural ? vocab.entity_plural(entity) : entity);
}

struct DecodedNoun {
  std::string entity;
  Descriptor descriptor;
};

// Every (entity, attribute?) reading of "[attr ]noun" where noun is a plural
// (or singular) entity name.
void decode_bare(const Vocabulary& vocab, const std::string& text, NounForm form, const std::optional<std::string>& unit,
                 std::vector<DecodedNoun>& out) {
  const auto entity_of = [&](const std::string& s) -> std::optional<std::string> {
    if (form == NounForm::kPlural) return vocab.entity_from_plural(s);
    if (vocab.find_entity(s) != nullptr) return s;
    return std::nullopt;
  };
  if (auto e = entity_of(text)) out.push_back({*e, {std::nullopt, unit}});
  for (std::size_t sp = text.find(' '); sp != std::string::npos; sp = text.find(' ', sp + 1)) {
    const std::string attr = text.substr(0, sp);
    if (!vocab.is_attribute(attr)) continue;
    if (auto e = entity_of(text.substr(sp + 1))) out.push_back({*e, {attr, unit}});
  }
}

std::vector<DecodedNoun> decode_noun_phrase(const Vocabulary& vocab, const std::string& text, NounForm form) {
  std::vector<DecodedNoun> out;
  decode_bare(vocab, text, form, std::nullopt, out);
  // "<unit> of <[attr ]plural>"; the unit agrees in number, the entity is plural.
  static const std::string kOf = " of ";
  for (std::size_t p = text.find(kOf); p != std::string::npos; p = text.find(kOf, p + 1)) {
    const std::string head = text.substr(0, p);
    std::optional<std::string> unit;
    if (form == NounForm::kPlural)
      unit = vocab.unit_from_plural(head);
    else if (vocab.is_unit(head))
      unit = head;
    if (!unit) continue;
    decode_bare(vocab, text.substr(p + kOf.size()), NounForm::kPlural, unit, out);
  }
  return out;
}

std::optional<std::int64_t> decode_quantity(const std::string& s) {
  if (s.empty() || s.size() > 18) return std::nullopt;
  if (!std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; })) return std::nullopt;
  if (s.size() > 1 && s.front() == '0') return std::nullopt;
  return std::stoll(s);
}

using RawSlots = std::map<K, std::string>;

void split_slots(const Template& t, std::size_t piece, const std::string& s, std::size_t pos, RawSlots& raw,
                 std::vector<RawSlots>& out) {
  if (piece == t.pieces.size()) {
    if (pos == s.size()) out.push_back(raw);
    return;
  }
  const TemplatePiece& p = t.pieces[piece];
  if (!p.is_slot) {
    if (s.compare(pos, p.literal.size(), p.literal) == 0) split_slots(t, piece + 1, s, pos + p.literal.size(), raw, out);
    return;
  }
  if (piece + 1 == t.pieces.size()) {
    if (pos < s.size()) {
      raw[p.key] = s.substr(pos);
      split_slots(t, piece + 1, s, s.size(), raw, out);
      raw.erase(p.key);
    }
    return;
  }
  const std::string& next = t.pieces[piece + 1].literal;
  for (std::size_t at = s.find(next, pos + 1); at != std::string::npos; at = s.find(next, at + 1)) {
    raw[p.key] = s.substr(pos, at - pos);
    split_slots(t, piece + 1, s, at, raw, out);
  }
  raw.erase(p.key);
}

// A sentence reading: the form (or question target) plus the descriptor each
// entity slot was written with.
struct Reading {
  LogicalForm form;
  std::map<K, Descriptor> nouns;
};

std::vector<Reading> decode_slots(const Template& t, const RawSlots& raw, const Vocabulary& vocab) {
  std::vector<Reading> readings(1);
  if (t.predicate) readings[0].form.predicate = *t.predicate;
  if (auto type = t.flag("type")) readings[0].form.args[K::kType] = *type;

  for (const TemplatePiece& p : t.pieces) {
    if (!p.is_slot) continue;
    const std::string& text = raw.at(p.key);
    if (p.key == K::kQuantity) {
      auto q = decode_quantity(text);
      if (!q) return {};
      for (auto& r : readings) r.form.args[K::kQuantity] = *q;
    } else if (is_agent_key(p.key)) {
      if (!vocab.is_agent(text)) return {};
      for (auto& r : readings) r.form.args[p.key] = text;
    } else {
      const auto nouns = decode_noun_phrase(vocab, text, p.noun);
      if (nouns.empty()) return {};
      std::vector<Reading> next;
      for (const auto& r : readings) {
        for (const auto& n : nouns) {
          Reading copy = r;
          copy.form.args[p.key] = n.entity;
          copy.nouns[p.key] = n.descriptor;
          next.push_back(std::move(copy));
        }
      }
      readings = std::move(next);
    }
  }
  return readings;
}

// Containers declare their entity's descriptor; every other mention must use
// the declared one (entities introduced by rates have none).
bool consistent_with(Reading& r, const DescriptorMap& context) {
  if (r.form.predicate == Predicate::kContainer && r.nouns.count(K::kEntity)) {
    const std::string& entity = r.form.token(K::kEntity);
    const Descriptor& d = r.nouns.at(K::kEntity);
    auto it = context.find(entity);
    if (it != context.end() && !(it->second == d)) return false;
    if (d.attribute) r.form.args[K::kAttribute] = *d.attribute;
    if (d.unit) r.form.args[K::kUnit] = *d.unit;
    return true;
  }
  for (const auto& [key, d] : r.nouns) {
    const std::string& entity = std::get<std::string>(r.form.args.at(key));
    auto it = context.find(entity);
    const Descriptor declared = it == context.end() ? Descriptor{} : it->second;
    if (!(declared == d)) return false;
  }
  return true;
}

struct SentenceMatch {
  Reading reading;
  std::size_t template_index;
};

std::vector<SentenceMatch> match_sentence(const TemplateLibrary& lib, const Vocabulary& vocab, const std::string& s,
                                          bool question, const DescriptorMap& context) {
  std::vector<SentenceMatch> out;
  for (std::size_t i = 0; i < lib.templates().size(); ++i) {
    const Template& t = lib.at(i);
    if (t.is_question() != question) continue;
    std::vector<RawSlots> splits;
    RawSlots raw;
    split_slots(t, 0, s, 0, raw, splits);
    for (const auto& split : splits)
      for (auto& r : decode_slots(t, split, vocab))
        if (consistent_with(r, context)) out.push_back({std::move(r), i});
  }
  return out;
}

}  // namespace

std::set<PropertyKey> Template::slots() const {
  std::set<PropertyKey> out;
  for (const auto& p : pieces)
    if (p.is_slot) out.insert(p.key);
  return out;
}

std::optional<std::string> Template::flag(const std::string& name) const {
  auto it = flags.find(name);
  if (it == flags.end()) return std::nullopt;
  return it->second;
}

Template make_template(const std::string& predicate, const std::string& pattern,
                       std::map<std::string, std::string> flags) {
  Template t;
  t.pattern = pattern;
  t.flags = std::move(flags);
  if (predicate != "question") {
    t.predicate = parse_predicate(predicate);
    if (!t.predicate) throw TemplateError("template: unknown predicate " + predicate);
  }

  std::size_t pos = 0;
  std::size_t slot_count = 0;
  while (pos < pattern.size()) {
    const std::size_t open = pattern.find('{', pos);
    if (open != pos) {
      const std::string lit = pattern.substr(pos, open == std::string::npos ? std::string::npos : open - pos);
      if (lit.find('}') != std::string::npos) throw TemplateError("template: stray '}' in \"" + pattern + "\"");
      t.pieces.push_back({false, lit, {}, {}});
      if (open == std::string::npos) break;
    }
    const std::size_t close = pattern.find('}', open);
    if (close == std::string::npos) throw TemplateError("template: unterminated slot in \"" + pattern + "\"");
    std::string body = pattern.substr(open + 1, close - open - 1);
    std::string modifier;
    if (auto colon = body.find(':'); colon != std::string::npos) {
      modifier = body.substr(colon + 1);
      body = body.substr(0, colon);
    }
    auto key = parse_property_key(body);
    if (!key || *key == K::kType || *key == K::kAttribute || *key == K::kUnit)
      throw TemplateError("template: invalid slot {" + body + "} in \"" + pattern + "\"");
    TemplatePiece piece{true, {}, *key, NounForm::kPlural};
    if (is_entity_key(*key)) {
      if (modifier == "plural")
        piece.noun = NounForm::kPlural;
      else if (modifier == "singular")
        piece.noun = NounForm::kSingular;
      else
        throw TemplateError("template: entity slot {" + body + "} needs :plural or :singular");
    } else if (!modifier.empty()) {
      throw TemplateError("template: slot {" + body + "} takes no modifier");
    }
    if (!t.pieces.empty() && t.pieces.back().is_slot)
      throw TemplateError("template: adjacent slots in \"" + pattern + "\"");
    t.pieces.push_back(piece);
    ++slot_count;
    pos = close + 1;
  }

  const std::set<K> slots = t.slots();
  if (slots.size() != slot_count) throw TemplateError("template: repeated slot in \"" + pattern + "\"");

  const auto require = [&](std::set<K> want) {
    if (slots != want) throw TemplateError("template: slots of \"" + pattern + "\" do not match the " + predicate + " schema");
  };
  if (!t.predicate) {
    require({K::kAgent, K::kEntity});
    return t;
  }
  switch (*t.predicate) {
    case Predicate::kContainer:
      require({K::kAgent, K::kQuantity, K::kEntity});
      break;
    case Predicate::kRate:
      require({K::kAgent, K::kQuantity, K::kEntityA, K::kEntityB});
      break;
    case Predicate::kComparison: {
      require({K::kAgentA, K::kAgentB, K::kQuantity, K::kEntity});
      const auto type = t.flag("type");
      const auto subject = t.flag("subject");
      if (!type || (*type != kAdditive && *type != kMultiplicative))
        throw TemplateError("template: comparison \"" + pattern + "\" needs flag type=additive|multiplicative");
      if (!subject || (*subject != "agentA" && *subject != "agentB"))
        throw TemplateError("template: comparison \"" + pattern + "\" needs flag subject=agentA|agentB");
      break;
    }
    case Predicate::kTransfer: {
      std::set<K> rest = slots;
      rest.erase(K::kReceiverAgent);
      rest.erase(K::kSenderAgent);
      if (rest != std::set<K>{K::kQuantity, K::kEntity} || rest.size() == slots.size())
        throw TemplateError("template: slots of \"" + pattern + "\" do not match the transfer schema");
      break;
    }
  }
  return t;
}

TemplateLibrary::TemplateLibrary(std::vector<Template> templates) : templates_(std::move(templates)) {
  if (std::none_of(templates_.begin(), templates_.end(), [](const Template& t) { return t.is_question(); }))
    throw TemplateError("template library has no question templates");
}

TemplateLibrary TemplateLibrary::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw TemplateError("template file must be a JSON array");
  std::vector<Template> out;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("predicate") || !e.contains("pattern") || !e.at("predicate").is_string() ||
        !e.at("pattern").is_string())
      throw TemplateError("template entries need string predicate and pattern");
    std::map<std::string, std::string> flags;
    if (e.contains("flags")) {
      if (!e.at("flags").is_object()) throw TemplateError("template flags must be an object");
      for (const auto& [k, v] : e.at("flags").items()) {
        if (!v.is_string()) throw TemplateError("template flag values must be strings");
        flags[k] = v.get<std::string>();
      }
    }
    out.push_back(make_template(e.at("predicate").get<std::string>(), e.at("pattern").get<std::string>(),
                                std::move(flags)));
  }
  return TemplateLibrary(std::move(out));
}

TemplateLibrary TemplateLibrary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TemplateError("cannot open template file " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw TemplateError("template file " + path.string() + ": " + e.what());
  }
}

const TemplateLibrary& TemplateLibrary::builtin() {
  static const TemplateLibrary lib = from_json(nlohmann::json::parse(builtin::kTemplatesJson));
  return lib;
}

std::vector<std::size_t> TemplateLibrary::candidates(const LogicalForm& lf) const {
  std::vector<std::size_t> out;
  const std::set<K> want = expected_slots(lf);
  for (std::size_t i = 0; i < templates_.size(); ++i) {
    const Template& t = templates_[i];
    if (t.predicate != lf.predicate || t.slots() != want) continue;
    if (lf.predicate == Predicate::kComparison && t.flag("type") != lf.optional_token(K::kType)) continue;
    out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> TemplateLibrary::questions() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < templates_.size(); ++i)
    if (templates_[i].is_question()) out.push_back(i);
  return out;
}

Orientation comparison_orientation(const Template& t, const QuestionTarget& solved, const LogicalForm& lf) {
  const auto subject = t.flag("subject");
  if (!subject) throw RenderError("comparison template without subject flag");
  const auto key = parse_property_key(*subject);
  return lf.token(*key) == solved.agent ? Orientation::kConsistent : Orientation::kInconsistent;
}

std::vector<std::optional<QuestionTarget>> form_targets(const MentalModel& mm) {
  std::vector<std::optional<QuestionTarget>> out;
  std::vector<LogicalForm> prefix;
  for (const auto& lf : mm.forms) {
    prefix.push_back(lf);
    if (lf.predicate == Predicate::kContainer) {
      out.emplace_back();
      continue;
    }
    auto target = final_query(prefix);
    if (!target) throw RenderError("form " + std::to_string(out.size()) + " cannot be resolved");
    out.push_back(std::move(target));
  }
  return out;
}

RenderPlan Renderer::sample_plan(const MentalModel& mm, Rng& rng, const RenderConstraints& constraints) const {
  const auto targets = form_targets(mm);
  RenderPlan plan;
  for (std::size_t i = 0; i < mm.forms.size(); ++i) {
    const LogicalForm& lf = mm.forms[i];
    std::vector<std::size_t> cands = templates_.candidates(lf);
    if (auto it = constraints.orientation.find(i); it != constraints.orientation.end()) {
      if (lf.predicate != Predicate::kComparison)
        throw RenderError("orientation constraint on a non-comparison form " + std::to_string(i));
      std::erase_if(cands, [&](std::size_t c) {
        return comparison_orientation(templates_.at(c), *targets[i], lf) != it->second;
      });
    }
    if (cands.empty())
      throw RenderError("no invertible template available for form " + std::to_string(i) + " (" +
                        std::string(to_string(lf.predicate)) + ")");
    plan.forms.push_back(cands[rng.index(cands.size())]);
  }
  const auto qs = templates_.questions();
  plan.question = qs[rng.index(qs.size())];
  return plan;
}

std::vector<std::string> Renderer::render_sentences(const MentalModel& mm, const RenderPlan& plan) const {
  if (plan.forms.size() != mm.forms.size()) throw RenderError("render plan does not cover the mental model");
  const auto target = final_query(mm.forms);
  if (!target) throw RenderError("the last form does not derive a queryable quantity");
  const DescriptorMap descriptors = descriptors_of(mm);
  const auto descriptor = [&](const std::string& entity) {
    auto it = descriptors.find(entity);
    return it == descriptors.end() ? Descriptor{} : it->second;
  };

  const auto fill = [&](const Template& t, const std::map<K, Value>& args) {
    std::string out;
    for (const auto& p : t.pieces) {
      if (!p.is_slot) {
        out += p.literal;
        continue;
      }
      auto it = args.find(p.key);
      if (it == args.end()) throw RenderError("template slot {" + std::string(to_string(p.key)) + "} has no value");
      if (is_entity_key(p.key)) {
        const std::string& e = std::get<std::string>(it->second);
        out += noun_phrase(vocab_, e, descriptor(e), p.noun);
      } else {
        out += value_to_string(it->second);
      }
    }
    return out;
  };

  std::vector<std::string> out;
  for (std::size_t i = 0; i < mm.forms.size(); ++i) {
    const Template& t = templates_.at(plan.forms[i]);
    const auto fits = templates_.candidates(mm.forms[i]);
    if (std::find(fits.begin(), fits.end(), plan.forms[i]) == fits.end())
      throw RenderError("template \"" + t.pattern + "\" does not fit form " + std::to_string(i));
    out.push_back(fill(t, mm.forms[i].args));
  }
  const Template& q = templates_.at(plan.question);
  if (!q.is_question()) throw RenderError("plan question index is not a question template");
  out.push_back(fill(q, {{K::kAgent, target->agent}, {K::kEntity, target->entity}}));
  return out;
}

std::string Renderer::render(const MentalModel& mm, const RenderPlan& plan) const {
  std::string text;
  for (const auto& s : render_sentences(mm, plan)) {
    if (!text.empty()) text += ' ';
    text += s;
  }
  return text;
}

std::string Renderer::render_problem(const MentalModel& mm, Rng& rng, const RenderConstraints& constraints) const {
  return render(mm, sample_plan(mm, rng, constraints));
}

std::pair<std::string, std::string> Renderer::render_consistency_pair(const MentalModel& mm, Rng& rng) const {
  std::optional<std::size_t> cmp;
  for (std::size_t i = 0; i < mm.forms.size(); ++i) {
    if (mm.forms[i].predicate != Predicate::kComparison) continue;
    if (cmp) throw RenderError("consistency pair needs exactly one comparison");
    cmp = i;
  }
  if (!cmp) throw RenderError("consistency pair needs exactly one comparison");

  RenderPlan consistent = sample_plan(mm, rng, {{{*cmp, Orientation::kConsistent}}});
  RenderPlan inconsistent = consistent;
  inconsistent.forms[*cmp] = sample_plan(mm, rng, {{{*cmp, Orientation::kInconsistent}}}).forms[*cmp];
  return {render(mm, consistent), render(mm, inconsistent)};
}

Renderer::ParseResult Renderer::parse(const std::string& text) const {
  const auto sentences = split_sentences(text);
  if (sentences.size() < 2) throw ParseError(ParseError::Kind::kNoParse, "no parse: expected statements and a question");

  ParseResult result;
  DescriptorMap context;
  for (std::size_t i = 0; i + 1 < sentences.size(); ++i) {
    auto matches = match_sentence(templates_, vocab_, sentences[i], false, context);
    if (matches.empty())
      throw ParseError(ParseError::Kind::kNoParse, "no parse for sentence " + std::to_string(i + 1) + ": \"" +
                                                       sentences[i] + "\"");
    for (const auto& m : matches)
      if (!(m.reading.form == matches.front().reading.form))
        throw ParseError(ParseError::Kind::kAmbiguous,
                         "ambiguous parse for sentence " + std::to_string(i + 1) + ": \"" + sentences[i] + "\"");
    const Reading& r = matches.front().reading;
    if (r.form.predicate == Predicate::kContainer) {
      context[r.form.token(K::kEntity)] =
          Descriptor{r.form.optional_token(K::kAttribute), r.form.optional_token(K::kUnit)};
    } else {
      for (const auto& [key, d] : r.nouns) context.emplace(std::get<std::string>(r.form.args.at(key)), d);
    }
    result.model.forms.push_back(r.form);
    result.plan.forms.push_back(matches.front().template_index);
  }

  const auto violations = validate_model(result.model);
  if (!violations.empty()) throw ParseError(ParseError::Kind::kNoParse, "no parse: " + violations.front());

  auto questions = match_sentence(templates_, vocab_, sentences.back(), true, context);
  if (questions.empty())
    throw ParseError(ParseError::Kind::kNoParse, "no parse for question \"" + sentences.back() + "\"");
  const auto target_of = [](const Reading& r) {
    return QuestionTarget{r.form.token(K::kAgent), r.form.token(K::kEntity)};
  };
  for (const auto& q : questions)
    if (!(target_of(q.reading) == target_of(questions.front().reading)))
      throw ParseError(ParseError::Kind::kAmbiguous, "ambiguous question \"" + sentences.back() + "\"");
  const auto final = final_query(result.model.forms);
  if (!final || !(*final == target_of(questions.front().reading)))
    throw ParseError(ParseError::Kind::kNoParse, "no parse: the question does not ask for the final result");
  result.plan.question = questions.front().template_index;
  return result;
}

bool Renderer::check_faithfulness(const std::string& text, const MentalModel& mm) const {
  try {
    return parse(text).model == mm;
  } catch (const ParseError&) {
    return false;
  }
}

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  const auto flush = [&](std::size_t end) {
    std::size_t b = start;
    while (b < end && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    if (b < end) out.push_back(text.substr(b, end - b));
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '?' && c != '!') continue;
    if (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]))) {
      flush(i + 1);
      start = i + 1;
    }
  }
  flush(text.size());
  return out;
}

}  // namespace mwp
