#include <gtest/gtest.h>

#include <regex>

#include "mwp/correct.h"
#include "mwp/pairgen.h"

namespace mwp {
namespace {

const std::string kText =
    "Alice has 15 apples. Bob has 3 fewer apples than Alice. Carol watchs 2 movies. How many apples does Bob have?";

ProblemInstance sample_problem() {
  static const PairGenerator gen(Vocabulary::builtin(), TemplateLibrary::builtin());
  return gen.build_pair(TestKind::kConsistency, 3, 0, 0).x;
}

TEST(Prompt, EmbedsTextVerbatim) {
  const std::string p = build_prompt(kText);
  EXPECT_EQ(p.rfind("Correct all grammatical mistakes that appear in the following math word problem: ", 0), 0u);
  EXPECT_NE(p.find(kText), std::string::npos);
  EXPECT_NE(p.find("Do NOT solve the problem."), std::string::npos);
  EXPECT_NE(p.find("Do NOT include \"Corrected Version:\""), std::string::npos);
  ASSERT_TRUE(problem_from_prompt(p).has_value());
  EXPECT_EQ(*problem_from_prompt(p), kText);
  EXPECT_FALSE(problem_from_prompt("something else").has_value());
}

TEST(Integrity, GrammarFixPasses) {
  const std::string fixed = std::regex_replace(kText, std::regex("watchs"), "watches");
  EXPECT_TRUE(integrity_check(kText, fixed).pass());
}

TEST(Integrity, FlippedRelationFails) {
  const std::string flipped = std::regex_replace(kText, std::regex("fewer"), "more");
  const IntegrityReport r = integrity_check(kText, flipped);
  EXPECT_FALSE(r.relational_terms_ok);
  EXPECT_EQ(r.reason(), "relational");
}

TEST(Integrity, ChangedNumberFails) {
  const std::string changed = std::regex_replace(kText, std::regex("15"), "16");
  const IntegrityReport r = integrity_check(kText, changed);
  EXPECT_TRUE(r.relational_terms_ok);
  EXPECT_FALSE(r.numbers_ok);
  EXPECT_EQ(r.reason(), "numbers");
}

TEST(Integrity, ReorderedNumbersPass) {
  EXPECT_TRUE(integrity_check("Ann has 3 pens. Bo has 7 pens.", "Bo has 7 pens. Ann has 3 pens.").pass());
}

TEST(Integrity, MergedSentenceFails) {
  const IntegrityReport r = integrity_check("Ann has 3 pens. Bo has 7 pens.", "Ann has 3 pens and Bo has 7 pens.");
  EXPECT_FALSE(r.sentence_count_ok);
  EXPECT_EQ(r.reason(), "sentence_count");
}

TEST(Integrity, KeywordsMatchAsWholeWords) {
  // "moreover" is not the keyword "more".
  EXPECT_TRUE(integrity_check("Ann has 3 pens.", "Moreover, Ann has 3 pens.").pass());
  EXPECT_FALSE(integrity_check("Ann has 3 times as many pens.", "Ann has 3 pens.").pass());
}

TEST(Correct, IdentityLeavesProblemUnchanged) {
  IdentityProvider id;
  const ProblemInstance p = sample_problem();
  const CorrectionOutcome out = correct_problem(p, id);
  ASSERT_TRUE(std::holds_alternative<ProblemInstance>(out));
  const auto& q = std::get<ProblemInstance>(out);
  EXPECT_FALSE(q.corrected_text.has_value());
  EXPECT_EQ(to_json(q), to_json(p));
}

TEST(Correct, AcceptedCompletionBecomesText) {
  FunctionProvider f([](const std::string& t) { return "  " + t + " \n"; });
  FunctionProvider g([](const std::string& t) { return std::regex_replace(t, std::regex("^"), "So: "); });
  const ProblemInstance p = sample_problem();
  // Surrounding whitespace is trimmed, so this is unchanged.
  EXPECT_FALSE(std::get<ProblemInstance>(correct_problem(p, f)).corrected_text.has_value());
  const auto q = std::get<ProblemInstance>(correct_problem(p, g));
  ASSERT_TRUE(q.corrected_text.has_value());
  EXPECT_EQ(q.text(), "So: " + p.templated_text);
  EXPECT_EQ(q.templated_text, p.templated_text);
}

TEST(Correct, RejectedCompletionIsDiscarded) {
  FunctionProvider empty([](const std::string&) { return std::string("   "); });
  FunctionProvider digits([](const std::string& t) { return std::regex_replace(t, std::regex("([0-9]+)"), "1$1", std::regex_constants::format_first_only); });
  const ProblemInstance p = sample_problem();
  const auto a = correct_problem(p, empty);
  ASSERT_TRUE(std::holds_alternative<Discarded>(a));
  EXPECT_EQ(std::get<Discarded>(a).reason, "empty");
  const auto b = correct_problem(p, digits);
  ASSERT_TRUE(std::holds_alternative<Discarded>(b));
  EXPECT_EQ(std::get<Discarded>(b).reason, "numbers");
}

TEST(Http, UnreachableEndpointIsProviderError) {
  ProviderConfig cfg;
  cfg.endpoint = "http://127.0.0.1:9/v1/chat/completions";
  cfg.model = "m";
  cfg.timeout_seconds = 2;
  cfg.max_retries = 0;
  HttpProvider http(cfg);
  EXPECT_THROW(http.correct(build_prompt(kText)), ProviderError);
}

}  // namespace
}  // namespace mwp
