#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mwp/evaluate.h"
#include "mwp/pairgen.h"
#include "oracles.h"

namespace mwp {
namespace {

std::vector<ProblemPair> dataset(TestKind t, std::size_t n, std::uint64_t seed) {
  static const PairGenerator gen(Vocabulary::builtin(), TemplateLibrary::builtin());
  return build_dataset(gen, t, n, seed).pairs;
}

std::vector<Prediction> answers(const std::vector<ProblemPair>& pairs, bool x_right, bool xprime_right) {
  std::vector<Prediction> out;
  for (const auto& p : pairs) {
    out.push_back({p.x.id, "The answer is " + std::to_string(p.x.gold_answer + (x_right ? 0 : 1)) + "."});
    out.push_back({p.xprime.id, std::to_string(p.xprime.gold_answer + (xprime_right ? 0 : 1))});
  }
  return out;
}

PairOutcome outcome(int yx, int yxp, int steps = 1) { return {"p", steps, yx, yxp}; }

TEST(Extract, Examples) {
  EXPECT_EQ(extract_answer("The answer is 17."), 17);
  EXPECT_EQ(extract_answer("1,234 apples"), 1234);
  EXPECT_EQ(extract_answer("no idea"), std::nullopt);
  EXPECT_EQ(extract_answer("33 - 16 = 17"), 33);
  EXPECT_EQ(extract_answer("-5"), 5);
  EXPECT_EQ(extract_answer("12,34"), 12);
  const Extraction frac = extract_answer_detail("about 17.5 apples");
  EXPECT_EQ(frac.value, 17);
  EXPECT_TRUE(frac.fraction_followed);
  EXPECT_FALSE(extract_answer_detail("It is 17. Done.").fraction_followed);
}

TEST(Predictions, SkipsHeaderLine) {
  std::istringstream in(
      "{\"header\": {\"model\": \"m\"}}\n"
      "{\"problem_id\": \"a-x\", \"output_text\": \"3\"}\n"
      "\n"
      "{\"problem_id\": \"a-xprime\", \"output_text\": \"4\"}\n");
  const auto preds = read_predictions(in);
  ASSERT_EQ(preds.size(), 2u);
  EXPECT_EQ(preds[1].problem_id, "a-xprime");
  EXPECT_EQ(preds[1].output_text, "4");
}

TEST(Score, GoldPredictionsAreAllCorrect) {
  const auto pairs = dataset(TestKind::kConsistency, 40, 3);
  const EvalReport r = evaluate(TestKind::kConsistency, score(pairs, answers(pairs, true, true)), false);
  EXPECT_EQ(r.n, 40u);
  EXPECT_DOUBLE_EQ(r.acc_x, 100);
  EXPECT_DOUBLE_EQ(r.acc_xprime, 100);
  EXPECT_DOUBLE_EQ(r.cate, 0);
  EXPECT_DOUBLE_EQ(r.t.p, 1);
}

TEST(Score, ConditionSpecificErrors) {
  const auto pairs = dataset(TestKind::kCarry, 30, 3);
  const EvalReport r = evaluate(TestKind::kCarry, score(pairs, answers(pairs, true, false)), false);
  EXPECT_DOUBLE_EQ(r.acc_x, 100);
  EXPECT_DOUBLE_EQ(r.acc_xprime, 0);
  EXPECT_DOUBLE_EQ(r.cate, 100);
  EXPECT_DOUBLE_EQ(r.t.p, 0);
}

TEST(Score, ReportsIdProblems) {
  const auto pairs = dataset(TestKind::kConsistency, 5, 3);
  auto preds = answers(pairs, true, true);
  preds.pop_back();
  preds.push_back(preds.front());
  preds.push_back({"nope-x", "1"});
  try {
    score(pairs, preds);
    FAIL() << "expected ScoreError";
  } catch (const ScoreError& e) {
    std::string all;
    for (const auto& s : e.problems()) all += s + "\n";
    EXPECT_NE(all.find("missing"), std::string::npos) << all;
    EXPECT_NE(all.find("duplicate"), std::string::npos) << all;
    EXPECT_NE(all.find("unknown"), std::string::npos) << all;
    EXPECT_NE(all.find(pairs.back().xprime.id), std::string::npos) << all;
  }
}

TEST(Score, CountsFractionalOutputs) {
  const auto pairs = dataset(TestKind::kConsistency, 4, 3);
  auto preds = answers(pairs, true, true);
  preds[0].output_text = std::to_string(pairs[0].x.gold_answer) + ".5";
  const ScoreResult s = score(pairs, preds);
  EXPECT_EQ(s.fractional_outputs, 1u);
  EXPECT_EQ(s.outcomes[0].y_x, 1);  // scored on the integer part
}

TEST(Cate, PublishedCounts) {
  // 20 pairs both right, 28 only x right, 4 only x' right, 448 neither.
  std::vector<PairOutcome> o;
  for (int i = 0; i < 20; ++i) o.push_back(outcome(1, 1));
  for (int i = 0; i < 28; ++i) o.push_back(outcome(1, 0));
  for (int i = 0; i < 4; ++i) o.push_back(outcome(0, 1));
  for (int i = 0; i < 448; ++i) o.push_back(outcome(0, 0));
  const EvalReport r = evaluate(TestKind::kConsistency, {o, 0}, false);
  EXPECT_DOUBLE_EQ(r.acc_x, 9.6);
  EXPECT_DOUBLE_EQ(r.acc_xprime, 4.8);
  EXPECT_EQ(r.cate, 4.8);
  // Independent t statistic from the counts.
  const double n = 500, mean = 24.0 / n;
  const double ss = 28 * std::pow(1 - mean, 2) + 4 * std::pow(-1 - mean, 2) + 468 * mean * mean;
  const double t = mean / (std::sqrt(ss / (n - 1)) / std::sqrt(n));
  EXPECT_NEAR(r.t.t, t, 1e-9);
  EXPECT_EQ(r.t.df, 499);
  EXPECT_NEAR(r.t.p, oracle::t_two_sided_p(t, 499), 1e-6);
}

TEST(Cate, Antisymmetric) {
  const std::vector<PairOutcome> o{outcome(1, 0), outcome(1, 1), outcome(0, 0), outcome(1, 0), outcome(0, 1)};
  std::vector<PairOutcome> swapped;
  for (const auto& p : o) swapped.push_back(outcome(p.y_xprime, p.y_x));
  EXPECT_DOUBLE_EQ(cate(o), -cate(swapped));
  EXPECT_DOUBLE_EQ(cate(o), 20);
}

TEST(Strata, WeightedMeanIsGlobalCate) {
  std::vector<PairOutcome> o;
  for (int i = 0; i < 97; ++i) o.push_back(outcome(i % 3 == 0, i % 5 == 0, 1 + i % 5));
  const auto strata = stratify_by_steps(o);
  ASSERT_EQ(strata.size(), 5u);
  double weighted = 0;
  std::size_t total = 0;
  for (const auto& s : strata) {
    weighted += s.cate * static_cast<double>(s.n);
    total += s.n;
  }
  EXPECT_EQ(total, o.size());
  EXPECT_NEAR(weighted / static_cast<double>(total), cate(o), 1e-9);
}

TEST(Strata, CarryHasOneStratum) {
  const auto pairs = dataset(TestKind::kCarry, 20, 1);
  const EvalReport r = evaluate(TestKind::kCarry, score(pairs, answers(pairs, true, true)), true);
  ASSERT_TRUE(r.strata.has_value());
  ASSERT_EQ(r.strata->size(), 1u);
  EXPECT_EQ(r.strata->front().n_steps, 1);
}

TEST(Report, JsonAndTable) {
  std::vector<PairOutcome> o{outcome(1, 0), outcome(1, 0), outcome(1, 0)};
  const EvalReport r = evaluate(TestKind::kCarry, {o, 2}, false);
  const auto j = r.to_json({{"k", 1}});
  EXPECT_EQ(j.at("header").at("k"), 1);
  EXPECT_EQ(j.at("test"), "carry");
  EXPECT_EQ(j.at("counts").at("x"), 3);
  EXPECT_EQ(j.at("fractional_outputs"), 2);
  EXPECT_FALSE(j.contains("strata"));
  const std::string table = r.to_table();
  EXPECT_NE(table.find("carry"), std::string::npos);
  EXPECT_NE(table.find("<0.001"), std::string::npos);
}

}  // namespace
}  // namespace mwp
