#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mwp/cli.h"

namespace mwp {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "mwpbench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("mwp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({"generate", "--test", "carry", "--pairs", "0", "--seed", "1"}).code, 1);
  EXPECT_EQ(run({"generate", "--test", "bogus", "--seed", "1"}).code, 1);
  EXPECT_EQ(run({"generate", "--test", "carry"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, GenerateIsReproducible) {
  const auto a = run({"generate", "--test", "consistency", "--pairs", "25", "--seed", "4"});
  const auto b = run({"generate", "--test", "consistency", "--pairs", "25", "--seed", "4", "-j", "3"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  std::istringstream lines(a.out);
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) ++n;
  EXPECT_EQ(n, 51u);
  const auto header = nlohmann::json::parse(a.out.substr(0, a.out.find('\n')));
  EXPECT_EQ(header.at("header").at("seed"), 4);
  EXPECT_EQ(header.at("header").at("config").at("test"), "consistency");
}

TEST_F(Cli, ValidateAcceptsGeneratedAndRejectsCorruption) {
  ASSERT_EQ(run({"generate", "--test", "transfer_vs_comparison", "--pairs", "20", "--seed", "2", "-o", path("d.jsonl")}).code, 0);
  const auto ok = run({"validate", path("d.jsonl"), "--report", path("r.json")});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(nlohmann::json::parse(slurp(path("r.json"))).at("pairs"), 20);

  std::string text = slurp(path("d.jsonl"));
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) pos = text.find('\n', pos) + 1;  // start of line 5
  text.insert(pos, "{broken");
  spit(path("bad.jsonl"), text);
  const auto bad = run({"validate", path("bad.jsonl")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("line 5"), std::string::npos) << bad.err;
}

TEST_F(Cli, ScoreReportsMissingIds) {
  ASSERT_EQ(run({"generate", "--test", "carry", "--pairs", "3", "--seed", "2", "-o", path("d.jsonl")}).code, 0);
  std::istringstream lines(slurp(path("d.jsonl")));
  std::string line, preds;
  std::getline(lines, line);
  std::string last_id;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    last_id = j.at("id");
    preds += nlohmann::json{{"problem_id", last_id}, {"output_text", std::to_string(j.at("gold_answer").get<int>())}}.dump() + "\n";
  }
  spit(path("all.jsonl"), preds);
  const auto good = run({"score", "--dataset", path("d.jsonl"), "--predictions", path("all.jsonl"), "-o", path("rep.json")});
  ASSERT_EQ(good.code, 0) << good.err;
  const auto report = nlohmann::json::parse(slurp(path("rep.json")));
  EXPECT_EQ(report.at("acc_x"), 100.0);
  EXPECT_EQ(report.at("cate"), 0.0);

  spit(path("partial.jsonl"), preds.substr(0, preds.rfind('\n', preds.size() - 2) + 1));
  const auto bad = run({"score", "--dataset", path("d.jsonl"), "--predictions", path("partial.jsonl")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find(last_id), std::string::npos) << bad.err;
}

TEST_F(Cli, IdentityCorrectionIsByteIdentical) {
  for (const std::string test : {"consistency", "transfer_vs_comparison", "carry"}) {
    ASSERT_EQ(run({"generate", "--test", test, "--pairs", "15", "--seed", "8", "-o", path("d.jsonl")}).code, 0);
    const auto r = run({"correct", path("d.jsonl"), "--provider", "identity", "-o", path("c.jsonl"), "--log", path("log.jsonl")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(path("d.jsonl")), slurp(path("c.jsonl"))) << test;
    const auto g = run({"generate", "--test", test, "--pairs", "15", "--seed", "8", "--correct", "--provider", "identity"});
    ASSERT_EQ(g.code, 0) << g.err;
  }
}

TEST_F(Cli, ProviderFailureExitsTwo) {
  ASSERT_EQ(run({"generate", "--test", "carry", "--pairs", "2", "--seed", "1", "-o", path("d.jsonl")}).code, 0);
  const auto r = run({"correct", path("d.jsonl"), "--provider", "http", "--endpoint", "http://127.0.0.1:9/v1/chat/completions",
                      "--model", "m", "--timeout", "2", "--retries", "0", "-o", path("c.jsonl")});
  EXPECT_EQ(r.code, 2) << r.err;
}

}  // namespace
}  // namespace mwp
