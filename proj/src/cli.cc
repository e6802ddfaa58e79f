#include "mwp/cli.h"

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "mwp/correct.h"
#include "mwp/dataset.h"
#include "mwp/evaluate.h"
#include "mwp/pairgen.h"

namespace mwp {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Resources {
  std::string vocab_path;
  std::string templates_path;
  Vocabulary vocab;
  TemplateLibrary templates;
};

std::unique_ptr<Resources> load_resources(const std::string& vocab_path, const std::string& templates_path) {
  auto r = std::make_unique<Resources>();
  r->vocab_path = vocab_path;
  r->templates_path = templates_path;
  r->vocab = vocab_path.empty() ? Vocabulary::builtin() : Vocabulary::load(vocab_path);
  r->templates = templates_path.empty() ? TemplateLibrary::builtin() : TemplateLibrary::load(templates_path);
  return r;
}

int default_jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("error writing " + path);
}

Dataset read_dataset_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  return read_dataset(f);
}

std::string write_log(const nlohmann::ordered_json& header, const std::vector<CorrectionLogEntry>& log) {
  std::string out = nlohmann::ordered_json{{"header", header}}.dump() + "\n";
  for (const auto& e : log) out += e.to_json().dump() + "\n";
  return out;
}

struct ProviderOptions {
  std::string provider = "identity";
  ProviderConfig config;

  void add(CLI::App* app) {
    app->add_option("--provider", provider, "Correction provider")->check(CLI::IsMember({"identity", "http"}));
    app->add_option("--endpoint", config.endpoint, "Chat-completions URL (http provider)");
    app->add_option("--model", config.model, "Model identifier (http provider)");
    app->add_option("--api-key-env", config.api_key_env, "Environment variable holding the API key")
        ->capture_default_str();
    app->add_option("--timeout", config.timeout_seconds, "Request timeout in seconds")->capture_default_str();
    app->add_option("--retries", config.max_retries, "Retries on transient failures")->capture_default_str();
  }

  std::unique_ptr<CorrectionProvider> make() const {
    if (provider == "identity") return std::make_unique<IdentityProvider>();
    return std::make_unique<HttpProvider>(config);
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j{{"provider", provider}};
    if (provider == "http") j["settings"] = config.to_json();
    return j;
  }
};

GenerationOptions options_from_header(const nlohmann::ordered_json& header, int jobs) {
  GenerationOptions o;
  o.jobs = jobs;
  if (!header.contains("config") || !header["config"].contains("generation")) return o;
  const auto& g = header["config"]["generation"];
  o.range.quantity_min = g.value("quantity_min", o.range.quantity_min);
  o.range.quantity_max = g.value("quantity_max", o.range.quantity_max);
  o.range.intermediate_min = g.value("intermediate_min", o.range.intermediate_min);
  o.range.intermediate_max = g.value("intermediate_max", o.range.intermediate_max);
  o.range.max_attempts = g.value("max_number_attempts", o.range.max_attempts);
  o.max_replacements = g.value("max_replacements", o.max_replacements);
  o.max_build_attempts = g.value("max_build_attempts", o.max_build_attempts);
  return o;
}

TestKind test_from_header(const nlohmann::ordered_json& header) {
  if (!header.contains("config") || !header["config"].contains("test"))
    throw std::runtime_error("dataset header does not name its test");
  const auto t = parse_test_kind(header["config"]["test"].get<std::string>());
  if (!t) throw std::runtime_error("dataset header names an unknown test");
  return *t;
}

std::string header_path(const nlohmann::ordered_json& header, const char* key) {
  if (!header.contains("config") || !header["config"].contains(key)) return "";
  const auto& v = header["config"][key];
  return v.is_string() ? v.get<std::string>() : "";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generation and scoring of paired arithmetic word problem datasets", "mwpbench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  // generate
  struct {
    std::string test;
    std::size_t pairs = 500;
    std::uint64_t seed = 0;
    std::string vocab, templates, out = "-", log;
    int jobs = default_jobs();
    bool correct = false;
    ProviderOptions provider;
  } gen;
  auto* generate = app.add_subcommand("generate", "Build a paired dataset");
  generate->add_option("--test", gen.test, "consistency | transfer_vs_comparison | carry")
      ->required()
      ->check(CLI::IsMember({"consistency", "transfer_vs_comparison", "carry"}));
  generate->add_option("--pairs", gen.pairs, "Number of pairs")->check(CLI::Range(std::size_t{1}, std::size_t{10000000}))
      ->capture_default_str();
  generate->add_option("--seed", gen.seed, "Master seed")->required();
  generate->add_option("--vocab", gen.vocab, "Vocabulary file (default: built in)");
  generate->add_option("--templates", gen.templates, "Template file (default: built in)");
  generate->add_option("-o,--out", gen.out, "Output path, - for stdout")->capture_default_str();
  generate->add_option("-j,--jobs", gen.jobs, "Worker threads")->check(CLI::PositiveNumber);
  auto* correct_flag = generate->add_flag("--correct", gen.correct, "Correct texts with a provider");
  generate->add_flag("--no-correct", [&](std::int64_t) { gen.correct = false; }, "Disable correction (default)")
      ->excludes(correct_flag);
  generate->add_option("--log", gen.log, "Correction log path");
  gen.provider.add(generate);

  // validate
  struct {
    std::string in, vocab, templates, report;
    std::size_t audit_sample = 0;
    std::string audit_out;
  } val;
  auto* validate = app.add_subcommand("validate", "Audit a dataset");
  validate->add_option("dataset", val.in, "Dataset file")->required();
  validate->add_option("--vocab", val.vocab, "Vocabulary file (default: from the dataset header)");
  validate->add_option("--templates", val.templates, "Template file (default: from the dataset header)");
  validate->add_option("--report", val.report, "Write the audit report JSON here");
  validate->add_option("--audit-sample", val.audit_sample, "Export N pairs for human review");
  validate->add_option("--audit-out", val.audit_out, "Review export path (default: stdout)");

  // score
  struct {
    std::string dataset, predictions, out, table, stratify;
  } sc;
  auto* score_cmd = app.add_subcommand("score", "Score predictions against a dataset");
  score_cmd->add_option("--dataset", sc.dataset, "Dataset file")->required();
  score_cmd->add_option("--predictions", sc.predictions, "Predictions file")->required();
  score_cmd->add_option("-o,--out", sc.out, "Report JSON path (default: stdout)");
  score_cmd->add_option("--table", sc.table, "Text table path (default: stdout)");
  score_cmd->add_option("--stratify", sc.stratify, "Add strata")->check(CLI::IsMember({"steps"}));

  // correct
  struct {
    std::string in, out = "-", log, vocab, templates;
    int jobs = default_jobs();
    ProviderOptions provider;
  } cor;
  auto* correct_cmd = app.add_subcommand("correct", "Grammar-correct an existing dataset");
  correct_cmd->add_option("dataset", cor.in, "Dataset file")->required();
  correct_cmd->add_option("-o,--out", cor.out, "Output path, - for stdout")->capture_default_str();
  correct_cmd->add_option("--log", cor.log, "Correction log path");
  correct_cmd->add_option("--vocab", cor.vocab, "Vocabulary file (default: from the dataset header)");
  correct_cmd->add_option("--templates", cor.templates, "Template file (default: from the dataset header)");
  correct_cmd->add_option("-j,--jobs", cor.jobs, "Worker threads")->check(CLI::PositiveNumber);
  cor.provider.add(correct_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (generate->parsed()) {
      const TestKind test = *parse_test_kind(gen.test);
      const auto res = load_resources(gen.vocab, gen.templates);
      GenerationOptions options;
      options.jobs = gen.jobs;
      const PairGenerator generator(res->vocab, res->templates, options);

      nlohmann::ordered_json config;
      config["command"] = "generate";
      config["test"] = gen.test;
      config["pairs"] = gen.pairs;
      config["vocab"] = gen.vocab;
      config["templates"] = gen.templates;
      config["generation"] = options.to_json();
      config["correction"] = gen.correct ? gen.provider.to_json() : nlohmann::ordered_json();
      const auto header = make_header(gen.seed, config);

      std::unique_ptr<CorrectionProvider> provider;
      if (gen.correct) provider = gen.provider.make();
      const BuildResult built = build_dataset(generator, test, gen.pairs, gen.seed, provider.get());
      write_text(gen.out, dataset_to_string(header, built.pairs), out);
      if (!gen.log.empty()) write_text(gen.log, write_log(header, built.log), out);
      if (provider) err << "corrected " << built.pairs.size() << " pairs, replaced " << built.replaced << "\n";
      return 0;
    }

    if (validate->parsed()) {
      const Dataset d = read_dataset_file(val.in);
      const TestKind test = test_from_header(d.header);
      const auto pairs = pairs_of(d);
      const auto res = load_resources(val.vocab.empty() ? header_path(d.header, "vocab") : val.vocab,
                                      val.templates.empty() ? header_path(d.header, "templates") : val.templates);
      const GenerationOptions options = options_from_header(d.header, 1);
      const Renderer renderer(res->templates, res->vocab);
      const AuditReport report = validate_dataset(pairs, test, renderer, options.range);

      nlohmann::ordered_json j;
      j["header"] = make_header(d.header.value("seed", std::uint64_t{0}),
                                {{"command", "validate"}, {"dataset", val.in}, {"test", std::string(to_string(test))}});
      const auto body = report.to_json();
      for (const auto& [k, v] : body.items()) j[k] = v;
      if (!val.report.empty()) write_text(val.report, j.dump(2) + "\n", out);

      if (val.audit_sample > 0) {
        const auto seed = d.header.value("seed", std::uint64_t{0});
        std::string text = nlohmann::ordered_json{{"header", make_header(seed, {{"command", "validate"},
                                                                               {"dataset", val.in},
                                                                               {"audit_sample", val.audit_sample}})}}
                               .dump() +
                           "\n";
        for (const auto& item : audit_sample(pairs.size(), val.audit_sample, seed)) {
          const auto& p = pairs[item.pair_index];
          text += nlohmann::ordered_json{{"pair_index", item.pair_index}, {"pair_id", p.x.pair_id},
                                         {"role", item.role},             {"x_text", p.x.text()},
                                         {"xprime_text", p.xprime.text()}}
                      .dump() +
                  "\n";
        }
        write_text(val.audit_out, text, out);
      }

      err << report.pairs << " pairs, " << report.total() << " violations\n";
      for (const auto& [check, count] : report.violations)
        if (count > 0) err << "  " << check << ": " << count << "\n";
      for (const auto& m : report.messages) err << "  " << m << "\n";
      return report.ok() ? 0 : 1;
    }

    if (score_cmd->parsed()) {
      const Dataset d = read_dataset_file(sc.dataset);
      const TestKind test = test_from_header(d.header);
      std::ifstream pf(sc.predictions, std::ios::binary);
      if (!pf) throw std::runtime_error("cannot open " + sc.predictions);
      const auto predictions = read_predictions(pf);
      const ScoreResult scored = score(pairs_of(d), predictions);
      const EvalReport report = evaluate(test, scored, !sc.stratify.empty());
      const auto header = make_header(d.header.value("seed", std::uint64_t{0}),
                                      {{"command", "score"},
                                       {"dataset", sc.dataset},
                                       {"predictions", sc.predictions},
                                       {"stratify", sc.stratify}});
      write_text(sc.out, report.to_json(header).dump(2) + "\n", out);
      write_text(sc.table, report.to_table(), out);
      return 0;
    }

    if (correct_cmd->parsed()) {
      const Dataset d = read_dataset_file(cor.in);
      const TestKind test = test_from_header(d.header);
      const auto seed = d.header.at("seed").get<std::uint64_t>();
      const auto res = load_resources(cor.vocab.empty() ? header_path(d.header, "vocab") : cor.vocab,
                                      cor.templates.empty() ? header_path(d.header, "templates") : cor.templates);
      const PairGenerator generator(res->vocab, res->templates, options_from_header(d.header, cor.jobs));
      const auto provider = cor.provider.make();
      const BuildResult built = correct_dataset(generator, test, seed, pairs_of(d), *provider);
      // The dataset keeps its generation header; the correction settings go
      // to the log.
      write_text(cor.out, dataset_to_string(d.header, built.pairs), out);
      if (!cor.log.empty()) {
        const auto log_header = make_header(seed, {{"command", "correct"},
                                                   {"dataset", cor.in},
                                                   {"correction", cor.provider.to_json()}});
        write_text(cor.log, write_log(log_header, built.log), out);
      }
      err << "corrected " << built.pairs.size() << " pairs, replaced " << built.replaced << "\n";
      return 0;
    }
  } catch (const ProviderError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ScoreError& e) {
    err << "error: prediction ids do not match the dataset\n";
    for (const auto& p : e.problems()) err << "  " << p << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace mwp
