// Paired dataset construction for the three tests, optional correction with
// replacement of discarded pairs, and the automated dataset audit.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mwp/correct.h"
#include "mwp/dataset.h"
#include "mwp/instantiate.h"
#include "mwp/render.h"

namespace mwp {

struct GenerationOptions {
  NumberRange range;
  int jobs = 1;
  // Fresh pairs tried per index when correction discards one.
  int max_replacements = 100;
  // Structure resamples per pair when instantiation or rendering fails.
  int max_build_attempts = 100;

  // Everything that affects output bytes; jobs is excluded.
  nlohmann::ordered_json to_json() const;
};

// 16 hex digits derived from (seed, pair index, retry counter).
std::string make_pair_id(std::uint64_t seed, std::size_t index, std::uint32_t retry);

// Retry counter whose pair id matches, searching [0, limit).
std::optional<std::uint32_t> find_retry(std::uint64_t seed, std::size_t index, const std::string& pair_id,
                                        std::uint32_t limit);

class PairGenerator {
 public:
  PairGenerator(const Vocabulary& vocab, const TemplateLibrary& templates, GenerationOptions options = {});

  const GenerationOptions& options() const { return options_; }
  const Renderer& renderer() const { return renderer_; }

  // Deterministic in (test, seed, index, retry).
  ProblemPair build_pair(TestKind test, std::uint64_t seed, std::size_t index, std::uint32_t retry) const;

 private:
  ProblemPair consistency_pair(Rng& rng) const;
  ProblemPair tc_pair(Rng& rng) const;
  ProblemPair carry_pair(Rng& rng) const;

  const Vocabulary& vocab_;
  GenerationOptions options_;
  Renderer renderer_;
};

struct CorrectionLogEntry {
  std::size_t pair_index = 0;
  std::string pair_id;
  std::string problem_id;
  std::string status;  // corrected | unchanged | discarded
  std::string reason;
  std::string completion;

  nlohmann::ordered_json to_json() const;
};

struct BuildResult {
  std::vector<ProblemPair> pairs;
  std::vector<CorrectionLogEntry> log;
  std::size_t replaced = 0;  // pairs discarded and replaced
};

// Exactly n_pairs pairs in pair-index order. With a provider, both members of
// each pair are corrected and a pair with any discarded member is replaced by
// the next retry for the same index. Throws ProviderError, or
// InstantiationError when an index exhausts its replacements.
BuildResult build_dataset(const PairGenerator& gen, TestKind test, std::size_t n_pairs, std::uint64_t seed,
                          CorrectionProvider* provider = nullptr);

// Corrects an existing dataset built with `seed`; replacements continue from
// each pair's own retry counter.
BuildResult correct_dataset(const PairGenerator& gen, TestKind test, std::uint64_t seed,
                            const std::vector<ProblemPair>& pairs, CorrectionProvider& provider);

struct AuditReport {
  std::size_t pairs = 0;
  std::map<std::string, std::size_t> violations;  // check -> count
  std::vector<std::string> messages;

  std::size_t total() const;
  bool ok() const { return total() == 0; }
  nlohmann::ordered_json to_json() const;
};

// Per-problem constraints, pattern conformance, round-trip faithfulness of the
// templated text, and the test's pair-matching invariants.
AuditReport validate_dataset(const std::vector<ProblemPair>& pairs, TestKind test, const Renderer& renderer,
                             const NumberRange& range = {});

struct AuditItem {
  std::size_t pair_index = 0;
  std::string role;  // control | sample
};

// n distinct pair indices in random order; the first min(10, n) are the
// control set.
std::vector<AuditItem> audit_sample(std::size_t n_pairs, std::size_t n, std::uint64_t seed);

}  // namespace mwp
