#pragma once

// Desk-scale reproduction harness: the exhaustive synthetic sweep over all
// validity assignments of a small lattice, and the HotpotQA pruning curves.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragrules/lattice.hpp"
#include "ragrules/model.hpp"
#include "ragrules/predicate.hpp"

namespace ragrules {

// ---------------------------------------------------------------------------
// Synthetic sweep
// ---------------------------------------------------------------------------

inline constexpr int kSweepMaxSources = 4;

struct SweepRow {
  int valid_rule_count = 0;
  double mean_visited = 0.0;
  std::uint64_t min_visited = 0;
  std::uint64_t max_visited = 0;
  std::uint64_t assignment_count = 0;
};

struct SweepResult {
  int n = 0;
  std::vector<SweepRow> rows;  // ascending valid_rule_count, empty groups omitted
  std::uint64_t assignments = 0;
  // Assignments where the miner's valid set differed from propagation.
  std::uint64_t oracle_mismatches = 0;
};

// Runs Mono(retention) with the token predicate on every one of the
// 2^(2^n) satisfaction assignments and groups visited-node counts by the
// number of valid rules. Throws RefusalError for n > 4.
SweepResult synth_sweep(int n, int parallelism = 1);

void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

// ---------------------------------------------------------------------------
// HotpotQA
// ---------------------------------------------------------------------------

struct ContextDocument {
  std::string title;
  std::vector<std::string> sentences;
};

struct SupportingFact {
  std::string title;
  int sentence_index = 0;
  int document_index = 0;  // resolved position in HotpotExample::context
};

struct HotpotExample {
  std::string id;
  std::string question;
  std::string answer;
  std::vector<ContextDocument> context;
  std::vector<SupportingFact> supporting_facts;

  int total_sentences() const;
};

struct HotpotLoad {
  std::vector<HotpotExample> examples;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

// Parses the HotpotQA distribution shape (a JSON array of examples with
// question, answer, context and supporting_facts). Entries that fail
// validation are skipped and reported. Throws LoadError if the file cannot
// be read or is not a JSON array.
HotpotLoad load_hotpot(const std::filesystem::path& path);
HotpotLoad parse_hotpot(const nlohmann::json& document);

std::vector<HotpotExample> filter_by_supporting_facts(
    const std::vector<HotpotExample>& examples, std::size_t count);

// Picks min(k, 3) supporting sentences (supporting-fact order), then fills
// with non-supporting sentences in dataset order. The chosen sentences keep
// their dataset order in the result. Throws std::invalid_argument if k is
// negative or exceeds the available sentences.
InputSet build_source_set(const HotpotExample& example, int k,
                          const std::string& instructions = {});

// Wraps a model and records which concrete inputs reached it.
class CountingModel final : public ModelClient {
 public:
  explicit CountingModel(std::shared_ptr<ModelClient> inner);
  std::string infer(const ModelInput& input) override;
  ModelKind kind() const override { return inner_->kind(); }

  std::uint64_t calls() const;
  std::set<std::uint64_t> distinct_inputs() const;

 private:
  std::shared_ptr<ModelClient> inner_;
  mutable std::mutex mutex_;
  std::uint64_t calls_ = 0;
  std::set<std::uint64_t> distinct_;
};

// Metrics for one lattice size, averaged over the examples that completed.
struct LatticeMetrics {
  int n = 0;
  std::size_t examples = 0;
  // Evaluated nodes over 2^n.
  double mono_retention_explored = 0.0;
  double mono_omission_explored = 0.0;
  double dual_explored = 0.0;
  // Valid rules over 2^n.
  double retention_rule_fraction = 0.0;
  double omission_rule_fraction = 0.0;
  // Model calls over 2 * 2^n (two lattices' worth of subsets).
  double mono_pair_evaluated_fraction = 0.0;
  double dual_evaluated_fraction = 0.0;
  // Repeated concrete inputs over 2 * 2^n.
  double mono_pair_duplicate_fraction = 0.0;
  double duplicate_subset_fraction = 0.0;  // cached Dual
};

struct ScatterPoint {
  std::string example_id;
  int n = 0;
  Interpretation interpretation = Interpretation::kRetention;
  std::size_t valid_rules = 0;
  std::uint64_t visited = 0;
};

struct CurveSetup {
  std::shared_ptr<ModelClient> model;
  // O_correct drives retention, O_incorrect drives omission.
  std::function<PredicatePair(const HotpotExample&)> predicates;
  std::string instructions;
  int parallelism = 1;
};

struct CurveReport {
  std::vector<LatticeMetrics> points;  // one per k
  std::vector<ScatterPoint> scatter;   // runs at the largest k
  std::size_t excluded_runs = 0;       // (example, k) pairs that aborted
  std::vector<std::string> errors;
  // Runs where cached Dual disagreed with the two Mono runs.
  std::size_t dual_mono_mismatches = 0;
};

// For each k in [k_min, k_max] and each example: Mono(retention, O_correct),
// Mono(omission, O_incorrect), and cached Dual. Aborted runs are excluded and
// counted; the sweep continues.
CurveReport run_curves(const std::vector<HotpotExample>& examples, int k_min,
                       int k_max, const CurveSetup& setup);

void write_fig4a_csv(std::ostream& out, const CurveReport& report);
void write_fig4b_csv(std::ostream& out, const CurveReport& report);
void write_fig5_csv(std::ostream& out, const CurveReport& report);
void write_fig6b_csv(std::ostream& out, const CurveReport& report);

nlohmann::json to_json(const SweepResult& sweep);
nlohmann::json to_json(const CurveReport& report);

}  // namespace ragrules
