// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

#include "ragrules/bench.hpp"
#include "ragrules/cli.hpp"
#include "ragrules/config.hpp"
#include "ragrules/miner_dual.hpp"
#include "ragrules/miner_mono.hpp"
#include "ragrules/oracle.hpp"
#include "support/reference.hpp"

using namespace ragrules;
using reference::Bits;

namespace {

const auto kRet = Interpretation::kRetention;
const auto kOmi = Interpretation::kOmission;
const std::filesystem::path kFixtures(RAGRULES_FIXTURES_DIR);

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Model whose output encodes the retention and omission verdicts for the
// concrete retained set as two characters, e.g. "10".
class PairModel final : public ModelClient {
 public:
  PairModel(reference::Satisfaction ret, reference::Satisfaction omi)
      : ret_(std::move(ret)), omi_(std::move(omi)) {}
  std::string infer(const ModelInput& input) override {
    std::lock_guard lock(mutex_);
    const auto c = input.retained.bits();
    ++seen[c];
    ++calls;
    return std::string(1, ret_[c] ? '1' : '0') + (omi_[c] ? '1' : '0');
  }
  ModelKind kind() const override { return ModelKind::kScripted; }
  std::map<Bits, int> seen;
  std::uint64_t calls = 0;

 private:
  reference::Satisfaction ret_, omi_;
  std::mutex mutex_;
};

const RegexPredicate& first_bit() {
  static const RegexPredicate p("^1", false);
  return p;
}
const RegexPredicate& second_bit() {
  static const RegexPredicate p("^.1", false);
  return p;
}

struct Loaded {
  RunConfig config;
  InputSet input;
  std::shared_ptr<ModelClient> model;
  std::shared_ptr<const OutputPredicate> predicate;
};

Loaded load_fixture(const char* name) {
  Loaded l;
  l.config = load_config(kFixtures / "configs" / name);
  l.input = make_input_set(l.config.input);
  l.model = make_model(l.config.model, l.input.size(), l.config.base_dir);
  l.predicate = make_predicate(l.config.predicate);
  return l;
}

class CallCounter final : public ModelClient {
 public:
  explicit CallCounter(ModelClient& inner) : inner_(inner) {}
  std::string infer(const ModelInput& input) override {
    ++calls;
    return inner_.infer(input);
  }
  ModelKind kind() const override { return inner_.kind(); }
  int calls = 0;

 private:
  ModelClient& inner_;
};

std::string masks(const std::vector<SourceMask>& list) {
  std::string out = "{";
  for (std::size_t i = 0; i < list.size(); ++i) {
    out += (i ? "," : "") + to_string(list[i]);
  }
  return out + "}";
}

// ---------------------------------------------------------------------------

Outcome criterion_1() {
  const auto start = Clock::now();
  const int n = 3;
  const auto input = reference::blank_inputs(n);
  int mismatches = 0;
  for (Bits packed = 0; packed < 256; ++packed) {
    reference::Satisfaction sat(8);
    for (Bits c = 0; c < 8; ++c) sat[c] = (packed >> c) & 1U;
    auto model = reference::scripted(n, sat);
    for (auto interpretation : {kRet, kOmi}) {
      const auto mined = mine_mono(input, *token_predicate(), model, interpretation);
      const auto oracle = brute_force_valid(interpretation, input, *token_predicate(), model);
      if (mined.valid != oracle.valid ||
          reference::bits_of(oracle.valid) != reference::rules(n, sat, interpretation)) {
        ++mismatches;
      }
    }
  }
  const double elapsed = seconds_since(start);
  std::ostringstream d;
  d << "256 assignments x 2 interpretations, " << mismatches << " mismatches, "
    << elapsed << " s (limit 5 s)";
  return {mismatches == 0 && elapsed < 5.0, d.str()};
}

Outcome criterion_2() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240601);
  int mismatches = 0;
  int cases = 0;
  for (int n : {4, 5, 6}) {
    const auto input = reference::blank_inputs(n);
    for (int trial = 0; trial < 1000; ++trial, ++cases) {
      const double p = 0.5 + 0.5 * std::uniform_real_distribution<>(0, 1)(rng);
      const auto sat_ret = reference::random_satisfaction(n, rng, p);
      const auto sat_omi = reference::random_satisfaction(n, rng, p);
      PairModel model(sat_ret, sat_omi);
      const auto oracle_ret = brute_force_valid(kRet, input, first_bit(), model);
      const auto oracle_omi = brute_force_valid(kOmi, input, second_bit(), model);
      const auto mono_ret = mine_mono(input, first_bit(), model, kRet);
      const auto mono_omi = mine_mono(input, second_bit(), model, kOmi);
      DualOptions options;
      options.cache_enabled = trial % 2 == 0;
      const auto dual = mine_dual(input, first_bit(), second_bit(), model, options);
      const bool ok = mono_ret.valid == oracle_ret.valid &&
                      mono_omi.valid == oracle_omi.valid &&
                      dual.valid_retention == oracle_ret.valid &&
                      dual.valid_omission == oracle_omi.valid &&
                      dual.valid_retention == mono_ret.valid &&
                      dual.valid_omission == mono_omi.valid &&
                      reference::bits_of(oracle_ret.valid) ==
                          reference::rules(n, sat_ret, kRet) &&
                      reference::bits_of(oracle_omi.valid) ==
                          reference::rules(n, sat_omi, kOmi);
      mismatches += !ok;
    }
  }
  const double elapsed = seconds_since(start);
  std::ostringstream d;
  d << cases << " sampled cases over n=4,5,6, " << mismatches << " mismatches, "
    << elapsed << " s (limit 60 s)";
  return {mismatches == 0 && elapsed < 60.0, d.str()};
}

Outcome criterion_3() {
  std::mt19937_64 rng(31);
  std::uint64_t runs = 0;
  std::uint64_t violations = 0;
  const auto check = [&](int n, const reference::Satisfaction& sat) {
    // `sat` is indexed by lattice node. Under omission node m is judged on
    // the retained set complement(m), so the table is flipped for the model.
    reference::Satisfaction flipped(sat.size());
    for (Bits c = 0; c < sat.size(); ++c) flipped[c] = sat[reference::full(n) ^ c];
    auto retention_model = reference::scripted(n, sat);
    auto omission_model = reference::scripted(n, flipped);
    const auto input = reference::blank_inputs(n);
    for (auto interpretation : {kRet, kOmi}) {
      CallCounter counter(interpretation == kRet ? retention_model : omission_model);
      const auto r = mine_mono(input, *token_predicate(), counter, interpretation);
      ++runs;
      if (counter.calls != 1 || r.telemetry.model_calls != 1 || !r.valid.empty()) {
        ++violations;
      }
    }
  };
  for (int n = 0; n <= 4; ++n) {
    const Bits nodes = Bits{1} << n;
    const Bits root = nodes - 1;
    for (Bits packed = 0; packed < (Bits{1} << nodes); ++packed) {
      if ((packed >> root) & 1U) continue;
      reference::Satisfaction sat(nodes);
      for (Bits c = 0; c < nodes; ++c) sat[c] = (packed >> c) & 1U;
      check(n, sat);
    }
  }
  for (int n : {5, 6}) {
    for (int trial = 0; trial < 5000; ++trial) {
      auto sat = reference::random_satisfaction(n, rng, 0.5 + (trial % 5) * 0.1);
      sat[reference::full(n)] = false;
      check(n, sat);
    }
  }
  std::ostringstream d;
  d << runs << " root-unsatisfied runs (exhaustive n<=4, 5000 sampled each for n=5,6), "
    << violations << " with more than one call";
  return {violations == 0, d.str()};
}

Outcome criterion_4() {
  auto fixture = load_fixture("fig2.json");
  MineOptions options;
  options.record_trace = true;
  const auto r = mine_mono(fixture.input, *fixture.predicate, *fixture.model, kRet, options);
  std::vector<SourceMask> pruned;
  for (const auto& level : r.trace) {
    if (level.level == 2) pruned = level.pruned;
  }
  const std::vector<SourceMask> expected{SourceMask::from_indices({1, 2}, 4),
                                         SourceMask::from_indices({1, 3}, 4),
                                         SourceMask::from_indices({2, 3}, 4)};
  return {pruned == expected, "level-2 pruned set " + masks(pruned) +
                                  ", expected " + masks(expected)};
}

Outcome criterion_5() {
  auto fixture = load_fixture("fig1-mono.json");
  CallCounter counter(*fixture.model);
  const auto r = mine_mono(fixture.input, *fixture.predicate, counter, kRet);
  const auto oracle = brute_force_valid(kRet, fixture.input, *fixture.predicate, *fixture.model);
  const std::vector<SourceMask> valid{SourceMask::from_indices({2}, 3),
                                      SourceMask::from_indices({1, 2}, 3),
                                      SourceMask::from_indices({2, 3}, 3),
                                      SourceMask::from_indices({1, 2, 3}, 3)};
  std::vector<SourceMask> sorted_valid = valid;
  std::sort(sorted_valid.begin(), sorted_valid.end());
  const std::vector<SourceMask> minimal{SourceMask::from_indices({2}, 3)};
  const bool ok = r.valid == sorted_valid && r.minimal == minimal &&
                  counter.calls == 5 && r.telemetry.model_calls == 5 &&
                  oracle.valid == sorted_valid;
  std::ostringstream d;
  d << "valid " << masks(r.valid) << ", minimal " << masks(r.minimal) << ", "
    << counter.calls << " model calls, oracle " << (oracle.valid == r.valid ? "agrees" : "disagrees");
  return {ok, d.str()};
}

Outcome criterion_6() {
  auto fixture = load_fixture("fig3.json");
  const auto r = mine_mono(fixture.input, *fixture.predicate, *fixture.model, kRet);
  const auto oracle = brute_force_valid(kRet, fixture.input, *fixture.predicate, *fixture.model);
  const std::vector<SourceMask> minimal{SourceMask::from_indices({2, 4}, 5)};
  const bool ok = r.minimal == minimal && r.valid.size() == 8 && oracle.valid == r.valid;
  std::ostringstream d;
  d << "minimal " << masks(r.minimal) << " (labels D2,D4), " << r.valid.size()
    << " valid rules";
  return {ok, d.str()};
}

Outcome criterion_7() {
  std::mt19937_64 rng(77);
  int runs = 0, duplicates = 0, over_budget = 0, differing = 0;
  for (int n = 1; n <= 6; ++n) {
    const auto input = reference::blank_inputs(n);
    for (int trial = 0; trial < 300; ++trial) {
      const double p = 0.5 + 0.5 * std::uniform_real_distribution<>(0, 1)(rng);
      const auto sat_ret = reference::random_satisfaction(n, rng, p);
      const auto sat_omi = reference::random_satisfaction(n, rng, p);
      PairModel cached_model(sat_ret, sat_omi), plain_model(sat_ret, sat_omi);
      DualOptions on;
      on.cache_enabled = true;
      on.parallelism = 1 + trial % 3;
      DualOptions off;
      const auto a = mine_dual(input, first_bit(), second_bit(), cached_model, on);
      const auto b = mine_dual(input, first_bit(), second_bit(), plain_model, off);
      ++runs;
      for (const auto& [_, count] : cached_model.seen) duplicates += count > 1;
      over_budget += cached_model.calls > (Bits{1} << n);
      differing += a.valid_retention != b.valid_retention ||
                   a.valid_omission != b.valid_omission ||
                   a.minimal_retention != b.minimal_retention ||
                   a.minimal_omission != b.minimal_omission;
    }
  }
  std::ostringstream d;
  d << runs << " runs (n=1..6): " << duplicates << " duplicate inputs, " << over_budget
    << " runs over 2^n calls, " << differing << " runs with differing rules";
  return {duplicates == 0 && over_budget == 0 && differing == 0, d.str()};
}

Outcome criterion_8() {
  const auto start = Clock::now();
  const auto sweep = synth_sweep(4);
  const double elapsed = seconds_since(start);
  bool ok = sweep.assignments == 65536 && sweep.oracle_mismatches == 0 && elapsed < 120.0;
  double worst_overshoot = 0;
  double mean0 = -1, mean16 = -1;
  for (const auto& row : sweep.rows) {
    ok &= row.mean_visited >= row.valid_rule_count;
    worst_overshoot = std::max(worst_overshoot, row.mean_visited - row.valid_rule_count);
    if (row.valid_rule_count == 0) mean0 = row.mean_visited;
    if (row.valid_rule_count == 16) mean16 = row.mean_visited;
  }
  ok &= mean0 == 1.0 && mean16 == 16.0 && worst_overshoot <= 4.0 && sweep.rows.size() == 17;
  std::ostringstream d;
  d << sweep.assignments << " assignments, " << sweep.rows.size() << " groups, valid=0 mean "
    << mean0 << ", valid=16 mean " << mean16 << ", worst mean overshoot " << worst_overshoot
    << ", " << elapsed << " s (limit 120 s)";
  return {ok, d.str()};
}

Outcome criterion_9() {
  std::mt19937_64 rng(9);
  int cases = 0, failures = 0;
  for (; cases < 10000; ++cases) {
    const int n = static_cast<int>(rng() % 7);
    const auto interpretation = cases % 2 ? kOmi : kRet;
    const double p = 0.6 + 0.4 * std::uniform_real_distribution<>(0, 1)(rng);
    const auto sat = reference::random_satisfaction(n, rng, p);
    auto model = reference::scripted(n, sat);
    const auto result =
        brute_force_valid(interpretation, reference::blank_inputs(n), *token_predicate(), model);
    const auto valid_bits = reference::bits_of(result.valid);
    const std::set<Bits> valid(valid_bits.begin(), valid_bits.end());
    bool ok = true;
    for (Bits m : valid) {
      for (const auto& parent : parents(SourceMask(m, n))) ok &= valid.contains(parent.bits());
    }
    const auto minimal = minimal_rules(result.valid);
    for (const auto& a : minimal) {
      for (const auto& b : minimal) ok &= a == b || !a.is_subset_of(b);
    }
    std::set<Bits> closure;
    for (Bits c = 0; c <= reference::full(n); ++c) {
      for (const auto& m : minimal) {
        if ((c & m.bits()) == m.bits()) closure.insert(c);
      }
    }
    ok &= closure == valid;
    failures += !ok;
  }
  std::ostringstream d;
  d << cases << " random oracle runs (n=0..6, both interpretations), " << failures
    << " violations";
  return {failures == 0, d.str()};
}

Outcome criterion_10() {
  RunConfig config = load_config(kFixtures / "configs" / "hotpot-replay.json");
  const auto dir = std::filesystem::temp_directory_path() / "ragrules-acceptance-curves";
  std::filesystem::remove_all(dir);
  config.hotpot->output_dir = dir;
  const auto report_path = dir.string() + ".json";
  config.output = report_path;
  std::ostringstream out, err;
  const int code = run(config, out, err);
  if (code != kExitOk) return {false, "hotpot-curves exited " + std::to_string(code) + ": " + err.str()};

  const std::map<std::string, std::string> headers{
      {"fig4a.csv", "k,examples,mono_retention,mono_omission,dual"},
      {"fig4b.csv", "k,examples,retention_rule_fraction,omission_rule_fraction"},
      {"fig5.csv",
       "k,examples,mono_pair_evaluated,dual_cached_evaluated,mono_pair_duplicate,dual_cached_duplicate"},
      {"fig6b.csv", "example_id,k,interpretation,valid_rules,visited"}};
  bool ok = true;
  std::string missing;
  for (const auto& [file, header] : headers) {
    std::ifstream in(dir / file);
    std::string first;
    std::getline(in, first);
    std::string row;
    const bool has_rows = static_cast<bool>(std::getline(in, row));
    if (first != header || !has_rows) {
      ok = false;
      missing += " " + file;
    }
  }
  std::ifstream in(report_path);
  const auto report = nlohmann::json::parse(in);
  const auto& curves = report["curves"];
  double worst_duplicate = 0;
  std::size_t examples = 0;
  for (const auto& point : curves["points"]) {
    worst_duplicate = std::max(worst_duplicate, point["duplicate_subset_fraction"].get<double>());
    examples = std::max(examples, point["examples"].get<std::size_t>());
  }
  const auto excluded = curves["excluded_runs"].get<std::size_t>();
  const auto mismatched = curves["dual_mono_mismatches"].get<std::size_t>();
  ok &= worst_duplicate == 0.0 && excluded == 0 && mismatched == 0 && examples > 0 &&
        curves["points"].size() == 7;
  std::ostringstream d;
  d << curves["points"].size() << " k values, " << examples << " examples, " << excluded
    << " excluded runs, max dual duplicate fraction " << worst_duplicate
    << (missing.empty() ? ", all four CSVs present" : ", bad CSVs:" + missing);
  std::filesystem::remove_all(dir);
  std::filesystem::remove(report_path);
  return {ok, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"oracle equivalence, exhaustive n=3", criterion_1},
      {"oracle equivalence, sampled n=4,5,6", criterion_2},
      {"single-call short-circuit", criterion_3},
      {"level-2 pruning fixture", criterion_4},
      {"running-example fixture", criterion_5},
      {"minimality fixture", criterion_6},
      {"dual cache soundness", criterion_7},
      {"synthetic sweep n=4", criterion_8},
      {"superset closure and antichain", criterion_9},
      {"hotpot-curves on replay fixtures", criterion_10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    failed += !outcome.pass;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << "  criterion " << (i + 1) << ": "
              << criteria[i].first << " -- " << outcome.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
