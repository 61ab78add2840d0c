#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "ragrules/bench.hpp"
#include "ragrules/errors.hpp"
#include "ragrules/miner_dual.hpp"
#include "ragrules/miner_mono.hpp"

namespace ragrules {

namespace {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

// Throws std::runtime_error describing the first problem found.
HotpotExample parse_example(const nlohmann::json& entry) {
  HotpotExample example;
  if (!entry.is_object()) throw std::runtime_error("entry is not an object");
  if (entry.contains("_id")) example.id = entry.at("_id").get<std::string>();
  example.question = entry.at("question").get<std::string>();
  example.answer = entry.at("answer").get<std::string>();
  for (const auto& doc : entry.at("context")) {
    if (!doc.is_array() || doc.size() != 2) {
      throw std::runtime_error("context item is not [title, sentences]");
    }
    example.context.push_back(
        {doc[0].get<std::string>(), doc[1].get<std::vector<std::string>>()});
  }
  for (const auto& fact : entry.at("supporting_facts")) {
    if (!fact.is_array() || fact.size() != 2) {
      throw std::runtime_error("supporting fact is not [title, index]");
    }
    SupportingFact resolved{fact[0].get<std::string>(), fact[1].get<int>(), -1};
    for (std::size_t d = 0; d < example.context.size(); ++d) {
      if (example.context[d].title == resolved.title) {
        resolved.document_index = static_cast<int>(d);
        break;
      }
    }
    if (resolved.document_index < 0) {
      throw std::runtime_error("supporting fact title '" + resolved.title +
                               "' is not in the context");
    }
    const auto& doc = example.context[resolved.document_index];
    if (resolved.sentence_index < 0 ||
        resolved.sentence_index >= static_cast<int>(doc.sentences.size())) {
      throw std::runtime_error("supporting fact '" + resolved.title + "'[" +
                               std::to_string(resolved.sentence_index) +
                               "] points past the document");
    }
    example.supporting_facts.push_back(std::move(resolved));
  }
  if (example.supporting_facts.size() < 2) {
    throw std::runtime_error("fewer than two supporting facts");
  }
  return example;
}

}  // namespace

int HotpotExample::total_sentences() const {
  int total = 0;
  for (const auto& doc : context) total += static_cast<int>(doc.sentences.size());
  return total;
}

HotpotLoad parse_hotpot(const nlohmann::json& document) {
  if (!document.is_array()) {
    throw LoadError("HotpotQA file must hold a JSON array of examples");
  }
  HotpotLoad load;
  for (std::size_t i = 0; i < document.size(); ++i) {
    try {
      load.examples.push_back(parse_example(document[i]));
      if (load.examples.back().id.empty()) {
        load.examples.back().id = "example-" + std::to_string(i);
      }
    } catch (const std::exception& e) {
      ++load.skipped;
      load.warnings.push_back("skipping example " + std::to_string(i) + ": " +
                              e.what());
    }
  }
  return load;
}

HotpotLoad load_hotpot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  nlohmann::json document;
  try {
    in >> document;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path.string() + " is not valid JSON: " + e.what());
  }
  return parse_hotpot(document);
}

std::vector<HotpotExample> filter_by_supporting_facts(
    const std::vector<HotpotExample>& examples, std::size_t count) {
  std::vector<HotpotExample> out;
  std::copy_if(examples.begin(), examples.end(), std::back_inserter(out),
               [&](const auto& e) { return e.supporting_facts.size() == count; });
  return out;
}

InputSet build_source_set(const HotpotExample& example, int k,
                          const std::string& instructions) {
  if (k < 0 || k > example.total_sentences()) {
    throw std::invalid_argument("k = " + std::to_string(k) + " but example " +
                                example.id + " has " +
                                std::to_string(example.total_sentences()) +
                                " sentences");
  }
  if (k > kMaxSources) throw std::invalid_argument("k exceeds 64 sources");

  // Flat dataset position of (document, sentence).
  std::vector<int> offsets;
  int running = 0;
  for (const auto& doc : example.context) {
    offsets.push_back(running);
    running += static_cast<int>(doc.sentences.size());
  }
  std::vector<int> supporting;
  for (const auto& fact : example.supporting_facts) {
    const int position = offsets[fact.document_index] + fact.sentence_index;
    if (std::find(supporting.begin(), supporting.end(), position) ==
        supporting.end()) {
      supporting.push_back(position);
    }
  }

  std::vector<int> chosen(supporting.begin(),
                          supporting.begin() +
                              std::min<std::size_t>({static_cast<std::size_t>(k),
                                                     3, supporting.size()}));
  for (int position = 0;
       position < running && static_cast<int>(chosen.size()) < k; ++position) {
    if (std::find(supporting.begin(), supporting.end(), position) ==
        supporting.end()) {
      chosen.push_back(position);
    }
  }
  if (static_cast<int>(chosen.size()) < k) {
    throw std::invalid_argument("example " + example.id +
                                " lacks enough non-supporting sentences for k = " +
                                std::to_string(k));
  }
  std::sort(chosen.begin(), chosen.end());

  std::vector<Source> sources;
  for (int position : chosen) {
    std::size_t d = 0;
    while (d + 1 < offsets.size() && offsets[d + 1] <= position) ++d;
    const int sentence = position - offsets[d];
    sources.push_back({example.context[d].title + "#" + std::to_string(sentence),
                       trim(example.context[d].sentences[sentence])});
  }
  return InputSet(std::move(sources), {example.question, instructions});
}

CountingModel::CountingModel(std::shared_ptr<ModelClient> inner)
    : inner_(std::move(inner)) {
  if (!inner_) throw ConfigError("counting model needs an inner model");
}

std::string CountingModel::infer(const ModelInput& input) {
  {
    std::lock_guard lock(mutex_);
    ++calls_;
    distinct_.insert(input.retained.bits());
  }
  return inner_->infer(input);
}

std::uint64_t CountingModel::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::set<std::uint64_t> CountingModel::distinct_inputs() const {
  std::lock_guard lock(mutex_);
  return distinct_;
}

CurveReport run_curves(const std::vector<HotpotExample>& examples, int k_min,
                       int k_max, const CurveSetup& setup) {
  if (!setup.model || !setup.predicates) {
    throw ConfigError("curve setup needs a model and a predicate factory");
  }
  if (k_min < 0 || k_max < k_min) throw std::invalid_argument("bad k range");

  CurveReport report;
  for (int k = k_min; k <= k_max; ++k) {
    LatticeMetrics sum;
    sum.n = k;
    const double lattice = std::ldexp(1.0, k);
    for (const auto& example : examples) {
      try {
        const InputSet input = build_source_set(example, k, setup.instructions);
        const PredicatePair predicates = setup.predicates(example);
        MineOptions options;
        options.parallelism = setup.parallelism;

        auto ret_counter = std::make_shared<CountingModel>(setup.model);
        auto omi_counter = std::make_shared<CountingModel>(setup.model);
        auto dual_counter = std::make_shared<CountingModel>(setup.model);
        const auto mono_ret = mine_mono(input, *predicates.retention,
                                        *ret_counter, Interpretation::kRetention,
                                        options);
        const auto mono_omi = mine_mono(input, *predicates.omission,
                                        *omi_counter, Interpretation::kOmission,
                                        options);
        DualOptions dual_options;
        dual_options.parallelism = setup.parallelism;
        dual_options.cache_enabled = true;
        const auto dual = mine_dual(input, *predicates.retention,
                                    *predicates.omission, *dual_counter,
                                    dual_options);

        if (dual.valid_retention != mono_ret.valid ||
            dual.valid_omission != mono_omi.valid) {
          ++report.dual_mono_mismatches;
        }

        auto pair_distinct = ret_counter->distinct_inputs();
        const auto omi_distinct = omi_counter->distinct_inputs();
        pair_distinct.insert(omi_distinct.begin(), omi_distinct.end());
        const double pair_calls =
            static_cast<double>(ret_counter->calls() + omi_counter->calls());
        const double dual_calls = static_cast<double>(dual_counter->calls());

        sum.examples += 1;
        sum.mono_retention_explored += mono_ret.telemetry.proportion_explored();
        sum.mono_omission_explored += mono_omi.telemetry.proportion_explored();
        sum.dual_explored += dual.telemetry.combined.proportion_explored();
        sum.retention_rule_fraction += mono_ret.valid.size() / lattice;
        sum.omission_rule_fraction += mono_omi.valid.size() / lattice;
        sum.mono_pair_evaluated_fraction += pair_calls / (2 * lattice);
        sum.dual_evaluated_fraction += dual_calls / (2 * lattice);
        sum.mono_pair_duplicate_fraction +=
            (pair_calls - static_cast<double>(pair_distinct.size())) /
            (2 * lattice);
        sum.duplicate_subset_fraction +=
            (dual_calls -
             static_cast<double>(dual_counter->distinct_inputs().size())) /
            (2 * lattice);

        if (k == k_max) {
          report.scatter.push_back({example.id, k, Interpretation::kRetention,
                                    mono_ret.valid.size(),
                                    mono_ret.telemetry.model_calls});
          report.scatter.push_back({example.id, k, Interpretation::kOmission,
                                    mono_omi.valid.size(),
                                    mono_omi.telemetry.model_calls});
        }
      } catch (const std::exception& e) {
        ++report.excluded_runs;
        report.errors.push_back(example.id + " (k=" + std::to_string(k) +
                                "): " + e.what());
      }
    }
    if (sum.examples > 0) {
      const double count = static_cast<double>(sum.examples);
      for (double* field :
           {&sum.mono_retention_explored, &sum.mono_omission_explored,
            &sum.dual_explored, &sum.retention_rule_fraction,
            &sum.omission_rule_fraction, &sum.mono_pair_evaluated_fraction,
            &sum.dual_evaluated_fraction, &sum.mono_pair_duplicate_fraction,
            &sum.duplicate_subset_fraction}) {
        *field /= count;
      }
    }
    report.points.push_back(sum);
  }
  return report;
}

void write_fig4a_csv(std::ostream& out, const CurveReport& report) {
  out << "k,examples,mono_retention,mono_omission,dual\n";
  for (const auto& p : report.points) {
    out << p.n << ',' << p.examples << ',' << p.mono_retention_explored << ','
        << p.mono_omission_explored << ',' << p.dual_explored << '\n';
  }
}

void write_fig4b_csv(std::ostream& out, const CurveReport& report) {
  out << "k,examples,retention_rule_fraction,omission_rule_fraction\n";
  for (const auto& p : report.points) {
    out << p.n << ',' << p.examples << ',' << p.retention_rule_fraction << ','
        << p.omission_rule_fraction << '\n';
  }
}

void write_fig5_csv(std::ostream& out, const CurveReport& report) {
  out << "k,examples,mono_pair_evaluated,dual_cached_evaluated,"
         "mono_pair_duplicate,dual_cached_duplicate\n";
  for (const auto& p : report.points) {
    out << p.n << ',' << p.examples << ',' << p.mono_pair_evaluated_fraction
        << ',' << p.dual_evaluated_fraction << ','
        << p.mono_pair_duplicate_fraction << ',' << p.duplicate_subset_fraction
        << '\n';
  }
}

void write_fig6b_csv(std::ostream& out, const CurveReport& report) {
  out << "example_id,k,interpretation,valid_rules,visited\n";
  for (const auto& s : report.scatter) {
    out << s.example_id << ',' << s.n << ',' << to_string(s.interpretation)
        << ',' << s.valid_rules << ',' << s.visited << '\n';
  }
}

nlohmann::json to_json(const CurveReport& report) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : report.points) {
    points.push_back({{"k", p.n},
                      {"examples", p.examples},
                      {"mono_retention_explored", p.mono_retention_explored},
                      {"mono_omission_explored", p.mono_omission_explored},
                      {"dual_explored", p.dual_explored},
                      {"retention_rule_fraction", p.retention_rule_fraction},
                      {"omission_rule_fraction", p.omission_rule_fraction},
                      {"mono_pair_evaluated_fraction", p.mono_pair_evaluated_fraction},
                      {"dual_evaluated_fraction", p.dual_evaluated_fraction},
                      {"mono_pair_duplicate_fraction", p.mono_pair_duplicate_fraction},
                      {"duplicate_subset_fraction", p.duplicate_subset_fraction}});
  }
  nlohmann::json scatter = nlohmann::json::array();
  for (const auto& s : report.scatter) {
    scatter.push_back({{"example_id", s.example_id},
                       {"k", s.n},
                       {"interpretation", to_string(s.interpretation)},
                       {"valid_rules", s.valid_rules},
                       {"visited", s.visited}});
  }
  return {{"points", points},
          {"scatter", scatter},
          {"excluded_runs", report.excluded_runs},
          {"dual_mono_mismatches", report.dual_mono_mismatches},
          {"errors", report.errors}};
}

}  // namespace ragrules
