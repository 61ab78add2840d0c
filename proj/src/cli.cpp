#include "ragrules/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ragrules/bench.hpp"
#include "ragrules/errors.hpp"
#include "ragrules/miner_dual.hpp"
#include "ragrules/miner_mono.hpp"
#include "ragrules/oracle.hpp"
#include "ragrules/report.hpp"

namespace ragrules {

namespace {

using nlohmann::json;

void emit(const RunConfig& config, std::ostream& out, const std::string& text) {
  if (!config.output) {
    out << text;
    return;
  }
  std::ofstream file(*config.output, std::ios::trunc);
  if (!file) throw ConfigError("cannot write " + *config.output);
  file << text;
}

std::string render(const json& report) { return report.dump(2) + "\n"; }

ReportHeader header_for(const RunConfig& config) {
  return {std::string(to_string(config.mode)), config.digest, config.seed, {}};
}

std::shared_ptr<ChatClient> judge_client(const RunConfig& config) {
  if (config.judge.is_null()) return nullptr;
  return make_chat_client(config.judge, config.base_dir, config.seed);
}

void run_hotpot(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const HotpotSettings& settings = *config.hotpot;
  const HotpotLoad load = load_hotpot(settings.path);
  for (const auto& warning : load.warnings) err << "warning: " << warning << '\n';
  auto examples = filter_by_supporting_facts(load.examples, settings.supporting_facts);
  if (settings.limit > 0 && examples.size() > settings.limit) {
    examples.resize(settings.limit);
  }
  if (examples.empty()) {
    throw ConfigError("no HotpotQA examples with " +
                      std::to_string(settings.supporting_facts) +
                      " supporting facts in " + settings.path.string());
  }

  CurveSetup setup;
  // Width is irrelevant for remote models; the block must be openai/replay.
  setup.model = make_model(config.model, 0, config.base_dir, config.seed);
  const auto judge = judge_client(config);
  const json correct = config.predicates["correct"];
  const json incorrect = config.predicates["incorrect"];
  setup.predicates = [=](const HotpotExample& example) {
    const PredicateContext context{example.answer, judge};
    return PredicatePair{make_predicate(correct, context),
                         make_predicate(incorrect, context)};
  };
  setup.instructions = config.input.is_object()
                           ? config.input.value("instructions", std::string())
                           : std::string();
  setup.parallelism = config.parallelism;

  const CurveReport report =
      run_curves(examples, settings.k_min, settings.k_max, setup);
  for (const auto& error : report.errors) err << "excluded: " << error << '\n';

  std::filesystem::create_directories(settings.output_dir);
  const auto write = [&](const char* name, auto writer) {
    std::ofstream file(settings.output_dir / name, std::ios::trunc);
    if (!file) throw ConfigError("cannot write " + (settings.output_dir / name).string());
    writer(file, report);
  };
  write("fig4a.csv", write_fig4a_csv);
  write("fig4b.csv", write_fig4b_csv);
  write("fig5.csv", write_fig5_csv);
  write("fig6b.csv", write_fig6b_csv);

  json summary = {{"schema_version", kReportSchemaVersion},
                  {"tool", kToolName},
                  {"tool_version", kToolVersion},
                  {"config_digest", config.digest},
                  {"seed", config.seed},
                  {"mode", to_string(config.mode)},
                  {"examples", examples.size()},
                  {"skipped_examples", load.skipped},
                  {"output_dir", settings.output_dir.string()},
                  {"curves", to_json(report)}};
  emit(config, out, render(summary));
}

int run_workflow(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.mode == Mode::kSweep) {
    const SweepResult sweep = synth_sweep(config.sweep_n, config.parallelism);
    std::ostringstream csv;
    write_sweep_csv(csv, sweep);
    emit(config, out, csv.str());
    if (sweep.oracle_mismatches != 0) {
      err << "sweep: " << sweep.oracle_mismatches
          << " assignments disagreed with the oracle\n";
      return kExitAborted;
    }
    return kExitOk;
  }
  if (config.mode == Mode::kHotpotCurves) {
    run_hotpot(config, out, err);
    return kExitOk;
  }

  const InputSet input_set = make_input_set(config.input);
  const int n = input_set.size();
  const auto model = make_model(config.model, n, config.base_dir, config.seed);
  const PredicateContext context{std::nullopt, judge_client(config)};

  switch (config.mode) {
    case Mode::kMono: {
      const auto predicate = make_predicate(config.predicate, context);
      MineOptions options;
      options.parallelism = config.parallelism;
      const auto result = mine_mono(input_set, *predicate, *model,
                                    *config.interpretation, options);
      emit(config, out,
           render(mono_report(header_for(config), input_set, result,
                              predicate_description(config.predicate))));
      break;
    }
    case Mode::kDual: {
      const auto retention = make_predicate(config.predicates["retention"], context);
      const auto omission = make_predicate(config.predicates["omission"], context);
      DualOptions options;
      options.parallelism = config.parallelism;
      options.cache_enabled = config.cache;
      options.cache_max_bytes = config.cache_max_bytes;
      const auto result = mine_dual(input_set, *retention, *omission, *model, options);
      emit(config, out,
           render(dual_report(header_for(config), input_set, result,
                              predicate_description(config.predicates["retention"]),
                              predicate_description(config.predicates["omission"]))));
      break;
    }
    case Mode::kVerify: {
      const auto predicate = make_predicate(config.predicate, context);
      SourceMask mask;
      try {
        mask = SourceMask(*config.mask, n);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("mask: ") + e.what());
      }
      Oracle oracle(input_set, *predicate, *model);
      const bool valid = oracle.verify_rule(mask, *config.interpretation);
      out << (valid ? "valid" : "invalid") << '\n';
      if (config.output) {
        emit(config, out,
             render(verify_report(header_for(config), input_set, mask,
                                  *config.interpretation, valid,
                                  oracle.judgments())));
      }
      break;
    }
    case Mode::kOracle: {
      const auto predicate = make_predicate(config.predicate, context);
      const auto result =
          brute_force_valid(*config.interpretation, input_set, *predicate, *model);
      emit(config, out,
           render(oracle_report(header_for(config), input_set, result,
                                predicate_description(config.predicate))));
      break;
    }
    default:
      break;
  }
  return kExitOk;
}

}  // namespace

std::uint64_t parse_mask_literal(const std::string& text) {
  std::size_t used = 0;
  std::uint64_t value = 0;
  try {
    if (text.rfind("0b", 0) == 0 || text.rfind("0B", 0) == 0) {
      value = std::stoull(text.substr(2), &used, 2);
      used += 2;
    } else if (text.rfind("0x", 0) == 0 || text.rfind("0X", 0) == 0) {
      value = std::stoull(text.substr(2), &used, 16);
      used += 2;
    } else {
      value = std::stoull(text, &used, 10);
    }
  } catch (const std::exception&) {
    throw ConfigError("bad mask '" + text + "'");
  }
  if (used != text.size() || text.front() == '-') {
    throw ConfigError("bad mask '" + text + "'");
  }
  return value;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    return run_workflow(config, out, err);
  } catch (const MineAborted& e) {
    err << "aborted at node " << to_string(e.node()) << " (mask "
        << e.node().bits() << "): " << e.cause() << '\n';
    return kExitAborted;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const LoadError& e) {
    err << "load error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitAborted;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Mine retention and omission rules over retrieved sources"};
  app.require_subcommand(1);

  struct Flags {
    std::string config;
    std::string interpretation;
    std::string output;
    std::string mask;
    int parallelism = 0;
    std::int64_t seed = 0;
    bool seed_set = false;
    bool no_cache = false;
    std::size_t cache_max_bytes = 0;
    int n = -1;
    std::string report;
  } flags;

  const auto common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("-c,--config", flags.config, "run configuration (JSON)");
    if (config_required) opt->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output", flags.output, "write the report here");
    sub->add_option("-j,--parallelism", flags.parallelism, "worker threads per level")
        ->check(CLI::PositiveNumber);
    sub->add_option_function<std::int64_t>(
        "--seed", [&](const std::int64_t& v) { flags.seed = v; flags.seed_set = true; },
        "seed recorded in the report and sent to remote models");
  };
  const auto interpretation = [&](CLI::App* sub) {
    sub->add_option("-i,--interpretation", flags.interpretation)
        ->check(CLI::IsMember({"retention", "omission"}));
  };

  auto* mono = app.add_subcommand("mine-mono", "mine one interpretation");
  common(mono, true);
  interpretation(mono);
  auto* dual = app.add_subcommand("mine-dual", "mine both interpretations at once");
  common(dual, true);
  dual->add_flag("--no-cache", flags.no_cache, "disable the response cache");
  dual->add_option("--cache-max-bytes", flags.cache_max_bytes, "0 = unbounded");
  auto* verify = app.add_subcommand("verify", "check one rule against the definition");
  common(verify, true);
  interpretation(verify);
  verify->add_option("-m,--mask", flags.mask, "rule mask: 0b010, 0x2 or 2");
  auto* oracle = app.add_subcommand("oracle", "brute-force every node");
  common(oracle, true);
  interpretation(oracle);
  auto* sweep = app.add_subcommand("sweep", "exhaustive synthetic sweep (CSV)");
  common(sweep, false);
  sweep->add_option("-n,--n", flags.n, "sources (0..4)");
  auto* hotpot = app.add_subcommand("hotpot-curves", "pruning curves on HotpotQA");
  common(hotpot, true);
  auto* explain = app.add_subcommand("explain", "summarize a report in plain language");
  explain->add_option("report", flags.report, "report file")
      ->required()
      ->check(CLI::ExistingFile);

  std::vector<const char*> argv;
  for (const auto& arg : args) argv.push_back(arg.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (explain->parsed()) {
    try {
      std::ifstream in(flags.report);
      json report;
      try {
        in >> report;
      } catch (const json::exception& e) {
        throw LoadError(flags.report + " is not JSON: " + e.what());
      }
      out << explain_report(report);
      return kExitOk;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitConfig;
    }
  }

  RunConfig config;
  try {
    if (!flags.config.empty()) config = load_config(flags.config);
    CLI::App* chosen = app.get_subcommands().front();
    config.mode = parse_mode(chosen->get_name());
    if (!flags.interpretation.empty()) {
      config.interpretation = parse_interpretation(flags.interpretation);
    }
    if (!flags.output.empty()) config.output = flags.output;
    if (flags.parallelism > 0) config.parallelism = flags.parallelism;
    if (flags.seed_set) config.seed = flags.seed;
    if (flags.no_cache) config.cache = false;
    if (flags.cache_max_bytes > 0) config.cache_max_bytes = flags.cache_max_bytes;
    if (!flags.mask.empty()) config.mask = parse_mask_literal(flags.mask);
    if (flags.n >= 0) config.sweep_n = flags.n;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n' << app.help();
    return kExitConfig;
  }
  const int code = run(config, out, err);
  if (code == kExitConfig) err << "run '" << args.front() << " --help' for usage\n";
  return code;
}

}  // namespace ragrules
