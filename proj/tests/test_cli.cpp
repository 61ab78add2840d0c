#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ragrules/cli.hpp"
#include "ragrules/errors.hpp"
#include "ragrules/report.hpp"

using namespace ragrules;
using nlohmann::json;

namespace {

const std::filesystem::path kConfigs = std::filesystem::path(RAGRULES_FIXTURES_DIR) / "configs";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ragrules");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config(const char* name) { return (kConfigs / name).string(); }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ragrules-cli-" + name);
}

json strip_time(json report) {
  report.erase("generated_at");
  return report;
}

}  // namespace

TEST_CASE("mask literals") {
  CHECK(parse_mask_literal("0b010") == 2);
  CHECK(parse_mask_literal("0x1f") == 31);
  CHECK(parse_mask_literal("12") == 12);
  CHECK_THROWS_AS(parse_mask_literal("0b012"), ConfigError);
  CHECK_THROWS_AS(parse_mask_literal("-1"), ConfigError);
  CHECK_THROWS_AS(parse_mask_literal(""), ConfigError);
  CHECK_THROWS_AS(parse_mask_literal("two"), ConfigError);
}

TEST_CASE("environment interpolation applies to api keys only") {
  ::setenv("RAGRULES_TEST_KEY", "sk-test", 1);
  const auto parsed = parse_config(json::parse(R"({
    "mode": "mine-mono",
    "model": {"kind": "openai", "api_key": "${RAGRULES_TEST_KEY}", "model": "${NOT_TOUCHED}"},
    "judge": {"kind": "openai", "api_key": "Bearer-${RAGRULES_TEST_KEY}"}
  })"));
  CHECK(parsed.model["api_key"] == "sk-test");
  CHECK(parsed.model["model"] == "${NOT_TOUCHED}");
  CHECK(parsed.judge["api_key"] == "Bearer-sk-test");
  CHECK(parsed.digest.size() == 64);

  CHECK_THROWS_AS(parse_config(json::parse(R"({"model": {"api_key": "${RAGRULES_UNSET_VAR}"}})")),
                  ConfigError);
  CHECK_THROWS_AS(interpolate_env("${OPEN"), ConfigError);
  CHECK(interpolate_env("plain") == "plain");
}

TEST_CASE("config validation per mode") {
  auto base = json::parse(R"({
    "input": {"sources": ["a"]},
    "model": {"kind": "validity_assignment", "satisfied": [[1]]},
    "predicate": {"kind": "token"}
  })");
  base["mode"] = "mine-mono";
  CHECK_THROWS_AS(validate(parse_config(base)), ConfigError);  // no interpretation
  base["interpretation"] = "retention";
  CHECK_NOTHROW(validate(parse_config(base)));
  base["predicates"] = {{"retention", {{"kind", "token"}}}, {"omission", {{"kind", "token"}}}};
  CHECK_THROWS_AS(validate(parse_config(base)), ConfigError);  // two predicates
  base["mode"] = "mine-dual";
  CHECK_THROWS_AS(validate(parse_config(base)), ConfigError);  // stray single predicate
  base.erase("predicate");
  CHECK_NOTHROW(validate(parse_config(base)));
  base["mode"] = "verify";
  CHECK_THROWS_AS(validate(parse_config(base)), ConfigError);

  CHECK_THROWS_AS(parse_config(json::parse(R"({"mode": "explode"})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"interpretation": "sideways"})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"parallelism": 0})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse("[]")), ConfigError);

  RunConfig sweep;
  sweep.mode = Mode::kSweep;
  sweep.sweep_n = 5;
  CHECK_THROWS_AS(validate(sweep), ConfigError);
  sweep.sweep_n = 4;
  CHECK_NOTHROW(validate(sweep));
}

TEST_CASE("model and predicate factories") {
  const auto input = make_input_set(json::parse(
      R"({"question": "q", "sources": ["plain", {"label": "D2", "text": "labelled"}]})"));
  CHECK(input.sources()[0].label == "s1");
  CHECK(input.sources()[1].label == "D2");
  CHECK_THROWS_AS(make_input_set(json::parse(R"({"sources": [3]})")), ConfigError);
  CHECK_THROWS_AS(make_input_set(json::object()), ConfigError);

  auto scripted = make_model(json::parse(R"({
    "kind": "scripted",
    "outputs": [{"retained": [1, 2], "output": "both"}],
    "when_retained": [{"all_of": [2], "output": "second"}],
    "default_output": "none"})"), 2, {});
  CHECK(infer(*scripted, SourceMask(0b11, 2), Interpretation::kRetention, input) == "both");
  CHECK(infer(*scripted, SourceMask(0b10, 2), Interpretation::kRetention, input) == "second");
  CHECK(infer(*scripted, SourceMask(0b10, 2), Interpretation::kOmission, input) == "none");

  auto sparse = make_model(json::parse(R"({"kind": "scripted", "outputs": [{"retained": 3, "output": "x"}]})"),
                           2, {});
  CHECK_THROWS_AS(infer(*sparse, SourceMask(0, 2), Interpretation::kRetention, input), ConfigError);

  CHECK_THROWS_AS(make_model(json::parse(R"({"kind": "magic"})"), 2, {}), ConfigError);
  CHECK_THROWS_AS(make_model(json::parse(R"({"kind": "replay", "transcript": "/nonexistent"})"), 2, {}),
                  LoadError);

  auto negated = make_predicate(json::parse(R"({"kind": "target_match", "negate": true})"),
                                PredicateContext{"Seine", nullptr});
  CHECK(negated->evaluate("the Loire"));
  CHECK_FALSE(negated->evaluate("the Seine"));
  CHECK_THROWS_AS(make_predicate(json::parse(R"({"kind": "target_match"})")), ConfigError);
  CHECK_THROWS_AS(make_predicate(json::parse(R"({"kind": "judge_fallback", "ground_truth": "x"})")),
                  ConfigError);
  CHECK_THROWS_AS(make_predicate(json::parse(R"({"kind": "psychic"})")), ConfigError);
  CHECK(predicate_description(json::parse(R"({"description": "it rains"})")) == "it rains");
}

TEST_CASE("mine-mono on the running example") {
  const auto r = cli({"mine-mono", "-c", config("fig1-mono.json"), "--interpretation", "retention"});
  REQUIRE(r.code == kExitOk);
  const auto report = json::parse(r.out);
  CHECK(report["schema_version"] == kReportSchemaVersion);
  CHECK(report["tool"] == "ragrules");
  CHECK(report["n"] == 3);
  CHECK(report["sources"][1]["label"] == "s2");
  CHECK(report["sources"][1]["sha256"].get<std::string>().size() == 64);
  CHECK(report["rules"]["retention"]["minimal"] == json::parse(R"([{"mask": 2, "sources": [2]}])"));
  CHECK(report["rules"]["retention"]["valid"].size() == 4);
  CHECK(report["telemetry"]["model_calls"] == 5);
  CHECK(report["config_digest"].get<std::string>().size() == 64);
}

TEST_CASE("verify on the running example") {
  const auto r = cli({"verify", "-c", config("fig1-mono.json"), "--mask", "0b010",
                      "--interpretation", "retention"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "valid\n");
  const auto bad = cli({"verify", "-c", config("fig1-mono.json"), "--mask", "0b001"});
  CHECK(bad.out == "invalid\n");
  const auto wide = cli({"verify", "-c", config("fig1-mono.json"), "--mask", "0b1000"});
  CHECK(wide.code == kExitConfig);
}

TEST_CASE("reports are reproducible apart from the timestamp") {
  const auto a = cli({"mine-dual", "-c", config("fig1-dual.json")});
  const auto b = cli({"mine-dual", "-c", config("fig1-dual.json"), "-j", "3"});
  REQUIRE(a.code == kExitOk);
  REQUIRE(b.code == kExitOk);
  CHECK(strip_time(json::parse(a.out)) == strip_time(json::parse(b.out)));
  CHECK(strip_time(json::parse(a.out)).dump() == strip_time(json::parse(b.out)).dump());
}

TEST_CASE("explain renders minimal rules") {
  const auto path = temp_file("fig3.json");
  REQUIRE(cli({"mine-mono", "-c", config("fig3.json"), "-o", path.string()}).code == kExitOk);
  const auto r = cli({"explain", path.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "If D2 and D4 are retained, then the response contains misinformation.\n");

  const auto dual = temp_file("fig1-dual.json");
  REQUIRE(cli({"mine-dual", "-c", config("fig1-dual.json"), "-o", dual.string()}).code == kExitOk);
  CHECK(cli({"explain", dual.string()}).out ==
        "If s2 is retained, then the model returns an ineffective treatment.\n"
        "If s2 is omitted, then the model returns an effective treatment.\n");
  std::filesystem::remove(path);
  std::filesystem::remove(dual);
}

TEST_CASE("explain edge cases") {
  const InputSet input = InputSet::from_texts({"a", "b"}, {});
  ReportHeader header{"mine-mono", "d", 0, "2026-01-01T00:00:00Z"};
  json empty = report_envelope(header, input);
  add_rules(empty, Interpretation::kRetention, "it holds", {}, {});
  CHECK(explain_report(empty) == "No valid rules exist for this predicate.\n");

  json everything = report_envelope(header, input);
  add_rules(everything, Interpretation::kRetention, "it holds",
            {SourceMask(0, 2), SourceMask(1, 2)}, {SourceMask(0, 2)});
  CHECK(explain_report(everything) == "The predicate holds for every subset of sources.\n");

  json three = report_envelope(header, InputSet::from_texts({"a", "b", "c"}, {}));
  add_rules(three, Interpretation::kOmission, "it holds.", {SourceMask(7, 3)}, {SourceMask(7, 3)});
  CHECK(explain_report(three) == "If s1, s2 and s3 are omitted, then it holds.\n");

  CHECK_THROWS_AS(explain_report(json::array()), LoadError);
  CHECK_THROWS_AS(explain_report(json::object()), LoadError);
  json wrong_version = empty;
  wrong_version["schema_version"] = 99;
  CHECK_THROWS_AS(explain_report(wrong_version), LoadError);
  json bad_index = everything;
  bad_index["rules"]["retention"]["minimal"][0]["sources"] = {5};
  CHECK_THROWS_AS(explain_report(bad_index), LoadError);

  const auto garbage = temp_file("garbage.json");
  std::ofstream(garbage) << "{ nope";
  CHECK(cli({"explain", garbage.string()}).code == kExitConfig);
  std::filesystem::remove(garbage);
}

TEST_CASE("sweep prints seventeen rows for four sources") {
  const auto r = cli({"sweep", "--n", "4"});
  REQUIRE(r.code == kExitOk);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 18);
  CHECK(r.out.find("\n16,16,16,16,1\n") != std::string::npos);
  CHECK(cli({"sweep", "--n", "5"}).code == kExitConfig);
}

TEST_CASE("oracle subcommand dumps satisfaction") {
  const auto r = cli({"oracle", "-c", config("fig2.json")});
  REQUIRE(r.code == kExitOk);
  const auto report = json::parse(r.out);
  CHECK(report["satisfaction"].size() == 16);
  CHECK(report["satisfaction"]["7"] == 0);
  CHECK(report["telemetry"]["model_calls"] == 16);
}

TEST_CASE("exit codes for usage, config and abort") {
  CHECK(cli({}).code == kExitConfig);
  CHECK(cli({"mine-mono"}).code == kExitConfig);
  CHECK(cli({"mine-mono", "-c", "/nonexistent.json"}).code == kExitConfig);
  CHECK(cli({"mine-mono", "-c", config("fig1-dual.json"), "-i", "retention"}).code == kExitConfig);
  CHECK(cli({"--help"}).code == kExitOk);

  // A scripted model with holes aborts on the first missing input.
  const auto path = temp_file("holey.json");
  std::ofstream(path) << R"({
    "interpretation": "retention",
    "input": {"sources": ["a", "b"]},
    "model": {"kind": "scripted", "outputs": [{"retained": [1, 2], "output": "yes"}]},
    "predicate": {"kind": "regex", "pattern": "yes"}
  })";
  const auto r = cli({"mine-mono", "-c", path.string()});
  CHECK(r.code == kExitAborted);
  CHECK(r.err.find("aborted at node {1} (mask 1)") != std::string::npos);
  std::filesystem::remove(path);
}
