// Regenerates the HotpotQA replay fixture without a live endpoint.
//
// A rule-based reader stands in for the remote model: it answers correctly
// when the retained sources contain the answer and at least two supporting
// sentences, and declines otherwise. Every exchange goes through the
// recording client, so the file holds exactly the request bodies a replay
// run will send.
//
//   make_transcripts <hotpot-config.json> [out.jsonl]

#include <algorithm>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "ragrules/bench.hpp"
#include "ragrules/config.hpp"
#include "ragrules/transcript.hpp"

namespace {

using namespace ragrules;

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  return text.substr(first, text.find_last_not_of(" \t\r\n") - first + 1);
}

class RuleReader final : public ChatClient {
 public:
  explicit RuleReader(const std::vector<HotpotExample>& examples) {
    for (const auto& example : examples) {
      Facts facts{example.answer, {}};
      for (const auto& fact : example.supporting_facts) {
        facts.supporting.insert(
            trim(example.context[fact.document_index].sentences[fact.sentence_index]));
      }
      by_question_.emplace(example.question, std::move(facts));
    }
  }

  std::string complete(const ChatRequest& request) override {
    const auto marker = request.user.rfind("\nQuestion: ");
    const std::string question = request.user.substr(marker + 11);
    const auto it = by_question_.find(question);
    if (it == by_question_.end()) return "I cannot tell from the sources.";

    std::istringstream lines(request.user.substr(0, marker));
    std::string line;
    int supporting = 0;
    bool mentions_answer = false;
    while (std::getline(lines, line)) {
      if (line.rfind("Source ", 0) != 0) continue;
      const std::string text = line.substr(line.find(": ") + 2);
      supporting += it->second.supporting.contains(text);
      mentions_answer |= normalize_text(text).find(normalize_text(it->second.answer)) !=
                         std::string::npos;
    }
    if (mentions_answer && supporting >= 2) return it->second.answer + ".";
    return "I cannot tell from the sources.";
  }

 private:
  struct Facts {
    std::string answer;
    std::set<std::string> supporting;
  };
  std::map<std::string, Facts> by_question_;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: " << argv[0] << " <hotpot-config.json> [out.jsonl]\n";
    return 2;
  }
  try {
    const RunConfig config = load_config(argv[1]);
    validate(config);
    const HotpotSettings& settings = *config.hotpot;
    auto examples = filter_by_supporting_facts(load_hotpot(settings.path).examples,
                                               settings.supporting_facts);
    if (settings.limit > 0 && examples.size() > settings.limit) {
      examples.resize(settings.limit);
    }

    const std::filesystem::path out =
        argc > 2 ? std::filesystem::path(argv[2])
                 : config.base_dir / config.model.at("transcript").get<std::string>();
    auto store = std::make_shared<TranscriptStore>();
    auto recorder = std::make_shared<RecordingChatClient>(
        std::make_shared<RuleReader>(examples),
        make_chat_settings(config.model, config.seed), store);

    CurveSetup setup;
    setup.model = std::make_shared<RagModel>(recorder);
    const nlohmann::json correct = config.predicates["correct"];
    const nlohmann::json incorrect = config.predicates["incorrect"];
    setup.predicates = [&](const HotpotExample& example) {
      const PredicateContext context{example.answer, nullptr};
      return PredicatePair{make_predicate(correct, context),
                           make_predicate(incorrect, context)};
    };
    setup.instructions = config.input.value("instructions", std::string());
    const auto report = run_curves(examples, settings.k_min, settings.k_max, setup);
    for (const auto& error : report.errors) std::cerr << error << '\n';

    store->save(out);
    std::cout << "wrote " << store->size() << " exchanges to " << out.string() << '\n';
    return report.excluded_runs == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
