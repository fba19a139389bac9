#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "absa/io.hpp"
#include "absa/providers.hpp"
#include "support/fixtures.hpp"
#include "support/temp_dir.hpp"

using namespace absa;
using testsupport::TempDir;

namespace {

ParsedSentence text_only(std::string id, std::string text) {
  ParsedSentence s;
  s.id = std::move(id);
  s.text = std::move(text);
  return s;
}

// Test backend serving scripted completions and fixed-dimension embeddings.
class ScriptedBackend : public Backend {
 public:
  std::map<std::string, std::string> ate;  // id -> completion
  std::map<std::string, std::string> asc;  // id|term -> completion
  std::size_t dim = 4;

  std::string complete(const CompletionRequest& request) override {
    ++completion_calls_;
    if (request.task == Task::ate) return ate.at(request.sentence_id);
    return asc.at(request.sentence_id + "|" + request.term.value_or(""));
  }

  std::vector<std::vector<double>> embed(const std::vector<std::string>& ids,
                                         const std::vector<std::string>&) override {
    ++embedding_calls_;
    std::vector<std::vector<double>> out;
    for (const std::string& id : ids) {
      std::vector<double> v(dim, 0.0);
      v[0] = static_cast<double>(id.size());
      v[1] = 1.0;
      out.push_back(std::move(v));
    }
    return out;
  }
};

const std::string kAteWorkedText =
    "just watched ps i love you  on star movies . i love hilary swank's smile !";
const std::string kAscWorkedText =
    "just watched ps i love you on star movies. i love hilary swank's smile!";

}  // namespace

// --- prompt rendering -----------------------------------------------------------

TEST_CASE("ate prompt template is byte-exact") {
  const auto prompt = render_ate_prompt(text_only("t", "great battery"));
  CHECK(prompt.rendered ==
        "Extract aspect terms from the following input. \n\ninput: great battery");
}

TEST_CASE("ate prompt keeps empty text and embedded newlines verbatim") {
  CHECK(render_ate_prompt(text_only("t", "")).rendered ==
        "Extract aspect terms from the following input. \n\ninput: ");
  CHECK(render_ate_prompt(text_only("t", "line one\nline two")).rendered ==
        "Extract aspect terms from the following input. \n\ninput: line one\nline two");
}

TEST_CASE("asc prompt template is byte-exact on the worked example") {
  const auto prompt = render_asc_prompt(text_only("t", kAscWorkedText), "hilary swank");
  CHECK(prompt.rendered ==
        "Given the aspect term and the sentence. Predict if the aspect term in the sentence has "
        "a positive, negative or neutral sentiment expressed on it. \n\naspect term: hilary "
        "swank\n\nsentence: " + kAscWorkedText);
}

TEST_CASE("asc prompt rejects an empty term") {
  REQUIRE_THROWS_AS(render_asc_prompt(text_only("t", "food was cold"), ""), ValidationError);
}

// --- replay backend -------------------------------------------------------------

TEST_CASE("replay backend answers by id, task and term") {
  const std::vector<ReplayRecord> records = {
      {"s1", Task::ate, std::nullopt, "food"},
      {"s1", Task::asc, "food", "negative"},
  };
  ReplayBackend backend(records);
  CHECK(backend.complete({"s1", Task::ate, std::nullopt, ""}) == "food");
  CHECK(backend.complete({"s1", Task::asc, "food", ""}) == "negative");
  CHECK_THROWS_AS(backend.complete({"s2", Task::ate, std::nullopt, ""}), ReplayMiss);
  CHECK(backend.completion_calls() == 3);
}

TEST_CASE("replay records round-trip through jsonl") {
  const std::vector<ReplayRecord> records = {
      {"a", Task::ate, std::nullopt, "service, staff"},
      {"b", Task::asc, "staff", "Positive."},
  };
  auto stream = replay_stream(records);
  const auto parsed = parse_replay_jsonl(stream);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].id == "a");
  CHECK(parsed[0].task == Task::ate);
  CHECK_FALSE(parsed[0].term.has_value());
  CHECK(parsed[1].term == "staff");
  CHECK(parsed[1].completion == "Positive.");
}

// --- annotate_ate ----------------------------------------------------------------

TEST_CASE("annotate_ate locates the worked-example term") {
  ReplayBackend backend({{"tw1", Task::ate, std::nullopt, "hilary swank"}});
  const auto result = annotate_ate({text_only("tw1", kAteWorkedText)}, backend, {});
  REQUIRE(result.corpus.size() == 1);
  REQUIRE(result.corpus[0].annotations.size() == 1);
  const AspectAnnotation& a = result.corpus[0].annotations[0];
  CHECK(a.term == "hilary swank");
  CHECK(a.source == Source::llm);
  CHECK(utf8::slice(kAteWorkedText, static_cast<std::size_t>(a.char_start),
                    static_cast<std::size_t>(a.char_end)) == a.term);
  CHECK(result.rejects.empty());
}

TEST_CASE("annotate_ate treats none and empty completions as no aspects") {
  ReplayBackend backend({{"a", Task::ate, std::nullopt, "none"},
                         {"b", Task::ate, std::nullopt, ""},
                         {"c", Task::ate, std::nullopt, "  None  "}});
  const auto result = annotate_ate(
      {text_only("a", "nothing here"), text_only("b", "or here"), text_only("c", "or even here")},
      backend, {});
  for (const auto& as : result.corpus) CHECK(as.annotations.empty());
  CHECK(result.rejects.empty());
}

TEST_CASE("annotate_ate splits on commas and locates each item") {
  ReplayBackend backend({{"s", Task::ate, std::nullopt, "waiter, food"}});
  const auto result = annotate_ate({text_only("s", "The waiter brought food.")}, backend, {});
  REQUIRE(result.corpus[0].annotations.size() == 2);
  CHECK(result.corpus[0].annotations[0].term == "waiter");
  CHECK(result.corpus[0].annotations[0].char_start == 4);
  CHECK(result.corpus[0].annotations[1].term == "food");
  CHECK(result.corpus[0].annotations[1].char_start == 19);
}

TEST_CASE("annotate_ate matches case-insensitively and keeps original casing") {
  ReplayBackend backend({{"s", Task::ate, std::nullopt, "BATTERY LIFE"}});
  const auto result = annotate_ate({text_only("s", "The Battery Life is great.")}, backend, {});
  REQUIRE(result.corpus[0].annotations.size() == 1);
  CHECK(result.corpus[0].annotations[0].term == "Battery Life");
}

TEST_CASE("annotate_ate records unlocatable items as rejects") {
  ReplayBackend backend({{"s", Task::ate, std::nullopt, "food, ambiance"}});
  const auto result = annotate_ate({text_only("s", "The food was fine.")}, backend, {});
  REQUIRE(result.corpus[0].annotations.size() == 1);
  REQUIRE(result.rejects.size() == 1);
  CHECK(result.rejects[0].id == "s");
  CHECK(result.rejects[0].content == "ambiance");
}

TEST_CASE("annotate_ate deduplicates identical spans") {
  ReplayBackend backend({{"s", Task::ate, std::nullopt, "food, food"}});
  const auto result = annotate_ate({text_only("s", "The food was fine.")}, backend, {});
  CHECK(result.corpus[0].annotations.size() == 1);
}

TEST_CASE("annotate_ate lists all replay misses") {
  ReplayBackend backend({{"a", Task::ate, std::nullopt, "x"}});
  REQUIRE_THROWS_MATCHES(
      annotate_ate({text_only("a", "x"), text_only("b", "y"), text_only("c", "z")}, backend, {}),
      ValidationError,
      Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("b, c")));
}

TEST_CASE("annotate_ate preserves input order") {
  std::vector<ParsedSentence> corpus;
  std::vector<ReplayRecord> records;
  for (int i = 0; i < 20; ++i) {
    const std::string id = "s" + std::to_string(i);
    corpus.push_back(text_only(id, "food number " + std::to_string(i)));
    records.push_back({id, Task::ate, std::nullopt, "food"});
  }
  ReplayBackend backend(records);
  const auto result = annotate_ate(corpus, backend, {});
  REQUIRE(result.corpus.size() == corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(result.corpus[i].sentence.id == corpus[i].id);
  }
}

// --- annotate_asc ----------------------------------------------------------------

TEST_CASE("annotate_asc fills polarity from normalized completions") {
  AnnotatedSentence as;
  as.sentence = text_only("s", "food was cold, drinks were fine");
  as.annotations.push_back({"food", 0, 4, std::nullopt, Source::llm});
  as.annotations.push_back({"drinks", 15, 21, std::nullopt, Source::llm});
  ReplayBackend backend({{"s", Task::asc, "food", "negative"},
                         {"s", Task::asc, "drinks", "Positive."}});
  const auto result = annotate_asc({as}, backend, {});
  CHECK(result.corpus[0].annotations[0].polarity == Polarity::negative);
  CHECK(result.corpus[0].annotations[1].polarity == Polarity::positive);
  CHECK(result.rejects.empty());
}

TEST_CASE("annotate_asc rejects completions outside the three classes") {
  AnnotatedSentence as;
  as.sentence = text_only("s", "food was odd");
  as.annotations.push_back({"food", 0, 4, std::nullopt, Source::llm});
  ReplayBackend backend({{"s", Task::asc, "food", "mixed"}});
  const auto result = annotate_asc({as}, backend, {});
  CHECK_FALSE(result.corpus[0].annotations[0].polarity.has_value());
  REQUIRE(result.rejects.size() == 1);
  CHECK(result.rejects[0].content == "mixed");
  CHECK(result.rejects[0].term == "food");
}

TEST_CASE("asc completion normalization table") {
  CHECK(normalize_asc_completion("positive") == "positive");
  CHECK(normalize_asc_completion("Positive.") == "positive");
  CHECK(normalize_asc_completion("  NEUTRAL \n") == "neutral");
  CHECK(normalize_asc_completion("negative..") == "negative");
  CHECK(normalize_asc_completion("very positive") == "very positive");  // stays a reject
}

// --- embeddings -------------------------------------------------------------------

TEST_CASE("embed returns one dimension-consistent vector per sentence") {
  ScriptedBackend backend;
  const auto vectors = embed({text_only("a", "x"), text_only("bb", "y"), text_only("ccc", "z")},
                             backend, {}, std::nullopt);
  REQUIRE(vectors.size() == 3);
  for (const auto& v : vectors) CHECK(v.values.size() == 4);
  CHECK(vectors[0].sentence_id == "a");
  CHECK(vectors[0].values[0] == 1.0);
  CHECK(vectors[2].values[0] == 3.0);
}

TEST_CASE("embed caches vectors and skips the backend on a warm cache") {
  TempDir tmp("embed");
  const auto cache = tmp.file("cache.jsonl");
  ScriptedBackend backend;
  const std::vector<ParsedSentence> corpus = {text_only("a", "x"), text_only("b", "y")};

  const auto first = embed(corpus, backend, {}, cache);
  CHECK(backend.embedding_calls() == 1);

  const auto second = embed(corpus, backend, {}, cache);
  CHECK(backend.embedding_calls() == 1);  // zero new wire calls
  REQUIRE(second.size() == first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(second[i].values == first[i].values);
  }

  // A partially warm cache fetches only the missing ids.
  const auto third = embed({corpus[0], corpus[1], text_only("c", "z")}, backend, {}, cache);
  CHECK(backend.embedding_calls() == 2);
  CHECK(third.size() == 3);
}

TEST_CASE("embed fails fast on dimension mismatch") {
  class LumpyBackend : public ScriptedBackend {
   public:
    std::vector<std::vector<double>> embed(const std::vector<std::string>& ids,
                                           const std::vector<std::string>& texts) override {
      auto out = ScriptedBackend::embed(ids, texts);
      out.back().pop_back();
      return out;
    }
  };
  LumpyBackend backend;
  REQUIRE_THROWS_MATCHES(embed({text_only("a", "x"), text_only("b", "y")}, backend, {},
                               std::nullopt),
                         ValidationError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("dimension")));
}

TEST_CASE("embed rejects non-finite components") {
  class NanBackend : public ScriptedBackend {
   public:
    std::vector<std::vector<double>> embed(const std::vector<std::string>& ids,
                                           const std::vector<std::string>& texts) override {
      auto out = ScriptedBackend::embed(ids, texts);
      out[0][0] = std::numeric_limits<double>::quiet_NaN();
      return out;
    }
  };
  NanBackend backend;
  REQUIRE_THROWS_AS(embed({text_only("a", "x")}, backend, {}, std::nullopt), ValidationError);
}

// --- training-pair export ----------------------------------------------------------

TEST_CASE("ate export reproduces the worked-example target") {
  AnnotatedSentence as;
  as.sentence = text_only("tw1", kAteWorkedText);
  const auto span_start = kAteWorkedText.find("hilary swank");
  as.annotations.push_back({"hilary swank", static_cast<int>(span_start),
                            static_cast<int>(span_start + 12), std::nullopt, Source::gold});
  const auto result = export_training_pairs({as}, Task::ate, {});
  REQUIRE(result.pairs.size() == 1);
  CHECK(result.pairs[0].input ==
        "Extract aspect terms from the following input. \n\ninput: " + kAteWorkedText + "</s>");
  CHECK(result.pairs[0].output == "hilary swank</s>");
}

TEST_CASE("ate export joins multiple terms with a comma and space") {
  AnnotatedSentence as;
  as.sentence = testsupport::liked_service_staff_sentence();
  as.annotations.push_back({"staff", 28, 33, std::nullopt, Source::dep});
  as.annotations.push_back({"service", 12, 19, std::nullopt, Source::llm});
  const auto result = export_training_pairs({as}, Task::ate, {});
  REQUIRE(result.pairs.size() == 1);
  CHECK(result.pairs[0].output == "service, staff</s>");
}

TEST_CASE("ate export emits the none sentinel for empty sentences") {
  AnnotatedSentence as;
  as.sentence = text_only("s", "nothing to see");
  const auto result = export_training_pairs({as}, Task::ate, {});
  REQUIRE(result.pairs.size() == 1);
  CHECK(result.pairs[0].output == "none</s>");
}

TEST_CASE("empty eos marker appends nothing") {
  AnnotatedSentence as;
  as.sentence = text_only("s", "nothing to see");
  ProviderConfig config;
  config.eos_marker.clear();
  const auto result = export_training_pairs({as}, Task::ate, config);
  CHECK(result.pairs[0].output == "none");
}

TEST_CASE("asc export skips absent polarity and conflict with counts") {
  AnnotatedSentence as;
  as.sentence = text_only("s", "food and staff and wine");
  as.annotations.push_back({"food", 0, 4, Polarity::positive, Source::gold});
  as.annotations.push_back({"staff", 9, 14, std::nullopt, Source::gold});
  as.annotations.push_back({"wine", 19, 23, Polarity::conflict, Source::gold});
  const auto result = export_training_pairs({as}, Task::asc, {});
  REQUIRE(result.pairs.size() == 1);
  CHECK(result.pairs[0].output == "positive</s>");
  CHECK(result.skipped_missing_polarity == 1);
  CHECK(result.skipped_conflict == 1);
}

TEST_CASE("export output re-parses to the same term multiset") {
  // Round trip: the comma-split rule applied to the exported target yields
  // the exported terms.
  AnnotatedSentence as;
  as.sentence = testsupport::liked_service_staff_sentence();
  as.annotations.push_back({"service", 12, 19, std::nullopt, Source::llm});
  as.annotations.push_back({"staff", 28, 33, std::nullopt, Source::llm});
  ProviderConfig config;
  const auto exported = export_training_pairs({as}, Task::ate, config);
  std::string target = exported.pairs[0].output;
  REQUIRE(target.ends_with(config.eos_marker));
  target.erase(target.size() - config.eos_marker.size());

  ReplayBackend backend({{as.sentence.id, Task::ate, std::nullopt, target}});
  const auto rounded = annotate_ate({as.sentence}, backend, config);
  REQUIRE(rounded.corpus[0].annotations.size() == 2);
  CHECK(rounded.corpus[0].annotations[0].term == "service");
  CHECK(rounded.corpus[0].annotations[1].term == "staff");
  CHECK(rounded.rejects.empty());
}

TEST_CASE("training pairs serialize one json object per line") {
  const std::string jsonl = training_pairs_jsonl({{"in", "out"}, {"in2", "out2"}});
  CHECK(jsonl == "{\"input\":\"in\",\"output\":\"out\"}\n{\"input\":\"in2\",\"output\":\"out2\"}\n");
}
