#pragma once

// Deterministic 200-sentence synthetic corpus for pipeline-level checks.
// Construction pins the error profile of each annotation source:
//   - the replay LLM answers with the exact gold terms on even-indexed
//     sentences and "none" otherwise (precise, low recall);
//   - the dependency rules reach every gold term and, on every fourth
//     sentence, one extra non-gold noun (high recall, lower precision).

#include <string>
#include <vector>

#include "absa/providers.hpp"
#include "absa/types.hpp"
#include "support/fixtures.hpp"

namespace testsupport {

struct SyntheticCorpus {
  std::vector<absa::ParsedSentence> sentences;
  absa::Corpus gold;  // same sentences with gold annotations
  std::vector<absa::ReplayRecord> replay;
  std::vector<absa::EmbeddingVector> embeddings;
};

inline SyntheticCorpus make_synthetic_corpus(int n_sentences = 200) {
  static const std::vector<std::string> kItems = {
      "battery", "screen", "keyboard", "camera", "speaker", "router",
      "pizza",   "soup",   "salad",    "wine",   "dessert", "menu"};
  static const std::vector<std::string> kAdjs = {"great",  "poor",  "terrible", "amazing",
                                                 "decent", "awful", "noisy",    "tasty"};

  SyntheticCorpus out;
  for (int i = 0; i < n_sentences; ++i) {
    const std::string id = "syn-" + std::to_string(i + 1);
    const std::string& item = kItems[static_cast<std::size_t>(i) % kItems.size()];
    const std::string& other = kItems[static_cast<std::size_t>(i + 5) % kItems.size()];
    const std::string& adj = kAdjs[static_cast<std::size_t>(i) % kAdjs.size()];

    absa::ParsedSentence sentence;
    std::vector<std::string> gold_terms;
    switch (i % 4) {
      case 0:
        sentence = make_sentence(id, "the " + item + " is " + adj + " .",
                                 {{"the", "DET", "DT", 2, "det"},
                                  {item, "NOUN", "NN", 4, "nsubj"},
                                  {"is", "AUX", "VBZ", 4, "cop"},
                                  {adj, "ADJ", "JJ", 0, "root"},
                                  {".", "PUNCT", ".", 4, "punct"}});
        gold_terms = {item};
        break;
      case 1:
        sentence = make_sentence(id, "i liked the " + item + " .",
                                 {{"i", "PRON", "PRP", 2, "nsubj"},
                                  {"liked", "VERB", "VBD", 0, "root"},
                                  {"the", "DET", "DT", 4, "det"},
                                  {item, "NOUN", "NN", 2, "obj"},
                                  {".", "PUNCT", ".", 2, "punct"}});
        gold_terms = {item};
        break;
      case 2:
        sentence = make_sentence(id, "the " + item + " and the " + other + " are " + adj + " .",
                                 {{"the", "DET", "DT", 2, "det"},
                                  {item, "NOUN", "NN", 7, "nsubj"},
                                  {"and", "CCONJ", "CC", 5, "cc"},
                                  {"the", "DET", "DT", 5, "det"},
                                  {other, "NOUN", "NN", 2, "conj"},
                                  {"are", "AUX", "VBP", 7, "cop"},
                                  {adj, "ADJ", "JJ", 0, "root"},
                                  {".", "PUNCT", ".", 7, "punct"}});
        gold_terms = {item, other};
        break;
      default:
        // The trailing noun rides an nmod edge to the opinion word, so the
        // dependency rules emit it although gold does not contain it.
        sentence = make_sentence(id, "the " + item + " is " + adj + " in the " + other + " .",
                                 {{"the", "DET", "DT", 2, "det"},
                                  {item, "NOUN", "NN", 4, "nsubj"},
                                  {"is", "AUX", "VBZ", 4, "cop"},
                                  {adj, "ADJ", "JJ", 0, "root"},
                                  {"in", "ADP", "IN", 7, "case"},
                                  {"the", "DET", "DT", 7, "det"},
                                  {other, "NOUN", "NN", 4, "nmod"},
                                  {".", "PUNCT", ".", 4, "punct"}});
        gold_terms = {item};
        break;
    }

    absa::AnnotatedSentence gold_sentence;
    gold_sentence.sentence = sentence;
    std::string llm_target;
    for (const std::string& term : gold_terms) {
      const auto at = sentence.text.find(term);
      gold_sentence.annotations.push_back({term, static_cast<int>(at),
                                           static_cast<int>(at + term.size()),
                                           std::nullopt, absa::Source::gold});
      if (!llm_target.empty()) llm_target += ", ";
      llm_target += term;
    }
    out.replay.push_back(
        {id, absa::Task::ate, std::nullopt, i % 2 == 0 ? llm_target : std::string("none")});

    // Smoothly varying 4-d embedding: well spread, no lone outliers.
    const double a = static_cast<double>((i * 37) % 101) / 101.0;
    out.embeddings.push_back({id, {1.0, a, 1.0 - a, 0.25}});

    out.sentences.push_back(std::move(sentence));
    out.gold.push_back(std::move(gold_sentence));
  }
  return out;
}

}  // namespace testsupport
