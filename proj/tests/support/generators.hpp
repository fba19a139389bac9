#pragma once

// Deterministic random corpus generation for property tests.

#include <random>
#include <string>
#include <vector>

#include "absa/types.hpp"

namespace testsupport {

inline const std::vector<std::string>& word_pool() {
  static const std::vector<std::string> kWords = {
      "food",  "service", "staff",   "pizza",  "battery", "screen", "keyboard", "waiter",
      "soup",  "price",   "drinks",  "laptop", "sushi",   "menu",   "camera",   "mouse",
      "salad", "wine",    "dessert", "chair",  "crème",   "table",  "speaker",  "router"};
  return kWords;
}

// Random sentence with a well-formed tree and offsets: token i > 1 attaches
// to a strictly earlier token, token 1 is the root.
inline absa::ParsedSentence random_sentence(std::mt19937& rng, int id_number) {
  static const std::vector<std::string> kUpos = {"NOUN", "VERB", "ADJ", "ADV", "DET"};
  static const std::vector<std::string> kDeprel = {"nsubj", "obj", "amod", "conj",
                                                   "nmod",  "det", "advmod"};
  absa::ParsedSentence s;
  s.id = "gen-" + std::to_string(id_number);
  std::uniform_int_distribution<int> n_tokens(1, 8);
  const int n = n_tokens(rng);
  int pos = 0;
  for (int i = 1; i <= n; ++i) {
    absa::Token t;
    t.index = i;
    t.form = word_pool()[std::uniform_int_distribution<std::size_t>(
        0, word_pool().size() - 1)(rng)];
    t.upos = kUpos[std::uniform_int_distribution<std::size_t>(0, kUpos.size() - 1)(rng)];
    if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) t.xpos = "NN";
    t.head = i == 1 ? 0 : std::uniform_int_distribution<int>(1, i - 1)(rng);
    t.deprel = i == 1 ? "root"
                      : kDeprel[std::uniform_int_distribution<std::size_t>(
                            0, kDeprel.size() - 1)(rng)];
    if (i > 1) {
      s.text += ' ';
      ++pos;
    }
    t.char_start = pos;
    pos += static_cast<int>(absa::utf8::length(t.form));
    t.char_end = pos;
    s.text += t.form;
    s.tokens.push_back(std::move(t));
  }
  return s;
}

inline absa::AnnotatedSentence random_annotated_sentence(std::mt19937& rng, int id_number) {
  absa::AnnotatedSentence as;
  as.sentence = random_sentence(rng, id_number);
  switch (std::uniform_int_distribution<int>(0, 5)(rng)) {
    case 0: as.split = absa::SplitName::N; break;
    case 1: as.split = absa::SplitName::M; break;
    case 2: as.split = absa::SplitName::S; break;
    case 3: as.split = absa::SplitName::R; break;
    default: break;  // null split
  }
  // Annotate a random subset of tokens; spans align to token boundaries and
  // stay unique per source.
  std::uniform_int_distribution<int> coin(0, 2);
  for (const absa::Token& t : as.sentence.tokens) {
    if (coin(rng) != 0) continue;
    absa::AspectAnnotation a;
    a.term = t.form;
    a.char_start = t.char_start;
    a.char_end = t.char_end;
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
      case 0: a.source = absa::Source::gold; break;
      case 1: a.source = absa::Source::llm; break;
      default: a.source = absa::Source::dep; break;
    }
    switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
      case 0: a.polarity = absa::Polarity::positive; break;
      case 1: a.polarity = absa::Polarity::negative; break;
      case 2: a.polarity = absa::Polarity::neutral; break;
      case 3:
        if (a.source == absa::Source::gold) a.polarity = absa::Polarity::conflict;
        break;
      default: break;  // absent
    }
    as.annotations.push_back(std::move(a));
  }
  return as;
}

inline absa::Corpus random_corpus(std::mt19937& rng, int max_sentences) {
  absa::Corpus corpus;
  const int n = std::uniform_int_distribution<int>(0, max_sentences)(rng);
  corpus.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    corpus.push_back(random_annotated_sentence(rng, i + 1));
  }
  return corpus;
}

}  // namespace testsupport
