#pragma once

// Corpus-level plumbing on top of the format readers: wrapping parses into
// an annotated corpus and attaching dependency parses to gold sentences.

#include <string>
#include <unordered_map>
#include <vector>

#include "absa/conllu.hpp"
#include "absa/error.hpp"
#include "absa/jsonl.hpp"
#include "absa/semeval.hpp"
#include "absa/types.hpp"

namespace absa {

inline Corpus corpus_from_parses(std::vector<ParsedSentence> parses) {
  Corpus corpus;
  corpus.reserve(parses.size());
  for (ParsedSentence& p : parses) {
    AnnotatedSentence as;
    as.sentence = std::move(p);
    corpus.push_back(std::move(as));
  }
  return corpus;
}

// Merges dependency parses into a gold corpus by sentence id. Every gold id
// must appear exactly once in the parses and the texts must agree. Under
// the default flag an annotation boundary inside a token is rejected.
inline Corpus attach_parses(const Corpus& gold, const std::vector<ParsedSentence>& parses,
                            bool allow_mid_token = false) {
  std::unordered_map<std::string, const ParsedSentence*> by_id;
  by_id.reserve(parses.size());
  for (const ParsedSentence& p : parses) {
    if (!by_id.emplace(p.id, &p).second) {
      throw ValidationError("duplicate parse for sentence id " + p.id);
    }
  }

  std::string missing;
  for (const AnnotatedSentence& g : gold) {
    if (!by_id.contains(g.sentence.id)) {
      if (!missing.empty()) missing += ", ";
      missing += g.sentence.id;
    }
  }
  if (!missing.empty()) {
    throw ValidationError("no parse for sentence ids: " + missing);
  }

  Corpus out;
  out.reserve(gold.size());
  for (const AnnotatedSentence& g : gold) {
    const ParsedSentence& parse = *by_id.at(g.sentence.id);
    if (parse.text != g.sentence.text) {
      throw ValidationError("text mismatch for sentence " + g.sentence.id + ": gold \"" +
                            g.sentence.text + "\" vs parse \"" + parse.text + "\"");
    }
    AnnotatedSentence merged = g;
    merged.sentence.tokens = parse.tokens;
    if (!allow_mid_token) {
      for (const AspectAnnotation& a : merged.annotations) {
        for (const Token& t : merged.sentence.tokens) {
          const bool splits_start = t.char_start < a.char_start && a.char_start < t.char_end;
          const bool splits_end = t.char_start < a.char_end && a.char_end < t.char_end;
          if (splits_start || splits_end) {
            throw ValidationError("sentence " + merged.sentence.id + ": annotation \"" + a.term +
                                  "\" [" + std::to_string(a.char_start) + ", " +
                                  std::to_string(a.char_end) + ") crosses token \"" + t.form +
                                  "\" boundary [" + std::to_string(t.char_start) + ", " +
                                  std::to_string(t.char_end) + ")");
          }
        }
      }
    }
    out.push_back(std::move(merged));
  }
  return out;
}

}  // namespace absa
