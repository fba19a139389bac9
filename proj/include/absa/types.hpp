#pragma once

// Canonical in-memory model: tokens, sentences, aspect annotations and the
// named corpus splits used by the hybrid annotation pipeline.

#include <optional>
#include <string>
#include <vector>

#include "absa/error.hpp"
#include "absa/utf8.hpp"

namespace absa {

enum class Polarity { positive, negative, neutral, conflict };
enum class Source { gold, llm, dep };
enum class SplitName { N, M, Q, S, R };

inline const char* to_string(Polarity p) {
  switch (p) {
    case Polarity::positive: return "positive";
    case Polarity::negative: return "negative";
    case Polarity::neutral: return "neutral";
    case Polarity::conflict: return "conflict";
  }
  return "";
}

inline Polarity polarity_from_string(const std::string& s) {
  if (s == "positive") return Polarity::positive;
  if (s == "negative") return Polarity::negative;
  if (s == "neutral") return Polarity::neutral;
  if (s == "conflict") return Polarity::conflict;
  throw ValidationError("unknown polarity \"" + s + "\"");
}

inline const char* to_string(Source s) {
  switch (s) {
    case Source::gold: return "gold";
    case Source::llm: return "llm";
    case Source::dep: return "dep";
  }
  return "";
}

inline Source source_from_string(const std::string& s) {
  if (s == "gold") return Source::gold;
  if (s == "llm") return Source::llm;
  if (s == "dep") return Source::dep;
  throw ValidationError("unknown annotation source \"" + s + "\"");
}

inline const char* to_string(SplitName s) {
  switch (s) {
    case SplitName::N: return "N";
    case SplitName::M: return "M";
    case SplitName::Q: return "Q";
    case SplitName::S: return "S";
    case SplitName::R: return "R";
  }
  return "";
}

inline SplitName split_from_string(const std::string& s) {
  if (s == "N") return SplitName::N;
  if (s == "M") return SplitName::M;
  if (s == "Q") return SplitName::Q;
  if (s == "S") return SplitName::S;
  if (s == "R") return SplitName::R;
  throw ValidationError("unknown split name \"" + s + "\"");
}

// One word of a dependency-parsed sentence. Offsets are half-open and
// counted in Unicode scalar values of the sentence text.
struct Token {
  int index = 0;  // 1-based position in the sentence
  std::string form;
  int char_start = 0;
  int char_end = 0;
  std::string upos;
  std::optional<std::string> xpos;
  int head = 0;  // 0 = root
  std::string deprel;  // lowercased, subtype after ":" stripped

  bool operator==(const Token&) const = default;
};

struct ParsedSentence {
  std::string id;
  std::string text;
  std::vector<Token> tokens;

  bool operator==(const ParsedSentence&) const = default;
};

// A term span, optionally with sentiment, tagged with the stage that
// produced it.
struct AspectAnnotation {
  std::string term;
  int char_start = 0;
  int char_end = 0;
  std::optional<Polarity> polarity;
  Source source = Source::gold;

  bool operator==(const AspectAnnotation&) const = default;
};

struct AnnotatedSentence {
  ParsedSentence sentence;
  std::vector<AspectAnnotation> annotations;
  std::optional<SplitName> split;

  bool operator==(const AnnotatedSentence&) const = default;
};

using Corpus = std::vector<AnnotatedSentence>;

// Named subset of a corpus; ids stay in corpus order.
struct CorpusSplit {
  SplitName name = SplitName::N;
  std::vector<std::string> ids;
};

// Head links must form a single tree: exactly one root, every head in
// range, no cycles.
inline void validate_tree(const ParsedSentence& s) {
  const int n = static_cast<int>(s.tokens.size());
  int roots = 0;
  for (const Token& t : s.tokens) {
    if (t.index < 1 || t.index > n) {
      throw ValidationError("structural error in sentence " + s.id + ": token index " +
                            std::to_string(t.index) + " out of range");
    }
    if (t.head < 0 || t.head > n) {
      throw ValidationError("structural error in sentence " + s.id + ": head " +
                            std::to_string(t.head) + " of token " + std::to_string(t.index) +
                            " out of range");
    }
    if (t.head == t.index) {
      throw ValidationError("structural error in sentence " + s.id + ": token " +
                            std::to_string(t.index) + " is its own head");
    }
    if (t.head == 0) ++roots;
  }
  if (n > 0 && roots != 1) {
    throw ValidationError("structural error in sentence " + s.id + ": expected one root, found " +
                          std::to_string(roots));
  }
  // Walk each head chain; revisiting a token on the same walk means a cycle.
  std::vector<int> seen(static_cast<std::size_t>(n) + 1, 0);
  for (int start = 1; start <= n; ++start) {
    int walk = start;
    int cur = start;
    while (cur != 0) {
      if (seen[cur] == walk) {
        throw ValidationError("structural error in sentence " + s.id +
                              ": cycle through token " + std::to_string(cur));
      }
      if (seen[cur] != 0) break;  // joins an already-verified chain
      seen[cur] = walk;
      cur = s.tokens[static_cast<std::size_t>(cur) - 1].head;
    }
  }
}

// Token slices must reproduce the text: each form equals its slice, spans
// are ordered and disjoint, and everything between spans is whitespace.
inline void validate_offsets(const ParsedSentence& s) {
  const std::u32string text = utf8::decode(s.text);
  const int text_len = static_cast<int>(text.size());
  int prev_end = 0;
  auto require_space = [&](int from, int to) {
    for (int i = from; i < to; ++i) {
      if (!utf8::is_space(text[static_cast<std::size_t>(i)])) {
        throw ValidationError("sentence " + s.id + ": non-whitespace text at offset " +
                              std::to_string(i) + " is covered by no token");
      }
    }
  };
  for (const Token& t : s.tokens) {
    if (t.char_start >= t.char_end) {
      throw ValidationError("sentence " + s.id + ": token " + std::to_string(t.index) +
                            " has empty span");
    }
    if (t.char_start < prev_end) {
      throw ValidationError("sentence " + s.id + ": token " + std::to_string(t.index) +
                            " overlaps the previous token");
    }
    if (t.char_end > text_len) {
      throw ValidationError("sentence " + s.id + ": token " + std::to_string(t.index) +
                            " extends past end of text");
    }
    require_space(prev_end, t.char_start);
    const std::string got = utf8::encode(
        std::u32string_view(text).substr(static_cast<std::size_t>(t.char_start),
                                         static_cast<std::size_t>(t.char_end - t.char_start)));
    if (got != t.form) {
      throw ValidationError("sentence " + s.id + ": token " + std::to_string(t.index) +
                            " form \"" + t.form + "\" does not match text slice \"" + got + "\"");
    }
    prev_end = t.char_end;
  }
  require_space(prev_end, text_len);
}

inline void validate_sentence(const ParsedSentence& s) {
  validate_tree(s);
  if (!s.tokens.empty()) validate_offsets(s);
}

// Span must slice out exactly the term; "conflict" is reserved for gold
// annotations.
inline void validate_annotation(const AspectAnnotation& a, const ParsedSentence& s) {
  if (a.char_start < 0 || a.char_start >= a.char_end) {
    throw ValidationError("sentence " + s.id + ": annotation \"" + a.term +
                          "\" has an empty or negative span");
  }
  const std::string got = utf8::slice(s.text, static_cast<std::size_t>(a.char_start),
                                      static_cast<std::size_t>(a.char_end));
  if (got != a.term) {
    throw ValidationError("sentence " + s.id + ": annotation term \"" + a.term +
                          "\" does not match text slice \"" + got + "\"");
  }
  if (a.polarity == Polarity::conflict && a.source != Source::gold) {
    throw ValidationError("sentence " + s.id + ": conflict polarity on non-gold annotation \"" +
                          a.term + "\"");
  }
}

}  // namespace absa
