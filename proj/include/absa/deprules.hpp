#pragma once

// Syntactic-dependency aspect-term extraction: noun-phrase chunking over
// the dependency parse, stopword/opinion-word pruning, then three rule
// families over the dependency edges.
//
//   R1: NP head —DEP— opinion token
//   R2: NP head —DEP1— bridge token —DEP2— opinion token
//   R3: NP head —DEP3— head of an already accepted NP (closed transitively)
//
// Edges are matched in either direction: UD attaches amod from noun to
// adjective but nsubj/obj from verb to noun, so one-directional matching
// would miss one family or the other.

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "absa/error.hpp"
#include "absa/io.hpp"
#include "absa/lexicons.hpp"
#include "absa/types.hpp"
#include "absa/utf8.hpp"

namespace absa {

// Transparent comparison so string_view relations look up without copies.
using TagSet = std::set<std::string, std::less<>>;

struct RuleConfig {
  TagSet dep_set{"amod", "nsubj", "xcomp", "obl", "obj", "nmod", "dep"};
  TagSet dep1_set{"amod", "nsubj", "nmod"};
  TagSet dep2_set{"amod", "nsubj", "xcomp", "advmod", "nmod"};
  TagSet dep3_set{"conj"};
  TagSet opinion_pos{"JJ", "VB", "RB"};
  TagSet bridge_pos{"NN", "VB", "RB"};
};

// Overrides individual sets from a JSON object {set name: [strings]}.
inline RuleConfig rule_config_from_json(const nlohmann::json& obj) {
  if (!obj.is_object()) throw ValidationError("rule config: expected a JSON object");
  RuleConfig config;
  for (const auto& [key, value] : obj.items()) {
    TagSet* target = nullptr;
    if (key == "dep_set") target = &config.dep_set;
    else if (key == "dep1_set") target = &config.dep1_set;
    else if (key == "dep2_set") target = &config.dep2_set;
    else if (key == "dep3_set") target = &config.dep3_set;
    else if (key == "opinion_pos") target = &config.opinion_pos;
    else if (key == "bridge_pos") target = &config.bridge_pos;
    else throw ValidationError("rule config: unknown set name \"" + key + "\"");
    if (!value.is_array()) {
      throw ValidationError("rule config: value of \"" + key + "\" is not an array");
    }
    target->clear();
    for (const auto& item : value) {
      if (!item.is_string()) {
        throw ValidationError("rule config: \"" + key + "\" contains a non-string entry");
      }
      target->insert(item.get<std::string>());
    }
  }
  return config;
}

inline RuleConfig load_rule_config(const std::filesystem::path& path) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(slurp_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("rule config " + path.string() + ": " + e.what());
  }
  return rule_config_from_json(obj);
}

// XPOS prefix match when XPOS is present, else the UPOS falls back into the
// PTB prefix family.
inline bool pos_matches(const Token& token, const TagSet& prefixes) {
  std::string_view tag;
  if (token.xpos && !token.xpos->empty()) {
    tag = *token.xpos;
  } else {
    if (token.upos == "ADJ") tag = "JJ";
    else if (token.upos == "VERB") tag = "VB";
    else if (token.upos == "ADV") tag = "RB";
    else if (token.upos == "NOUN" || token.upos == "PROPN") tag = "NN";
    else return false;
  }
  for (const std::string& prefix : prefixes) {
    if (tag.starts_with(prefix)) return true;
  }
  return false;
}

namespace detail {

inline const TagSet& noun_prefixes() {
  static const TagSet kNoun{"NN"};
  return kNoun;
}

inline bool is_noun(const Token& token) { return pos_matches(token, noun_prefixes()); }

inline bool absorbable_into(const Token& token, int head_index) {
  static const TagSet kAbsorbRelations{"compound", "flat", "nmod"};
  return token.head == head_index && kAbsorbRelations.contains(token.deprel) && is_noun(token);
}

}  // namespace detail

// Candidate noun phrase: a noun head plus the contiguous left-adjacent
// noun dependents it absorbed.
struct NounPhrase {
  int head_index = 0;   // 1-based token index of the head
  int first_token = 0;  // inclusive token-index range of the span
  int last_token = 0;
  std::string text;
  int char_start = 0;
  int char_end = 0;
};

namespace detail {

inline void refresh_np_surface(NounPhrase& np, const ParsedSentence& sentence) {
  const Token& first = sentence.tokens[static_cast<std::size_t>(np.first_token) - 1];
  const Token& last = sentence.tokens[static_cast<std::size_t>(np.last_token) - 1];
  np.char_start = first.char_start;
  np.char_end = last.char_end;
  np.text = utf8::slice(sentence.text, static_cast<std::size_t>(np.char_start),
                        static_cast<std::size_t>(np.char_end));
}

}  // namespace detail

// Builds maximal noun phrases: every noun token heads a candidate, and a
// head absorbs contiguous left-adjacent noun dependents attached to it via
// compound/flat/nmod. Each token lands in at most one NP.
inline std::vector<NounPhrase> chunk_noun_phrases(const ParsedSentence& sentence) {
  const int n = static_cast<int>(sentence.tokens.size());
  std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
  std::vector<NounPhrase> phrases;
  for (int h = n; h >= 1; --h) {
    if (used[static_cast<std::size_t>(h)]) continue;
    const Token& head = sentence.tokens[static_cast<std::size_t>(h) - 1];
    if (!detail::is_noun(head)) continue;
    int first = h;
    for (int j = h - 1; j >= 1; --j) {
      const Token& t = sentence.tokens[static_cast<std::size_t>(j) - 1];
      if (used[static_cast<std::size_t>(j)] || !detail::absorbable_into(t, h)) break;
      first = j;
    }
    for (int k = first; k <= h; ++k) used[static_cast<std::size_t>(k)] = true;
    NounPhrase np;
    np.head_index = h;
    np.first_token = first;
    np.last_token = h;
    detail::refresh_np_surface(np, sentence);
    phrases.push_back(std::move(np));
  }
  std::sort(phrases.begin(), phrases.end(),
            [](const NounPhrase& a, const NounPhrase& b) { return a.first_token < b.first_token; });
  return phrases;
}

// Drops NPs whose head is a stopword or opinion word and trims such words
// off the edges of the surviving spans.
inline std::vector<NounPhrase> prune_candidates(const std::vector<NounPhrase>& candidates,
                                                const ParsedSentence& sentence,
                                                const Lexicons& lexicons) {
  std::vector<NounPhrase> out;
  for (NounPhrase np : candidates) {
    const Token& head = sentence.tokens[static_cast<std::size_t>(np.head_index) - 1];
    if (lexicons.is_stopword(head.form) || lexicons.is_opinion(head.form)) continue;
    auto trimmable = [&](int index) {
      const Token& t = sentence.tokens[static_cast<std::size_t>(index) - 1];
      return lexicons.is_stopword(t.form) || lexicons.is_opinion(t.form);
    };
    while (np.first_token < np.head_index && trimmable(np.first_token)) ++np.first_token;
    while (np.last_token > np.head_index && trimmable(np.last_token)) --np.last_token;
    detail::refresh_np_surface(np, sentence);
    out.push_back(std::move(np));
  }
  return out;
}

namespace detail {

struct DepEdge {
  int a = 0;  // dependent token index
  int b = 0;  // governor token index
  std::string_view relation;
};

inline std::vector<DepEdge> undirected_edges(const ParsedSentence& sentence) {
  std::vector<DepEdge> edges;
  edges.reserve(sentence.tokens.size());
  for (const Token& t : sentence.tokens) {
    if (t.head > 0) edges.push_back({t.index, t.head, t.deprel});
  }
  return edges;
}

inline int other_end(const DepEdge& e, int index) {
  if (e.a == index) return e.b;
  if (e.b == index) return e.a;
  return 0;
}

}  // namespace detail

// Emits the candidate NPs whose head satisfies one of the three rule
// families; spans are the full NP spans, deduplicated and ordered by
// char_start.
inline std::vector<AspectAnnotation> extract_aspect_terms(const ParsedSentence& sentence,
                                                          const std::vector<NounPhrase>& candidates,
                                                          const RuleConfig& config,
                                                          const Lexicons& lexicons) {
  const auto edges = detail::undirected_edges(sentence);
  const auto token_at = [&](int index) -> const Token& {
    return sentence.tokens[static_cast<std::size_t>(index) - 1];
  };

  auto r1_accepts = [&](int head) {
    for (const auto& e : edges) {
      if (!config.dep_set.contains(e.relation)) continue;
      const int o = detail::other_end(e, head);
      if (o == 0) continue;
      if (pos_matches(token_at(o), config.opinion_pos) && !lexicons.is_stopword(token_at(o).form)) {
        return true;
      }
    }
    return false;
  };

  auto r2_accepts = [&](int head) {
    for (const auto& e1 : edges) {
      if (!config.dep1_set.contains(e1.relation)) continue;
      const int m = detail::other_end(e1, head);
      if (m == 0 || !pos_matches(token_at(m), config.bridge_pos)) continue;
      for (const auto& e2 : edges) {
        if (!config.dep2_set.contains(e2.relation)) continue;
        const int o = detail::other_end(e2, m);
        if (o == 0 || o == head) continue;
        if (pos_matches(token_at(o), config.opinion_pos)) return true;
      }
    }
    return false;
  };

  std::vector<bool> accepted(candidates.size(), false);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    accepted[i] = r1_accepts(candidates[i].head_index) || r2_accepts(candidates[i].head_index);
  }

  // R3: a conj edge to an accepted candidate head accepts the partner,
  // closed transitively over conj chains.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (accepted[i]) continue;
      for (const auto& e : edges) {
        if (!config.dep3_set.contains(e.relation)) continue;
        const int partner = detail::other_end(e, candidates[i].head_index);
        if (partner == 0) continue;
        for (std::size_t j = 0; j < candidates.size(); ++j) {
          if (accepted[j] && candidates[j].head_index == partner) {
            accepted[i] = true;
            changed = true;
            break;
          }
        }
        if (accepted[i]) break;
      }
    }
  }

  std::vector<AspectAnnotation> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!accepted[i]) continue;
    AspectAnnotation ann;
    ann.term = candidates[i].text;
    ann.char_start = candidates[i].char_start;
    ann.char_end = candidates[i].char_end;
    ann.source = Source::dep;
    out.push_back(std::move(ann));
  }
  std::sort(out.begin(), out.end(), [](const AspectAnnotation& a, const AspectAnnotation& b) {
    return std::tie(a.char_start, a.char_end) < std::tie(b.char_start, b.char_end);
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const AspectAnnotation& a, const AspectAnnotation& b) {
                          return a.char_start == b.char_start && a.char_end == b.char_end;
                        }),
            out.end());
  return out;
}

// Full chunk -> prune -> extract pass over one parsed sentence.
inline std::vector<AspectAnnotation> extract_dep_terms(const ParsedSentence& sentence,
                                                       const RuleConfig& config,
                                                       const Lexicons& lexicons) {
  const auto candidates = prune_candidates(chunk_noun_phrases(sentence), sentence, lexicons);
  return extract_aspect_terms(sentence, candidates, config, lexicons);
}

}  // namespace absa
