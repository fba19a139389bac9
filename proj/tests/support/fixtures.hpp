#pragma once

// Hand-built dependency-parse fixtures shared across test files.

#include <string>
#include <vector>

#include "absa/types.hpp"
#include "absa/utf8.hpp"

namespace testsupport {

struct TokSpec {
  std::string form;
  std::string upos;
  std::string xpos;  // empty = absent
  int head = 0;
  std::string deprel;
};

// Builds a ParsedSentence whose offsets come from locating each form in the
// text left to right, skipping whitespace.
inline absa::ParsedSentence make_sentence(std::string id, std::string text,
                                          const std::vector<TokSpec>& specs) {
  absa::ParsedSentence s;
  s.id = std::move(id);
  s.text = std::move(text);
  const std::u32string cps = absa::utf8::decode(s.text);
  std::size_t pos = 0;
  int index = 0;
  for (const TokSpec& spec : specs) {
    while (pos < cps.size() && absa::utf8::is_space(cps[pos])) ++pos;
    const std::u32string form = absa::utf8::decode(spec.form);
    if (std::u32string_view(cps).substr(pos, form.size()) != form) {
      throw std::runtime_error("fixture bug: form \"" + spec.form + "\" not at offset " +
                               std::to_string(pos) + " of \"" + s.text + "\"");
    }
    absa::Token t;
    t.index = ++index;
    t.form = spec.form;
    t.char_start = static_cast<int>(pos);
    t.char_end = static_cast<int>(pos + form.size());
    t.upos = spec.upos;
    if (!spec.xpos.empty()) t.xpos = spec.xpos;
    t.head = spec.head;
    t.deprel = spec.deprel;
    s.tokens.push_back(std::move(t));
    pos += form.size();
  }
  absa::validate_sentence(s);
  return s;
}

// "I liked the service and the staff, but not the food." with obj(liked,
// service) and conj(service, staff). The third noun attaches to the verb,
// so no extraction rule reaches it.
inline absa::ParsedSentence liked_service_staff_sentence() {
  return make_sentence("restaurant-1", "I liked the service and the staff, but not the food.",
                       {
                           {"I", "PRON", "PRP", 2, "nsubj"},
                           {"liked", "VERB", "VBD", 0, "root"},
                           {"the", "DET", "DT", 4, "det"},
                           {"service", "NOUN", "NN", 2, "obj"},
                           {"and", "CCONJ", "CC", 7, "cc"},
                           {"the", "DET", "DT", 7, "det"},
                           {"staff", "NOUN", "NN", 4, "conj"},
                           {",", "PUNCT", ",", 2, "punct"},
                           {"but", "CCONJ", "CC", 12, "cc"},
                           {"not", "PART", "RB", 12, "advmod"},
                           {"the", "DET", "DT", 12, "det"},
                           {"food", "NOUN", "NN", 2, "conj"},
                           {".", "PUNCT", ".", 2, "punct"},
                       });
}

// Same sentence with food in the noun conjunction chain instead, which
// qualifies it through the conjunction rule.
inline absa::ParsedSentence liked_service_staff_food_sentence() {
  auto s = liked_service_staff_sentence();
  s.id = "restaurant-1b";
  s.tokens[11].head = 4;  // conj(service, food)
  absa::validate_sentence(s);
  return s;
}

inline absa::ParsedSentence battery_life_sentence() {
  return make_sentence("laptop-1", "battery life is poor",
                       {
                           {"battery", "NOUN", "NN", 2, "compound"},
                           {"life", "NOUN", "NN", 4, "nsubj"},
                           {"is", "AUX", "VBZ", 4, "cop"},
                           {"poor", "ADJ", "JJ", 0, "root"},
                       });
}

inline absa::ParsedSentence food_tastes_great_sentence() {
  return make_sentence("restaurant-2", "The food tastes great.",
                       {
                           {"The", "DET", "DT", 3, "det"},
                           {"food", "NOUN", "NN", 3, "nsubj"},
                           {"tastes", "VERB", "VBZ", 0, "root"},
                           {"great", "ADJ", "JJ", 3, "xcomp"},
                           {".", "PUNCT", ".", 3, "punct"},
                       });
}

}  // namespace testsupport
