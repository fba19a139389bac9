#pragma once

// JSONL interchange between pipeline stages, one sentence per line:
//   {"id":…, "text":…, "split":…, "tokens":[…]|null, "aspect_terms":[…]}
// Reading validates the schema and the model invariants; writing then
// reading reproduces the corpus exactly.

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "absa/error.hpp"
#include "absa/types.hpp"

namespace absa {

namespace detail {

using OrderedJson = nlohmann::ordered_json;

inline ValidationError jsonl_field_error(int line_no, const std::string& field,
                                         const std::string& what) {
  return ValidationError("jsonl line " + std::to_string(line_no) + ", field \"" + field +
                         "\": " + what);
}

template <typename T>
T require_field(const nlohmann::json& obj, const char* field, int line_no) {
  const auto it = obj.find(field);
  if (it == obj.end()) throw jsonl_field_error(line_no, field, "missing");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw jsonl_field_error(line_no, field, "wrong type");
  }
}

inline OrderedJson sentence_to_json(const AnnotatedSentence& as) {
  OrderedJson obj;
  obj["id"] = as.sentence.id;
  obj["text"] = as.sentence.text;
  obj["split"] = as.split ? OrderedJson(to_string(*as.split)) : OrderedJson(nullptr);
  if (as.sentence.tokens.empty()) {
    obj["tokens"] = nullptr;
  } else {
    auto tokens = OrderedJson::array();
    for (const Token& t : as.sentence.tokens) {
      OrderedJson tok;
      tok["i"] = t.index;
      tok["form"] = t.form;
      tok["start"] = t.char_start;
      tok["end"] = t.char_end;
      tok["upos"] = t.upos;
      tok["xpos"] = t.xpos ? OrderedJson(*t.xpos) : OrderedJson(nullptr);
      tok["head"] = t.head;
      tok["deprel"] = t.deprel;
      tokens.push_back(std::move(tok));
    }
    obj["tokens"] = std::move(tokens);
  }
  auto terms = OrderedJson::array();
  for (const AspectAnnotation& a : as.annotations) {
    OrderedJson ann;
    ann["term"] = a.term;
    ann["from"] = a.char_start;
    ann["to"] = a.char_end;
    ann["polarity"] = a.polarity ? OrderedJson(to_string(*a.polarity)) : OrderedJson(nullptr);
    ann["source"] = to_string(a.source);
    terms.push_back(std::move(ann));
  }
  obj["aspect_terms"] = std::move(terms);
  return obj;
}

inline AnnotatedSentence sentence_from_json(const nlohmann::json& obj, int line_no) {
  if (!obj.is_object()) {
    throw ValidationError("jsonl line " + std::to_string(line_no) + ": not a JSON object");
  }
  AnnotatedSentence as;
  as.sentence.id = require_field<std::string>(obj, "id", line_no);
  as.sentence.text = require_field<std::string>(obj, "text", line_no);

  const auto split_it = obj.find("split");
  if (split_it == obj.end()) throw jsonl_field_error(line_no, "split", "missing");
  if (!split_it->is_null()) {
    try {
      as.split = split_from_string(split_it->get<std::string>());
    } catch (const nlohmann::json::exception&) {
      throw jsonl_field_error(line_no, "split", "wrong type");
    } catch (const ValidationError& e) {
      throw jsonl_field_error(line_no, "split", e.what());
    }
  }

  const auto tokens_it = obj.find("tokens");
  if (tokens_it == obj.end()) throw jsonl_field_error(line_no, "tokens", "missing");
  if (!tokens_it->is_null()) {
    if (!tokens_it->is_array()) throw jsonl_field_error(line_no, "tokens", "not an array");
    for (const auto& tok : *tokens_it) {
      if (!tok.is_object()) throw jsonl_field_error(line_no, "tokens", "entry is not an object");
      Token t;
      t.index = require_field<int>(tok, "i", line_no);
      t.form = require_field<std::string>(tok, "form", line_no);
      t.char_start = require_field<int>(tok, "start", line_no);
      t.char_end = require_field<int>(tok, "end", line_no);
      t.upos = require_field<std::string>(tok, "upos", line_no);
      const auto xpos_it = tok.find("xpos");
      if (xpos_it == tok.end()) throw jsonl_field_error(line_no, "xpos", "missing");
      if (!xpos_it->is_null()) {
        if (!xpos_it->is_string()) throw jsonl_field_error(line_no, "xpos", "wrong type");
        t.xpos = xpos_it->get<std::string>();
      }
      t.head = require_field<int>(tok, "head", line_no);
      t.deprel = require_field<std::string>(tok, "deprel", line_no);
      as.sentence.tokens.push_back(std::move(t));
    }
  }

  const auto terms_it = obj.find("aspect_terms");
  if (terms_it == obj.end()) throw jsonl_field_error(line_no, "aspect_terms", "missing");
  if (!terms_it->is_array()) throw jsonl_field_error(line_no, "aspect_terms", "not an array");
  for (const auto& ann_json : *terms_it) {
    if (!ann_json.is_object()) {
      throw jsonl_field_error(line_no, "aspect_terms", "entry is not an object");
    }
    AspectAnnotation a;
    a.term = require_field<std::string>(ann_json, "term", line_no);
    a.char_start = require_field<int>(ann_json, "from", line_no);
    a.char_end = require_field<int>(ann_json, "to", line_no);
    const auto pol_it = ann_json.find("polarity");
    if (pol_it == ann_json.end()) throw jsonl_field_error(line_no, "polarity", "missing");
    if (!pol_it->is_null()) {
      if (!pol_it->is_string()) throw jsonl_field_error(line_no, "polarity", "wrong type");
      try {
        a.polarity = polarity_from_string(pol_it->get<std::string>());
      } catch (const ValidationError& e) {
        throw jsonl_field_error(line_no, "polarity", e.what());
      }
    }
    try {
      a.source = source_from_string(require_field<std::string>(ann_json, "source", line_no));
    } catch (const ValidationError& e) {
      throw jsonl_field_error(line_no, "source", e.what());
    }
    as.annotations.push_back(std::move(a));
  }

  try {
    validate_sentence(as.sentence);
    for (const AspectAnnotation& a : as.annotations) validate_annotation(a, as.sentence);
    for (std::size_t i = 0; i < as.annotations.size(); ++i) {
      for (std::size_t j = i + 1; j < as.annotations.size(); ++j) {
        const AspectAnnotation& a = as.annotations[i];
        const AspectAnnotation& b = as.annotations[j];
        if (a.source == b.source && a.char_start == b.char_start && a.char_end == b.char_end) {
          throw ValidationError("duplicate " + std::string(to_string(a.source)) +
                                " annotation span [" + std::to_string(a.char_start) + ", " +
                                std::to_string(a.char_end) + ")");
        }
      }
    }
  } catch (const ValidationError& e) {
    throw ValidationError("jsonl line " + std::to_string(line_no) + ": " + e.what());
  }
  return as;
}

}  // namespace detail

inline Corpus read_jsonl(std::istream& in) {
  Corpus corpus;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError("jsonl line " + std::to_string(line_no) + ": " + e.what());
    }
    corpus.push_back(detail::sentence_from_json(obj, line_no));
  }
  return corpus;
}

inline Corpus read_jsonl(const std::string& content) {
  std::istringstream in(content);
  return read_jsonl(in);
}

inline void write_jsonl(std::ostream& out, const Corpus& corpus) {
  for (const AnnotatedSentence& as : corpus) {
    out << detail::sentence_to_json(as).dump() << '\n';
  }
}

inline std::string write_jsonl(const Corpus& corpus) {
  std::ostringstream out;
  write_jsonl(out, corpus);
  return out.str();
}

}  // namespace absa
