#pragma once

// SemEval-2014 task-4 XML ingestion:
//   <sentences> / <sentence id> / <text>, <aspectTerms> / <aspectTerm term polarity from to>
// Annotations come out tagged as gold. Dependency parses are not part of
// this format and must be attached separately by sentence id.

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "absa/error.hpp"
#include "absa/types.hpp"
#include "absa/utf8.hpp"

namespace absa {

inline Corpus parse_semeval_xml(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw ValidationError(std::string("malformed SemEval XML: ") + e.what());
  }

  const auto sentences = tree.get_child_optional("sentences");
  if (!sentences) {
    throw ValidationError("malformed SemEval XML: missing <sentences> root element");
  }

  Corpus corpus;
  for (const auto& [name, node] : *sentences) {
    if (name != "sentence") continue;
    AnnotatedSentence as;
    as.sentence.id = node.get<std::string>("<xmlattr>.id", "");
    if (as.sentence.id.empty()) {
      throw ValidationError("SemEval sentence element without an id attribute");
    }
    const auto text = node.get_optional<std::string>("text");
    if (!text) {
      throw ValidationError("SemEval sentence " + as.sentence.id + " has no <text> element");
    }
    as.sentence.text = *text;

    if (const auto terms = node.get_child_optional("aspectTerms")) {
      for (const auto& [tname, tnode] : *terms) {
        if (tname != "aspectTerm") continue;
        AspectAnnotation ann;
        ann.source = Source::gold;
        ann.term = tnode.get<std::string>("<xmlattr>.term", "");
        ann.polarity = polarity_from_string(tnode.get<std::string>("<xmlattr>.polarity", ""));
        const auto from = tnode.get_optional<int>("<xmlattr>.from");
        const auto to = tnode.get_optional<int>("<xmlattr>.to");
        if (!from || !to) {
          throw ValidationError("SemEval sentence " + as.sentence.id +
                                ": aspectTerm without integer from/to offsets");
        }
        ann.char_start = *from;
        ann.char_end = *to;
        const std::string got =
            utf8::slice(as.sentence.text, static_cast<std::size_t>(ann.char_start),
                        static_cast<std::size_t>(ann.char_end));
        if (got != ann.term) {
          throw ValidationError("integrity error in SemEval sentence " + as.sentence.id +
                                ": offsets [" + std::to_string(ann.char_start) + ", " +
                                std::to_string(ann.char_end) + ") slice \"" + got +
                                "\" but term is \"" + ann.term + "\"");
        }
        as.annotations.push_back(std::move(ann));
      }
    }
    corpus.push_back(std::move(as));
  }
  return corpus;
}

inline Corpus parse_semeval_xml(const std::string& content) {
  std::istringstream in(content);
  return parse_semeval_xml(in);
}

}  // namespace absa
