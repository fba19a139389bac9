#pragma once

// CoNLL-U reader: 10 tab-separated columns, "#" comments, blank-line
// sentence separators. Multiword-token ranges ("3-4") and empty nodes
// ("5.1") are skipped. Character offsets are reconstructed from the
// "# text =" comment when present, else by joining forms with single
// spaces.

#include <charconv>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "absa/error.hpp"
#include "absa/types.hpp"
#include "absa/utf8.hpp"

namespace absa {

namespace detail {

inline bool parse_int(std::string_view s, int& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline std::string strip_deprel_subtype(std::string deprel) {
  deprel = utf8::ascii_lower(std::move(deprel));
  if (const auto colon = deprel.find(':'); colon != std::string::npos) {
    deprel.erase(colon);
  }
  return deprel;
}

// Raw token columns of one block plus enough position info for errors.
struct ConlluRow {
  int index = 0;
  std::string form;
  std::string upos;
  std::string xpos;
  int head = 0;
  std::string deprel;
};

// Assigns token offsets by scanning the sentence text: skip whitespace,
// then the text must continue with the token form.
inline void locate_tokens(ParsedSentence& sentence) {
  const std::u32string text = utf8::decode(sentence.text);
  std::size_t pos = 0;
  for (Token& t : sentence.tokens) {
    while (pos < text.size() && utf8::is_space(text[pos])) ++pos;
    const std::u32string form = utf8::decode(t.form);
    if (pos + form.size() > text.size() ||
        std::u32string_view(text).substr(pos, form.size()) != form) {
      throw ValidationError("sentence " + sentence.id + ": token form \"" + t.form +
                            "\" not found in \"# text =\" comment at offset " +
                            std::to_string(pos));
    }
    t.char_start = static_cast<int>(pos);
    pos += form.size();
    t.char_end = static_cast<int>(pos);
  }
}

inline ParsedSentence finish_block(std::vector<ConlluRow>&& rows, std::string&& sent_id,
                                   std::string&& text, int counter) {
  ParsedSentence s;
  s.id = sent_id.empty() ? std::to_string(counter) : std::move(sent_id);
  s.tokens.reserve(rows.size());
  for (ConlluRow& r : rows) {
    Token t;
    t.index = r.index;
    t.form = std::move(r.form);
    t.upos = std::move(r.upos);
    if (r.xpos != "_" && !r.xpos.empty()) t.xpos = std::move(r.xpos);
    t.head = r.head;
    t.deprel = strip_deprel_subtype(std::move(r.deprel));
    s.tokens.push_back(std::move(t));
  }
  if (!text.empty()) {
    s.text = std::move(text);
    locate_tokens(s);
  } else {
    // No "# text =": join forms with single spaces.
    std::string joined;
    int pos = 0;
    for (Token& t : s.tokens) {
      if (!joined.empty()) {
        joined += ' ';
        ++pos;
      }
      t.char_start = pos;
      pos += static_cast<int>(utf8::length(t.form));
      t.char_end = pos;
      joined += t.form;
    }
    s.text = std::move(joined);
  }
  validate_sentence(s);
  return s;
}

}  // namespace detail

inline std::vector<ParsedSentence> parse_conllu(std::istream& in) {
  std::vector<ParsedSentence> out;
  std::vector<detail::ConlluRow> rows;
  std::string sent_id;
  std::string text;
  int counter = 0;
  int line_no = 0;
  std::string line;

  auto flush = [&] {
    if (rows.empty()) {
      sent_id.clear();
      text.clear();
      return;
    }
    ++counter;
    out.push_back(
        detail::finish_block(std::move(rows), std::move(sent_id), std::move(text), counter));
    rows.clear();
    sent_id.clear();
    text.clear();
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      std::string_view v(line);
      if (v.starts_with("# sent_id =")) {
        sent_id = std::string(v.substr(11));
        while (!sent_id.empty() && sent_id.front() == ' ') sent_id.erase(0, 1);
      } else if (v.starts_with("# text =")) {
        text = std::string(v.substr(8));
        if (!text.empty() && text.front() == ' ') text.erase(0, 1);
      }
      continue;
    }
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        cols.push_back(line.substr(start));
        break;
      }
      cols.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (cols.size() != 10) {
      throw ValidationError("parse error at line " + std::to_string(line_no) + ": expected 10 " +
                            "tab-separated columns, found " + std::to_string(cols.size()));
    }
    // Multiword-token ranges and empty nodes carry non-integer ids.
    if (cols[0].find('-') != std::string::npos || cols[0].find('.') != std::string::npos) {
      continue;
    }
    detail::ConlluRow row;
    if (!detail::parse_int(cols[0], row.index) || row.index < 1) {
      throw ValidationError("parse error at line " + std::to_string(line_no) +
                            ": invalid token id \"" + cols[0] + "\"");
    }
    if (row.index != static_cast<int>(rows.size()) + 1) {
      throw ValidationError("parse error at line " + std::to_string(line_no) + ": token id " +
                            cols[0] + " is not consecutive");
    }
    if (!detail::parse_int(cols[6], row.head)) {
      throw ValidationError("parse error at line " + std::to_string(line_no) +
                            ": non-integer HEAD \"" + cols[6] + "\"");
    }
    row.form = std::move(cols[1]);
    row.upos = std::move(cols[3]);
    row.xpos = std::move(cols[4]);
    row.deprel = std::move(cols[7]);
    rows.push_back(std::move(row));
  }
  flush();
  return out;
}

inline std::vector<ParsedSentence> parse_conllu(const std::string& content) {
  std::istringstream in(content);
  return parse_conllu(in);
}

}  // namespace absa
