#pragma once

// UTF-8 helpers. All character offsets in this library are counted in
// Unicode scalar values, not bytes, so every offset computation funnels
// through these functions.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "absa/error.hpp"

namespace absa::utf8 {

// Decodes UTF-8 into one char32_t per scalar value. Rejects truncated or
// overlong sequences and surrogate code points.
inline std::u32string decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    char32_t cp = 0;
    std::size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      throw ValidationError("invalid UTF-8 lead byte at byte offset " + std::to_string(i));
    }
    if (i + len > s.size()) {
      throw ValidationError("truncated UTF-8 sequence at byte offset " + std::to_string(i));
    }
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        throw ValidationError("invalid UTF-8 continuation byte at byte offset " +
                              std::to_string(i + k));
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (len > 1 && cp < kMin[len]) {
      throw ValidationError("overlong UTF-8 sequence at byte offset " + std::to_string(i));
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      throw ValidationError("UTF-8 sequence decodes outside scalar-value range at byte offset " +
                            std::to_string(i));
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string encode(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) append(out, cp);
  return out;
}

// Number of scalar values in a UTF-8 string.
inline std::size_t length(std::string_view s) { return decode(s).size(); }

// Slice [from, to) in scalar-value offsets, returned re-encoded as UTF-8.
// Out-of-range offsets throw.
inline std::string slice(std::string_view s, std::size_t from, std::size_t to) {
  const std::u32string cps = decode(s);
  if (from > to || to > cps.size()) {
    throw ValidationError("slice [" + std::to_string(from) + ", " + std::to_string(to) +
                          ") out of range for text of length " + std::to_string(cps.size()));
  }
  return encode(std::u32string_view(cps).substr(from, to - from));
}

// Case folding is ASCII-only: offsets must be stable under folding, and the
// formats handled here define matching case-insensitively only over ASCII.
inline char32_t ascii_lower(char32_t c) {
  return (c >= U'A' && c <= U'Z') ? c + (U'a' - U'A') : c;
}

inline std::u32string ascii_lower(std::u32string s) {
  for (auto& c : s) c = ascii_lower(c);
  return s;
}

inline std::string ascii_lower(std::string s) {
  for (auto& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + ('a' - 'A'));
  }
  return s;
}

inline bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' ||
         c == U' ';
}

}  // namespace absa::utf8
