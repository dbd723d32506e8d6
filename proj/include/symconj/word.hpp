#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace symconj {

/// A word over the alphabet {1..N}. Each byte holds the 0-based symbol index,
/// so ordinary string comparison is the lexicographic order on words.
using Word = std::string;
using Symbol = int;

inline Word make_word(std::initializer_list<int> one_based) {
  Word w;
  for (int s : one_based) w.push_back(static_cast<char>(s - 1));
  return w;
}

/// Shorthand for alphabets of at most 9 symbols: "121" -> 1,2,1.
inline Word digits(std::string_view text) {
  Word w;
  for (char c : text) {
    if (c < '1' || c > '9') throw Error(ErrorKind::Parse, "bad digit word '" + std::string(text) + "'");
    w.push_back(static_cast<char>(c - '1'));
  }
  return w;
}

inline Symbol sym(const Word& w, std::size_t i) { return static_cast<unsigned char>(w[i]); }

/// Comma separated, 1-based: the on-disk representation.
inline std::string format_word(const Word& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(sym(w, i) + 1);
  }
  return out;
}

inline Word parse_word(std::string_view text) {
  Word w;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view tok = text.substr(pos, end - pos);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    int v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size() || v < 1 || v > kMaxAlphabet)
      throw Error(ErrorKind::Parse, "bad word '" + std::string(text) + "'");
    w.push_back(static_cast<char>(v - 1));
    pos = end + 1;
  }
  return w;
}

}  // namespace symconj
