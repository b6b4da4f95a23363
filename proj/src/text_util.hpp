#pragma once

#include <cctype>
#include <string>
#include <vector>

namespace nam::detail {

struct Token {
  std::string text;
  int col;
};

inline std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

// Blank lines and lines starting with ';', '//' or '#'.
inline bool is_comment(const std::vector<Token>& toks) {
  if (toks.empty()) return true;
  const std::string& t = toks[0].text;
  return t[0] == ';' || t.rfind("//", 0) == 0 || t[0] == '#';
}

}  // namespace nam::detail
