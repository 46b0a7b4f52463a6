#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace langlab::text {

using Tokens = std::vector<std::string>;
using Normalizer = std::function<std::string(std::string_view)>;
using Tokenizer = std::function<Tokens(std::string_view)>;

inline Tokens split_ws(std::string_view s) {
  Tokens out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// Lowercases ASCII letters and drops ASCII punctuation. Bytes >= 0x80 pass
// through untouched so UTF-8 words survive.
inline std::string default_normalize(std::string_view word) {
  std::string out;
  out.reserve(word.size());
  for (char c : word) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::ispunct(u)) continue;
    out.push_back(u < 0x80 ? static_cast<char>(std::tolower(u)) : c);
  }
  return out;
}

inline std::string identity_normalize(std::string_view word) { return std::string(word); }

// Whitespace split followed by normalization; empty results are dropped.
inline Tokens tokenize(std::string_view s, const Normalizer& norm = default_normalize) {
  Tokens out;
  for (auto& w : split_ws(s)) {
    auto n = norm(w);
    if (!n.empty()) out.push_back(std::move(n));
  }
  return out;
}

inline std::string join(const Tokens& parts, std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Splits on a separator keeping empty fields: "a||b" -> {"a", "", "b"}, "" -> {}.
inline Tokens split_on(std::string_view s, char sep) {
  Tokens out;
  if (s.empty()) return out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace langlab::text
