#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "langlab/error.hpp"
#include "langlab/text.hpp"

namespace langlab::pregroup {

// A generator with an adjoint degree: -1 is the left adjoint, +1 the right
// adjoint, and iterated adjoints add up.
struct Basic {
  std::string base;
  int degree = 0;

  friend bool operator==(const Basic&, const Basic&) = default;
  friend auto operator<=>(const Basic&, const Basic&) = default;
};

using Type = std::vector<Basic>;  // empty = unit

inline Type multiply(const Type& s, const Type& t) {
  Type out = s;
  out.insert(out.end(), t.begin(), t.end());
  return out;
}

inline Type left_adjoint(const Type& t) {
  Type out(t.rbegin(), t.rend());
  for (auto& b : out) --b.degree;
  return out;
}

inline Type right_adjoint(const Type& t) {
  Type out(t.rbegin(), t.rend());
  for (auto& b : out) ++b.degree;
  return out;
}

// Optional partial order on generators. Empty means discrete (equality only).
class Poset {
 public:
  Poset() = default;
  // Pairs (a, b) meaning a <= b; the reflexive-transitive closure is taken.
  explicit Poset(const std::vector<std::pair<std::string, std::string>>& pairs) {
    for (const auto& p : pairs) leq_.insert(p);
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [a, b] : std::set(leq_))
        for (const auto& [c, d] : std::set(leq_))
          if (b == c && leq_.insert({a, d}).second) changed = true;
    }
  }

  bool leq(const std::string& a, const std::string& b) const {
    return a == b || leq_.count({a, b}) > 0;
  }

  const std::set<std::pair<std::string, std::string>>& pairs() const noexcept { return leq_; }

 private:
  std::set<std::pair<std::string, std::string>> leq_;
};

// (a, d)(b, d+1) contracts when the bases are related: a <= b for even d and
// b <= a for odd d. With a discrete order this is plain equality.
inline bool contracts(const Basic& x, const Basic& y, const Poset* order = nullptr) {
  if (y.degree != x.degree + 1) return false;
  if (x.base == y.base) return true;
  if (!order) return false;
  const bool even = x.degree % 2 == 0;
  return even ? order->leq(x.base, y.base) : order->leq(y.base, x.base);
}

inline std::vector<std::pair<Type, std::size_t>> contract_once(const Type& t, const Poset* order = nullptr) {
  std::vector<std::pair<Type, std::size_t>> out;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (!contracts(t[i], t[i + 1], order)) continue;
    Type next(t.begin(), t.begin() + static_cast<long>(i));
    next.insert(next.end(), t.begin() + static_cast<long>(i) + 2, t.end());
    out.emplace_back(std::move(next), i);
  }
  return out;
}

struct Reduction {
  // Each event removes positions (p, p+1) of the current type.
  std::vector<std::size_t> events;
  Type residual;
};

namespace detail {

class SpanTable {
 public:
  SpanTable(const Type& t, const Poset* order) : t_(t), order_(order), n_(t.size()) {
    ok_.assign((n_ + 1) * (n_ + 1), false);
    split_.assign((n_ + 1) * (n_ + 1), 0);
    for (std::size_t i = 0; i <= n_; ++i) ok_[idx(i, i)] = true;
    for (std::size_t len = 2; len <= n_; len += 2)
      for (std::size_t i = 0; i + len <= n_; ++i) {
        const std::size_t j = i + len;
        for (std::size_t k = i + 1; k < j; k += 2) {
          if (contracts(t_[i], t_[k], order_) && ok_[idx(i + 1, k)] && ok_[idx(k + 1, j)]) {
            ok_[idx(i, j)] = true;
            split_[idx(i, j)] = k;
            break;
          }
        }
      }
  }

  // t[i..j) contracts to the unit.
  bool vanishes(std::size_t i, std::size_t j) const { return ok_[idx(i, j)]; }

  // Arcs of the chosen witness for t[i..j), inner pairs first.
  void arcs(std::size_t i, std::size_t j, std::vector<std::pair<std::size_t, std::size_t>>& out) const {
    if (i == j) return;
    const std::size_t k = split_[idx(i, j)];
    arcs(i + 1, k, out);
    out.emplace_back(i, k);
    arcs(k + 1, j, out);
  }

 private:
  std::size_t idx(std::size_t i, std::size_t j) const { return i * (n_ + 1) + j; }

  const Type& t_;
  const Poset* order_;
  std::size_t n_;
  std::vector<bool> ok_;
  std::vector<std::size_t> split_;
};

// Turns arcs over original positions into events over the shrinking type.
inline std::vector<std::size_t> arcs_to_events(std::size_t n,
                                               const std::vector<std::pair<std::size_t, std::size_t>>& arcs) {
  std::vector<std::size_t> alive(n);
  for (std::size_t i = 0; i < n; ++i) alive[i] = i;
  std::vector<std::size_t> events;
  for (const auto& arc : arcs) {
    const auto pos = static_cast<std::size_t>(std::find(alive.begin(), alive.end(), arc.first) - alive.begin());
    events.push_back(pos);
    alive.erase(alive.begin() + static_cast<long>(pos), alive.begin() + static_cast<long>(pos) + 2);
  }
  return events;
}

}  // namespace detail

// Contraction-only witness that t reduces to target. The residual factors of
// t must equal target's factors in order, and every gap between them must
// contract away on its own, so a span table suffices.
inline std::optional<Reduction> reduce_to(const Type& t, const Type& target, const Poset* order = nullptr) {
  const std::size_t n = t.size(), m = target.size();
  if (m > n || (n - m) % 2 != 0) return std::nullopt;
  detail::SpanTable table(t, order);
  // from[q][p] != -2: target[0..q) matched with t[0..p) fully consumed.
  std::vector<std::vector<int>> from(m + 1, std::vector<int>(n + 1, -2));
  for (std::size_t p = 0; p <= n; ++p)
    if (table.vanishes(0, p)) from[0][p] = -1;
  for (std::size_t q = 0; q < m; ++q)
    for (std::size_t p = 0; p < n; ++p) {
      if (from[q][p] == -2 || t[p] != target[q]) continue;
      for (std::size_t e = p + 1; e <= n; ++e)
        if (from[q + 1][e] == -2 && table.vanishes(p + 1, e)) from[q + 1][e] = static_cast<int>(p);
    }
  if (from[m][n] == -2) return std::nullopt;

  // Walk back to find which positions survive.
  std::vector<std::size_t> kept(m);
  std::size_t end = n;
  for (std::size_t q = m; q > 0; --q) {
    kept[q - 1] = static_cast<std::size_t>(from[q][end]);
    end = kept[q - 1];
  }
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  std::size_t start = 0;
  for (std::size_t q = 0; q <= m; ++q) {
    const std::size_t stop = q < m ? kept[q] : n;
    table.arcs(start, stop, arcs);
    start = stop + 1;
  }
  return Reduction{detail::arcs_to_events(n, arcs), target};
}

// Replays the events and returns the original positions paired by each one.
inline std::vector<std::pair<std::size_t, std::size_t>> arcs(const Reduction& r, const Type& original,
                                                             const Poset* order = nullptr) {
  std::vector<std::size_t> alive(original.size());
  for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = i;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t p : r.events) {
    require(p + 1 < alive.size(), Errc::InvalidArgument, "reduction event out of range");
    const std::size_t a = alive[p], b = alive[p + 1];
    require(contracts(original[a], original[b], order), Errc::InvalidArgument,
            "reduction event does not contract an adjoint pair");
    out.emplace_back(a, b);
    alive.erase(alive.begin() + static_cast<long>(p), alive.begin() + static_cast<long>(p) + 2);
  }
  return out;
}

// Applies the events and returns the resulting type.
inline Type replay(const Reduction& r, const Type& original, const Poset* order = nullptr) {
  Type cur = original;
  for (std::size_t p : r.events) {
    require(p + 1 < cur.size() && contracts(cur[p], cur[p + 1], order), Errc::InvalidArgument,
            "reduction event does not contract an adjoint pair");
    cur.erase(cur.begin() + static_cast<long>(p), cur.begin() + static_cast<long>(p) + 2);
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Text syntax: "N^r S N^l", with "^ll" for degree -2 and the empty string for
// the unit.

inline Basic parse_basic(std::string_view token) {
  const auto caret = token.find('^');
  Basic b{std::string(token.substr(0, caret)), 0};
  require(!b.base.empty(), Errc::ParseError, "empty generator in type factor '" + std::string(token) + "'");
  if (caret == std::string_view::npos) return b;
  for (std::size_t i = caret + 1; i < token.size(); ++i) {
    switch (token[i]) {
      case 'l': --b.degree; break;
      case 'r': ++b.degree; break;
      case '^': break;
      default: fail(Errc::ParseError, "bad adjoint suffix in '" + std::string(token) + "'");
    }
  }
  return b;
}

inline Type parse_type(std::string_view s) {
  Type t;
  for (const auto& tok : text::split_ws(s)) t.push_back(parse_basic(tok));
  return t;
}

inline std::string format_basic(const Basic& b) {
  if (b.degree == 0) return b.base;
  return b.base + "^" + std::string(static_cast<std::size_t>(std::abs(b.degree)), b.degree < 0 ? 'l' : 'r');
}

inline std::string format_type(const Type& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ' ';
    out += format_basic(t[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lexicon and sentence checking

struct Lexicon {
  std::map<std::string, std::vector<Type>> words;  // declaration order per word
  Type target{Basic{"S", 0}};
  std::vector<std::string> generators;  // optional; empty means "anything goes"
  Poset order;

  void validate() const {
    for (const auto& [w, types] : words) {
      require(!types.empty(), Errc::SchemaError, "word '" + w + "' has no types");
      if (generators.empty()) continue;
      for (const auto& t : types)
        for (const auto& b : t)
          require(std::find(generators.begin(), generators.end(), b.base) != generators.end(),
                  Errc::UnknownGenerator, "word '" + w + "' uses undeclared generator '" + b.base + "'");
    }
  }
};

struct SentenceCheck {
  std::vector<Type> assignment;
  Type product;
  Reduction reduction;
};

struct CheckLimits {
  std::size_t max_assignments = 1000000;
};

// First assignment (leftmost word varies fastest) whose product reduces to
// the lexicon target.
inline std::optional<SentenceCheck> check_sentence(const Lexicon& lex, const std::vector<std::string>& words,
                                                   CheckLimits limits = {}) {
  std::vector<const std::vector<Type>*> choices;
  std::size_t total = 1;
  for (const auto& w : words) {
    auto it = lex.words.find(w);
    require(it != lex.words.end(), Errc::UnknownWord, "word '" + w + "' is not in the lexicon");
    choices.push_back(&it->second);
    total = it->second.size() > limits.max_assignments / std::max<std::size_t>(total, 1)
                ? limits.max_assignments + 1
                : total * it->second.size();
  }
  require(total <= limits.max_assignments, Errc::CapExceeded, "too many lexical type assignments");

  const Poset* order = lex.order.pairs().empty() ? nullptr : &lex.order;
  std::vector<std::size_t> pick(words.size(), 0);
  while (true) {
    SentenceCheck sc;
    for (std::size_t w = 0; w < words.size(); ++w) {
      sc.assignment.push_back((*choices[w])[pick[w]]);
      sc.product = multiply(sc.product, sc.assignment.back());
    }
    if (auto r = reduce_to(sc.product, lex.target, order)) {
      sc.reduction = std::move(*r);
      return sc;
    }
    std::size_t w = 0;
    for (; w < words.size(); ++w) {
      if (++pick[w] < choices[w]->size()) break;
      pick[w] = 0;
    }
    if (w == words.size()) return std::nullopt;
  }
}

}  // namespace langlab::pregroup
