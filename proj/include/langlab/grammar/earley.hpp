#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "langlab/error.hpp"
#include "langlab/grammar/grammar.hpp"

namespace langlab::grammar {

struct ForestChild {
  bool terminal;       // true: token position; false: node id
  std::size_t index;

  friend bool operator==(const ForestChild&, const ForestChild&) = default;
};

struct ForestAlt {
  std::size_t rule;
  std::vector<ForestChild> children;
};

struct ForestNode {
  Label label;
  std::size_t begin;
  std::size_t end;
  std::vector<ForestAlt> alts;  // ordered by rule, then child spans
};

// Packed shared forest over (nonterminal, span) nodes. Only nodes reachable
// from the root are kept.
class ParseForest {
 public:
  const std::vector<Label>& tokens() const noexcept { return tokens_; }
  const std::vector<ForestNode>& nodes() const noexcept { return nodes_; }
  const std::vector<Rule>& rules() const noexcept { return rules_; }
  std::optional<std::size_t> root() const noexcept { return root_; }
  bool recognized() const noexcept { return root_.has_value(); }

 private:
  friend ParseForest parse(const Grammar&, const std::vector<Label>&);
  std::vector<Label> tokens_;
  std::vector<ForestNode> nodes_;
  std::vector<Rule> rules_;
  std::optional<std::size_t> root_;
};

namespace detail {

struct Item {
  std::size_t rule;
  std::size_t dot;
  std::size_t origin;
  auto operator<=>(const Item&) const = default;
};

inline std::set<Label> nullable_set(const Grammar& g) {
  std::set<Label> nullable;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : g.rules()) {
      if (nullable.count(r.lhs[0])) continue;
      if (std::all_of(r.rhs.begin(), r.rhs.end(), [&](const Label& l) { return nullable.count(l) > 0; })) {
        nullable.insert(r.lhs[0]);
        changed = true;
      }
    }
  }
  return nullable;
}

}  // namespace detail

// Earley recognizer plus forest construction. Nullable nonterminals are
// handled by advancing over them at prediction time.
inline ParseForest parse(const Grammar& g, const std::vector<Label>& tokens) {
  require(classify(g) >= 2, Errc::NotContextFree, "Earley parsing needs a context-free grammar");
  for (std::size_t i = 0; i < tokens.size(); ++i)
    require(g.is_terminal(tokens[i]), Errc::UnknownToken,
            "token '" + tokens[i] + "' at position " + std::to_string(i) + " is not a terminal");

  using detail::Item;
  const auto& rules = g.rules();
  const std::size_t n = tokens.size();
  const auto nullable = detail::nullable_set(g);
  std::map<Label, std::vector<std::size_t>> by_lhs;
  for (std::size_t r = 0; r < rules.size(); ++r) by_lhs[rules[r].lhs[0]].push_back(r);

  std::vector<std::vector<Item>> chart(n + 1);
  std::vector<std::set<Item>> member(n + 1);
  auto add = [&](std::size_t k, Item it) {
    if (member[k].insert(it).second) chart[k].push_back(it);
  };
  for (std::size_t r : by_lhs[g.start()]) add(0, {r, 0, 0});

  for (std::size_t k = 0; k <= n; ++k) {
    for (std::size_t q = 0; q < chart[k].size(); ++q) {
      const Item it = chart[k][q];
      const auto& rhs = rules[it.rule].rhs;
      if (it.dot == rhs.size()) {
        const Label& lhs = rules[it.rule].lhs[0];
        for (std::size_t p = 0; p < chart[it.origin].size(); ++p) {
          const Item src = chart[it.origin][p];
          const auto& srhs = rules[src.rule].rhs;
          if (src.dot < srhs.size() && srhs[src.dot] == lhs) add(k, {src.rule, src.dot + 1, src.origin});
        }
        continue;
      }
      const Label& next = rhs[it.dot];
      if (g.is_nonterminal(next)) {
        for (std::size_t r : by_lhs[next]) add(k, {r, 0, k});
        if (nullable.count(next)) add(k, {it.rule, it.dot + 1, it.origin});
      } else if (k < n && tokens[k] == next) {
        add(k + 1, {it.rule, it.dot + 1, it.origin});
      }
    }
  }

  // done[(A, i, j)] holds when some A-rule completed over tokens[i..j).
  std::set<std::tuple<Label, std::size_t, std::size_t>> done;
  for (std::size_t j = 0; j <= n; ++j)
    for (const Item& it : chart[j])
      if (it.dot == rules[it.rule].rhs.size()) done.emplace(rules[it.rule].lhs[0], it.origin, j);

  ParseForest f;
  f.tokens_ = tokens;
  f.rules_ = rules;
  if (!done.count({g.start(), 0, n})) return f;

  std::map<std::tuple<Label, std::size_t, std::size_t>, std::size_t> ids;
  std::vector<std::tuple<Label, std::size_t, std::size_t>> pending;
  auto node_id = [&](const Label& a, std::size_t i, std::size_t j) {
    auto key = std::make_tuple(a, i, j);
    auto [it, fresh] = ids.emplace(key, f.nodes_.size());
    if (fresh) {
      f.nodes_.push_back({a, i, j, {}});
      pending.push_back(key);
    }
    return it->second;
  };

  f.root_ = node_id(g.start(), 0, n);
  for (std::size_t w = 0; w < pending.size(); ++w) {
    const auto [a, i, j] = pending[w];
    const std::size_t id = ids.at(pending[w]);
    std::vector<ForestAlt> alts;
    for (std::size_t r : by_lhs[a]) {
      if (!member[j].count(Item{r, rules[r].rhs.size(), i})) continue;
      const auto& rhs = rules[r].rhs;
      // Children as (is_terminal, label/token, begin, end) spans.
      std::vector<std::tuple<bool, std::size_t, std::size_t>> spans;  // (terminal, begin, end)
      auto dfs = [&](auto&& self, std::size_t s, std::size_t pos) -> void {
        if (s == rhs.size()) {
          if (pos != j) return;
          ForestAlt alt{r, {}};
          for (std::size_t c = 0; c < spans.size(); ++c) {
            const auto [term, b, e] = spans[c];
            alt.children.push_back(term ? ForestChild{true, b} : ForestChild{false, node_id(rhs[c], b, e)});
          }
          alts.push_back(std::move(alt));
          return;
        }
        if (g.is_terminal(rhs[s])) {
          if (pos < j && tokens[pos] == rhs[s]) {
            spans.emplace_back(true, pos, pos + 1);
            self(self, s + 1, pos + 1);
            spans.pop_back();
          }
          return;
        }
        for (std::size_t e = pos; e <= j; ++e) {
          if (!done.count({rhs[s], pos, e})) continue;
          spans.emplace_back(false, pos, e);
          self(self, s + 1, e);
          spans.pop_back();
        }
      };
      dfs(dfs, 0, i);
    }
    f.nodes_[id].alts = std::move(alts);
  }
  return f;
}

namespace detail {

// Throws InfinitelyAmbiguous when the forest has a cycle reachable from root.
inline std::vector<std::size_t> topo_order(const ParseForest& f) {
  const auto& nodes = f.nodes();
  std::vector<int> color(nodes.size(), 0);
  std::vector<std::size_t> order;
  auto visit = [&](auto&& self, std::size_t v) -> void {
    color[v] = 1;
    for (const auto& alt : nodes[v].alts)
      for (const auto& c : alt.children) {
        if (c.terminal) continue;
        if (color[c.index] == 1)
          fail(Errc::InfinitelyAmbiguous, "forest has a derivation cycle through " + nodes[c.index].label);
        if (color[c.index] == 0) self(self, c.index);
      }
    color[v] = 2;
    order.push_back(v);
  };
  if (f.root()) visit(visit, *f.root());
  return order;
}

inline bool is_acyclic(const ParseForest& f) {
  try {
    topo_order(f);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace detail

inline std::uint64_t count_parses(const ParseForest& f) {
  if (!f.root()) return 0;
  const auto order = detail::topo_order(f);
  std::vector<std::uint64_t> count(f.nodes().size(), 0);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t v : order) {
    std::uint64_t total = 0;
    for (const auto& alt : f.nodes()[v].alts) {
      std::uint64_t prod = 1;
      for (const auto& c : alt.children) {
        if (c.terminal) continue;
        const std::uint64_t k = count[c.index];
        require(k == 0 || prod <= kMax / k, Errc::CapExceeded, "parse count overflows 64 bits");
        prod *= k;
      }
      require(total <= kMax - prod, Errc::CapExceeded, "parse count overflows 64 bits");
      total += prod;
    }
    count[v] = total;
  }
  return count[*f.root()];
}

// Concrete tree: leaves carry a token position, inner nodes a rule index.
struct Tree {
  Label label;
  std::optional<std::size_t> rule;
  std::optional<std::size_t> token;
  std::vector<Tree> children;

  bool is_leaf() const noexcept { return token.has_value(); }
  friend bool operator==(const Tree&, const Tree&) = default;
};

// Bracketed rendering, e.g. (S (NP i) (VP ...)).
inline std::string to_string(const Tree& t) {
  if (t.is_leaf()) return t.label;
  std::string s = "(" + t.label;
  for (const auto& c : t.children) s += " " + to_string(c);
  return s + ")";
}

// Up to `limit` trees. Alternatives follow rule declaration order, and within
// an alternative the first child varies slowest.
inline std::vector<Tree> extract_trees(const ParseForest& f,
                                       std::size_t limit = std::numeric_limits<std::size_t>::max()) {
  if (!f.root() || limit == 0) return {};
  const auto& nodes = f.nodes();
  const bool acyclic = detail::is_acyclic(f);
  std::vector<std::optional<std::vector<Tree>>> memo(nodes.size());
  std::vector<bool> on_path(nodes.size(), false);

  auto expand = [&](auto&& self, std::size_t v) -> std::vector<Tree> {
    if (acyclic && memo[v]) return *memo[v];
    if (on_path[v]) return {};
    on_path[v] = true;
    std::vector<Tree> out;
    for (const auto& alt : nodes[v].alts) {
      if (out.size() >= limit) break;
      std::vector<std::vector<Tree>> options;
      bool dead = false;
      for (const auto& c : alt.children) {
        if (c.terminal) {
          options.push_back({Tree{f.tokens()[c.index], std::nullopt, c.index, {}}});
        } else {
          options.push_back(self(self, c.index));
          if (options.back().empty()) dead = true;
        }
      }
      if (dead) continue;
      std::vector<std::size_t> pick(options.size(), 0);
      while (out.size() < limit) {
        Tree t{nodes[v].label, alt.rule, std::nullopt, {}};
        for (std::size_t c = 0; c < options.size(); ++c) t.children.push_back(options[c][pick[c]]);
        out.push_back(std::move(t));
        // Odometer with the last child fastest.
        bool wrapped = true;
        for (std::size_t c = options.size(); c-- > 0;) {
          if (++pick[c] < options[c].size()) {
            wrapped = false;
            break;
          }
          pick[c] = 0;
        }
        if (wrapped) break;
      }
    }
    on_path[v] = false;
    if (acyclic) memo[v] = out;
    return out;
  };
  return expand(expand, *f.root());
}

struct DependencyArc {
  std::size_t head;
  std::size_t dependent;
  std::optional<std::string> label;

  friend bool operator==(const DependencyArc&, const DependencyArc&) = default;
};

using HeadTable = std::map<std::size_t, std::size_t>;  // rule index -> head child

inline HeadTable head_table(const std::vector<Rule>& rules) {
  HeadTable h;
  for (std::size_t r = 0; r < rules.size(); ++r)
    if (rules[r].head) h[r] = *rules[r].head;
  return h;
}

// Percolates lexical heads upward; each non-head child's head token depends on
// the parent's head token. Arcs are labeled with the dependent's constituent.
inline std::vector<DependencyArc> dependency_arcs(const Tree& tree, const HeadTable& heads) {
  std::vector<DependencyArc> arcs;
  auto walk = [&](auto&& self, const Tree& t) -> std::optional<std::size_t> {
    if (t.is_leaf()) return t.token;
    std::vector<std::optional<std::size_t>> child_heads;
    for (const auto& c : t.children) child_heads.push_back(self(self, c));
    std::size_t lexical = 0;
    for (const auto& h : child_heads) lexical += h.has_value();
    if (lexical == 0) return std::nullopt;
    std::size_t head_child = 0;
    if (t.children.size() == 1) {
      head_child = 0;
    } else {
      auto it = t.rule ? heads.find(*t.rule) : heads.end();
      require(it != heads.end(), Errc::MissingHeadAssignment,
              "no head child for branching rule of " + t.label +
                  (t.rule ? " (rule " + std::to_string(*t.rule) + ")" : std::string{}));
      head_child = it->second;
      require(head_child < t.children.size() && child_heads[head_child].has_value(),
              Errc::MissingHeadAssignment, "head child of " + t.label + " yields no token");
    }
    const std::size_t h = *child_heads[head_child];
    for (std::size_t c = 0; c < t.children.size(); ++c) {
      if (c == head_child || !child_heads[c]) continue;
      arcs.push_back({h, *child_heads[c], t.children[c].label});
    }
    return h;
  };
  walk(walk, tree);
  std::sort(arcs.begin(), arcs.end(),
            [](const DependencyArc& a, const DependencyArc& b) { return a.dependent < b.dependent; });
  return arcs;
}

}  // namespace langlab::grammar
