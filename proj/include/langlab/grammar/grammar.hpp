#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "langlab/error.hpp"

namespace langlab::grammar {

enum class LabelKind { Terminal, Nonterminal };

using Label = std::string;
using Form = std::vector<Label>;  // sentential form; may be empty

struct Rule {
  Form lhs;
  Form rhs;
  // Index of the head child in rhs, used for dependency arcs. Optional.
  std::optional<std::size_t> head;

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct RawGrammar {
  std::vector<Label> terminals;
  std::vector<Label> nonterminals;
  Label start;
  std::vector<Rule> rules;
};

class Grammar {
 public:
  // Checks the alphabet/rule invariants and returns a Grammar, or throws.
  static Grammar validate(RawGrammar raw) {
    Grammar g;
    for (const auto& t : raw.terminals) {
      require(!t.empty(), Errc::UnknownLabelInRule, "empty terminal label");
      if (g.kinds_.emplace(t, LabelKind::Terminal).second) g.terminals_.push_back(t);
    }
    for (const auto& n : raw.nonterminals) {
      require(!n.empty(), Errc::UnknownLabelInRule, "empty nonterminal label");
      auto it = g.kinds_.find(n);
      if (it != g.kinds_.end()) {
        require(it->second == LabelKind::Nonterminal, Errc::OverlappingAlphabets,
                "label '" + n + "' is both terminal and nonterminal");
        continue;
      }
      g.kinds_.emplace(n, LabelKind::Nonterminal);
      g.nonterminals_.push_back(n);
    }
    require(!raw.start.empty() && g.is_nonterminal(raw.start), Errc::MissingStart,
            "start label '" + raw.start + "' is not a declared nonterminal");
    g.start_ = raw.start;
    for (std::size_t r = 0; r < raw.rules.size(); ++r) {
      const auto& rule = raw.rules[r];
      require(!rule.lhs.empty(), Errc::EmptyLhs, "rule " + std::to_string(r) + " has an empty lhs");
      for (const auto* side : {&rule.lhs, &rule.rhs})
        for (const auto& l : *side)
          require(g.kinds_.count(l) > 0, Errc::UnknownLabelInRule,
                  "rule " + std::to_string(r) + " uses undeclared label '" + l + "'");
      if (rule.head)
        require(*rule.head < rule.rhs.size(), Errc::UnknownLabelInRule,
                "rule " + std::to_string(r) + " head index out of range");
      if (std::none_of(rule.lhs.begin(), rule.lhs.end(),
                       [&](const Label& l) { return g.is_nonterminal(l); }))
        g.warnings_.push_back("rule " + std::to_string(r) + " has a purely terminal lhs");
    }
    g.rules_ = std::move(raw.rules);
    return g;
  }

  const std::vector<Label>& terminals() const noexcept { return terminals_; }
  const std::vector<Label>& nonterminals() const noexcept { return nonterminals_; }
  const Label& start() const noexcept { return start_; }
  const std::vector<Rule>& rules() const noexcept { return rules_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  bool is_terminal(const Label& l) const {
    auto it = kinds_.find(l);
    return it != kinds_.end() && it->second == LabelKind::Terminal;
  }
  bool is_nonterminal(const Label& l) const {
    auto it = kinds_.find(l);
    return it != kinds_.end() && it->second == LabelKind::Nonterminal;
  }
  bool knows(const Label& l) const { return kinds_.count(l) > 0; }

  bool is_terminal_form(const Form& f) const {
    return std::all_of(f.begin(), f.end(), [&](const Label& l) { return is_terminal(l); });
  }

  // Non-contracting: no rule shortens a form.
  bool non_contracting() const {
    return std::all_of(rules_.begin(), rules_.end(),
                       [](const Rule& r) { return r.rhs.size() >= r.lhs.size(); });
  }

  RawGrammar raw() const { return {terminals_, nonterminals_, start_, rules_}; }

 private:
  Grammar() = default;

  std::vector<Label> terminals_;
  std::vector<Label> nonterminals_;
  std::map<Label, LabelKind> kinds_;
  Label start_;
  std::vector<Rule> rules_;
  std::vector<std::string> warnings_;
};

// ---------------------------------------------------------------------------
// Chomsky classification

// Largest k such that this single rule fits the Type-k shape.
inline int rule_type(const Grammar& g, const Rule& r) {
  const bool single_nt = r.lhs.size() == 1 && g.is_nonterminal(r.lhs[0]);
  if (single_nt) {
    const bool right_linear =
        (r.rhs.size() == 1 && g.is_terminal(r.rhs[0])) ||
        (r.rhs.size() == 2 && g.is_terminal(r.rhs[0]) && g.is_nonterminal(r.rhs[1]));
    return right_linear ? 3 : 2;
  }
  // lhs = a X c, rhs = a d c with X a nonterminal; d may be empty.
  for (std::size_t p = 0; p < r.lhs.size(); ++p) {
    if (!g.is_nonterminal(r.lhs[p])) continue;
    const std::size_t a = p, c = r.lhs.size() - p - 1;
    if (r.rhs.size() < a + c) continue;
    if (std::equal(r.lhs.begin(), r.lhs.begin() + a, r.rhs.begin()) &&
        std::equal(r.lhs.end() - c, r.lhs.end(), r.rhs.end() - c))
      return 1;
  }
  return 0;
}

inline int classify(const Grammar& g) {
  int k = 3;
  for (const auto& r : g.rules()) k = std::min(k, rule_type(g, r));
  return k;
}

// ---------------------------------------------------------------------------
// Derivations

struct StepResult {
  Form form;
  std::size_t rule;
  std::size_t position;

  friend bool operator==(const StepResult&, const StepResult&) = default;
};

// Every one-step rewrite, ordered by rule then position.
inline std::vector<StepResult> derive_step(const Grammar& g, const Form& form) {
  std::vector<StepResult> out;
  const auto& rules = g.rules();
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const auto& lhs = rules[r].lhs;
    if (lhs.size() > form.size()) continue;
    for (std::size_t p = 0; p + lhs.size() <= form.size(); ++p) {
      if (!std::equal(lhs.begin(), lhs.end(), form.begin() + p)) continue;
      Form next;
      next.reserve(form.size() - lhs.size() + rules[r].rhs.size());
      next.insert(next.end(), form.begin(), form.begin() + p);
      next.insert(next.end(), rules[r].rhs.begin(), rules[r].rhs.end());
      next.insert(next.end(), form.begin() + p + lhs.size(), form.end());
      out.push_back({std::move(next), r, p});
    }
  }
  return out;
}

struct DerivationStep {
  Form before;
  std::size_t rule;
  std::size_t position;
  Form after;
};

struct Derivation {
  std::vector<DerivationStep> steps;

  std::size_t size() const noexcept { return steps.size(); }
  bool empty() const noexcept { return steps.empty(); }
};

struct SearchLimits {
  std::size_t node_cap = 200000;  // total distinct forms visited
};

struct FormHash {
  std::size_t operator()(const Form& f) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (const auto& l : f) {
      h ^= std::hash<std::string>{}(l) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// Breadth-first search for a derivation of `to` from `from`. std::nullopt
// means "not found within max_steps", which says nothing about membership.
inline std::optional<Derivation> derives(const Grammar& g, const Form& from, const Form& to,
                                         std::size_t max_steps, SearchLimits limits = {}) {
  struct Parent {
    const Form* prev;
    std::size_t rule;
    std::size_t position;
  };
  std::unordered_map<Form, Parent, FormHash> seen;
  auto reconstruct = [&](const Form* node) {
    Derivation d;
    while (true) {
      const Parent& p = seen.at(*node);
      if (!p.prev) break;
      d.steps.push_back({*p.prev, p.rule, p.position, *node});
      node = p.prev;
    }
    std::reverse(d.steps.begin(), d.steps.end());
    return d;
  };

  auto [root, _] = seen.emplace(from, Parent{nullptr, 0, 0});
  if (from == to) return Derivation{};
  std::vector<const Form*> frontier{&root->first};
  for (std::size_t depth = 0; depth < max_steps && !frontier.empty(); ++depth) {
    std::vector<const Form*> next;
    for (const Form* f : frontier) {
      for (auto& s : derive_step(g, *f)) {
        auto [it, fresh] = seen.emplace(std::move(s.form), Parent{f, s.rule, s.position});
        if (!fresh) continue;
        if (it->first == to) return reconstruct(&it->first);
        require(seen.size() <= limits.node_cap, Errc::SearchBudgetExceeded,
                "derivation search visited more than " + std::to_string(limits.node_cap) + " forms");
        next.push_back(&it->first);
      }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

struct LanguageOptions {
  std::size_t node_cap = 200000;
  // Sentential forms longer than this are pruned. 0 picks the default:
  // max_len for non-contracting grammars (exact) and 2*max_len+4 otherwise.
  std::size_t form_cap = 0;
};

struct LanguageResult {
  std::vector<Form> strings;    // sorted by length, then lexicographically
  std::size_t pruned = 0;       // forms dropped by the length cap
  bool exact = true;            // false when pruning may have hidden strings
};

inline LanguageResult enumerate_language(const Grammar& g, std::size_t max_len,
                                         std::size_t max_steps, LanguageOptions opt = {}) {
  const bool nc = g.non_contracting();
  const std::size_t cap = opt.form_cap ? opt.form_cap : (nc ? max_len : 2 * max_len + 4);
  LanguageResult res;
  std::set<Form> found;
  std::unordered_set<Form, FormHash> seen;
  std::vector<Form> frontier{Form{g.start()}};
  seen.insert(frontier.front());
  for (std::size_t depth = 0; depth < max_steps && !frontier.empty(); ++depth) {
    std::vector<Form> next;
    for (const auto& f : frontier) {
      for (auto& s : derive_step(g, f)) {
        if (s.form.size() > cap) {
          ++res.pruned;
          continue;
        }
        if (!seen.insert(s.form).second) continue;
        require(seen.size() <= opt.node_cap, Errc::SearchBudgetExceeded,
                "language enumeration visited more than " + std::to_string(opt.node_cap) + " forms");
        if (g.is_terminal_form(s.form) && s.form.size() <= max_len) found.insert(s.form);
        next.push_back(std::move(s.form));
      }
    }
    frontier = std::move(next);
  }
  // Pruning is harmless when nothing can shrink back under max_len.
  res.exact = nc && cap >= max_len ? true : res.pruned == 0;
  res.strings.assign(found.begin(), found.end());
  std::stable_sort(res.strings.begin(), res.strings.end(),
                   [](const Form& a, const Form& b) { return a.size() < b.size(); });
  return res;
}

}  // namespace langlab::grammar
