#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "langlab/error.hpp"
#include "langlab/rng.hpp"
#include "langlab/text.hpp"

namespace langlab::ngram {

using text::Tokens;

class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(Tokens tokens) : tokens_(std::move(tokens)) {
    std::unordered_map<std::string, bool> seen;
    for (const auto& t : tokens_)
      if (seen.emplace(t, true).second) vocab_.push_back(t);
  }
  static Corpus from_text(std::string_view s, const text::Normalizer& norm = text::default_normalize) {
    return Corpus(text::tokenize(s, norm));
  }

  const Tokens& tokens() const noexcept { return tokens_; }
  // First-occurrence order.
  const Tokens& vocabulary() const noexcept { return vocab_; }
  std::size_t size() const noexcept { return tokens_.size(); }

  // Contiguous, possibly overlapping occurrences.
  std::int64_t count(const Tokens& phrase) const {
    if (phrase.empty() || phrase.size() > tokens_.size()) return phrase.empty() ? static_cast<std::int64_t>(size()) : 0;
    std::int64_t n = 0;
    for (std::size_t i = 0; i + phrase.size() <= tokens_.size(); ++i) {
      bool hit = true;
      for (std::size_t k = 0; k < phrase.size() && hit; ++k) hit = tokens_[i + k] == phrase[k];
      n += hit;
    }
    return n;
  }

 private:
  Tokens tokens_;
  Tokens vocab_;
};

inline Tokens concat(Tokens a, const Tokens& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline Tokens slice(const Tokens& t, std::size_t from, std::size_t to) {
  return Tokens(t.begin() + static_cast<long>(from), t.begin() + static_cast<long>(to));
}

// #phrase / #D, with #D the corpus token count.
template <class R = double>
R phrase_freq(const Corpus& c, const Tokens& phrase) {
  require(!phrase.empty(), Errc::EmptyPhrase, "phrase must be nonempty");
  require(c.size() > 0, Errc::CorpusTooShort, "frequency over an empty corpus");
  return R(c.count(phrase)) / R(static_cast<std::int64_t>(c.size()));
}

// Frequency ratio; 1 after a context that never occurs.
template <class R = double>
R cond_next(const Corpus& c, const Tokens& context, const std::string& w) {
  if (context.empty()) return phrase_freq<R>(c, {w});
  const auto ctx = c.count(context);
  if (ctx == 0) return R(1);
  return R(c.count(concat(context, {w}))) / R(ctx);
}

template <class R = double>
R phrase_prob_chain(const Corpus& c, const Tokens& phrase) {
  require(!phrase.empty(), Errc::EmptyPhrase, "phrase must be nonempty");
  R p(1);
  for (std::size_t m = 0; m < phrase.size(); ++m) p *= cond_next<R>(c, slice(phrase, 0, m), phrase[m]);
  return p;
}

// Counts of every n-gram with 1 <= n <= N, final windows included. Successor
// rows only see windows that have a successor.
class NGramModel {
 public:
  NGramModel() = default;
  NGramModel(std::size_t n, std::int64_t total, Tokens vocabulary, std::map<Tokens, std::int64_t> counts)
      : n_(n), total_(total), vocab_(std::move(vocabulary)), counts_(std::move(counts)) {
    require(n_ >= 1, Errc::BadOrder, "N must be at least 1");
    require(total_ > 0, Errc::CorpusTooShort, "model needs a nonempty corpus");
    std::unordered_map<std::string, bool> seen;
    for (const auto& v : vocab_) require(seen.emplace(v, true).second, Errc::SchemaError, "duplicate vocabulary entry '" + v + "'");
    for (const auto& [g, k] : counts_) {
      require(!g.empty() && g.size() <= n_, Errc::SchemaError, "n-gram length outside 1..N");
      require(k > 0, Errc::SchemaError, "n-gram counts must be positive");
      for (const auto& t : g) require(seen.count(t) > 0, Errc::SchemaError, "n-gram token '" + t + "' not in vocabulary");
    }
  }

  std::size_t order() const noexcept { return n_; }
  std::int64_t total() const noexcept { return total_; }
  const Tokens& vocabulary() const noexcept { return vocab_; }
  const std::map<Tokens, std::int64_t>& counts() const noexcept { return counts_; }

  std::int64_t count(const Tokens& g) const {
    if (g.empty()) return total_;
    auto it = counts_.find(g);
    return it == counts_.end() ? 0 : it->second;
  }

  // Successor counts of a context (length < N) in vocabulary order.
  std::vector<std::int64_t> successors(const Tokens& context) const {
    require(context.size() < n_, Errc::InvalidArgument, "context must be shorter than N");
    std::vector<std::int64_t> out;
    for (const auto& w : vocab_) out.push_back(count(concat(context, {w})));
    return out;
  }

  // Normalized successor row; empty when the context has no successor.
  std::vector<double> row(const Tokens& context) const {
    auto s = successors(context);
    std::int64_t total = 0;
    for (auto k : s) total += k;
    if (total == 0) return {};
    std::vector<double> out;
    for (auto k : s) out.push_back(static_cast<double>(k) / static_cast<double>(total));
    return out;
  }

  friend bool operator==(const NGramModel&, const NGramModel&) = default;

 private:
  std::size_t n_ = 1;
  std::int64_t total_ = 0;
  Tokens vocab_;
  std::map<Tokens, std::int64_t> counts_;
};

inline NGramModel fit(const Corpus& c, std::size_t n) {
  require(n >= 1, Errc::BadOrder, "N must be at least 1");
  require(c.size() >= n && c.size() > 0, Errc::CorpusTooShort,
          "corpus of " + std::to_string(c.size()) + " tokens is shorter than N = " + std::to_string(n));
  std::map<Tokens, std::int64_t> counts;
  const auto& t = c.tokens();
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t len = 1; len <= n && i + len <= t.size(); ++len) ++counts[slice(t, i, i + len)];
  return NGramModel(n, static_cast<std::int64_t>(c.size()), c.vocabulary(), std::move(counts));
}

// Leading (N-1)-gram frequency times truncated-context frequency ratios.
template <class R = double>
R phrase_prob_ngram(const NGramModel& m, const Tokens& phrase) {
  const std::size_t k = m.order() - 1;
  require(phrase.size() >= k && !phrase.empty(), Errc::PhraseTooShort,
          "phrase needs at least " + std::to_string(std::max<std::size_t>(k, 1)) + " tokens");
  R p = k == 0 ? R(1) : R(m.count(slice(phrase, 0, k))) / R(m.total());
  for (std::size_t i = k; i < phrase.size(); ++i) {
    const auto ctx = slice(phrase, i - k, i);
    const auto base = m.count(ctx);
    p *= base == 0 ? R(1) : R(m.count(concat(ctx, {phrase[i]}))) / R(base);
  }
  return p;
}

struct SampleOptions {
  double smoothing = 0.0;  // add-delta over the whole vocabulary
  bool backoff = false;    // drop the oldest context token until a row exists
};

inline std::vector<double> sampling_row(const NGramModel& m, Tokens context, const SampleOptions& opt) {
  if (context.size() >= m.order()) context = slice(context, context.size() - (m.order() - 1), context.size());
  while (true) {
    auto s = m.successors(context);
    std::vector<double> w;
    double total = 0.0;
    for (auto k : s) {
      w.push_back(static_cast<double>(k) + opt.smoothing);
      total += w.back();
    }
    if (total > 0.0) return w;
    require(opt.backoff && !context.empty(), Errc::UnseenContext, "context '" + text::join(context) + "' has no successors");
    context.erase(context.begin());
  }
}

inline std::string sample_next(const NGramModel& m, const Tokens& context, SeededRng& rng, const SampleOptions& opt = {}) {
  return m.vocabulary()[rng.categorical(sampling_row(m, context, opt))];
}

inline Tokens generate(const NGramModel& m, const Tokens& seed_context, std::size_t length, SeededRng& rng,
                       const SampleOptions& opt = {}) {
  require(seed_context.size() == m.order() - 1, Errc::InvalidArgument,
          "seed context needs exactly N-1 = " + std::to_string(m.order() - 1) + " tokens");
  Tokens window = seed_context, out;
  for (std::size_t i = 0; i < length; ++i) {
    out.push_back(sample_next(m, window, rng, opt));
    if (!window.empty()) {
      window.erase(window.begin());
      window.push_back(out.back());
    }
  }
  return out;
}

struct MarkovChain {
  std::vector<Tokens> states;  // seen (N-1)-grams, lexicographic
  // transitions[i] lists (target state, probability); empty for a dead end.
  std::vector<std::vector<std::pair<std::size_t, double>>> transitions;
};

inline MarkovChain to_markov_chain(const NGramModel& m) {
  require(m.order() >= 2, Errc::BadOrder, "a Markov chain view needs N >= 2");
  const std::size_t k = m.order() - 1;
  MarkovChain mc;
  std::map<Tokens, std::size_t> ix;
  auto add = [&](const Tokens& s) {
    if (ix.emplace(s, mc.states.size()).second) mc.states.push_back(s);
  };
  for (const auto& [g, c] : m.counts())
    if (g.size() == k) add(g);
  mc.transitions.resize(mc.states.size());
  for (std::size_t i = 0; i < mc.states.size(); ++i) {
    const auto row = m.row(mc.states[i]);
    for (std::size_t w = 0; w < row.size(); ++w) {
      if (row[w] <= 0.0) continue;
      Tokens next = slice(mc.states[i], 1, k);
      next.push_back(m.vocabulary()[w]);
      mc.transitions[i].emplace_back(ix.at(next), row[w]);
    }
  }
  return mc;
}

}  // namespace langlab::ngram
