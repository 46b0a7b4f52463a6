#include <gtest/gtest.h>

#include <algorithm>
#include <boost/rational.hpp>

#include "langlab/ngram/ngram.hpp"
#include "support/oracles.hpp"

using namespace langlab;
using namespace langlab::ngram;
using Q = boost::rational<std::int64_t>;

namespace {

Tokens toks(std::string_view s) { return text::split_ws(s); }

Corpus abab() { return Corpus(toks("a b a b")); }

using testdata::occurrences;
using testdata::random_tokens;

// Corpus whose last N-1 tokens repeat its first, so every context has a successor.
Corpus cyclic(SeededRng& rng, std::size_t n, std::size_t vocab, std::size_t order) {
  auto t = random_tokens(rng, n, vocab);
  for (std::size_t i = 0; i + 1 < order; ++i) t.push_back(t[i]);
  return Corpus(t);
}

}  // namespace

TEST(PhraseFreq, Examples) {
  auto c = abab();
  EXPECT_EQ(phrase_freq<Q>(c, toks("a")), Q(2, 4));
  EXPECT_EQ(phrase_freq<Q>(c, toks("a b a b")), Q(1, 4));
  EXPECT_EQ(phrase_freq<Q>(c, toks("b b")), Q(0));
  EXPECT_THROW(phrase_freq(c, {}), Error);
}

TEST(PhraseFreq, CountMatchesSearchOracle) {
  SeededRng rng(21);
  for (int i = 0; i < 300; ++i) {
    Corpus c(random_tokens(rng, 1 + rng.index(30), 3));
    auto phrase = random_tokens(rng, 1 + rng.index(4), 3);
    EXPECT_EQ(c.count(phrase), occurrences(c.tokens(), phrase));
  }
}

TEST(CondNext, Examples) {
  auto c = abab();
  EXPECT_EQ(cond_next<Q>(c, toks("a"), "b"), Q(1));
  EXPECT_EQ(cond_next<Q>(c, toks("b"), "a"), Q(1, 2));
  EXPECT_EQ(cond_next<Q>(c, toks("z"), "a"), Q(1));
  EXPECT_EQ(cond_next<Q>(c, {}, "b"), Q(1, 2));
}

TEST(Chain, Examples) {
  auto c = abab();
  EXPECT_EQ(phrase_prob_chain<Q>(c, toks("a b a")), Q(1, 4));
  EXPECT_EQ(phrase_prob_chain<Q>(c, toks("a b a")), phrase_freq<Q>(c, toks("a b a")));
  EXPECT_EQ(phrase_prob_chain<Q>(c, toks("b")), Q(1, 2));
}

TEST(Chain, TelescopesExactly) {
  SeededRng rng(22);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    Corpus c(random_tokens(rng, 5 + rng.index(40), 3));
    // Phrases cut from the corpus have every prefix present.
    const auto start = rng.index(c.size());
    const auto len = 1 + rng.index(std::min<std::size_t>(6, c.size() - start));
    Tokens phrase = slice(c.tokens(), start, start + len);
    EXPECT_EQ(phrase_prob_chain<Q>(c, phrase), Q(occurrences(c.tokens(), phrase), static_cast<std::int64_t>(c.size())));
    ++checked;
  }
  EXPECT_EQ(checked, 400);
}

TEST(NGram, Examples) {
  auto c = abab();
  auto m2 = fit(c, 2);
  EXPECT_EQ(phrase_prob_ngram<Q>(m2, toks("a b a")), Q(1, 4));
  EXPECT_EQ(m2.row(toks("a")), (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(m2.row(toks("b")), (std::vector<double>{1.0, 0.0}));

  auto m1 = fit(c, 1);
  EXPECT_EQ(phrase_prob_ngram<Q>(m1, toks("a b a")), Q(1, 2) * Q(1, 2) * Q(1, 2));
  EXPECT_EQ(m1.row({}), (std::vector<double>{0.5, 0.5}));

  auto m3 = fit(c, 3);
  EXPECT_THROW(phrase_prob_ngram(m3, toks("a")), Error);
  EXPECT_THROW(fit(c, 5), Error);
  EXPECT_THROW(fit(c, 0), Error);
}

TEST(NGram, FullOrderEqualsChain) {
  SeededRng rng(23);
  for (int i = 0; i < 300; ++i) {
    Corpus c(random_tokens(rng, 6 + rng.index(30), 3));
    auto phrase = random_tokens(rng, 1 + rng.index(5), 3);
    auto m = fit(c, phrase.size());
    EXPECT_EQ(phrase_prob_ngram<Q>(m, phrase), phrase_prob_chain<Q>(c, phrase)) << text::join(phrase);
  }
}

TEST(NGram, RowsMatchCondNextOnContextsWithSuccessors) {
  SeededRng rng(24);
  for (int i = 0; i < 100; ++i) {
    auto c = cyclic(rng, 30, 3, 3);
    auto m = fit(c, 3);
    for (std::size_t s = 0; s + 2 < c.size(); ++s) {
      Tokens ctx = slice(c.tokens(), s, s + 2);
      // The final bigram ends the corpus; every other occurrence has a successor.
      const bool ends = slice(c.tokens(), c.size() - 2, c.size()) == ctx;
      auto row = m.row(ctx);
      double sum = 0.0;
      for (std::size_t w = 0; w < row.size(); ++w) {
        sum += row[w];
        if (!ends) EXPECT_NEAR(row[w], cond_next(c, ctx, m.vocabulary()[w]), 1e-12);
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(Generate, DeterministicRowAndSeeds) {
  auto m = fit(abab(), 2);
  SeededRng r1(42), r2(42);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(sample_next(m, toks("a"), r1), "b");
  auto g1 = generate(m, toks("a"), 50, r1), g2 = generate(m, toks("a"), 50, r2);
  EXPECT_EQ(g1.size(), 50u);
  EXPECT_EQ(g1, g2);  // the chain is deterministic, so the stream offset is irrelevant

  Corpus c = Corpus::from_text("The cat sat. The cat ran; a dog sat, the dog ran the cat.");
  auto m3 = fit(c, 2);
  SeededRng s1(42), s2(42), s3(43);
  auto a = generate(m3, toks("the"), 100, s1, {0.0, true});
  auto b = generate(m3, toks("the"), 100, s2, {0.0, true});
  auto d = generate(m3, toks("the"), 100, s3, {0.0, true});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, d);
}

TEST(Generate, UnseenContextPolicies) {
  auto m = fit(Corpus(toks("a b c")), 2);
  SeededRng rng(1);
  EXPECT_THROW(sample_next(m, toks("c"), rng), Error);
  EXPECT_THROW(sample_next(m, toks("zz"), rng), Error);
  EXPECT_NO_THROW(sample_next(m, toks("c"), rng, {0.0, true}));
  EXPECT_NO_THROW(sample_next(m, toks("c"), rng, {0.5, false}));
  EXPECT_THROW(generate(m, {}, 3, rng), Error);
}

TEST(Generate, LongRunUnigramsOfAlternatingChain) {
  auto m = fit(abab(), 2);
  SeededRng rng(5);
  auto g = generate(m, toks("a"), 10000, rng);
  const double pa = static_cast<double>(std::count(g.begin(), g.end(), "a")) / 10000.0;
  EXPECT_NEAR(pa, 0.5, 0.03);
}

TEST(Generate, EmpiricalConditionalsAndRefit) {
  SeededRng corpus_rng(25);
  for (std::size_t order : {2u, 3u}) {
    auto c = cyclic(corpus_rng, 400, 3, order);
    auto m = fit(c, order);
    SeededRng rng(26 + order);
    Tokens seed = slice(c.tokens(), 0, order - 1);
    auto g = generate(m, seed, 100000, rng);
    auto refit = fit(Corpus(concat(seed, g)), order);
    std::size_t rows = 0;
    for (const auto& [ctx, k] : m.counts()) {
      if (ctx.size() != order - 1) continue;
      auto want = m.row(ctx), got = refit.row(ctx);
      ASSERT_EQ(got.size(), want.size());
      // The refit vocabulary may be ordered differently.
      for (std::size_t w = 0; w < want.size(); ++w) {
        auto it = std::find(refit.vocabulary().begin(), refit.vocabulary().end(), m.vocabulary()[w]);
        const auto j = static_cast<std::size_t>(it - refit.vocabulary().begin());
        EXPECT_NEAR(got[j], want[w], 0.02);
      }
      ++rows;
    }
    EXPECT_GT(rows, 2u);
  }
}

TEST(Markov, Examples) {
  auto mc = to_markov_chain(fit(abab(), 2));
  ASSERT_EQ(mc.states.size(), 2u);
  EXPECT_EQ(mc.states[0], toks("a"));
  ASSERT_EQ(mc.transitions[0].size(), 1u);
  EXPECT_EQ(mc.transitions[0][0], (std::pair<std::size_t, double>{1, 1.0}));
  EXPECT_EQ(mc.transitions[1][0], (std::pair<std::size_t, double>{0, 1.0}));

  auto loop = to_markov_chain(fit(Corpus(toks("a a a")), 2));
  ASSERT_EQ(loop.states.size(), 1u);
  EXPECT_EQ(loop.transitions[0][0], (std::pair<std::size_t, double>{0, 1.0}));

  EXPECT_THROW(to_markov_chain(fit(abab(), 1)), Error);
}

TEST(Markov, RowsSumToOne) {
  SeededRng rng(27);
  for (int i = 0; i < 50; ++i) {
    auto mc = to_markov_chain(fit(Corpus(random_tokens(rng, 40, 4)), 3));
    for (const auto& row : mc.transitions) {
      if (row.empty()) continue;
      double s = 0.0;
      for (const auto& [to, p] : row) s += p;
      EXPECT_NEAR(s, 1.0, 1e-9);
    }
  }
}
