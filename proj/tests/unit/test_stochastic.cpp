#include <gtest/gtest.h>

#include "langlab/rng.hpp"
#include "langlab/stochastic/channel.hpp"
#include "langlab/stochastic/probability.hpp"
#include "support/oracles.hpp"

using namespace langlab;
using namespace langlab::stochastic;

namespace {

Distribution die() { return Distribution::uniform({"1", "2", "3", "4", "5", "6"}); }

Distribution random_distribution(SeededRng& rng, std::size_t n) {
  std::vector<std::string> names;
  std::vector<double> w;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back("o" + std::to_string(i));
    // Occasional exact zeros exercise the null-condition convention.
    w.push_back(rng.coin(0.15) ? 0.0 : rng.uniform(0.01, 1.0));
    total += w.back();
  }
  if (total == 0.0) {
    w[0] = 1.0;
    total = 1.0;
  }
  for (double& x : w) x /= total;
  return Distribution(names, w);
}

Event random_event(SeededRng& rng, std::size_t n) {
  Event e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = rng.coin();
  return e;
}

using testdata::random_row;

// Channel with independently drawn rows for every history.
Channel random_channel(SeededRng& rng, std::size_t horizon) {
  return make_channel({"x0", "x1"}, {"y0", "y1"}, horizon, [&](const History&) { return random_row(rng, 2); },
                      [&](const History&) { return random_row(rng, 2); });
}

using testdata::random_ash_channel;

// Oracle: every history of length 2n with its kernel product, zeros included.
std::map<History, double> brute_joint(const Channel& ch, std::size_t n) {
  std::map<History, double> out;
  History h(2 * n, 0);
  while (true) {
    double p = 1.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      History prefix(h.begin(), h.begin() + static_cast<long>(i));
      auto& ks = i % 2 == 0 ? ch.input_kernels : ch.output_kernels;
      auto it = ks.find(prefix);
      p *= it == ks.end() ? 0.0 : it->second[h[i]];
    }
    out[h] = p;
    std::size_t k = h.size();
    while (k > 0) {
      const std::size_t width = (k - 1) % 2 == 0 ? ch.inputs.size() : ch.outputs.size();
      if (++h[k - 1] < width) break;
      h[--k] = 0;
    }
    if (k == 0) break;
  }
  return out;
}

double prefix_mass(const Joint& j, const History& prefix) {
  std::vector<std::optional<std::size_t>> pattern(prefix.begin(), prefix.end());
  return marginal(j, pattern);
}

}  // namespace

TEST(Distribution, Validation) {
  EXPECT_THROW(Distribution({"a", "b"}, {0.5, 0.6}), Error);
  EXPECT_THROW(Distribution({"a", "b"}, {-0.1, 1.1}), Error);
  EXPECT_THROW(Distribution({"a", "a"}, {0.5, 0.5}), Error);
  EXPECT_NO_THROW(Distribution({"a", "b"}, {0.5, 0.5 + 1e-12}));
}

TEST(CondProb, Examples) {
  auto coin = Distribution::uniform({"H", "T"});
  auto heads = coin.event({"H"});
  EXPECT_DOUBLE_EQ(cond_prob(coin, heads, heads), 1.0);
  EXPECT_DOUBLE_EQ(cond_prob(coin, coin.nothing(), heads), 1.0);

  auto d = die();
  auto even = d.event({"2", "4", "6"}), two = d.event({"2"});
  EXPECT_NEAR(cond_prob(d, even, two), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(bayes(d, even, two), 1.0, 1e-15);
  EXPECT_NEAR(bayes(d, two, even), cond_prob(d, even, two), 1e-15);
  EXPECT_THROW(bayes(d, even, d.nothing()), Error);
}

TEST(CondProb, BayesAgreesWithReverseConditional) {
  SeededRng rng(11);
  for (int i = 0; i < 500; ++i) {
    auto d = random_distribution(rng, 6);
    auto a = random_event(rng, 6), b = random_event(rng, 6);
    if (prob(d, b) <= 0.0) continue;
    EXPECT_NEAR(bayes(d, a, b), cond_prob(d, b, a), 1e-12);
  }
}

TEST(Independence, Examples) {
  // Product of two biased coins on four outcomes.
  Distribution d({"HH", "HT", "TH", "TT"}, {0.3 * 0.6, 0.3 * 0.4, 0.7 * 0.6, 0.7 * 0.4});
  auto first = d.event({"HH", "HT"}), second = d.event({"HH", "TH"});
  EXPECT_TRUE(is_independent(d, first, second));
  EXPECT_FALSE(is_independent(d, first, first));
  EXPECT_NEAR(bayes(d, first, second), prob(d, first), 1e-12);

  SeededRng rng(12);
  for (int i = 0; i < 500; ++i) {
    auto r = random_distribution(rng, 4);
    auto a = random_event(rng, 4), b = random_event(rng, 4);
    double pa = 0, pb = 0, pab = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      pa += a[k] ? r.probs()[k] : 0.0;
      pb += b[k] ? r.probs()[k] : 0.0;
      pab += a[k] && b[k] ? r.probs()[k] : 0.0;
    }
    EXPECT_EQ(is_independent(r, a, b, 1e-12), std::abs(pab - pa * pb) <= 1e-12);
  }
}

TEST(Probability, FiniteAdditivityExhaustive) {
  SeededRng rng(13);
  for (std::size_t n = 1; n <= 5; ++n)
    for (int rep = 0; rep < 20; ++rep) {
      auto d = random_distribution(rng, n);
      for (unsigned ma = 0; ma < (1u << n); ++ma)
        for (unsigned mb = 0; mb < (1u << n); ++mb) {
          Event a(n), b(n);
          for (std::size_t k = 0; k < n; ++k) {
            a[k] = (ma >> k) & 1u;
            b[k] = (mb >> k) & 1u;
          }
          EXPECT_NEAR(prob(d, unite(a, b)) + prob(d, intersect(a, b)), prob(d, a) + prob(d, b), 1e-12);
          EXPECT_NEAR(prob(d, a) + prob(d, complement(a)), 1.0, 1e-12);
        }
    }
}

TEST(Transitivity, RandomTriplesAndModusPonens) {
  SeededRng rng(14);
  for (int i = 0; i < 2000; ++i) {
    auto d = random_distribution(rng, 6);
    auto a = random_event(rng, 6), b = random_event(rng, 6), c = random_event(rng, 6);
    auto [lhs, rhs] = check_transitivity(d, a, b, c);
    EXPECT_NEAR(lhs, rhs, 1e-12);
    // With a = S the identity is [b] [b |- c] = [bc].
    auto [l2, r2] = check_transitivity(d, d.everything(), b, c);
    EXPECT_NEAR(l2, prob(d, intersect(b, c)), 1e-12);
    EXPECT_NEAR(r2, prob(d, intersect(b, c)), 1e-12);
  }
}

TEST(Channel, EchoJoint) {
  auto echo = make_channel({"a", "b", "c"}, {"a", "b", "c"}, 1, [](const History&) { return Row(3, 1.0 / 3.0); },
                           [](const History& h) {
                             Row r(3, 0.0);
                             r[h.back()] = 1.0;
                             return r;
                           });
  auto j = channel_joint(echo, 1);
  ASSERT_EQ(j.size(), 3u);
  for (std::size_t x = 0; x < 3; ++x) EXPECT_NEAR(j.at({x, x}), 1.0 / 3.0, 1e-15);
  EXPECT_THROW(channel_joint(echo, 2), Error);
  EXPECT_TRUE(ash_holds(echo));
}

TEST(Channel, Validation) {
  Channel ch{{"x"}, {"y"}, 1, {{{}, {0.5}}}, {{{0}, {1.0}}}};
  EXPECT_THROW(ch.validate(), Error);
  ch.input_kernels[{}] = {1.0};
  EXPECT_NO_THROW(ch.validate());
  ch.output_kernels[{0, 0}] = {1.0};
  EXPECT_THROW(ch.validate(), Error);
}

TEST(Channel, JointMatchesBruteForce) {
  SeededRng rng(15);
  for (int rep = 0; rep < 50; ++rep) {
    auto ch = random_channel(rng, 2);
    auto j = channel_joint(ch, 2);
    auto oracle = brute_joint(ch, 2);
    ASSERT_EQ(oracle.size(), 16u);
    double total = 0.0;
    for (const auto& [h, p] : oracle) {
      auto it = j.find(h);
      EXPECT_NEAR(it == j.end() ? 0.0 : it->second, p, 1e-15);
      total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Channel, ChainAndDecompositionIdentities) {
  SeededRng rng(16);
  for (int rep = 0; rep < 30; ++rep) {
    auto ch = random_channel(rng, 3);
    auto j = channel_joint(ch, 3);
    for (const auto& [h, p] : j) {
      // Chain: the joint is the product of per-step conditionals read off the joint.
      double chain = 1.0;
      for (std::size_t i = 0; i < h.size(); ++i) {
        History a(h.begin(), h.begin() + static_cast<long>(i)), b(h.begin(), h.begin() + static_cast<long>(i) + 1);
        chain *= prefix_mass(j, b) / prefix_mass(j, a);
      }
      EXPECT_NEAR(chain, p, 1e-9);
      // Decomposition: next-(x,y) kernel is next-x times next-y.
      for (std::size_t n = 0; 2 * n < h.size(); ++n) {
        History base(h.begin(), h.begin() + static_cast<long>(2 * n));
        History withx = base, withxy = base;
        withx.push_back(h[2 * n]);
        withxy.insert(withxy.end(), {h[2 * n], h[2 * n + 1]});
        const double pair = prefix_mass(j, withxy) / prefix_mass(j, base);
        EXPECT_NEAR(pair, ch.input_row(base)[h[2 * n]] * ch.output_row(withx)[h[2 * n + 1]], 1e-9);
      }
    }
  }
}

TEST(Tobe, Kernels) {
  auto ch = tobe_channel();
  for (const auto& [h, row] : ch.input_kernels) EXPECT_NEAR(row[0] + row[1], 1.0, 1e-15);
  for (const auto& [h, row] : ch.output_kernels) EXPECT_NEAR(row[0] + row[1], 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(ch.output_row({0})[0], 0.5);
  EXPECT_DOUBLE_EQ(ch.input_row({0, 1})[0], 0.0);
  EXPECT_DOUBLE_EQ(ch.input_row({0, 0})[0], 1.0);
  EXPECT_EQ(history_key(ch, {0, 1, 1}), "to be|\U0001F344|not to be");
}

TEST(Tobe, JointExcludesReturnToBeAfterMushroom) {
  auto j = channel_joint(tobe_channel(), 2);
  EXPECT_GT(prefix_mass(j, {0, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(prefix_mass(j, {0, 1, 0}), 0.0);
  EXPECT_DOUBLE_EQ(prefix_mass(j, {0, 1, 1}), 0.5);
}

TEST(Tobe, Classification) {
  auto c = classify(tobe_channel(3));
  EXPECT_FALSE(c.feedback_free);
  EXPECT_TRUE(c.feedforward_free);
  EXPECT_TRUE(c.memoryless);
}

TEST(Tobe, AshFails) {
  auto ch = tobe_channel();
  const History x{0, 0}, y{1, 0};
  EXPECT_DOUBLE_EQ(sequence_conditional(ch, x, y), 0.0);
  EXPECT_DOUBLE_EQ(ash_product(ch, x, y), 0.25);
  auto v = ash_counterexample(ch);
  ASSERT_TRUE(v);
  // The first failure in scan order is (to be, to be) with two strawberries: 1/2 vs 1/4.
  EXPECT_EQ(v->inputs, x);
  EXPECT_EQ(v->outputs, (History{0, 0}));
  EXPECT_DOUBLE_EQ(v->conditional, 0.5);
  EXPECT_DOUBLE_EQ(v->product, 0.25);
  EXPECT_TRUE(ash_holds(tobe_channel(1)));
}

TEST(Classification, IidSymmetricChannel) {
  auto bsc = make_channel({"0", "1"}, {"0", "1"}, 3, [](const History&) { return Row{0.5, 0.5}; },
                          [](const History& h) { return h.back() == 0 ? Row{0.9, 0.1} : Row{0.1, 0.9}; });
  auto c = classify(bsc);
  EXPECT_TRUE(c.feedback_free);
  EXPECT_TRUE(c.feedforward_free);
  EXPECT_TRUE(c.memoryless);
  EXPECT_TRUE(ash_holds(bsc));
}

TEST(Classification, OutputCopiesPreviousOutput) {
  auto copy = make_channel({"0", "1"}, {"0", "1"}, 2, [](const History&) { return Row{0.5, 0.5}; },
                           [](const History& h) {
                             if (h.size() == 1) return Row{0.5, 0.5};
                             return h[1] == 0 ? Row{1.0, 0.0} : Row{0.0, 1.0};
                           });
  auto c = classify(copy);
  EXPECT_TRUE(c.feedback_free);
  EXPECT_FALSE(c.feedforward_free);
  EXPECT_FALSE(c.memoryless);
}

TEST(Classification, FeedforwardFreeButNotMemoryless) {
  // Y2 copies X1: depends on past inputs but not on past outputs.
  auto ch = make_channel({"0", "1"}, {"0", "1"}, 2, [](const History&) { return Row{0.5, 0.5}; },
                         [](const History& h) {
                           if (h.size() == 1) return Row{0.5, 0.5};
                           return h[0] == 0 ? Row{1.0, 0.0} : Row{0.0, 1.0};
                         });
  auto c = classify(ch);
  EXPECT_TRUE(c.feedforward_free);
  EXPECT_FALSE(c.memoryless);
}

TEST(Classification, Caps) {
  std::vector<std::string> nine(9, "");
  for (std::size_t i = 0; i < 9; ++i) nine[i] = std::to_string(i);
  Channel big{nine, {"y"}, 1, {}, {}};
  EXPECT_THROW(is_memoryless(big), Error);
  auto long_tobe = tobe_channel(7);
  EXPECT_THROW(ash_holds(long_tobe), Error);
}

TEST(Ash, HoldsOnMemorylessFeedbackFreeChannels) {
  SeededRng rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    auto ch = random_ash_channel(rng, 1 + rng.index(3));
    auto c = classify(ch, 1e-9);
    ASSERT_TRUE(c.feedback_free && c.memoryless);
    EXPECT_TRUE(ash_holds(ch, 1e-7));
  }
}

TEST(Ash, ProductMatchesDirectMarginals) {
  SeededRng rng(18);
  auto ch = random_channel(rng, 2);
  auto j = brute_joint(ch, 2);
  for (std::size_t x1 = 0; x1 < 2; ++x1)
    for (std::size_t x2 = 0; x2 < 2; ++x2)
      for (std::size_t y1 = 0; y1 < 2; ++y1)
        for (std::size_t y2 = 0; y2 < 2; ++y2) {
          double px1 = 0, px1y1 = 0, px2 = 0, px2y2 = 0;
          for (const auto& [h, p] : j) {
            if (h[0] == x1) px1 += p;
            if (h[0] == x1 && h[1] == y1) px1y1 += p;
            if (h[2] == x2) px2 += p;
            if (h[2] == x2 && h[3] == y2) px2y2 += p;
          }
          EXPECT_NEAR(ash_product(ch, {x1, x2}, {y1, y2}), (px1y1 / px1) * (px2y2 / px2), 1e-12);
        }
}

TEST(Ash, ViolationListStartsWithCounterexample) {
  const auto ch = tobe_channel();
  const auto all = ash_violations(ch);
  ASSERT_FALSE(all.empty());
  const auto first = ash_counterexample(ch);
  EXPECT_EQ(all.front().inputs, first->inputs);
  EXPECT_EQ(all.front().outputs, first->outputs);
  // (to be, to be) with a mushroom then a strawberry is impossible but predicted at 1/4.
  const auto support = std::find_if(all.begin(), all.end(), [](const AshViolation& v) { return v.conditional == 0.0; });
  ASSERT_NE(support, all.end());
  EXPECT_EQ(support->inputs, (History{0, 0}));
  EXPECT_EQ(support->outputs, (History{1, 0}));
  EXPECT_DOUBLE_EQ(support->product, 0.25);
  for (const auto& v : all) EXPECT_GT(std::abs(v.conditional - v.product), 1e-9);
}
