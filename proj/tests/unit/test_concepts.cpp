#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "langlab/concepts/fca.hpp"
#include "langlab/concepts/lsa.hpp"
#include "langlab/rng.hpp"
#include "support/examples.hpp"
#include "support/oracles.hpp"

using namespace langlab;
using namespace langlab::concepts;
using Names = std::vector<std::string>;

namespace {

using testdata::random_context;

Bits from_mask(std::size_t mask, std::size_t n) {
  Bits b(n);
  for (std::size_t k = 0; k < n; ++k) b[k] = (mask >> k) & 1U;
  return b;
}

using testdata::brute_concepts;

bool lectic_less(const Bits& a, const Bits& b) {
  // smallest index where they differ belongs to b
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return b[i];
  return false;
}

// Oracle: square roots of the eigenvalues of L^t L by power iteration with
// deflation.
std::vector<double> power_sigmas(const Matrix& l, std::size_t count) {
  Matrix g = l.transpose() * l;
  std::vector<double> out;
  for (std::size_t k = 0; k < count; ++k) {
    Vec x = Vec::LinSpaced(g.cols(), 1.0, 2.0);
    double lambda = 0;
    for (int it = 0; it < 20000; ++it) {
      Vec y = g * x;
      const double norm = y.norm();
      if (norm == 0) break;
      lambda = x.dot(y) / x.squaredNorm();
      x = y / norm;
    }
    out.push_back(std::sqrt(std::max(lambda, 0.0)));
    g -= lambda * x * x.transpose();
  }
  return out;
}

}  // namespace

TEST(Polars, Examples) {
  auto r = testdata::ratings_toy();
  EXPECT_EQ(polar_items(r, Names{}), r.items());
  EXPECT_EQ(polar_items(r, Names{"Bob"}), (Names{"Interstellar", "Juno", "Kagemusha"}));
  EXPECT_EQ(polar_users(r, Names{"Legend"}), (Names{"Alice", "Ed"}));
  EXPECT_EQ(polar_users(r, Names{}), r.users());
  EXPECT_THROW(polar_items(r, Names{"Zed"}), Error);
}

TEST(Closures, Examples) {
  auto r = testdata::ratings_toy();
  EXPECT_EQ(closure_users(r, Names{"Bob"}), (Names{"Alice", "Bob", "Carol", "Dave"}));
  EXPECT_EQ(closure_users(r, Names{"Alice", "Bob", "Carol", "Dave"}), (Names{"Alice", "Bob", "Carol", "Dave"}));
  // Users sharing every item common to everyone: Juno and Kagemusha are universal.
  EXPECT_EQ(closure_users(r, Names{}), (Names{"Alice"}));
  EXPECT_EQ(closure_items(r, Names{"Legend"}), (Names{"Juno", "Kagemusha", "Legend"}));
}

TEST(Closures, ClosureAxiomsExhaustive) {
  SeededRng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    auto r = random_context(rng, 5);
    const std::size_t nu = r.users().size();
    for (std::size_t a = 0; a < (1U << nu); ++a) {
      auto x = from_mask(a, nu);
      auto cx = closure_users(r, x);
      EXPECT_TRUE(subset(x, cx));
      EXPECT_EQ(closure_users(r, cx), cx);
      for (std::size_t b = 0; b < (1U << nu); ++b) {
        auto y = from_mask(b, nu);
        if (subset(x, y)) EXPECT_TRUE(subset(cx, closure_users(r, y)));
      }
    }
  }
}

TEST(Galois, AdjunctionExhaustive) {
  SeededRng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    auto r = random_context(rng, 6);
    const std::size_t nu = r.users().size(), ni = r.items().size();
    for (std::size_t a = 0; a < (1U << nu); ++a)
      for (std::size_t b = 0; b < (1U << ni); ++b) {
        auto x = from_mask(a, nu);
        auto y = from_mask(b, ni);
        EXPECT_EQ(subset(x, polar_users(r, y)), subset(y, polar_items(r, x)));
      }
  }
}

TEST(Galois, FixpointPolarEquivalence) {
  auto r = testdata::ratings_toy();
  // Polar pairs are always pairs of fixpoints.
  for (std::size_t a = 0; a < 32; ++a)
    for (std::size_t b = 0; b < 16; ++b) {
      auto x = from_mask(a, 5);
      auto y = from_mask(b, 4);
      auto s = adjunction_sides(r, x, y);
      if (s.polar) EXPECT_TRUE(s.closed);
      // Once Y is tied to X by a polar, the two sides coincide.
      if (y == polar_items(r, x) || x == polar_users(r, y)) EXPECT_TRUE(adjunction_check(r, x, y));
    }
  // Two fixpoints from different concepts are not polar to each other.
  auto x = r.user_set({"Alice"});
  auto y = r.item_set({"Juno", "Kagemusha"});
  auto s = adjunction_sides(r, x, y);
  EXPECT_TRUE(s.closed);
  EXPECT_FALSE(s.polar);
  EXPECT_FALSE(adjunction_check(r, x, y));
  // A non-closed pair is false on both sides.
  auto nx = r.user_set({"Bob"});
  auto ny = r.item_set({"Juno"});
  EXPECT_TRUE(adjunction_check(r, nx, ny));
  EXPECT_FALSE(adjunction_sides(r, nx, ny).closed);
}

TEST(Enumerate, RatingsToy) {
  auto r = testdata::ratings_toy();
  auto cs = enumerate_concepts(r);
  ASSERT_EQ(cs.size(), 4u);
  std::set<std::pair<Names, Names>> got;
  for (const auto& c : cs) got.insert({r.user_ids(c.extent), r.item_ids(c.intent)});
  std::set<std::pair<Names, Names>> want{
      {{"Alice"}, {"Interstellar", "Juno", "Kagemusha", "Legend"}},
      {{"Alice", "Bob", "Carol", "Dave"}, {"Interstellar", "Juno", "Kagemusha"}},
      {{"Alice", "Ed"}, {"Juno", "Kagemusha", "Legend"}},
      {{"Alice", "Bob", "Carol", "Dave", "Ed"}, {"Juno", "Kagemusha"}},
  };
  EXPECT_EQ(got, want);
  EXPECT_TRUE(verify_cover(r, cs));

  auto pairs = lattice_order(cs);
  EXPECT_EQ(pairs.size(), 4u);  // a diamond
}

TEST(Enumerate, EdgeCases) {
  Context full({"u0", "u1"}, {"i0", "i1", "i2"}, {{true, true, true}, {true, true, true}});
  auto cs = enumerate_concepts(full);
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_TRUE(lattice_order(cs).empty());

  Context empty({"u0", "u1"}, {"i0", "i1"}, {{false, false}, {false, false}});
  auto ce = enumerate_concepts(empty);
  ASSERT_EQ(ce.size(), 2u);
  EXPECT_EQ(ce[0].extent, Bits(2, false));
  EXPECT_EQ(ce[0].intent, Bits(2, true));
  EXPECT_EQ(ce[1].extent, Bits(2, true));
  EXPECT_EQ(ce[1].intent, Bits(2, false));
  EXPECT_TRUE(verify_cover(empty, ce));

  std::vector<Bits> big(65, Bits(1, true));
  Names users;
  for (int u = 0; u < 65; ++u) users.push_back("u" + std::to_string(u));
  EXPECT_THROW(enumerate_concepts(Context(users, {"i"}, big)), Error);
}

TEST(Enumerate, ChainContextIsTotalOrder) {
  // Triangular incidence: user u likes items 0..u.
  std::vector<Bits> rel(4, Bits(4, false));
  for (std::size_t u = 0; u < 4; ++u)
    for (std::size_t i = 0; i <= u; ++i) rel[u][i] = true;
  Context r({"u0", "u1", "u2", "u3"}, {"i0", "i1", "i2", "i3"}, rel);
  auto cs = enumerate_concepts(r);
  auto pairs = lattice_order(cs);
  EXPECT_EQ(pairs.size(), cs.size() - 1);
  for (std::size_t a = 0; a < cs.size(); ++a)
    for (std::size_t b = 0; b < cs.size(); ++b)
      EXPECT_TRUE(subset(cs[a].extent, cs[b].extent) || subset(cs[b].extent, cs[a].extent));
}

TEST(Enumerate, MissingConceptBreaksCover) {
  auto r = testdata::ratings_toy();
  auto without = [&](const Names& extent) {
    auto cs = enumerate_concepts(r);
    auto x = r.user_set(extent);
    cs.erase(std::remove_if(cs.begin(), cs.end(), [&](const FormalConcept& c) { return c.extent == x; }), cs.end());
    EXPECT_EQ(cs.size(), 3u);
    return cs;
  };
  // Alice's own concept only covers edges that the two middle concepts also cover.
  EXPECT_TRUE(verify_cover(r, without({"Alice"})));
  // ({Alice, Ed}, {J, K, L}) is the only concept holding the edge Ed-Legend.
  EXPECT_FALSE(verify_cover(r, without({"Alice", "Ed"})));
}

TEST(Enumerate, MatchesBruteForce) {
  SeededRng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    auto r = random_context(rng, 5);
    auto cs = enumerate_concepts(r);
    std::set<std::pair<Bits, Bits>> got;
    for (const auto& c : cs) got.insert({c.extent, c.intent});
    EXPECT_EQ(got.size(), cs.size());
    EXPECT_EQ(got, brute_concepts(r));
    for (std::size_t k = 1; k < cs.size(); ++k) EXPECT_TRUE(lectic_less(cs[k - 1].extent, cs[k].extent));
    EXPECT_TRUE(verify_cover(r, cs));
  }
}

TEST(Svd, RatingsMinor) {
  auto l = testdata::ratings_minor();
  auto s = svd(l, 0.06);
  ASSERT_EQ(s.rank(), 2);
  EXPECT_NEAR(s.sigma(0), 3.0, 0.06);
  EXPECT_NEAR(s.sigma(1), 1.0, 0.06);
  EXPECT_LE((reconstruct(s) - l).cwiseAbs().maxCoeff(), 0.06);
  // Published factors, two decimals.
  Matrix u(3, 2);
  u << 0.83, -0.4, 0.55, 0.6, 0, 0.7;
  Matrix vt(2, 4);
  vt << 0.5, 0.5, 0.5, 0.5, 0, 0.5, 0.3, -0.8;
  EXPECT_LE((s.left - u).cwiseAbs().maxCoeff(), 0.06);
  EXPECT_LE((s.right - vt).cwiseAbs().maxCoeff(), 0.06);

  auto full = svd(l, 1e-9);
  EXPECT_EQ(full.rank(), 3);
  EXPECT_LE((reconstruct(full) - l).cwiseAbs().maxCoeff(), 1e-12);

  auto one = truncate(full, 1);
  EXPECT_NEAR((reconstruct(one) - l).norm(), std::hypot(full.sigma(1), full.sigma(2)), 1e-12);
  EXPECT_NEAR((reconstruct(one) - l).norm(), 1.0, 0.06);

  auto lc = latent_concepts(s);
  ASSERT_EQ(lc.size(), 2u);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(lc[0].items(k), 0.5, 0.01);
}

TEST(Svd, SmallCases) {
  auto id = svd(Matrix::Identity(2, 2), 1e-9);
  ASSERT_EQ(id.rank(), 2);
  EXPECT_DOUBLE_EQ(id.sigma(0), 1.0);
  EXPECT_DOUBLE_EQ(id.sigma(1), 1.0);
  auto concepts_id = latent_concepts(id);
  EXPECT_NEAR(std::abs(concepts_id[0].users.dot(concepts_id[0].items)), 1.0, 1e-12);

  Vec u(3), v(4);
  u << 1, -2, 2;
  v << 0.5, 1, 0, -1;
  auto r1 = svd(u * v.transpose(), 1e-9);
  ASSERT_EQ(r1.rank(), 1);
  EXPECT_NEAR(r1.sigma(0), u.norm() * v.norm(), 1e-12);
  EXPECT_EQ(latent_concepts(r1).size(), 1u);

  EXPECT_THROW(truncate(r1, 2), Error);
  EXPECT_THROW(truncate(r1, 0), Error);
  EXPECT_THROW(svd(Matrix::Identity(2, 2), 1e-9, SvdOptions{0, 1e-13}), Error);
  // The sweep cap binds only when rotations are needed.
  Matrix mixed(2, 2);
  mixed << 1, 1, 0, 1;
  EXPECT_THROW(svd(mixed, 1e-9, SvdOptions{0, 1e-13}), Error);
}

TEST(Svd, RandomProperties) {
  SeededRng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = static_cast<Eigen::Index>(1 + rng.index(6)), n = static_cast<Eigen::Index>(1 + rng.index(6));
    Matrix l(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j) l(i, j) = rng.uniform(-1, 1);
    auto s = svd(l, 1e-10);
    const auto r = s.rank();
    EXPECT_LE((s.left.transpose() * s.left - Matrix::Identity(r, r)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((s.right * s.right.transpose() - Matrix::Identity(r, r)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((reconstruct(s) - l).cwiseAbs().maxCoeff(), 1e-9);
    for (Eigen::Index k = 1; k < r; ++k) EXPECT_GE(s.sigma(k - 1), s.sigma(k));
    const auto oracle = power_sigmas(l, static_cast<std::size_t>(r));
    for (Eigen::Index k = 0; k < r; ++k)
      if (s.sigma(k) > 1e-3) EXPECT_NEAR(s.sigma(k), oracle[static_cast<std::size_t>(k)], 1e-6);
    // Right singular vectors are eigenvectors of L^t L with eigenvalue sigma^2.
    for (Eigen::Index k = 0; k < r; ++k) {
      Vec x = s.right.row(k).transpose();
      Vec back = to_items(l, to_users(l, x));
      EXPECT_LE((back - s.sigma(k) * s.sigma(k) * x).cwiseAbs().maxCoeff(), 1e-6);
      Eigen::Index big = 0;
      s.left.col(k).cwiseAbs().maxCoeff(&big);
      EXPECT_GE(s.left(big, k), 0.0);
    }
  }
}
