#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "langlab/error.hpp"
#include "langlab/neural/neural.hpp"
#include "langlab/rng.hpp"

namespace langlab::neural {

// Keys k_l, queries q_l and value rows v^i, all of one dimension. For the
// encoder-decoder step only `keys` is read, as the concept basis c_l.
struct AttentionParams {
  std::vector<Vec> keys;
  std::vector<Vec> queries;
  std::vector<Vec> values;
  Activation act = Activation::logistic;

  Eigen::Index dim() const { return values.empty() ? 0 : values.front().size(); }
};

namespace detail {

inline void same_dim(const std::vector<Vec>& vs, Eigen::Index d, const char* what) {
  for (const auto& v : vs)
    require(v.size() == d, Errc::DimMismatch, std::string(what) + " vectors differ in dimension");
}

// sum_j <v^i|x_j> sigma(score_j) for j over the first n inputs. Terms are
// added in sorted order so the result does not depend on the input order.
template <class Score>
Vec mix(const AttentionParams& p, const std::vector<Vec>& xs, std::size_t n, Score score) {
  std::vector<std::vector<double>> terms(p.values.size());
  for (std::size_t j = 0; j < n; ++j) {
    const double weight = activate(p.act, score(xs[j]));
    for (std::size_t i = 0; i < p.values.size(); ++i) terms[i].push_back(p.values[i].dot(xs[j]) * weight);
  }
  Vec y = Vec::Zero(static_cast<Eigen::Index>(p.values.size()));
  for (std::size_t i = 0; i < terms.size(); ++i) {
    std::sort(terms[i].begin(), terms[i].end());
    for (double t : terms[i]) y(static_cast<Eigen::Index>(i)) += t;
  }
  return y;
}

}  // namespace detail

// y_{n+1}[i] = sum_j <v^i|x_j> sigma(sum_l <x_j|c_l><c_l|y_n>).
inline Vec attention_step(const AttentionParams& p, const std::vector<Vec>& xs, const Vec& y_prev) {
  const auto d = y_prev.size();
  detail::same_dim(xs, d, "input");
  detail::same_dim(p.keys, d, "concept");
  detail::same_dim(p.values, d, "value");
  return detail::mix(p, xs, xs.size(), [&](const Vec& x) {
    double s = 0.0;
    for (const auto& c : p.keys) s += x.dot(c) * c.dot(y_prev);
    return s;
  });
}

// xs = x_1..x_{n+1}; the last one is the query slot and is not summed over.
inline Vec self_attention_step(const AttentionParams& p, const std::vector<Vec>& xs) {
  require(!xs.empty(), Errc::EmptyContext, "self-attention needs at least the query input");
  const auto d = xs.back().size();
  detail::same_dim(xs, d, "input");
  detail::same_dim(p.keys, d, "key");
  detail::same_dim(p.queries, d, "query");
  detail::same_dim(p.values, d, "value");
  require(p.keys.size() == p.queries.size(), Errc::DimMismatch, "keys and queries must pair up");
  const Vec& query = xs.back();
  return detail::mix(p, xs, xs.size() - 1, [&](const Vec& x) {
    double s = 0.0;
    for (std::size_t l = 0; l < p.keys.size(); ++l) s += x.dot(p.keys[l]) * p.queries[l].dot(query);
    return s;
  });
}

using Embeddings = std::map<std::string, Vec>;

// Nearest embedding by cosine; ties (and a zero output) are broken by rng over
// the tied tokens in map order.
inline std::string decode_nearest(const Embeddings& table, const Vec& y, SeededRng& rng) {
  require(!table.empty(), Errc::EmptyContext, "empty embedding table");
  std::vector<std::string> best;
  double best_score = -std::numeric_limits<double>::infinity();
  const double ny = y.norm();
  for (const auto& [tok, e] : table) {
    require(e.size() == y.size(), Errc::DimMismatch, "embedding '" + tok + "' has the wrong dimension");
    const double ne = e.norm();
    const double score = ny == 0.0 || ne == 0.0 ? 0.0 : e.dot(y) / (ne * ny);
    if (score > best_score + 1e-12) {
      best_score = score;
      best = {tok};
    } else if (score >= best_score - 1e-12) {
      best.push_back(tok);
    }
  }
  return best.size() == 1 ? best.front() : best[rng.index(best.size())];
}

// Runs self-attention over the window (last token as query slot), decodes,
// appends and slides the window, keeping its length.
inline std::vector<std::string> transformer_generate(const AttentionParams& p, const Embeddings& table,
                                                     std::vector<std::string> context, std::size_t steps,
                                                     SeededRng& rng) {
  require(!context.empty(), Errc::EmptyContext, "generation needs a nonempty context");
  for (const auto& t : context)
    require(table.count(t) > 0, Errc::UnknownToken, "token '" + t + "' has no embedding");
  std::vector<std::string> out = context;
  for (std::size_t s = 0; s < steps; ++s) {
    std::vector<Vec> xs;
    for (const auto& t : context) xs.push_back(table.at(t));
    const auto next = decode_nearest(table, self_attention_step(p, xs), rng);
    out.push_back(next);
    context.erase(context.begin());
    context.push_back(next);
  }
  return out;
}

}  // namespace langlab::neural
