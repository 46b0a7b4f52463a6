#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "langlab/error.hpp"

namespace langlab::stochastic {

inline constexpr double kSumTolerance = 1e-9;

// Membership mask over the outcomes of one distribution.
using Event = std::vector<bool>;

class Distribution {
 public:
  Distribution() = default;
  Distribution(std::vector<std::string> outcomes, std::vector<double> probs)
      : outcomes_(std::move(outcomes)), probs_(std::move(probs)) {
    require(outcomes_.size() == probs_.size(), Errc::DimMismatch, "one probability per outcome");
    double total = 0.0;
    for (std::size_t i = 0; i < outcomes_.size(); ++i) {
      require(ix_.emplace(outcomes_[i], i).second, Errc::SchemaError, "duplicate outcome '" + outcomes_[i] + "'");
      require(std::isfinite(probs_[i]) && probs_[i] >= 0.0, Errc::InvalidDistribution,
              "negative or non-finite mass on '" + outcomes_[i] + "'");
      total += probs_[i];
    }
    require(std::abs(total - 1.0) <= kSumTolerance, Errc::InvalidDistribution,
            "masses sum to " + std::to_string(total));
  }

  static Distribution uniform(std::vector<std::string> outcomes) {
    std::vector<double> p(outcomes.size(), 1.0 / static_cast<double>(outcomes.size()));
    return Distribution(std::move(outcomes), std::move(p));
  }

  const std::vector<std::string>& outcomes() const noexcept { return outcomes_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return outcomes_.size(); }

  std::size_t index(const std::string& outcome) const {
    auto it = ix_.find(outcome);
    require(it != ix_.end(), Errc::UnknownId, "unknown outcome '" + outcome + "'");
    return it->second;
  }

  Event event(const std::vector<std::string>& members) const {
    Event e(size(), false);
    for (const auto& m : members) e[index(m)] = true;
    return e;
  }
  Event everything() const { return Event(size(), true); }
  Event nothing() const { return Event(size(), false); }

 private:
  std::vector<std::string> outcomes_;
  std::vector<double> probs_;
  std::unordered_map<std::string, std::size_t> ix_;
};

inline Event intersect(const Event& a, const Event& b) {
  require(a.size() == b.size(), Errc::DimMismatch, "events over different outcome sets");
  Event out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] && b[i];
  return out;
}

inline Event unite(const Event& a, const Event& b) {
  require(a.size() == b.size(), Errc::DimMismatch, "events over different outcome sets");
  Event out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] || b[i];
  return out;
}

inline Event complement(const Event& a) {
  Event out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = !a[i];
  return out;
}

inline double prob(const Distribution& d, const Event& a) {
  require(a.size() == d.size(), Errc::DimMismatch, "event does not match the outcome set");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i]) s += d.probs()[i];
  return s;
}

// [a |- b]: chance of b given a. Conditioning on a null event gives 1.
inline double cond_prob(const Distribution& d, const Event& a, const Event& b) {
  const double pa = prob(d, a);
  if (pa <= 0.0) return 1.0;
  return prob(d, intersect(a, b)) / pa;
}

// Chance of a given b, recovered from [a |- b].
inline double bayes(const Distribution& d, const Event& a, const Event& b) {
  const double pb = prob(d, b);
  require(pb > 0.0, Errc::ZeroCondition, "bayes needs a condition with positive mass");
  return prob(d, a) * cond_prob(d, a, b) / pb;
}

inline bool is_independent(const Distribution& d, const Event& a, const Event& b, double tol = 1e-12) {
  return std::abs(prob(d, intersect(a, b)) - prob(d, a) * prob(d, b)) <= tol;
}

// ([a |- b] * [ab |- c], [a |- bc]). Equal whenever both sides are defined.
inline std::pair<double, double> check_transitivity(const Distribution& d, const Event& a, const Event& b,
                                                    const Event& c) {
  const auto ab = intersect(a, b);
  return {cond_prob(d, a, b) * cond_prob(d, ab, c), cond_prob(d, a, intersect(b, c))};
}

}  // namespace langlab::stochastic
