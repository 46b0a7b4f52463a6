#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "langlab/error.hpp"

namespace langlab::concepts {

using Bits = std::vector<bool>;

// Binary relation between users (rows) and items (columns).
class Context {
 public:
  Context() = default;
  Context(std::vector<std::string> users, std::vector<std::string> items, std::vector<Bits> incidence)
      : users_(std::move(users)), items_(std::move(items)), rel_(std::move(incidence)) {
    for (std::size_t u = 0; u < users_.size(); ++u)
      require(user_ix_.emplace(users_[u], u).second, Errc::SchemaError, "duplicate user '" + users_[u] + "'");
    for (std::size_t i = 0; i < items_.size(); ++i)
      require(item_ix_.emplace(items_[i], i).second, Errc::SchemaError, "duplicate item '" + items_[i] + "'");
    require(rel_.size() == users_.size(), Errc::DimMismatch, "incidence needs one row per user");
    for (const auto& row : rel_) require(row.size() == items_.size(), Errc::DimMismatch, "incidence row width");
  }

  const std::vector<std::string>& users() const noexcept { return users_; }
  const std::vector<std::string>& items() const noexcept { return items_; }
  const std::vector<Bits>& incidence() const noexcept { return rel_; }
  bool related(std::size_t u, std::size_t i) const { return rel_[u][i]; }

  Bits user_set(const std::vector<std::string>& ids) const { return to_bits(ids, user_ix_, users_.size(), "user"); }
  Bits item_set(const std::vector<std::string>& ids) const { return to_bits(ids, item_ix_, items_.size(), "item"); }

  std::vector<std::string> user_ids(const Bits& b) const { return to_ids(b, users_); }
  std::vector<std::string> item_ids(const Bits& b) const { return to_ids(b, items_); }

 private:
  static Bits to_bits(const std::vector<std::string>& ids, const std::unordered_map<std::string, std::size_t>& ix,
                      std::size_t n, const char* what) {
    Bits b(n, false);
    for (const auto& id : ids) {
      auto it = ix.find(id);
      require(it != ix.end(), Errc::UnknownId, std::string("unknown ") + what + " '" + id + "'");
      b[it->second] = true;
    }
    return b;
  }
  static std::vector<std::string> to_ids(const Bits& b, const std::vector<std::string>& names) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < b.size(); ++i)
      if (b[i]) out.push_back(names[i]);
    return out;
  }

  std::vector<std::string> users_;
  std::vector<std::string> items_;
  std::vector<Bits> rel_;
  std::unordered_map<std::string, std::size_t> user_ix_;
  std::unordered_map<std::string, std::size_t> item_ix_;
};

// Items shared by every user in X (all items when X is empty).
inline Bits polar_items(const Context& r, const Bits& users) {
  require(users.size() == r.users().size(), Errc::DimMismatch, "user set width");
  Bits out(r.items().size(), true);
  for (std::size_t u = 0; u < users.size(); ++u)
    if (users[u])
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] && r.related(u, i);
  return out;
}

// Users related to every item in Y (all users when Y is empty).
inline Bits polar_users(const Context& r, const Bits& items) {
  require(items.size() == r.items().size(), Errc::DimMismatch, "item set width");
  Bits out(r.users().size(), true);
  for (std::size_t i = 0; i < items.size(); ++i)
    if (items[i])
      for (std::size_t u = 0; u < out.size(); ++u) out[u] = out[u] && r.related(u, i);
  return out;
}

inline Bits closure_users(const Context& r, const Bits& users) { return polar_users(r, polar_items(r, users)); }
inline Bits closure_items(const Context& r, const Bits& items) { return polar_items(r, polar_users(r, items)); }

inline std::vector<std::string> polar_items(const Context& r, const std::vector<std::string>& users) {
  return r.item_ids(polar_items(r, r.user_set(users)));
}
inline std::vector<std::string> polar_users(const Context& r, const std::vector<std::string>& items) {
  return r.user_ids(polar_users(r, r.item_set(items)));
}
inline std::vector<std::string> closure_users(const Context& r, const std::vector<std::string>& users) {
  return r.user_ids(closure_users(r, r.user_set(users)));
}
inline std::vector<std::string> closure_items(const Context& r, const std::vector<std::string>& items) {
  return r.item_ids(closure_items(r, r.item_set(items)));
}

struct FormalConcept {
  Bits extent;  // users
  Bits intent;  // items

  friend bool operator==(const FormalConcept&, const FormalConcept&) = default;
};

struct FcaLimits {
  std::size_t max_side = 64;
};

// NextClosure over user sets, so concepts come out in lectic order of extents.
inline std::vector<FormalConcept> enumerate_concepts(const Context& r, FcaLimits limits = {}) {
  const std::size_t n = r.users().size();
  require(n <= limits.max_side && r.items().size() <= limits.max_side, Errc::CapExceeded,
          "context exceeds " + std::to_string(limits.max_side) + " users or items");
  std::vector<FormalConcept> out;
  Bits a = closure_users(r, Bits(n, false));
  while (true) {
    out.push_back({a, polar_items(r, a)});
    bool advanced = false;
    for (std::size_t i = n; i-- > 0;) {
      if (a[i]) continue;
      Bits seed(n, false);
      for (std::size_t k = 0; k < i; ++k) seed[k] = a[k];
      seed[i] = true;
      Bits b = closure_users(r, seed);
      bool same_prefix = true;
      for (std::size_t k = 0; k < i && same_prefix; ++k) same_prefix = b[k] == a[k];
      if (same_prefix) {
        a = std::move(b);
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return out;
}

inline bool subset(const Bits& a, const Bits& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && !b[i]) return false;
  return true;
}

// Covering pairs (lower, upper) by strict extent inclusion.
inline std::vector<std::pair<std::size_t, std::size_t>> lattice_order(const std::vector<FormalConcept>& cs) {
  auto below = [&](std::size_t x, std::size_t y) {
    return x != y && subset(cs[x].extent, cs[y].extent) && cs[x].extent != cs[y].extent;
  };
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t x = 0; x < cs.size(); ++x)
    for (std::size_t y = 0; y < cs.size(); ++y) {
      if (!below(x, y)) continue;
      bool covered = true;
      for (std::size_t z = 0; z < cs.size() && covered; ++z) covered = !(below(x, z) && below(z, y));
      if (covered) out.emplace_back(x, y);
    }
  return out;
}

// Every related pair is explained by some concept and no unrelated pair is.
inline bool verify_cover(const Context& r, const std::vector<FormalConcept>& cs) {
  for (std::size_t u = 0; u < r.users().size(); ++u)
    for (std::size_t i = 0; i < r.items().size(); ++i) {
      bool explained = false;
      for (const auto& c : cs) explained = explained || (c.extent[u] && c.intent[i]);
      if (explained != r.related(u, i)) return false;
    }
  return true;
}

struct AdjunctionSides {
  bool closed;  // X and Y are both closure fixpoints
  bool polar;   // X and Y are each other's polars
};

inline AdjunctionSides adjunction_sides(const Context& r, const Bits& x, const Bits& y) {
  return {closure_users(r, x) == x && closure_items(r, y) == y, polar_users(r, y) == x && polar_items(r, x) == y};
}

// Compares the two sides of the fixpoint/polar equivalence for one pair.
inline bool adjunction_check(const Context& r, const Bits& x, const Bits& y) {
  const auto s = adjunction_sides(r, x, y);
  return s.closed == s.polar;
}

}  // namespace langlab::concepts
