#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "langlab/error.hpp"
#include "langlab/text.hpp"

namespace langlab::vsm {

// Counts indexed [doc][term]. In CSV form terms are rows and docs columns.
class TermDocMatrix {
 public:
  TermDocMatrix() = default;

  TermDocMatrix(std::vector<std::string> docs, std::vector<std::string> terms,
                std::vector<std::vector<std::int64_t>> counts)
      : docs_(std::move(docs)), terms_(std::move(terms)), counts_(std::move(counts)) {
    index(docs_, doc_ix_, "doc");
    index(terms_, term_ix_, "term");
    require(counts_.size() == docs_.size(), Errc::DimMismatch, "counts need one row per doc");
    for (const auto& row : counts_) {
      require(row.size() == terms_.size(), Errc::DimMismatch, "counts need one column per term");
      for (auto c : row) require(c >= 0, Errc::SchemaError, "counts must be nonnegative");
    }
  }

  const std::vector<std::string>& docs() const noexcept { return docs_; }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<std::vector<std::int64_t>>& counts() const noexcept { return counts_; }

  std::size_t doc(const std::string& id) const { return lookup(doc_ix_, id, "doc"); }
  std::size_t term(const std::string& id) const { return lookup(term_ix_, id, "term"); }
  std::int64_t at(std::size_t d, std::size_t t) const { return counts_.at(d).at(t); }

  bool empty() const noexcept { return docs_.empty() && terms_.empty(); }

  friend bool operator==(const TermDocMatrix& a, const TermDocMatrix& b) {
    return a.docs_ == b.docs_ && a.terms_ == b.terms_ && a.counts_ == b.counts_;
  }

 private:
  static void index(const std::vector<std::string>& ids, std::unordered_map<std::string, std::size_t>& ix,
                    const char* what) {
    for (std::size_t i = 0; i < ids.size(); ++i)
      require(ix.emplace(ids[i], i).second, Errc::SchemaError, std::string("duplicate ") + what + " id '" + ids[i] + "'");
  }
  static std::size_t lookup(const std::unordered_map<std::string, std::size_t>& ix, const std::string& id,
                            const char* what) {
    auto it = ix.find(id);
    require(it != ix.end(), Errc::UnknownId, std::string("unknown ") + what + " '" + id + "'");
    return it->second;
  }

  std::vector<std::string> docs_;
  std::vector<std::string> terms_;
  std::vector<std::vector<std::int64_t>> counts_;
  std::unordered_map<std::string, std::size_t> doc_ix_;
  std::unordered_map<std::string, std::size_t> term_ix_;
};

// Term order is first occurrence across the docs in order. Doc ids default to
// d0, d1, ...
inline TermDocMatrix bag_of_words(const std::vector<text::Tokens>& docs, std::vector<std::string> ids = {}) {
  if (ids.empty())
    for (std::size_t i = 0; i < docs.size(); ++i) ids.push_back("d" + std::to_string(i));
  require(ids.size() == docs.size(), Errc::DimMismatch, "one id per document");
  std::vector<std::string> terms;
  std::unordered_map<std::string, std::size_t> seen;
  for (const auto& d : docs)
    for (const auto& tok : d)
      if (seen.emplace(tok, terms.size()).second) terms.push_back(tok);
  std::vector<std::vector<std::int64_t>> counts(docs.size(), std::vector<std::int64_t>(terms.size(), 0));
  for (std::size_t i = 0; i < docs.size(); ++i)
    for (const auto& tok : docs[i]) ++counts[i][seen.at(tok)];
  return TermDocMatrix(std::move(ids), std::move(terms), std::move(counts));
}

inline TermDocMatrix bag_of_words_text(const std::vector<std::string>& texts, std::vector<std::string> ids = {},
                                       const text::Normalizer& norm = text::default_normalize) {
  std::vector<text::Tokens> docs;
  for (const auto& t : texts) docs.push_back(text::tokenize(t, norm));
  return bag_of_words(docs, std::move(ids));
}

struct Vector {
  std::vector<std::string> basis;
  std::vector<double> coords;

  friend bool operator==(const Vector&, const Vector&) = default;
};

inline void same_basis(const Vector& x, const Vector& y) {
  require(x.coords.size() == x.basis.size() && y.coords.size() == y.basis.size(), Errc::DimMismatch,
          "vector coordinates do not match its basis");
  require(x.basis == y.basis, Errc::BasisMismatch, "vectors live over different bases");
}

inline double inner_product(const Vector& x, const Vector& y) {
  same_basis(x, y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.coords.size(); ++i) s += x.coords[i] * y.coords[i];
  return s;
}

inline double length(const Vector& x) { return std::sqrt(inner_product(x, x)); }

inline double cosine_sim(const Vector& x, const Vector& y) {
  same_basis(x, y);
  const double lx = length(x), ly = length(y);
  require(lx > 0.0 && ly > 0.0, Errc::ZeroVector, "cosine of a zero vector");
  return inner_product(x, y) / (lx * ly);
}

// Column of the displayed matrix: the doc's counts over the terms.
inline Vector doc_vector(const TermDocMatrix& c, const std::string& doc) {
  const auto d = c.doc(doc);
  Vector v{c.terms(), {}};
  for (auto n : c.counts()[d]) v.coords.push_back(static_cast<double>(n));
  return v;
}

// Row of the displayed matrix: one term across the docs.
inline Vector term_vector(const TermDocMatrix& c, const std::string& term) {
  const auto t = c.term(term);
  Vector v{c.docs(), {}};
  for (const auto& row : c.counts()) v.coords.push_back(static_cast<double>(row[t]));
  return v;
}

// The displayed matrix (terms x docs) acting on a doc-indexed vector.
inline Vector apply_operator(const TermDocMatrix& c, const Vector& v) {
  require(v.basis == c.docs(), Errc::BasisMismatch, "operator domain is the doc basis");
  require(v.coords.size() == v.basis.size(), Errc::DimMismatch, "vector coordinates do not match its basis");
  Vector out{c.terms(), std::vector<double>(c.terms().size(), 0.0)};
  for (std::size_t t = 0; t < c.terms().size(); ++t)
    for (std::size_t d = 0; d < c.docs().size(); ++d)
      out.coords[t] += static_cast<double>(c.counts()[d][t]) * v.coords[d];
  return out;
}

// ---------------------------------------------------------------------------
// Weights (base-10 logs, no smoothing)

inline std::size_t doc_count(const TermDocMatrix& c, std::size_t t) {
  std::size_t n = 0;
  for (const auto& row : c.counts()) n += row[t] > 0;
  return n;
}

inline double df(const TermDocMatrix& c, const std::string& term) {
  const auto t = c.term(term);
  require(!c.docs().empty(), Errc::EmptyDocument, "df over an empty collection");
  return static_cast<double>(doc_count(c, t)) / static_cast<double>(c.docs().size());
}

inline double ft(const TermDocMatrix& c, const std::string& doc, const std::string& term) {
  const auto d = c.doc(doc), t = c.term(term);
  std::int64_t total = 0;
  for (auto n : c.counts()[d]) total += n;
  require(total > 0, Errc::EmptyDocument, "document '" + doc + "' has no tokens");
  return static_cast<double>(c.counts()[d][t]) / static_cast<double>(total);
}

inline double idf(const TermDocMatrix& c, const std::string& term) {
  const auto t = c.term(term);
  const auto n = doc_count(c, t);
  require(n > 0, Errc::TermAbsentEverywhere, "term '" + term + "' occurs in no document");
  return std::log10(static_cast<double>(c.docs().size()) / static_cast<double>(n));
}

inline double tf(const TermDocMatrix& c, const std::string& doc, const std::string& term) {
  return std::log10(1.0 + static_cast<double>(c.counts()[c.doc(doc)][c.term(term)]));
}

inline double tfidf(const TermDocMatrix& c, const std::string& doc, const std::string& term) {
  return tf(c, doc, term) * idf(c, term);
}

}  // namespace langlab::vsm
