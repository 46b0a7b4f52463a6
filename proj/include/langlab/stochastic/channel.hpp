#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "langlab/error.hpp"
#include "langlab/stochastic/probability.hpp"

namespace langlab::stochastic {

// Interleaved symbol indices x1 y1 x2 y2 ... . Even positions index inputs,
// odd positions index outputs.
using History = std::vector<std::size_t>;
using Row = std::vector<double>;

struct ChannelLimits {
  std::size_t max_alphabet = 8;
  std::size_t max_horizon = 6;
  std::size_t max_work = 20'000'000;  // histories or sequence pairs visited
};

// Generative form: next-input rows keyed by even-length histories, next-output
// rows keyed by odd-length ones. Rows for unreachable histories may be absent.
struct Channel {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::size_t horizon = 0;
  std::map<History, Row> input_kernels;
  std::map<History, Row> output_kernels;

  void validate() const {
    require(!inputs.empty() && !outputs.empty(), Errc::SchemaError, "channel alphabets must be nonempty");
    auto check = [](const std::map<History, Row>& ks, std::size_t width, std::size_t parity, const char* what) {
      for (const auto& [h, row] : ks) {
        require(h.size() % 2 == parity, Errc::SchemaError, std::string(what) + " kernel keyed by a history of wrong parity");
        require(row.size() == width, Errc::DimMismatch, std::string(what) + " kernel row has the wrong width");
        double s = 0.0;
        for (double p : row) {
          require(std::isfinite(p) && p >= 0.0, Errc::InvalidDistribution, std::string(what) + " kernel has a negative entry");
          s += p;
        }
        require(std::abs(s - 1.0) <= kSumTolerance, Errc::InvalidDistribution,
                std::string(what) + " kernel row sums to " + std::to_string(s));
      }
    };
    check(input_kernels, inputs.size(), 0, "input");
    check(output_kernels, outputs.size(), 1, "output");
    for (const auto& [h, row] : input_kernels)
      require(h.size() / 2 < horizon, Errc::HorizonExceeded, "input kernel beyond the horizon");
  }

  const Row& input_row(const History& h) const { return row(input_kernels, h, "input"); }
  const Row& output_row(const History& h) const { return row(output_kernels, h, "output"); }

  const std::string& name(std::size_t pos, std::size_t idx) const {
    return pos % 2 == 0 ? inputs.at(idx) : outputs.at(idx);
  }

 private:
  const Row& row(const std::map<History, Row>& ks, const History& h, const char* what) const {
    auto it = ks.find(h);
    require(it != ks.end(), Errc::SchemaError, std::string("no ") + what + " kernel for a reachable history");
    return it->second;
  }
};

inline std::string history_key(const Channel& ch, const History& h) {
  std::string out;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i) out += '|';
    out += ch.name(i, h[i]);
  }
  return out;
}

// Fills both kernel maps for every history up to the horizon from callbacks.
inline Channel make_channel(std::vector<std::string> inputs, std::vector<std::string> outputs, std::size_t horizon,
                            const std::function<Row(const History&)>& next_input,
                            const std::function<Row(const History&)>& next_output) {
  Channel ch{std::move(inputs), std::move(outputs), horizon, {}, {}};
  std::function<void(History&)> fill = [&](History& h) {
    if (h.size() % 2 == 0) {
      if (h.size() / 2 >= horizon) return;
      ch.input_kernels[h] = next_input(h);
      for (std::size_t x = 0; x < ch.inputs.size(); ++x) {
        h.push_back(x);
        fill(h);
        h.pop_back();
      }
    } else {
      ch.output_kernels[h] = next_output(h);
      for (std::size_t y = 0; y < ch.outputs.size(); ++y) {
        h.push_back(y);
        fill(h);
        h.pop_back();
      }
    }
  };
  History h;
  fill(h);
  ch.validate();
  return ch;
}

// Inputs "to be" / "not to be", outputs strawberry / mushroom. A strawberry
// keeps the input at "to be", a mushroom locks it at "not to be".
inline Channel tobe_channel(std::size_t horizon = 2) {
  return make_channel(
      {"to be", "not to be"}, {"\U0001F353", "\U0001F344"}, horizon,
      [](const History& h) -> Row {
        if (h.empty()) return {1.0, 0.0};
        return h.back() == 0 ? Row{1.0, 0.0} : Row{0.0, 1.0};
      },
      [](const History& h) -> Row { return h.back() == 0 ? Row{0.5, 0.5} : Row{0.0, 1.0}; });
}

// Joint law of the interleaved sequence up to step n; only positive masses kept.
using Joint = std::map<History, double>;

inline Joint channel_joint(const Channel& ch, std::size_t n, const ChannelLimits& limits = {}) {
  require(n <= ch.horizon, Errc::HorizonExceeded,
          "horizon " + std::to_string(n) + " exceeds the channel's " + std::to_string(ch.horizon));
  Joint out;
  std::size_t work = 0;
  std::function<void(History&, double)> walk = [&](History& h, double p) {
    require(++work <= limits.max_work, Errc::CapExceeded, "channel joint visits too many histories");
    if (h.size() == 2 * n) {
      out[h] += p;
      return;
    }
    const bool input = h.size() % 2 == 0;
    const Row& row = input ? ch.input_row(h) : ch.output_row(h);
    for (std::size_t s = 0; s < row.size(); ++s) {
      if (row[s] <= 0.0) continue;
      h.push_back(s);
      walk(h, p * row[s]);
      h.pop_back();
    }
  };
  History h;
  walk(h, 1.0);
  return out;
}

inline Distribution joint_distribution(const Channel& ch, const Joint& j) {
  std::vector<std::string> names;
  std::vector<double> ps;
  for (const auto& [h, p] : j) {
    names.push_back(history_key(ch, h));
    ps.push_back(p);
  }
  return Distribution(std::move(names), std::move(ps));
}

// Mass of all sequences whose symbols agree with `pattern` where it is set.
inline double marginal(const Joint& j, const std::vector<std::optional<std::size_t>>& pattern) {
  double s = 0.0;
  for (const auto& [h, p] : j) {
    bool match = true;
    for (std::size_t i = 0; i < pattern.size() && match; ++i) match = !pattern[i] || h.at(i) == *pattern[i];
    if (match) s += p;
  }
  return s;
}

namespace detail {

inline void check_caps(const Channel& ch, const ChannelLimits& limits) {
  require(ch.inputs.size() <= limits.max_alphabet && ch.outputs.size() <= limits.max_alphabet, Errc::CapExceeded,
          "alphabets above " + std::to_string(limits.max_alphabet) + " symbols are not enumerated");
  require(ch.horizon <= limits.max_horizon, Errc::CapExceeded,
          "horizons above " + std::to_string(limits.max_horizon) + " are not enumerated");
}

// Positive histories of length len (a prefix of the joint), with their masses.
inline std::map<History, double> prefixes(const Joint& j, std::size_t len) {
  std::map<History, double> out;
  for (const auto& [h, p] : j) out[History(h.begin(), h.begin() + static_cast<long>(len))] += p;
  return out;
}

inline History inputs_of(const History& h) {
  History xs;
  for (std::size_t i = 0; i < h.size(); i += 2) xs.push_back(h[i]);
  return xs;
}

inline bool rows_close(const Row& a, const Row& b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

// Conditional law of the output at step n+1 given a key extracted from the
// history (x1..x_{n+1} or x_{n+1} alone), computed from the joint.
template <class Key>
std::map<History, Row> output_conditionals(const Channel& ch, const std::map<History, double>& odd_prefix,
                                           const std::map<History, double>& next_prefix, Key key) {
  std::map<History, Row> acc;
  std::map<History, double> mass;
  for (const auto& [h, p] : next_prefix) {
    History cond(h.begin(), h.end() - 1);
    auto k = key(cond);
    auto& row = acc[k];
    row.resize(ch.outputs.size(), 0.0);
    row[h.back()] += p;
  }
  for (const auto& [h, p] : odd_prefix) mass[key(h)] += p;
  for (auto& [k, row] : acc)
    for (double& v : row) v /= mass.at(k);
  return acc;
}

}  // namespace detail

// Next inputs depend on past inputs only.
inline bool is_feedback_free(const Channel& ch, double tol = 1e-9, const ChannelLimits& limits = {}) {
  detail::check_caps(ch, limits);
  const auto j = channel_joint(ch, ch.horizon, limits);
  for (std::size_t n = 0; n < ch.horizon; ++n) {
    std::map<History, const Row*> seen;
    for (const auto& [h, p] : detail::prefixes(j, 2 * n)) {
      if (p <= tol) continue;
      const Row& row = ch.input_row(h);
      auto [it, fresh] = seen.emplace(detail::inputs_of(h), &row);
      if (!fresh && !detail::rows_close(*it->second, row, tol)) return false;
    }
  }
  return true;
}

namespace detail {

template <class Key>
bool outputs_depend_only_on(const Channel& ch, double tol, const ChannelLimits& limits, Key key) {
  check_caps(ch, limits);
  const auto j = channel_joint(ch, ch.horizon, limits);
  for (std::size_t n = 0; n < ch.horizon; ++n) {
    const auto odd = prefixes(j, 2 * n + 1);
    const auto cond = output_conditionals(ch, odd, prefixes(j, 2 * n + 2), key);
    for (const auto& [h, p] : odd) {
      if (p <= tol) continue;
      if (!rows_close(ch.output_row(h), cond.at(key(h)), tol)) return false;
    }
  }
  return true;
}

}  // namespace detail

// Outputs depend on x1..x_{n+1} only, not on earlier outputs.
inline bool is_feedforward_free(const Channel& ch, double tol = 1e-9, const ChannelLimits& limits = {}) {
  return detail::outputs_depend_only_on(ch, tol, limits, [](const History& h) { return detail::inputs_of(h); });
}

// Outputs depend on the current input only.
inline bool is_memoryless(const Channel& ch, double tol = 1e-9, const ChannelLimits& limits = {}) {
  return detail::outputs_depend_only_on(ch, tol, limits, [](const History& h) { return History{h.back()}; });
}

struct ChannelClass {
  bool feedback_free;
  bool feedforward_free;
  bool memoryless;
};

inline ChannelClass classify(const Channel& ch, double tol = 1e-9, const ChannelLimits& limits = {}) {
  return {is_feedback_free(ch, tol, limits), is_feedforward_free(ch, tol, limits), is_memoryless(ch, tol, limits)};
}

inline History interleave(const History& xs, const History& ys) {
  require(xs.size() == ys.size(), Errc::DimMismatch, "input and output sequences differ in length");
  History h;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    h.push_back(xs[i]);
    h.push_back(ys[i]);
  }
  return h;
}

// [x^n |- y^n] from the joint; 1 when x^n is a null event.
inline double sequence_conditional(const Joint& j, const History& xs, const History& ys) {
  std::vector<std::optional<std::size_t>> px, pxy;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    px.insert(px.end(), {xs[i], std::nullopt});
    pxy.insert(pxy.end(), {xs[i], ys.at(i)});
  }
  const double m = marginal(j, px);
  return m <= 0.0 ? 1.0 : marginal(j, pxy) / m;
}

// Product of single-step conditionals [x_m |- y_m] over the sequence.
inline double ash_product(const Joint& j, const History& xs, const History& ys) {
  require(xs.size() == ys.size(), Errc::DimMismatch, "input and output sequences differ in length");
  double out = 1.0;
  for (std::size_t m = 0; m < xs.size(); ++m) {
    std::vector<std::optional<std::size_t>> px(2 * m + 2), pxy(2 * m + 2);
    px[2 * m] = pxy[2 * m] = xs[m];
    pxy[2 * m + 1] = ys[m];
    const double mx = marginal(j, px);
    out *= mx <= 0.0 ? 1.0 : marginal(j, pxy) / mx;
  }
  return out;
}

inline double ash_product(const Channel& ch, const History& xs, const History& ys) {
  return ash_product(channel_joint(ch, xs.size()), xs, ys);
}

inline double sequence_conditional(const Channel& ch, const History& xs, const History& ys) {
  return sequence_conditional(channel_joint(ch, xs.size()), xs, ys);
}

struct AshViolation {
  History inputs;
  History outputs;
  double conditional;
  double product;
};

namespace detail {

// Scans n = 1..horizon, input sequences of positive mass in index order and
// every output sequence; `visit` returns false to stop.
template <class Visit>
void scan_ash(const Channel& ch, double tol, const ChannelLimits& limits, Visit&& visit) {
  detail::check_caps(ch, limits);
  const auto full = channel_joint(ch, ch.horizon, limits);
  std::size_t work = 0;
  for (std::size_t n = 1; n <= ch.horizon; ++n) {
    const auto j = detail::prefixes(full, 2 * n);
    // Step marginals [x_m |- y_m] are shared by every sequence.
    std::vector<std::vector<Row>> step(n, std::vector<Row>(ch.inputs.size(), Row(ch.outputs.size(), 0.0)));
    std::vector<Row> xmass(n, Row(ch.inputs.size(), 0.0));
    std::map<History, double> xs_mass;
    for (const auto& [h, p] : j) {
      for (std::size_t m = 0; m < n; ++m) {
        step[m][h[2 * m]][h[2 * m + 1]] += p;
        xmass[m][h[2 * m]] += p;
      }
      xs_mass[detail::inputs_of(h)] += p;
    }
    for (const auto& [xs, mx] : xs_mass) {
      if (mx <= tol) continue;
      History ys(n, 0);
      while (true) {
        require(++work <= limits.max_work, Errc::CapExceeded, "Ash check visits too many sequence pairs");
        double prod = 1.0;
        for (std::size_t m = 0; m < n; ++m) prod *= step[m][xs[m]][ys[m]] / xmass[m][xs[m]];
        auto it = j.find(interleave(xs, ys));
        const double cond = (it == j.end() ? 0.0 : it->second) / mx;
        if (std::abs(cond - prod) > tol && !visit(AshViolation{xs, ys, cond, prod})) return;
        std::size_t k = n;
        while (k > 0 && ++ys[k - 1] == ch.outputs.size()) ys[--k] = 0;
        if (k == 0) break;
      }
    }
  }
}

}  // namespace detail

// First failing pair in scan order.
inline std::optional<AshViolation> ash_counterexample(const Channel& ch, double tol = 1e-9,
                                                      const ChannelLimits& limits = {}) {
  std::optional<AshViolation> out;
  detail::scan_ash(ch, tol, limits, [&](AshViolation v) {
    out = std::move(v);
    return false;
  });
  return out;
}

// Every failing pair, in scan order.
inline std::vector<AshViolation> ash_violations(const Channel& ch, double tol = 1e-9, const ChannelLimits& limits = {}) {
  std::vector<AshViolation> out;
  detail::scan_ash(ch, tol, limits, [&](AshViolation v) {
    out.push_back(std::move(v));
    return true;
  });
  return out;
}

inline bool ash_holds(const Channel& ch, double tol = 1e-9, const ChannelLimits& limits = {}) {
  return !ash_counterexample(ch, tol, limits).has_value();
}

}  // namespace langlab::stochastic
