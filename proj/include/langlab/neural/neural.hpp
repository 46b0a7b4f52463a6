#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "langlab/error.hpp"
#include "langlab/rng.hpp"

namespace langlab::neural {

using Matrix = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

enum class Activation { sgn, logistic, tanh, relu, identity };

constexpr std::string_view to_string(Activation a) noexcept {
  switch (a) {
    case Activation::sgn: return "sgn";
    case Activation::logistic: return "logistic";
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
    case Activation::identity: return "identity";
  }
  return "?";
}

inline Activation parse_activation(std::string_view s) {
  for (auto a : {Activation::sgn, Activation::logistic, Activation::tanh, Activation::relu, Activation::identity})
    if (to_string(a) == s) return a;
  fail(Errc::SchemaError, "unknown activation '" + std::string(s) + "'");
}

inline double sgn(double z) noexcept { return z > 0 ? 1.0 : (z < 0 ? -1.0 : 0.0); }

inline double activate(Activation a, double z) noexcept {
  switch (a) {
    case Activation::sgn: return sgn(z);
    case Activation::logistic: return 1.0 / (1.0 + std::exp(-z));
    case Activation::tanh: return std::tanh(z);
    case Activation::relu: return z > 0 ? z : 0.0;
    case Activation::identity: return z;
  }
  return z;
}

inline bool differentiable(Activation a) noexcept { return a != Activation::sgn; }

// relu uses subgradient 0 at the kink.
inline double derivative(Activation a, double z) {
  switch (a) {
    case Activation::sgn: fail(Errc::NonDifferentiableActivation, "sgn is evaluation-only");
    case Activation::logistic: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 - s);
    }
    case Activation::tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::relu: return z > 0 ? 1.0 : 0.0;
    case Activation::identity: return 1.0;
  }
  return 0.0;
}

inline Vec activate(Activation a, const Vec& z) {
  return z.unaryExpr([a](double t) { return activate(a, t); });
}

// x1 = -|0> + |x>: the leading -1 coordinate carries the threshold.
inline Vec extend(const Vec& x) {
  Vec x1(x.size() + 1);
  x1(0) = -1.0;
  x1.tail(x.size()) = x;
  return x1;
}

struct Neuron {
  double threshold = 0.0;
  Vec w;

  Vec absorbed() const {
    Vec wb(w.size() + 1);
    wb(0) = threshold;
    wb.tail(w.size()) = w;
    return wb;
  }
};

inline int eval_neuron(const Neuron& nr, const Vec& x) {
  require(nr.w.size() == x.size(), Errc::DimMismatch, "neuron weights and input differ in dimension");
  return static_cast<int>(sgn(nr.w.dot(x) - nr.threshold));
}

// Deep form W0 (n0 x (d+1), thresholds in column 0), hidden maps H_l, output V
// (q x n_L). acts[l] follows the l-th linear map; V is not activated.
struct DeepNet {
  Matrix w0;
  std::vector<Matrix> hidden;
  Matrix v;
  std::vector<Activation> acts;

  Eigen::Index input_dim() const { return w0.cols() - 1; }
  Eigen::Index output_dim() const { return v.rows(); }

  void validate() const {
    require(w0.rows() >= 1 && w0.cols() >= 1, Errc::DimMismatch, "W0 needs at least one row and the threshold column");
    require(acts.size() == hidden.size() + 1, Errc::DimMismatch, "one activation per linear layer below V");
    Eigen::Index width = w0.rows();
    for (const auto& h : hidden) {
      require(h.cols() == width, Errc::DimMismatch, "hidden layer shapes do not compose");
      width = h.rows();
    }
    require(v.cols() == width, Errc::DimMismatch, "V does not match the last layer width");
    require(w0.allFinite() && v.allFinite(), Errc::InvalidArgument, "non-finite weights");
    for (const auto& h : hidden) require(h.allFinite(), Errc::InvalidArgument, "non-finite weights");
  }

  std::size_t parameter_count() const {
    std::size_t n = static_cast<std::size_t>(w0.size() + v.size());
    for (const auto& h : hidden) n += static_cast<std::size_t>(h.size());
    return n;
  }

  // Flat views in the order W0, H_1..H_L, V, each row-major.
  std::vector<double> parameters() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    auto put = [&](const Matrix& m) {
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
    };
    put(w0);
    for (const auto& h : hidden) put(h);
    put(v);
    return out;
  }

  void set_parameters(const std::vector<double>& p) {
    require(p.size() == parameter_count(), Errc::DimMismatch, "parameter vector length");
    std::size_t k = 0;
    auto take = [&](Matrix& m) {
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = p[k++];
    };
    take(w0);
    for (auto& h : hidden) take(h);
    take(v);
  }
};

// Single hidden layer <v| sigma^n W |x1>; v may have several rows.
struct WideNet {
  Matrix w;  // n x (d+1)
  Matrix v;  // q x n
  Activation act = Activation::logistic;

  DeepNet deep() const { return DeepNet{w, {}, v, {act}}; }
};

struct Forward {
  std::vector<Vec> inputs;  // input to each linear map below V (inputs[0] = x1)
  std::vector<Vec> pre;     // pre-activations per layer
  Vec out;
};

inline Forward forward(const DeepNet& net, const Vec& x) {
  require(x.size() == net.input_dim(), Errc::DimMismatch,
          "input has dimension " + std::to_string(x.size()) + ", net expects " + std::to_string(net.input_dim()));
  Forward f;
  Vec a = extend(x);
  for (std::size_t l = 0; l <= net.hidden.size(); ++l) {
    const Matrix& m = l == 0 ? net.w0 : net.hidden[l - 1];
    f.inputs.push_back(a);
    f.pre.push_back(m * a);
    a = activate(net.acts[l], f.pre.back());
  }
  f.out = net.v * a;
  return f;
}

inline Vec eval_deep(const DeepNet& net, const Vec& x) { return forward(net, x).out; }

inline Vec eval_wide(const WideNet& net, const Vec& x) {
  require(x.size() + 1 == net.w.cols(), Errc::DimMismatch, "input dimension does not match W");
  require(net.v.cols() == net.w.rows(), Errc::DimMismatch, "v does not match the width of W");
  return net.v * activate(net.act, net.w * extend(x));
}

inline double eval_wide_scalar(const WideNet& net, const Vec& x) {
  require(net.v.rows() == 1, Errc::DimMismatch, "net has more than one output");
  return eval_wide(net, x)(0);
}

struct LearningTask {
  std::vector<Vec> xs;
  std::vector<Vec> ys;
  std::vector<double> weights;  // guess frequencies; empty means all 1

  void validate() const {
    require(xs.size() == ys.size(), Errc::DimMismatch, "one target per sample");
    require(weights.empty() || weights.size() == xs.size(), Errc::DimMismatch, "one weight per sample");
    for (double w : weights) require(w >= 0.0 && std::isfinite(w), Errc::InvalidArgument, "sample weights must be nonnegative");
    for (std::size_t i = 1; i < xs.size(); ++i)
      require(xs[i].size() == xs[0].size() && ys[i].size() == ys[0].size(), Errc::DimMismatch, "ragged samples");
  }
  double weight(std::size_t i) const { return weights.empty() ? 1.0 : weights[i]; }
};

inline double squared_error(const Vec& y, const Vec& guess) {
  require(y.size() == guess.size(), Errc::DimMismatch, "target and guess differ in dimension");
  return (y - guess).squaredNorm();
}

// Weighted sum of losses of the model's guesses.
template <class Model>
  requires std::invocable<Model&, const Vec&>
double risk(const LearningTask& task, Model&& model) {
  task.validate();
  double r = 0.0;
  for (std::size_t i = 0; i < task.xs.size(); ++i) r += task.weight(i) * squared_error(task.ys[i], model(task.xs[i]));
  return r;
}

inline double risk(const LearningTask& task, const DeepNet& net) {
  return risk(task, [&](const Vec& x) { return eval_deep(net, x); });
}

// Gradient of weight * |y - net(x)|^2, laid out like the net itself.
inline DeepNet grad(const DeepNet& net, const Vec& x, const Vec& y, double weight = 1.0) {
  for (auto a : net.acts)
    require(differentiable(a), Errc::NonDifferentiableActivation, std::string(to_string(a)) + " has no usable derivative");
  const Forward f = forward(net, x);
  require(y.size() == f.out.size(), Errc::DimMismatch, "target dimension does not match the net output");
  DeepNet g{Matrix::Zero(net.w0.rows(), net.w0.cols()), {}, Matrix::Zero(net.v.rows(), net.v.cols()), net.acts};
  for (const auto& h : net.hidden) g.hidden.push_back(Matrix::Zero(h.rows(), h.cols()));

  const std::size_t layers = net.hidden.size() + 1;
  const Vec top = activate(net.acts.back(), f.pre.back());
  const Vec delta_out = 2.0 * weight * (f.out - y);
  g.v = delta_out * top.transpose();
  Vec delta = net.v.transpose() * delta_out;
  for (std::size_t l = layers; l-- > 0;) {
    const Vec& z = f.pre[l];
    Vec dz(z.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) dz(k) = delta(k) * derivative(net.acts[l], z(k));
    Matrix& target = l == 0 ? g.w0 : g.hidden[l - 1];
    target = dz * f.inputs[l].transpose();
    if (l > 0) delta = net.hidden[l - 1].transpose() * dz;
  }
  return g;
}

inline DeepNet risk_grad(const DeepNet& net, const LearningTask& task) {
  task.validate();
  DeepNet total = grad(net, task.xs.at(0), task.ys.at(0), task.weight(0));
  for (std::size_t i = 1; i < task.xs.size(); ++i) {
    auto g = grad(net, task.xs[i], task.ys[i], task.weight(i));
    total.w0 += g.w0;
    total.v += g.v;
    for (std::size_t l = 0; l < total.hidden.size(); ++l) total.hidden[l] += g.hidden[l];
  }
  return total;
}

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // parameters whose perturbation crosses a relu kink
};

// Central differences per parameter against backprop.
inline GradCheck grad_check(const DeepNet& net, const Vec& x, const Vec& y, double h = 1e-5) {
  require(h > 0.0, Errc::InvalidArgument, "finite-difference step must be positive");
  const auto analytic = grad(net, x, y).parameters();
  const auto base = net.parameters();
  auto near_kink = [&](const DeepNet& probe) {
    const auto f = forward(probe, x);
    for (std::size_t l = 0; l < f.pre.size(); ++l)
      if (probe.acts[l] == Activation::relu && (f.pre[l].array().abs() < 1e-6).any()) return true;
    return false;
  };
  auto sign_pattern = [&](const DeepNet& probe) {
    std::vector<bool> s;
    const auto f = forward(probe, x);
    for (std::size_t l = 0; l < f.pre.size(); ++l)
      if (probe.acts[l] == Activation::relu)
        for (Eigen::Index k = 0; k < f.pre[l].size(); ++k) s.push_back(f.pre[l](k) > 0);
    return s;
  };
  GradCheck out;
  DeepNet probe = net;
  for (std::size_t i = 0; i < base.size(); ++i) {
    auto p = base;
    p[i] = base[i] + h;
    probe.set_parameters(p);
    const double up = squared_error(y, eval_deep(probe, x));
    const auto s_up = sign_pattern(probe);
    const bool kink_up = near_kink(probe);
    p[i] = base[i] - h;
    probe.set_parameters(p);
    const double down = squared_error(y, eval_deep(probe, x));
    if (kink_up || near_kink(probe) || s_up != sign_pattern(probe)) {
      ++out.skipped;
      continue;
    }
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max(std::abs(numeric) + std::abs(analytic[i]), 1e-8);
    out.max_rel_error = std::max(out.max_rel_error, std::abs(numeric - analytic[i]) / denom);
    ++out.checked;
  }
  return out;
}

enum class Optimizer { sgd, adam };

struct TrainConfig {
  double lr = 0.01;
  std::size_t epochs = 5000;
  std::size_t batch_size = 0;  // 0 means full batch
  std::uint64_t seed = 1;
  double init_scale = 0.0;  // 0 means 1/sqrt(fan-in)
  Activation act = Activation::logistic;
  Optimizer optimizer = Optimizer::adam;
};

struct TrainRecord {
  std::vector<double> risk;  // normalized risk after each epoch
  std::uint64_t seed = 0;
  double w_scale = 0.0;
  double v_scale = 0.0;
};

struct Trained {
  WideNet net;
  TrainRecord record;
};

inline Matrix uniform_matrix(SeededRng& rng, Eigen::Index rows, Eigen::Index cols, double s) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(-s, s);
  return m;
}

namespace detail {

// Descent on risk divided by total weight. Adam uses the usual 0.9 / 0.999 moments.
inline TrainRecord descend(DeepNet& net, const LearningTask& task, const TrainConfig& cfg, SeededRng& rng) {
  double total_weight = 0.0;
  for (std::size_t i = 0; i < task.xs.size(); ++i) total_weight += task.weight(i);
  require(total_weight > 0.0, Errc::InvalidArgument, "training task has no weight");
  TrainRecord rec;
  rec.seed = cfg.seed;
  auto params = net.parameters();
  std::vector<double> m1(params.size(), 0.0), m2(params.size(), 0.0);
  std::vector<std::size_t> order(task.xs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t batch = cfg.batch_size == 0 ? order.size() : std::min(cfg.batch_size, order.size());
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch < order.size())
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      LearningTask mini;
      double mini_weight = 0.0;
      for (std::size_t k = start; k < std::min(start + batch, order.size()); ++k) {
        mini.xs.push_back(task.xs[order[k]]);
        mini.ys.push_back(task.ys[order[k]]);
        mini.weights.push_back(task.weight(order[k]));
        mini_weight += mini.weights.back();
      }
      if (mini_weight <= 0.0) continue;
      auto g = risk_grad(net, mini).parameters();
      ++step;
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double gi = g[i] / mini_weight;
        if (cfg.optimizer == Optimizer::sgd) {
          params[i] -= cfg.lr * gi;
          continue;
        }
        m1[i] = 0.9 * m1[i] + 0.1 * gi;
        m2[i] = 0.999 * m2[i] + 0.001 * gi * gi;
        const double mh = m1[i] / (1.0 - std::pow(0.9, static_cast<double>(step)));
        const double vh = m2[i] / (1.0 - std::pow(0.999, static_cast<double>(step)));
        params[i] -= cfg.lr * mh / (std::sqrt(vh) + 1e-8);
      }
      net.set_parameters(params);
    }
    rec.risk.push_back(risk(task, net) / total_weight);
  }
  return rec;
}

}  // namespace detail

inline Trained train_wide(const LearningTask& task, std::size_t width, const TrainConfig& cfg) {
  task.validate();
  require(!task.xs.empty(), Errc::InvalidArgument, "training task has no samples");
  require(width >= 1, Errc::InvalidArgument, "width must be at least 1");
  require(differentiable(cfg.act), Errc::NonDifferentiableActivation, "sgn nets are evaluation-only");
  SeededRng rng(cfg.seed);
  const auto d = task.xs[0].size(), q = task.ys[0].size();
  const auto n = static_cast<Eigen::Index>(width);
  const double sw = cfg.init_scale > 0 ? cfg.init_scale : 1.0 / std::sqrt(static_cast<double>(d + 1));
  const double sv = cfg.init_scale > 0 ? cfg.init_scale : 1.0 / std::sqrt(static_cast<double>(n));
  DeepNet net{uniform_matrix(rng, n, d + 1, sw), {}, uniform_matrix(rng, q, n, sv), {cfg.act}};
  auto rec = detail::descend(net, task, cfg, rng);
  rec.w_scale = sw;
  rec.v_scale = sv;
  return {WideNet{net.w0, net.v, cfg.act}, rec};
}

// Samples f on the uniform grid with `per_axis` points per coordinate of [0,1]^d.
inline LearningTask grid_task(std::size_t d, std::size_t per_axis, const std::function<double(const Vec&)>& f) {
  require(d >= 1 && per_axis >= 2, Errc::InvalidArgument, "grid needs d >= 1 and two points per axis");
  LearningTask t;
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    Vec x(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k)
      x(static_cast<Eigen::Index>(k)) = static_cast<double>(idx[k]) / static_cast<double>(per_axis - 1);
    t.xs.push_back(x);
    t.ys.push_back(Vec::Constant(1, f(x)));
    std::size_t k = d;
    while (k > 0 && ++idx[k - 1] == per_axis) idx[--k] = 0;
    if (k == 0) break;
  }
  return t;
}

inline double max_grid_error(const WideNet& net, std::size_t d, std::size_t per_axis,
                             const std::function<double(const Vec&)>& f) {
  const auto grid = grid_task(d, per_axis, f);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.xs.size(); ++i)
    worst = std::max(worst, std::abs(eval_wide_scalar(net, grid.xs[i]) - grid.ys[i](0)));
  return worst;
}

// Median final risk over seeds 1..n_seeds for each width.
inline std::vector<double> width_sweep(const LearningTask& task, const std::vector<std::size_t>& widths,
                                       std::size_t n_seeds, std::size_t epochs, TrainConfig base = {}) {
  require(n_seeds >= 1, Errc::InvalidArgument, "sweep needs at least one seed");
  base.epochs = epochs;
  std::vector<double> medians;
  for (auto width : widths) {
    std::vector<double> finals;
    for (std::uint64_t s = 1; s <= n_seeds; ++s) {
      base.seed = s;
      finals.push_back(train_wide(task, width, base).record.risk.back());
    }
    std::sort(finals.begin(), finals.end());
    const auto mid = finals.size() / 2;
    medians.push_back(finals.size() % 2 ? finals[mid] : 0.5 * (finals[mid - 1] + finals[mid]));
  }
  return medians;
}

// sum_i v_i phi(sum_j w_j psi_i(x_j)) with caller-supplied psi_0..psi_2d and phi.
struct KAForm {
  std::size_t d = 1;
  Vec v;  // 2d+1
  Vec w;  // d
  std::vector<std::function<double(double)>> psi;
  std::function<double(double)> phi;

  void validate() const {
    require(v.size() == static_cast<Eigen::Index>(2 * d + 1) && psi.size() == 2 * d + 1, Errc::DimMismatch,
            "KA form needs 2d+1 outer weights and inner functions");
    require(w.size() == static_cast<Eigen::Index>(d), Errc::DimMismatch, "KA form needs d inner weights");
    require(static_cast<bool>(phi), Errc::InvalidArgument, "KA form needs an outer function");
  }
};

inline double eval_ka(const KAForm& ka, const Vec& x) {
  ka.validate();
  require(x.size() == static_cast<Eigen::Index>(ka.d), Errc::DimMismatch, "input dimension differs from d");
  for (Eigen::Index j = 0; j < x.size(); ++j)
    require(x(j) >= 0.0 && x(j) <= 1.0, Errc::OutOfDomain, "KA inputs live in the unit cube");
  double out = 0.0;
  for (std::size_t i = 0; i <= 2 * ka.d; ++i) {
    double inner = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) inner += ka.w(j) * ka.psi[i](x(j));
    out += ka.v(static_cast<Eigen::Index>(i)) * ka.phi(inner);
  }
  return out;
}

}  // namespace langlab::neural
