#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "langlab/error.hpp"
#include "langlab/rng.hpp"

namespace langlab::belief {

using Matrix = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Context = std::vector<Vec>;

// Models live in the token space R^d, so a token can be passed where a model
// is expected (the self-model reads x_{2n+2} as a program).
struct Machine {
  Eigen::Index dim = 0;
  std::function<Vec(const Context&, const Vec&)> eval;
  // d x d derivative of the output in the model; finite differences when unset.
  std::function<Matrix(const Context&, const Vec&)> jacobian;

  Vec operator()(const Context& ctx, const Vec& a) const {
    require(a.size() == dim, Errc::DimMismatch, "model dimension differs from the machine");
    for (const auto& x : ctx) require(x.size() == dim, Errc::DimMismatch, "context token has the wrong dimension");
    return eval(ctx, a);
  }

  Matrix model_jacobian(const Context& ctx, const Vec& a) const {
    if (jacobian) return jacobian(ctx, a);
    Matrix j(dim, dim);
    const double h = 1e-6;
    for (Eigen::Index k = 0; k < dim; ++k) {
      Vec up = a, down = a;
      up(k) += h;
      down(k) -= h;
      j.col(k) = (eval(ctx, up) - eval(ctx, down)) / (2 * h);
    }
    return j;
  }
};

inline Vec context_sum(const Context& ctx, Eigen::Index d) {
  Vec s = Vec::Zero(d);
  for (const auto& x : ctx) s += x;
  return s;
}

// u(x_1..x_k) a = F (x_1 + ... + x_k) + M a + c.
struct AffineMachine {
  Matrix f, m;
  Vec c;

  Eigen::Index dim() const { return c.size(); }

  void validate() const {
    const auto d = dim();
    require(d >= 1, Errc::DimMismatch, "machine needs d >= 1");
    require(f.rows() == d && f.cols() == d && m.rows() == d && m.cols() == d, Errc::DimMismatch,
            "machine F and M must be d x d");
  }

  Machine machine() const {
    validate();
    auto self = *this;
    return Machine{dim(),
                   [self](const Context& ctx, const Vec& a) { return Vec(self.f * context_sum(ctx, self.dim()) + self.m * a + self.c); },
                   [self](const Context&, const Vec&) { return self.m; }};
  }
};

// concrete = base + J param.
struct ParametricModel {
  Vec base;
  Matrix j;

  Eigen::Index model_dim() const { return base.size(); }
  Eigen::Index param_dim() const { return j.cols(); }

  static ParametricModel zero(Eigen::Index m, Eigen::Index p) { return {Vec::Zero(m), Matrix::Zero(m, p)}; }
};

inline Vec instantiate(const ParametricModel& p, const Vec& param) {
  require(p.j.rows() == p.base.size(), Errc::DimMismatch, "injection rows differ from the base");
  require(param.size() == p.param_dim(), Errc::DimMismatch,
          "parameter has dimension " + std::to_string(param.size()) + ", model expects " + std::to_string(p.param_dim()));
  return p.base + p.j * param;
}

// Two slots of equal width.
struct SelfModel {
  ParametricModel p;

  Eigen::Index slot_dim() const { return p.param_dim() / 2; }
  Matrix j1() const { return p.j.leftCols(slot_dim()); }
  Matrix j2() const { return p.j.rightCols(slot_dim()); }

  void validate() const {
    require(p.param_dim() % 2 == 0 && p.param_dim() > 0, Errc::DimMismatch, "self-model needs two slots of equal width");
  }
};

inline Vec instantiate(const SelfModel& s, const Vec& u, const Vec& w) {
  s.validate();
  require(u.size() == s.slot_dim() && w.size() == s.slot_dim(), Errc::DimMismatch, "self-model slot dimension");
  Vec param(u.size() + w.size());
  param << u, w;
  return instantiate(s.p, param);
}

// B(x_1..x_{2n+1}, a) = E pred + G (x_1 + ... + x_{2n+1}) + h, pred = u(x_1..x_{2n}) a.
struct AgentChannel {
  std::string mode = "affine";  // echo, affine, ignore, adversarial, realizable
  Matrix e, g;
  Vec h;

  void validate(Eigen::Index d) const {
    require(e.rows() == d && e.cols() == d && g.rows() == d && g.cols() == d && h.size() == d, Errc::DimMismatch,
            "agent matrices must match the machine dimension");
  }

  Vec operator()(const Machine& mc, const Context& ctx, const Vec& a) const {
    validate(mc.dim);
    require(!ctx.empty(), Errc::EmptyContext, "agent acts after at least one input");
    const Context before(ctx.begin(), ctx.end() - 1);
    return e * mc(before, a) + g * context_sum(ctx, mc.dim) + h;
  }

  static AgentChannel echo(Eigen::Index d) { return {"echo", Matrix::Identity(d, d), Matrix::Zero(d, d), Vec::Zero(d)}; }
  static AgentChannel ignore(Matrix g, Vec h) {
    const auto d = h.size();
    return {"ignore", Matrix::Zero(d, d), std::move(g), std::move(h)};
  }
  static AgentChannel adversarial(Eigen::Index d) {
    return {"adversarial", -Matrix::Identity(d, d), Matrix::Zero(d, d), Vec::Zero(d)};
  }
  static AgentChannel affine(Matrix e, Matrix g, Vec h) { return {"affine", std::move(e), std::move(g), std::move(h)}; }

  // The responder for which the beta fit is exactly realizable on an affine
  // machine: E = F (F + M)^-1, G = F - E F.
  static AgentChannel realizable(const AffineMachine& mc, Vec h) {
    mc.validate();
    const Matrix sum = mc.f + mc.m;
    Eigen::FullPivLU<Matrix> lu(sum);
    require(lu.isInvertible(), Errc::InvalidArgument, "F + M must be invertible for a realizable responder");
    const Matrix e = mc.f * lu.inverse();
    return {"realizable", e, mc.f - e * mc.f, std::move(h)};
  }
};

struct FitReport {
  double final_risk = 0.0;      // mean squared residual on the training draws
  std::size_t rounds = 0;       // epochs for fits, loop rounds for verification
  std::vector<double> residuals;  // per epoch (training) or per round (loop)
  double mean_residual = 0.0;   // held-out for fits, over rounds for verification
  double bound = 0.0;           // verification only: mean of the two fit residuals on the loop
  bool pass = false;
};

template <class T>
struct Fitted {
  T model;
  FitReport report;
};

struct FitConfig {
  double lr = 1.0;  // fraction of the safe step 1/L
  std::size_t epochs = 3000;
  double tol = 1e-3;
  std::uint64_t seed = 7;
  std::size_t samples = 64;
  std::size_t held_out = 32;
  std::size_t min_pairs = 0;  // contexts hold 2n tokens with n in [min_pairs, max_pairs]
  std::size_t max_pairs = 3;
};

namespace detail {

struct Sample {
  Context ctx;  // context the machine reads
  Vec param;    // what the parametric model is instantiated at
  Vec target;
};

inline Vec token(SeededRng& rng, Eigen::Index d) {
  Vec x(d);
  for (Eigen::Index i = 0; i < d; ++i) x(i) = rng.uniform(-1.0, 1.0);
  return x;
}

inline Context tokens(SeededRng& rng, Eigen::Index d, std::size_t n) {
  Context c;
  for (std::size_t i = 0; i < n; ++i) c.push_back(token(rng, d));
  return c;
}

inline std::size_t pairs(SeededRng& rng, const FitConfig& cfg) {
  require(cfg.min_pairs <= cfg.max_pairs, Errc::InvalidArgument, "min_pairs exceeds max_pairs");
  return cfg.min_pairs + rng.index(cfg.max_pairs - cfg.min_pairs + 1);
}

inline double mean_norm(const Machine& mc, const ParametricModel& pm, const std::vector<Sample>& data) {
  if (data.empty()) return 0.0;
  double s = 0.0;
  for (const auto& d : data) s += (mc(d.ctx, instantiate(pm, d.param)) - d.target).norm();
  return s / static_cast<double>(data.size());
}

// Full-batch gradient descent on the mean of |u(ctx)(base + J p) - target|^2
// from the zero model, with step cfg.lr / L for L a bound on the curvature.
inline Fitted<ParametricModel> fit(const Machine& mc, const std::vector<Sample>& train, const std::vector<Sample>& held,
                                   Eigen::Index p_dim, const FitConfig& cfg, std::string_view what) {
  require(!train.empty(), Errc::InvalidArgument, "fit needs training samples");
  require(cfg.lr > 0.0 && cfg.lr < 2.0, Errc::InvalidArgument, "lr is a fraction of the safe step and must lie in (0, 2)");
  const auto d = mc.dim;
  auto pm = ParametricModel::zero(d, p_dim);
  const double n = static_cast<double>(train.size());

  double curvature = 0.0;
  for (const auto& s : train) {
    const Matrix jac = mc.model_jacobian(s.ctx, instantiate(pm, s.param));
    curvature = std::max(curvature, 2.0 * jac.squaredNorm() * (1.0 + s.param.squaredNorm()));
  }
  const double step = curvature > 0.0 ? cfg.lr / curvature : 0.0;

  FitReport rep;
  rep.rounds = cfg.epochs;
  auto risk = [&] {
    double r = 0.0;
    for (const auto& s : train) r += (mc(s.ctx, instantiate(pm, s.param)) - s.target).squaredNorm();
    return r / n;
  };
  for (std::size_t epoch = 0; epoch < cfg.epochs && step > 0.0; ++epoch) {
    Vec g_base = Vec::Zero(d);
    Matrix g_j = Matrix::Zero(d, p_dim);
    for (const auto& s : train) {
      const Vec a = instantiate(pm, s.param);
      const Vec ga = 2.0 * mc.model_jacobian(s.ctx, a).transpose() * (mc(s.ctx, a) - s.target);
      g_base += ga;
      g_j += ga * s.param.transpose();
    }
    pm.base -= step * g_base / n;
    pm.j -= step * g_j / n;
    rep.residuals.push_back(risk());
  }
  rep.final_risk = risk();
  rep.mean_residual = mean_norm(mc, pm, held.empty() ? train : held);
  rep.pass = rep.mean_residual <= cfg.tol;
  if (cfg.epochs > 0 && !rep.pass)
    fail(Errc::NoConvergence, std::string(what) + " fit residual " + std::to_string(rep.mean_residual) +
                                  " above tolerance " + std::to_string(cfg.tol) + " after " +
                                  std::to_string(cfg.epochs) + " epochs");
  return {pm, rep};
}

template <class Draw>
std::vector<Sample> draw(std::size_t count, Draw&& one) {
  std::vector<Sample> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(one());
  return out;
}

}  // namespace detail

using Target = std::function<Vec(const Context&)>;

// a(x_{n+1}) with u(x_1..x_n) a(x_{n+1}) ~ target(x_1..x_{n+1}).
inline Fitted<ParametricModel> fit_parametric(const Machine& mc, const Target& target, std::size_t horizon,
                                              const FitConfig& cfg) {
  SeededRng rng(cfg.seed);
  auto one = [&] {
    Context ctx = detail::tokens(rng, mc.dim, horizon + 1);
    Vec last = ctx.back();
    Vec y = target(ctx);
    require(y.size() == mc.dim, Errc::DimMismatch, "target output has the wrong dimension");
    ctx.pop_back();
    return detail::Sample{ctx, last, y};
  };
  auto train = detail::draw(cfg.samples, one);
  auto held = detail::draw(cfg.held_out, one);
  return detail::fit(mc, train, held, mc.dim, cfg, "parametric");
}

// s with u(x_1..x_{2n}) s(x_{2n+1}, x_{2n+2}) ~ u(x_1..x_{2n+1}) x_{2n+2}.
inline Fitted<SelfModel> fit_self_model(const Machine& mc, const FitConfig& cfg) {
  SeededRng rng(cfg.seed);
  auto one = [&] {
    Context ctx = detail::tokens(rng, mc.dim, 2 * detail::pairs(rng, cfg));
    const Vec u = detail::token(rng, mc.dim), w = detail::token(rng, mc.dim);
    Context longer = ctx;
    longer.push_back(u);
    Vec param(2 * mc.dim);
    param << u, w;
    return detail::Sample{ctx, param, mc(longer, w)};
  };
  auto train = detail::draw(cfg.samples, one);
  auto held = detail::draw(cfg.held_out, one);
  auto f = detail::fit(mc, train, held, 2 * mc.dim, cfg, "self-model");
  return {SelfModel{f.model}, f.report};
}

// beta with B(x_1..x_{2n+1}, s(x_{2n+2}, x_{2n+2})) ~ u(x_1..x_{2n}, x_{2n+2}) beta(x_{2n+1}).
inline Fitted<ParametricModel> fit_beta(const Machine& mc, const AgentChannel& agent, const SelfModel& s,
                                        const FitConfig& cfg) {
  agent.validate(mc.dim);
  require(s.slot_dim() == mc.dim, Errc::DimMismatch, "self-model slots must match the machine dimension");
  SeededRng rng(cfg.seed);
  auto one = [&] {
    Context ctx = detail::tokens(rng, mc.dim, 2 * detail::pairs(rng, cfg));
    const Vec u = detail::token(rng, mc.dim), w = detail::token(rng, mc.dim);
    Context with_u = ctx, with_w = ctx;
    with_u.push_back(u);
    with_w.push_back(w);
    return detail::Sample{with_w, u, agent(mc, with_u, instantiate(s, w, w))};
  };
  auto train = detail::draw(cfg.samples, one);
  auto held = detail::draw(cfg.held_out, one);
  return detail::fit(mc, train, held, mc.dim, cfg, "beta");
}

// b(X) = s(beta(X), beta(X)), composed on the affine maps.
inline ParametricModel build_self_confirming(const SelfModel& s, const ParametricModel& beta) {
  s.validate();
  require(beta.model_dim() == s.slot_dim() && beta.j.rows() == beta.model_dim(), Errc::DimMismatch,
          "beta's model dimension must match the self-model slots");
  const Matrix j12 = s.j1() + s.j2();
  return {s.p.base + j12 * beta.base, j12 * beta.j};
}

// The alternating loop: the world supplies x_{2n+1}, B answers with the
// instantiated b, and the answer becomes x_{2n+2}. Per round the residual
// |B(.., b(x)) - u(..) b(x)| is compared with the two fit residuals at the
// same point, |B(.., s(w, w)) - u(.., w) w| and |u(.., w) w - u(..) s(w, w)|
// for w = beta(x).
inline FitReport verify_self_confirmation(const Machine& mc, const AgentChannel& agent, const SelfModel& s,
                                          const ParametricModel& beta, const ParametricModel& b, std::size_t rounds,
                                          double tol, std::uint64_t seed) {
  agent.validate(mc.dim);
  SeededRng rng(seed);
  FitReport rep;
  rep.rounds = rounds;
  Context history;
  double total = 0.0, bound = 0.0, risk = 0.0;
  for (std::size_t r = 0; r < rounds; ++r) {
    const Vec x = detail::token(rng, mc.dim);
    Context with_x = history;
    with_x.push_back(x);
    const Vec a = instantiate(b, x);
    const Vec y = agent(mc, with_x, a);
    const Vec pred = mc(history, a);
    const double res = (y - pred).norm();

    const Vec w = instantiate(beta, x);
    const Vec sw = instantiate(s, w, w);
    Context with_w = history;
    with_w.push_back(w);
    const Vec via_w = mc(with_w, w);
    bound += (agent(mc, with_x, sw) - via_w).norm() + (via_w - mc(history, sw)).norm();

    rep.residuals.push_back(res);
    total += res;
    risk += res * res;
    history.push_back(x);
    history.push_back(y);
  }
  const double n = rounds == 0 ? 1.0 : static_cast<double>(rounds);
  rep.mean_residual = total / n;
  rep.final_risk = risk / n;
  rep.bound = bound / n;
  rep.pass = rep.mean_residual <= tol + rep.bound;
  return rep;
}

// Machine, responder and fit settings of one simulated world. For the
// realizable responder only h is stored; E and G follow from the machine.
struct Scenario {
  AffineMachine machine;
  AgentChannel agent;
  FitConfig cfg;
};

inline AgentChannel make_agent(const AffineMachine& mc, std::string_view mode, Matrix e, Matrix g, Vec h) {
  const auto d = mc.dim();
  if (mode == "echo") return AgentChannel::echo(d);
  if (mode == "adversarial") return AgentChannel::adversarial(d);
  if (mode == "realizable") return AgentChannel::realizable(mc, std::move(h));
  if (mode == "ignore") return AgentChannel::ignore(std::move(g), std::move(h));
  if (mode == "affine") return AgentChannel::affine(std::move(e), std::move(g), std::move(h));
  fail(Errc::SchemaError, "unknown agent mode '" + std::string(mode) + "'");
}

struct SelfBeliefRun {
  Fitted<SelfModel> s;
  Fitted<ParametricModel> beta;
  ParametricModel b;
  FitReport verify;
};

inline SelfBeliefRun run_self_belief(const Machine& mc, const AgentChannel& agent, const FitConfig& cfg,
                                     std::size_t rounds) {
  auto s = fit_self_model(mc, cfg);
  auto beta = fit_beta(mc, agent, s.model, cfg);
  auto b = build_self_confirming(s.model, beta.model);
  auto rep = verify_self_confirmation(mc, agent, s.model, beta.model, b, rounds, cfg.tol, cfg.seed);
  return {std::move(s), std::move(beta), std::move(b), std::move(rep)};
}

}  // namespace langlab::belief
