#include <gtest/gtest.h>

#include <cmath>

#include "langlab/belief/belief.hpp"
#include "support/examples.hpp"

using namespace langlab;
using namespace langlab::belief;

namespace {

Matrix rand_matrix(SeededRng& rng, Eigen::Index r, Eigen::Index c, double s = 1.0) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(-s, s);
  return m;
}

Vec rand_vec(SeededRng& rng, Eigen::Index n, double s = 1.0) { return rand_matrix(rng, n, 1, s).col(0); }

using testdata::toy_machine;

AffineMachine random_machine(SeededRng& rng, Eigen::Index d) {
  return {-0.3 * Matrix::Identity(d, d) + rand_matrix(rng, d, d, 0.1),
          Matrix::Identity(d, d) + rand_matrix(rng, d, d, 0.2), rand_vec(rng, d, 0.3)};
}

// Hand arithmetic for base + J p.
Vec loop_instantiate(const ParametricModel& p, const Vec& param) {
  Vec out(p.base.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out(i) = p.base(i);
    for (Eigen::Index k = 0; k < param.size(); ++k) out(i) += p.j(i, k) * param(k);
  }
  return out;
}

}  // namespace

TEST(Instantiate, ZeroLinearAndHandArithmetic) {
  SeededRng rng(51);
  for (int i = 0; i < 50; ++i) {
    ParametricModel p{rand_vec(rng, 3), rand_matrix(rng, 3, 4)};
    EXPECT_EQ(instantiate(p, Vec::Zero(4)), p.base);
    const Vec u = rand_vec(rng, 4);
    const double a = rng.uniform(-3, 3);
    EXPECT_TRUE((instantiate(p, a * u) - p.base).isApprox(a * (instantiate(p, u) - p.base), 1e-12));
    EXPECT_TRUE(instantiate(p, u).isApprox(loop_instantiate(p, u), 1e-14));
  }
  EXPECT_THROW(instantiate(ParametricModel::zero(2, 3), Vec::Zero(2)), Error);
}

TEST(SelfConfirming, CompositionIsExact) {
  SeededRng rng(52);
  for (int i = 0; i < 50; ++i) {
    SelfModel s{{rand_vec(rng, 3), rand_matrix(rng, 3, 6)}};
    ParametricModel beta{rand_vec(rng, 3), rand_matrix(rng, 3, 3)};
    const auto b = build_self_confirming(s, beta);
    const Vec x = rand_vec(rng, 3);
    const Vec w = loop_instantiate(beta, x);
    Vec both(6);
    both << w, w;
    EXPECT_TRUE((instantiate(b, x) - loop_instantiate(s.p, both)).isZero(1e-12));
  }
}

TEST(SelfConfirming, DegenerateCases) {
  SeededRng rng(53);
  SelfModel flat{{rand_vec(rng, 2), Matrix::Zero(2, 4)}};
  ParametricModel beta{rand_vec(rng, 2), rand_matrix(rng, 2, 2)};
  auto b = build_self_confirming(flat, beta);
  for (int i = 0; i < 10; ++i) EXPECT_TRUE(instantiate(b, rand_vec(rng, 2)).isApprox(flat.p.base, 1e-15));

  SelfModel s{{rand_vec(rng, 2), rand_matrix(rng, 2, 4)}};
  ParametricModel still{rand_vec(rng, 2), Matrix::Zero(2, 2)};
  auto b2 = build_self_confirming(s, still);
  for (int i = 0; i < 10; ++i)
    EXPECT_TRUE(instantiate(b2, rand_vec(rng, 2)).isApprox(instantiate(s, still.base, still.base), 1e-14));

  EXPECT_THROW(build_self_confirming(s, ParametricModel::zero(3, 3)), Error);
}

TEST(FitParametric, IgnoredLastInputGivesNoInjection) {
  const auto mc = toy_machine().machine();
  const Vec a0 = (Vec(2) << 0.5, -0.25).finished();
  auto target = [&](const Context& ctx) { return mc(Context(ctx.begin(), ctx.end() - 1), a0); };
  auto fit = fit_parametric(mc, target, 3, FitConfig{});
  EXPECT_LT(fit.model.j.norm(), 0.05);
  EXPECT_TRUE(fit.model.base.isApprox(a0, 1e-6));
}

TEST(FitParametric, LinearTargetIsLearned) {
  SeededRng rng(54);
  const auto mc = toy_machine().machine();
  const ParametricModel truth{rand_vec(rng, 2), rand_matrix(rng, 2, 2)};
  auto target = [&](const Context& ctx) {
    return mc(Context(ctx.begin(), ctx.end() - 1), instantiate(truth, ctx.back()));
  };
  auto fit = fit_parametric(mc, target, 2, FitConfig{});
  EXPECT_LT(fit.report.final_risk, 1e-3);
  EXPECT_TRUE(fit.model.j.isApprox(truth.j, 1e-4));
  EXPECT_EQ(fit.report.residuals.size(), 3000u);
}

TEST(FitParametric, ZeroEpochsReturnsInit) {
  const auto mc = toy_machine().machine();
  FitConfig cfg;
  cfg.epochs = 0;
  auto fit = fit_parametric(mc, [&](const Context&) { return Vec::Ones(2); }, 1, cfg);
  EXPECT_TRUE(fit.model.base.isZero(0.0));
  EXPECT_TRUE(fit.model.j.isZero(0.0));
  EXPECT_EQ(fit.report.rounds, 0u);
  EXPECT_GT(fit.report.final_risk, 0.0);
}

TEST(FitSelf, AffineMachineClosedForm) {
  const auto am = toy_machine();
  auto fit = fit_self_model(am.machine(), FitConfig{});
  // u(.., x, w) = u(..) s(x, w) exactly when s(x, w) = M^-1 F x + w.
  EXPECT_TRUE(fit.model.j1().isApprox(am.m.inverse() * am.f, 1e-6));
  EXPECT_TRUE(fit.model.j2().isApprox(Matrix::Identity(2, 2), 1e-6));
  EXPECT_LT(fit.report.mean_residual, 1e-6);
}

TEST(FitSelf, MachineIgnoringLastTwoInputs) {
  const Matrix f = (Matrix(2, 2) << 0.7, 0.1, -0.2, 0.4).finished();
  Machine first_only{2, [f](const Context& ctx, const Vec&) { return Vec(f * ctx.front()); }, {}};
  FitConfig cfg;
  cfg.min_pairs = 1;
  auto fit = fit_self_model(first_only, cfg);
  EXPECT_LT(fit.model.j1().norm(), 0.05);
  EXPECT_LT(fit.model.j2().norm(), 0.05);
}

TEST(FitSelf, IdentityLikeMachine) {
  const AffineMachine am{Matrix::Zero(3, 3), Matrix::Identity(3, 3), Vec::Zero(3)};
  auto fit = fit_self_model(am.machine(), FitConfig{});
  EXPECT_LT(fit.report.mean_residual, 1e-2);
}

TEST(FitSelf, ZeroToleranceOnNoisyMachine) {
  const auto am = toy_machine().machine();
  Machine noisy{2, [am](const Context& ctx, const Vec& a) {
                  Vec out = am(ctx, a);
                  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += 0.05 * std::sin(7.0 * (context_sum(ctx, 2)(i) + a(i)));
                  return out;
                }, {}};
  FitConfig cfg;
  cfg.tol = 0.0;
  cfg.epochs = 200;
  try {
    fit_self_model(noisy, cfg);
    FAIL() << "expected NoConvergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NoConvergence);
  }
}

TEST(FitBeta, RealizableResponder) {
  const auto am = toy_machine();
  const auto mc = am.machine();
  auto s = fit_self_model(mc, FitConfig{});
  auto exact = fit_beta(mc, AgentChannel::realizable(am, Vec::Zero(2)), s.model, FitConfig{});
  EXPECT_LT(exact.report.mean_residual, 1e-6);
  auto shifted = fit_beta(mc, AgentChannel::realizable(am, (Vec(2) << 0.3, -0.1).finished()), s.model, FitConfig{});
  EXPECT_LT(shifted.report.mean_residual, 1e-2);
}

TEST(FitBeta, UnrealizableRespondersReportNoConvergence) {
  const auto am = toy_machine();
  const auto mc = am.machine();
  auto s = fit_self_model(mc, FitConfig{});
  for (const auto& agent : {AgentChannel::adversarial(2), AgentChannel::echo(2)}) {
    try {
      fit_beta(mc, agent, s.model, FitConfig{});
      FAIL() << agent.mode << " fit should not converge";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::NoConvergence) << agent.mode;
    }
  }
}

TEST(Verify, EchoConfirmsAnyModel) {
  const auto am = toy_machine();
  SeededRng rng(55);
  SelfModel s{{rand_vec(rng, 2), rand_matrix(rng, 2, 4)}};
  ParametricModel beta{rand_vec(rng, 2), rand_matrix(rng, 2, 2)};
  auto rep = verify_self_confirmation(am.machine(), AgentChannel::echo(2), s, beta, build_self_confirming(s, beta), 30,
                                      1e-3, 1);
  EXPECT_LT(rep.mean_residual, 1e-12);
}

TEST(Verify, ExactWorldAcceptance) {
  const auto am = toy_machine();
  auto run = run_self_belief(am.machine(), AgentChannel::realizable(am, (Vec(2) << 0.05, 0.0).finished()), FitConfig{}, 50);
  EXPECT_EQ(run.verify.residuals.size(), 50u);
  EXPECT_LT(run.verify.mean_residual, 1e-3);
  EXPECT_LE(run.verify.mean_residual, run.verify.bound + 1e-9);
  EXPECT_TRUE(run.verify.pass);
}

TEST(Verify, ResidualBoundOnRandomWorlds) {
  SeededRng rng(56);
  for (int i = 0; i < 20; ++i) {
    const auto d = static_cast<Eigen::Index>(1 + rng.index(3));
    const auto am = random_machine(rng, d);
    const auto mc = am.machine();
    FitConfig cfg;
    cfg.seed = 100 + static_cast<std::uint64_t>(i);
    cfg.epochs = 300;
    cfg.tol = 1e9;  // keep the partially fitted models
    AgentChannel agent = AgentChannel::affine(rand_matrix(rng, d, d, 0.5), rand_matrix(rng, d, d, 0.2), rand_vec(rng, d));
    auto run = run_self_belief(mc, agent, cfg, 40);
    EXPECT_LE(run.verify.mean_residual, run.verify.bound + 1e-9);
  }
}

TEST(Verify, IgnoringAgentCollapsesToBetaResidual) {
  const auto am = toy_machine();
  const auto mc = am.machine();
  SeededRng rng(57);
  auto agent = AgentChannel::ignore(rand_matrix(rng, 2, 2, 0.2), rand_vec(rng, 2));
  FitConfig cfg;
  cfg.tol = 1e9;
  auto run = run_self_belief(mc, agent, cfg, 50);
  // With an exact self-model the loop residual is the beta residual at w = beta(x).
  Context history;
  SeededRng world(cfg.seed);
  double red = 0.0;
  for (std::size_t r = 0; r < 50; ++r) {
    Vec x(2);
    x(0) = world.uniform(-1, 1);
    x(1) = world.uniform(-1, 1);
    Context with_x = history, with_w = history;
    with_x.push_back(x);
    const Vec w = instantiate(run.beta.model, x);
    with_w.push_back(w);
    red += (agent(mc, with_x, w) - mc(with_w, w)).norm();
    history.push_back(x);
    history.push_back(agent(mc, with_x, instantiate(run.b, x)));
  }
  EXPECT_NEAR(run.verify.mean_residual, red / 50.0, 1e-6);
  EXPECT_GT(run.verify.mean_residual, 1e-3);
}

TEST(Verify, PerturbedInjectionIsWorse) {
  const auto am = toy_machine();
  const auto mc = am.machine();
  const auto agent = AgentChannel::realizable(am, Vec::Zero(2));
  auto run = run_self_belief(mc, agent, FitConfig{}, 50);
  SeededRng rng(58);
  auto noisy = run.b;
  noisy.j += rand_matrix(rng, 2, 2, 0.1);
  auto rep = verify_self_confirmation(mc, agent, run.s.model, run.beta.model, noisy, 50, 1e-3, 7);
  EXPECT_GT(rep.mean_residual, run.verify.mean_residual);
}

TEST(Verify, Deterministic) {
  const auto am = toy_machine();
  const auto agent = AgentChannel::realizable(am, Vec::Zero(2));
  auto a = run_self_belief(am.machine(), agent, FitConfig{}, 20);
  auto b = run_self_belief(am.machine(), agent, FitConfig{}, 20);
  EXPECT_EQ(a.verify.residuals, b.verify.residuals);
  EXPECT_EQ(a.s.report.residuals, b.s.report.residuals);
  EXPECT_EQ(a.b.j, b.b.j);
}
