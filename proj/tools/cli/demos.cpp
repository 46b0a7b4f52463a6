#include <algorithm>
#include <cmath>
#include <set>

#include "langlab/grammar/earley.hpp"
#include "session.hpp"

namespace langlab::cli {

namespace {

Json demo_groucho(Session& s) {
  const auto g = s.fixture<grammar::Grammar>("groucho.json");
  const auto tokens = text::split_ws("i shot an elephant in my pajamas");
  const auto forest = grammar::parse(g, tokens);
  const auto trees = grammar::extract_trees(forest);
  const auto heads = grammar::head_table(g.rules());
  Json shown = Json::array();
  std::set<std::string> in_heads;
  for (const auto& t : trees) {
    Json arcs = Json::array();
    for (const auto& a : grammar::dependency_arcs(t, heads)) {
      arcs.push_back(tokens[a.head] + " -> " + tokens[a.dependent]);
      if (tokens[a.dependent] == "in") in_heads.insert(tokens[a.head]);
    }
    shown.push_back({{"bracketed", grammar::to_string(t)}, {"dependency_arcs", arcs}});
  }
  const auto count = grammar::count_parses(forest);
  const std::set<std::string> want{"elephant", "shot"};
  return {{"trees", shown},
          {"checks",
           {check("parse_count", 2, count, count == 2),
            check("heads of 'in'", want, in_heads, in_heads == want)}}};
}

Json demo_pizza(Session& s) {
  const auto m = s.fixture<vsm::TermDocMatrix>("pizzas.csv");
  const auto x = vsm::doc_vector(m, "White"), y = vsm::doc_vector(m, "Hawaiian");
  const double ip = vsm::inner_product(x, y), cos = vsm::cosine_sim(x, y);
  const auto big = s.fixture<vsm::TermDocMatrix>("pizza_ingredients.csv");
  const auto flour = vsm::term_vector(big, "flour").coords;
  return {{"inner_product", ip},
          {"cosine", cos},
          {"ingredient_matrix", {{"terms", big.terms().size()}, {"docs", big.docs().size()}, {"flour", flour}}},
          {"checks",
           {check("inner_product(White, Hawaiian)", 13800, ip, ip == 13800.0),
            check("cosine(White, Hawaiian) within 1e-4", 0.595847, cos, std::abs(cos - 0.595847) <= 1e-4),
            check("ingredient matrix shape", Json::array({20, 3}), Json::array({big.terms().size(), big.docs().size()}),
                  big.terms().size() == 20 && big.docs().size() == 3)}}};
}

Json demo_netflix_fca(Session& s) {
  const auto r = s.fixture<concepts::Context>("ratings.csv");
  const auto cs = concepts::enumerate_concepts(r);
  Json list = Json::array();
  for (const auto& c : cs) list.push_back({{"extent", r.user_ids(c.extent)}, {"intent", r.item_ids(c.intent)}});
  const bool cover = concepts::verify_cover(r, cs);
  return {{"concepts", list},
          {"checks", {check("concept count", 4, cs.size(), cs.size() == 4), check("verify_cover", true, cover, cover)}}};
}

Json demo_netflix_lsa(Session& s) {
  const auto m = s.fixture<io::LabeledMatrix>("ratings_minor.csv");
  // Entries are rounded to two decimals, so anything below that noise is dropped.
  const auto svd = concepts::svd(m.values, 0.06);
  const double recon = (concepts::reconstruct(svd) - m.values).cwiseAbs().maxCoeff();
  const bool two = svd.rank() == 2;
  const double s1 = svd.rank() > 0 ? svd.sigma(0) : 0.0, s2 = two ? svd.sigma(1) : 0.0;
  const double trunc = (concepts::reconstruct(concepts::truncate(svd, 1)) - m.values).norm();
  return {{"singular_values", io::from_vec(svd.sigma)},
          {"left", io::from_matrix(svd.left)},
          {"right", io::from_matrix(svd.right)},
          {"checks",
           {check("rank", 2, svd.rank(), two),
            check("singular values within 0.06", Json::array({3, 1}), io::from_vec(svd.sigma),
                  two && std::abs(s1 - 3.0) <= 0.06 && std::abs(s2 - 1.0) <= 0.06),
            check("reconstruction within 0.06", 0.0, recon, recon <= 0.06),
            check("rank-1 Frobenius error near sigma_2", s2, trunc, std::abs(trunc - s2) <= 0.06)}}};
}

Json demo_tobe(Session& s) {
  const auto ch = s.fixture<stochastic::Channel>("tobe.json");
  const stochastic::History xs{0, 0}, ys{1, 0};
  const double lhs = stochastic::sequence_conditional(ch, xs, ys), rhs = stochastic::ash_product(ch, xs, ys);
  const auto c = stochastic::classify(ch);
  return {{"inputs", {ch.inputs[0], ch.inputs[0]}},
          {"outputs", {ch.outputs[1], ch.outputs[0]}},
          {"lhs", lhs},
          {"rhs", rhs},
          {"class", {{"feedback_free", c.feedback_free}, {"feedforward_free", c.feedforward_free}, {"memoryless", c.memoryless}}},
          {"checks",
           {check("true conditional", 0.0, lhs, lhs == 0.0), check("product formula", 0.25, rhs, rhs == 0.25),
            check("has feedback", false, c.feedback_free, !c.feedback_free)}}};
}

Json demo_chsw(Session& s) {
  const auto task = s.fixture<neural::LearningTask>("xy_task.json");
  neural::TrainConfig cfg;
  cfg.seed = s.need_seed("demo chsw");
  const auto t = neural::train_wide(task, 16, cfg);
  const double err = neural::max_grid_error(t.net, 2, 41, [](const neural::Vec& x) { return x(0) * x(1); });
  return {{"width", 16},
          {"epochs", cfg.epochs},
          {"seed", cfg.seed},
          {"final_risk", t.record.risk.back()},
          {"checks", {check("max grid error on 41x41 below", 0.08, err, err < 0.08)}}};
}

Json demo_self_belief(Session& s) {
  auto sc = s.fixture<belief::Scenario>("self_belief.json");
  sc.cfg.seed = s.need_seed("demo self-belief");
  const auto run = belief::run_self_belief(sc.machine.machine(), sc.agent, sc.cfg, 50);
  const auto& v = run.verify;
  return {{"seed", sc.cfg.seed},
          {"rounds", v.rounds},
          {"self_model_held_out", run.s.report.mean_residual},
          {"beta_held_out", run.beta.report.mean_residual},
          {"checks",
           {check("mean residual below", 1e-3, v.mean_residual, v.mean_residual < 1e-3),
            check("mean residual within fit bound + 1e-9", v.bound, v.mean_residual, v.mean_residual <= v.bound + 1e-9)}}};
}

}  // namespace

Json run_demo(Session& s, const Options& o) {
  static const std::map<std::string, Json (*)(Session&)> demos{
      {"groucho", demo_groucho},   {"pizza", demo_pizza}, {"netflix-fca", demo_netflix_fca},
      {"netflix-lsa", demo_netflix_lsa}, {"tobe", demo_tobe}, {"chsw", demo_chsw},
      {"self-belief", demo_self_belief}};
  auto it = demos.find(o.demo);
  require(it != demos.end(), Errc::UnknownDemo, "no demo named '" + o.demo + "'");
  Json r = it->second(s);
  bool pass = true;
  for (const auto& c : r["checks"]) pass = pass && c["pass"].get<bool>();
  r["demo"] = o.demo;
  r["pass"] = pass;
  return r;
}

}  // namespace langlab::cli
