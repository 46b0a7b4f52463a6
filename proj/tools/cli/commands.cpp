#include <algorithm>
#include <numeric>

#include <boost/rational.hpp>

#include "langlab/grammar/earley.hpp"
#include "langlab/neural/attention.hpp"
#include "session.hpp"

namespace langlab::cli {

namespace {

using Q = boost::rational<std::int64_t>;

std::string rational_text(const Q& q) { return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator()); }

// ---------------------------------------------------------------------------
// grammar

Json grammar_parse(Session& s, const Options& o) {
  const auto g = s.load<grammar::Grammar>(o.grammar);
  const auto tokens = text::split_ws(o.input);
  const auto forest = grammar::parse(g, tokens);
  Json r{{"tokens", tokens}, {"recognized", forest.recognized()}, {"parse_count", grammar::count_parses(forest)}};
  const auto heads = grammar::head_table(g.rules());
  const bool headed = !heads.empty();
  r["trees"] = Json::array();
  for (const auto& t : grammar::extract_trees(forest, o.max_trees)) {
    Json tree{{"bracketed", grammar::to_string(t)}};
    if (headed) {
      tree["dependency_arcs"] = Json::array();
      for (const auto& a : grammar::dependency_arcs(t, heads)) {
        Json arc{{"head", a.head}, {"dependent", a.dependent}, {"head_word", tokens[a.head]},
                 {"dependent_word", tokens[a.dependent]}};
        if (a.label) arc["label"] = *a.label;
        tree["dependency_arcs"].push_back(arc);
      }
    }
    r["trees"].push_back(tree);
  }
  return r;
}

Json grammar_enumerate(Session& s, const Options& o) {
  const auto g = s.load<grammar::Grammar>(o.grammar);
  const auto lang = grammar::enumerate_language(g, o.max_len, o.max_steps);
  Json strings = Json::array();
  for (const auto& w : lang.strings) strings.push_back(text::join(w));
  return {{"max_len", o.max_len}, {"strings", strings}, {"exact", lang.exact}, {"pruned", lang.pruned}};
}

Json grammar_classify(Session& s, const Options& o) {
  const auto g = s.load<grammar::Grammar>(o.grammar);
  Json rules = Json::array();
  for (const auto& r : g.rules())
    rules.push_back({{"rule", text::join(r.lhs) + " -> " + text::join(r.rhs)}, {"type", grammar::rule_type(g, r)}});
  return {{"type", grammar::classify(g)}, {"non_contracting", g.non_contracting()}, {"rules", rules},
          {"warnings", g.warnings()}};
}

// ---------------------------------------------------------------------------
// pregroup

Json pregroup_check(Session& s, const Options& o) {
  const auto lex = s.load<pregroup::Lexicon>(o.lexicon);
  const auto words = text::split_ws(o.input);
  const auto ok = pregroup::check_sentence(lex, words);
  Json r{{"words", words}, {"target", pregroup::format_type(lex.target)}, {"reduces", ok.has_value()}};
  if (!ok) return r;
  Json assignment = Json::array();
  for (const auto& t : ok->assignment) assignment.push_back(pregroup::format_type(t));
  r["assignment"] = assignment;
  r["product"] = pregroup::format_type(ok->product);
  r["residual"] = pregroup::format_type(ok->reduction.residual);
  r["contractions"] = ok->reduction.events.size();
  r["arcs"] = pregroup::arcs(ok->reduction, ok->product, &lex.order);
  return r;
}

// ---------------------------------------------------------------------------
// vsm

Json vsm_sim(Session& s, const Options& o) {
  const auto m = s.load<vsm::TermDocMatrix>(o.matrix);
  const auto x = vsm::doc_vector(m, o.a), y = vsm::doc_vector(m, o.b);
  return {{"a", o.a},
          {"b", o.b},
          {"inner_product", vsm::inner_product(x, y)},
          {"length_a", vsm::length(x)},
          {"length_b", vsm::length(y)},
          {"cosine", vsm::cosine_sim(x, y)}};
}

Json vsm_tfidf(Session& s, const Options& o) {
  const auto m = s.load<vsm::TermDocMatrix>(o.matrix);
  std::vector<std::string> docs = m.docs();
  if (!o.doc.empty()) {
    vsm::doc_vector(m, o.doc);  // validates the id
    docs = {o.doc};
  }
  Json idf = Json::object(), weights = Json::object();
  for (const auto& t : m.terms()) idf[t] = vsm::idf(m, t);
  for (const auto& d : docs)
    for (const auto& t : m.terms()) weights[d][t] = vsm::tfidf(m, d, t);
  return {{"idf", idf}, {"tfidf", weights}};
}

// ---------------------------------------------------------------------------
// concepts

Json concepts_fca(Session& s, const Options& o) {
  const auto r = s.load<concepts::Context>(o.context);
  const auto cs = concepts::enumerate_concepts(r);
  Json list = Json::array();
  for (const auto& c : cs) list.push_back({{"extent", r.user_ids(c.extent)}, {"intent", r.item_ids(c.intent)}});
  return {{"concept_count", cs.size()},
          {"concepts", list},
          {"order", concepts::lattice_order(cs)},
          {"cover_verified", concepts::verify_cover(r, cs)}};
}

Json concepts_lsa(Session& s, const Options& o) {
  const auto m = s.load<io::LabeledMatrix>(o.matrix);
  const auto svd = concepts::svd(m.values, s.tol_or(1e-9));
  const double recon = (concepts::reconstruct(svd) - m.values).cwiseAbs().maxCoeff();
  Json r{{"rank", svd.rank()},
         {"singular_values", io::from_vec(svd.sigma)},
         {"left", io::from_matrix(svd.left)},
         {"right", io::from_matrix(svd.right)},
         {"rows", m.rows},
         {"cols", m.cols},
         {"max_reconstruction_error", recon}};
  if (o.rank > 0) {
    const auto k = std::min<Eigen::Index>(static_cast<Eigen::Index>(o.rank), svd.rank());
    const auto t = concepts::truncate(svd, k);
    r["truncated_rank"] = k;
    r["truncation_frobenius_error"] = (concepts::reconstruct(t) - m.values).norm();
    r["dropped_singular_norm"] = svd.sigma.tail(svd.rank() - k).norm();
  }
  return r;
}

// ---------------------------------------------------------------------------
// channel

std::vector<std::string> names(const std::vector<std::string>& alphabet, const stochastic::History& h) {
  std::vector<std::string> out;
  for (auto i : h) out.push_back(alphabet[i]);
  return out;
}

stochastic::History symbols(const std::vector<std::string>& alphabet, const std::string& joined) {
  stochastic::History h;
  for (const auto& name : text::split_on(joined, '|')) {
    auto it = std::find(alphabet.begin(), alphabet.end(), name);
    require(it != alphabet.end(), Errc::UnknownToken, "symbol '" + name + "' is not in the alphabet");
    h.push_back(static_cast<std::size_t>(it - alphabet.begin()));
  }
  return h;
}

Json channel_classify(Session& s, const Options& o) {
  const auto ch = s.load<stochastic::Channel>(o.channel);
  const double tol = s.tol_or(1e-9);
  const auto c = stochastic::classify(ch, tol);
  return {{"feedback_free", c.feedback_free},
          {"feedforward_free", c.feedforward_free},
          {"memoryless", c.memoryless},
          {"ash_holds", stochastic::ash_holds(ch, tol)}};
}

Json violation_json(const stochastic::Channel& ch, const stochastic::AshViolation& v) {
  return {{"inputs", names(ch.inputs, v.inputs)}, {"outputs", names(ch.outputs, v.outputs)}, {"lhs", v.conditional},
          {"rhs", v.product}};
}

Json channel_ash(Session& s, const Options& o) {
  const auto ch = s.load<stochastic::Channel>(o.channel);
  const double tol = s.tol_or(1e-9);
  if (!o.inputs.empty() || !o.outputs.empty()) {
    const auto xs = symbols(ch.inputs, o.inputs), ys = symbols(ch.outputs, o.outputs);
    require(xs.size() == ys.size(), Errc::InvalidArgument, "--inputs and --outputs need the same length");
    const double lhs = stochastic::sequence_conditional(ch, xs, ys), rhs = stochastic::ash_product(ch, xs, ys);
    return {{"inputs", names(ch.inputs, xs)}, {"outputs", names(ch.outputs, ys)}, {"lhs", lhs}, {"rhs", rhs},
            {"holds", std::abs(lhs - rhs) <= tol}};
  }
  const auto all = stochastic::ash_violations(ch, tol);
  Json r{{"holds", all.empty()}, {"violation_count", all.size()}};
  if (all.empty()) return r;
  // Headline an impossible outcome the product still predicts, if there is one.
  auto head = std::find_if(all.begin(), all.end(), [&](const auto& v) { return v.conditional <= tol; });
  if (head == all.end()) head = all.begin();
  r["counterexample"] = violation_json(ch, *head);
  r["first_in_scan_order"] = violation_json(ch, all.front());
  return r;
}

// ---------------------------------------------------------------------------
// ngram

Json ngram_fit(Session& s, const Options& o) {
  const auto c = ngram::Corpus::from_text(s.read(o.corpus));
  const auto m = ngram::fit(c, o.n);
  if (!o.out.empty()) io::save(m, o.out);
  std::size_t by_len[16] = {};
  for (const auto& [g, k] : m.counts()) ++by_len[std::min<std::size_t>(g.size(), 15)];
  Json distinct = Json::array();
  for (std::size_t n = 1; n <= m.order() && n < 16; ++n) distinct.push_back(by_len[n]);
  return {{"order", m.order()}, {"tokens", m.total()}, {"vocabulary_size", m.vocabulary().size()},
          {"distinct_ngrams_by_length", distinct}};
}

Json ngram_prob(Session& s, const Options& o) {
  const auto c = ngram::Corpus::from_text(s.read(o.corpus));
  const auto phrase = text::tokenize(o.phrase);
  const auto m = ngram::fit(c, o.n);
  return {{"phrase", phrase},
          {"order", o.n},
          {"frequency", rational_text(ngram::phrase_freq<Q>(c, phrase))},
          {"chain", rational_text(ngram::phrase_prob_chain<Q>(c, phrase))},
          {"ngram", rational_text(ngram::phrase_prob_ngram<Q>(m, phrase))},
          {"frequency_value", ngram::phrase_freq(c, phrase)},
          {"ngram_value", ngram::phrase_prob_ngram(m, phrase)}};
}

Json ngram_generate(Session& s, const Options& o) {
  const auto seed = s.need_seed("ngram generate");
  require(!o.model.empty() || !o.corpus.empty(), Errc::InvalidArgument, "give --model or --corpus");
  const auto m = !o.model.empty() ? s.load<ngram::NGramModel>(o.model)
                                  : ngram::fit(ngram::Corpus::from_text(s.read(o.corpus)), o.n);
  const auto context = text::split_ws(o.context);
  SeededRng rng(seed);
  return {{"order", m.order()}, {"context", context}, {"generated", ngram::generate(m, context, o.length, rng)}};
}

// ---------------------------------------------------------------------------
// neural

Json neural_train(Session& s, const Options& o) {
  const auto task = s.load<neural::LearningTask>(o.task);
  neural::TrainConfig cfg;
  cfg.seed = s.need_seed("neural train");
  cfg.epochs = o.epochs;
  cfg.lr = o.lr;
  const auto t = neural::train_wide(task, o.width, cfg);
  if (!o.out.empty()) io::save(t.net.deep(), o.out);
  double worst = 0.0;
  for (std::size_t i = 0; i < task.xs.size(); ++i)
    worst = std::max(worst, (neural::eval_wide(t.net, task.xs[i]) - task.ys[i]).cwiseAbs().maxCoeff());
  Json curve = Json::array();
  const auto& risk = t.record.risk;
  for (std::size_t k = 0; k <= 10 && !risk.empty(); ++k) curve.push_back(risk[(risk.size() - 1) * k / 10]);
  return {{"width", o.width}, {"epochs", o.epochs}, {"seed", cfg.seed}, {"final_risk", risk.empty() ? 0.0 : risk.back()},
          {"risk_curve", curve}, {"max_train_error", worst}};
}

Json neural_gradcheck(Session& s, const Options& o) {
  const auto net = s.load<neural::DeepNet>(o.model);
  SeededRng rng(s.need_seed("neural gradcheck"));
  neural::Vec x(net.input_dim()), y(net.output_dim());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(-1.0, 1.0);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = rng.uniform(-1.0, 1.0);
  const auto g = neural::grad_check(net, x, y);
  const double tol = s.tol_or(1e-4);
  return {{"max_rel_error", g.max_rel_error}, {"checked", g.checked}, {"skipped", g.skipped}, {"tolerance", tol},
          {"pass", g.max_rel_error < tol}};
}

Json neural_attn_demo(Session& s, const Options& o) {
  SeededRng rng(s.need_seed("neural attn-demo"));
  require(o.dim >= 1 && o.tokens >= 2, Errc::InvalidArgument, "attn-demo needs --dim >= 1 and --tokens >= 2");
  const auto d = static_cast<Eigen::Index>(o.dim);
  auto vec = [&] {
    neural::Vec v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = rng.uniform(-1.0, 1.0);
    return v;
  };
  neural::AttentionParams p;
  for (std::size_t l = 0; l < o.keys; ++l) {
    p.keys.push_back(vec());
    p.queries.push_back(vec());
  }
  for (Eigen::Index i = 0; i < d; ++i) p.values.push_back(vec());
  std::vector<neural::Vec> xs;
  for (std::size_t j = 0; j < o.tokens; ++j) xs.push_back(vec());
  const auto y = neural::self_attention_step(p, xs);

  auto shuffled = xs;
  std::reverse(shuffled.begin(), shuffled.end() - 1);  // query slot stays last
  const auto y_perm = neural::self_attention_step(p, shuffled);
  return {{"dim", o.dim}, {"keys", o.keys}, {"tokens", o.tokens}, {"output", io::from_vec(y)},
          {"permutation_invariant", y == y_perm}};
}

// ---------------------------------------------------------------------------
// belief

Json fit_json(const belief::FitReport& r) {
  return {{"final_risk", r.final_risk}, {"epochs", r.rounds}, {"held_out_residual", r.mean_residual}, {"pass", r.pass}};
}

Json belief_demo(Session& s, const Options& o) {
  auto sc = s.load<belief::Scenario>(o.scenario);
  sc.cfg.seed = s.need_seed("belief demo");
  if (s.tol) sc.cfg.tol = *s.tol;
  const auto run = belief::run_self_belief(sc.machine.machine(), sc.agent, sc.cfg, o.rounds);
  const auto& v = run.verify;
  return {{"agent", sc.agent.mode},
          {"seed", sc.cfg.seed},
          {"self_model_fit", fit_json(run.s.report)},
          {"beta_fit", fit_json(run.beta.report)},
          {"b", {{"base", io::from_vec(run.b.base)}, {"j", io::from_matrix(run.b.j)}}},
          {"rounds", v.rounds},
          {"mean_residual", v.mean_residual},
          {"bound", v.bound},
          {"within_bound", v.mean_residual <= v.bound + 1e-9},
          {"pass", v.pass}};
}

}  // namespace

void register_commands() {
  auto& h = handlers();
  if (!h.empty()) return;
  h["grammar parse"] = grammar_parse;
  h["grammar enumerate"] = grammar_enumerate;
  h["grammar classify"] = grammar_classify;
  h["pregroup check"] = pregroup_check;
  h["vsm sim"] = vsm_sim;
  h["vsm tfidf"] = vsm_tfidf;
  h["concepts fca"] = concepts_fca;
  h["concepts lsa"] = concepts_lsa;
  h["channel classify"] = channel_classify;
  h["channel ash"] = channel_ash;
  h["ngram fit"] = ngram_fit;
  h["ngram prob"] = ngram_prob;
  h["ngram generate"] = ngram_generate;
  h["neural train"] = neural_train;
  h["neural gradcheck"] = neural_gradcheck;
  h["neural attn-demo"] = neural_attn_demo;
  h["belief demo"] = belief_demo;
  h["demo"] = run_demo;
}

}  // namespace langlab::cli
