#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "session.hpp"

namespace langlab::cli {

std::map<std::string, Handler>& handlers() {
  static std::map<std::string, Handler> table;
  return table;
}

const std::vector<std::string>& demo_names() {
  static const std::vector<std::string> names{"groucho", "pizza", "netflix-fca", "netflix-lsa", "tobe", "chsw",
                                              "self-belief"};
  return names;
}

namespace {

struct Verb {
  const char* name;
  const char* help;
  std::vector<std::pair<const char*, std::string Options::*>> text_flags;
  std::vector<std::pair<const char*, std::size_t Options::*>> count_flags;
  std::vector<const char*> required;
};

// The command surface: <module> <verb> --flags.
const std::vector<std::pair<std::pair<const char*, const char*>, std::vector<Verb>>>& surface() {
  using O = Options;
  static const std::vector<std::pair<std::pair<const char*, const char*>, std::vector<Verb>>> table{
      {{"grammar", "Formal grammars and Earley parsing"},
       {{"parse", "Parse a sentence; report trees and dependency arcs",
         {{"--grammar", &O::grammar}, {"--input", &O::input}},
         {{"--max-trees", &O::max_trees}},
         {"--grammar", "--input"}},
        {"enumerate", "List the language up to a length", {{"--grammar", &O::grammar}},
         {{"--max-len", &O::max_len}, {"--max-steps", &O::max_steps}}, {"--grammar"}},
        {"classify", "Chomsky type of the grammar and of each rule", {{"--grammar", &O::grammar}}, {}, {"--grammar"}}}},
      {{"pregroup", "Pregroup type checking"},
       {{"check", "Reduce a sentence to the lexicon target",
         {{"--lexicon", &O::lexicon}, {"--input", &O::input}}, {}, {"--lexicon", "--input"}}}},
      {{"vsm", "Vector space model"},
       {{"sim", "Inner product and cosine of two documents",
         {{"--matrix", &O::matrix}, {"--a", &O::a}, {"--b", &O::b}}, {}, {"--matrix", "--a", "--b"}},
        {"tfidf", "TF*IDF weights per document", {{"--matrix", &O::matrix}, {"--doc", &O::doc}}, {}, {"--matrix"}}}},
      {{"concepts", "Formal concept analysis and latent semantics"},
       {{"fca", "Enumerate formal concepts", {{"--context", &O::context}}, {}, {"--context"}},
        {"lsa", "Singular value decomposition of a rating matrix", {{"--matrix", &O::matrix}}, {{"--rank", &O::rank}},
         {"--matrix"}}}},
      {{"channel", "Stochastic channels"},
       {{"classify", "Feedback, feedforward and memory restrictions", {{"--channel", &O::channel}}, {}, {"--channel"}},
        {"ash", "Check the memoryless product formula",
         {{"--channel", &O::channel}, {"--inputs", &O::inputs}, {"--outputs", &O::outputs}}, {}, {"--channel"}}}},
      {{"ngram", "N-gram models"},
       {{"fit", "Count n-grams of a text corpus", {{"--corpus", &O::corpus}, {"--out", &O::out}}, {{"--n", &O::n}},
         {"--corpus"}},
        {"prob", "Phrase probability by frequency, chain rule and N-gram approximation",
         {{"--corpus", &O::corpus}, {"--phrase", &O::phrase}}, {{"--n", &O::n}}, {"--corpus", "--phrase"}},
        {"generate", "Sample a continuation",
         {{"--model", &O::model}, {"--corpus", &O::corpus}, {"--context", &O::context}},
         {{"--n", &O::n}, {"--length", &O::length}}, {}}}},
      {{"neural", "Neural networks and attention"},
       {{"train", "Train a one-hidden-layer net on a task",
         {{"--task", &O::task}, {"--out", &O::out}}, {{"--width", &O::width}, {"--epochs", &O::epochs}}, {"--task"}},
        {"gradcheck", "Backprop against central differences", {{"--model", &O::model}}, {}, {"--model"}},
        {"attn-demo", "Self-attention on a random instance",
         {}, {{"--dim", &O::dim}, {"--keys", &O::keys}, {"--tokens", &O::tokens}}, {}}}},
      {{"belief", "Self-confirming beliefs"},
       {{"demo", "Fit, build and verify a self-confirming model", {{"--scenario", &O::scenario}},
         {{"--rounds", &O::rounds}}, {"--scenario"}}}},
  };
  return table;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

void flatten(const Json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object() && !j.empty()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array() && !j.empty() && std::any_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); })) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out << prefix << " = " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

std::filesystem::path fixture_dir() {
  if (const char* env = std::getenv("LANGPROC_FIXTURES"); env && *env) return env;
#ifdef LANGLAB_FIXTURES_DIR
  return LANGLAB_FIXTURES_DIR;
#else
  return "fixtures";
#endif
}

}  // namespace

void register_commands();  // commands.cpp

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  register_commands();
  Session session;
  session.fixtures = fixture_dir();
  Options opts;
  std::string chosen;

  CLI::App app{"Language-processing toolkit: grammars, semantics, probability, networks"};
  app.name("langlab");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--format", session.format, "Report rendering")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--seed", session.seed, "Seed for randomized commands");
  app.add_option("--tol", session.tol, "Numeric tolerance override");

  for (const auto& [module, verbs] : surface()) {
    auto* m = app.add_subcommand(module.first, module.second);
    m->require_subcommand(1);
    for (const auto& verb : verbs) {
      auto* v = m->add_subcommand(verb.name, verb.help);
      for (const auto& [flag, field] : verb.text_flags) {
        auto* opt = v->add_option(flag, opts.*field);
        if (std::find(verb.required.begin(), verb.required.end(), std::string_view(flag)) != verb.required.end())
          opt->required();
      }
      for (const auto& [flag, field] : verb.count_flags) v->add_option(flag, opts.*field);
      if (std::string_view(verb.name) == "train") v->add_option("--lr", opts.lr);
      const std::string name = std::string(module.first) + " " + verb.name;
      v->callback([&chosen, name] { chosen = name; });
    }
  }
  auto* demo = app.add_subcommand("demo", "Run a bundled worked example end to end");
  demo->add_option("name", opts.demo, "groucho | pizza | netflix-fca | netflix-lsa | tobe | chsw | self-belief")->required();
  demo->callback([&chosen] { chosen = "demo"; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // Help requests exit 0 with the text on `out`; everything else is usage.
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  for (const auto& a : args) session.digest = fnv1a(a, fnv1a(std::string_view("\0", 1), session.digest));
  const auto start = std::chrono::steady_clock::now();
  Json results;
  try {
    results = handlers().at(chosen)(session, opts);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << io::dump(Json{{"error", {{"code", std::string(to_string(e.code()))}, {"message", e.detail()}}},
                         {"command", chosen == "demo" ? "demo " + opts.demo : chosen}});
    return 1;
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  Json report{{"command", chosen == "demo" ? "demo " + opts.demo : chosen},
              {"inputs_digest", "fnv1a64:" + hex64(session.digest)},
              {"results", results},
              {"timing", {{"elapsed_ms", ms}}}};
  if (session.format == "json") {
    out << io::dump(report);
  } else {
    out << "command = " << report["command"].get<std::string>() << "\n"
        << "inputs_digest = " << report["inputs_digest"].get<std::string>() << "\n";
    flatten(results, "", out);
    out << "timing.elapsed_ms = " << ms << "\n";
  }
  return 0;
}

}  // namespace langlab::cli
