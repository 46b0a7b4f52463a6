#pragma once

// Shared state for one CLI invocation; internal to the tool.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "cli.hpp"
#include "langlab/io/io.hpp"

namespace langlab::cli {

using io::Json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every flag any subcommand takes; each handler reads the ones it declared.
struct Options {
  std::string grammar, input, lexicon, matrix, a, b, doc, context, channel, corpus, model, phrase, task, scenario, out,
      inputs, outputs, demo;
  std::size_t n = 2, length = 20, width = 16, epochs = 5000, max_len = 6, max_steps = 200000, max_trees = 100, rank = 0,
              rounds = 50, dim = 3, keys = 2, tokens = 4;
  double lr = 0.01;
};

class Session {
 public:
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::filesystem::path fixtures;
  std::uint64_t digest = kFnvOffset;

  // Reads a file named on the command line, falling back to the fixture
  // directory for bare names, and folds its bytes into the digest.
  std::string read(const std::string& name) {
    std::filesystem::path p = name;
    if (!std::filesystem::exists(p) && p.is_relative() && std::filesystem::exists(fixtures / p)) p = fixtures / p;
    auto text = io::read_file(p);
    digest = fnv1a(text, fnv1a("\x1f", digest));
    return text;
  }

  template <class T>
  T load(const std::string& name) {
    const auto text = read(name);
    try {
      return io::decode<T>(text);
    } catch (const Error& e) {
      throw Error(e.code(), name + ": " + e.detail());
    }
  }

  // Demos always read the fixture directory.
  template <class T>
  T fixture(const std::string& name) {
    return load<T>((fixtures / name).string());
  }

  std::uint64_t need_seed(const std::string& command) const {
    if (!seed) throw UsageError(command + " is randomized and needs --seed");
    return *seed;
  }

  double tol_or(double fallback) const { return tol.value_or(fallback); }
};

using Handler = std::function<Json(Session&, const Options&)>;

// name ("grammar parse", "demo", ...) -> handler
std::map<std::string, Handler>& handlers();

Json run_demo(Session& s, const Options& o);

// A named comparison against an expected value.
inline Json check(const std::string& name, const Json& expected, const Json& actual, bool pass) {
  return Json{{"name", name}, {"expected", expected}, {"actual", actual}, {"pass", pass}};
}

}  // namespace langlab::cli
