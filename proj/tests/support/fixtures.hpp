#pragma once

// Decode-then-encode for each fixture file, dispatching on the JSON format
// tag or the CSV file name.

#include <filesystem>
#include <optional>
#include <string>

#include "langlab/belief/belief.hpp"
#include "langlab/io/io.hpp"

namespace langlab::testdata {

inline const std::filesystem::path kFixtures = LANGLAB_FIXTURES_DIR;

// nullopt for files with no codec (plain text corpora).
inline std::optional<std::string> reencode_fixture(const std::filesystem::path& p) {
  using namespace io;
  const auto text = read_file(p);
  const auto name = p.filename().string();
  if (p.extension() == ".json") {
    const auto tag = parse_json(text).at("format").get<std::string>();
    if (tag == "grammar") return encode(decode<grammar::Grammar>(text));
    if (tag == "pregroup-lexicon") return encode(decode<pregroup::Lexicon>(text));
    if (tag == "channel") return encode(decode<stochastic::Channel>(text));
    if (tag == "ngram-model") return encode(decode<ngram::NGramModel>(text));
    if (tag == "neural-model") return encode(decode<neural::DeepNet>(text));
    if (tag == "neural-task") return encode(decode<neural::LearningTask>(text));
    if (tag == "belief-scenario") return encode(decode<belief::Scenario>(text));
    fail(Errc::SchemaError, name + ": no codec for format '" + tag + "'");
  }
  if (p.extension() == ".csv") {
    if (name == "ratings.csv") return encode(decode<concepts::Context>(text));
    if (name == "ratings_minor.csv") return encode(decode<LabeledMatrix>(text));
    return encode(decode<vsm::TermDocMatrix>(text));
  }
  return std::nullopt;
}

}  // namespace langlab::testdata
