#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "langlab/belief/belief.hpp"
#include "langlab/concepts/fca.hpp"
#include "langlab/concepts/lsa.hpp"
#include "langlab/error.hpp"
#include "langlab/grammar/grammar.hpp"
#include "langlab/neural/neural.hpp"
#include "langlab/ngram/ngram.hpp"
#include "langlab/pregroup/pregroup.hpp"
#include "langlab/stochastic/channel.hpp"
#include "langlab/vsm/vsm.hpp"

namespace langlab::io {

using Json = nlohmann::json;
inline constexpr int kVersion = 1;

// ---------------------------------------------------------------------------
// Files and text

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), Errc::IoError, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), Errc::IoError, "cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  require(static_cast<bool>(out), Errc::IoError, "write to '" + path.string() + "' failed");
}

struct Position {
  std::size_t line = 1, column = 1;
};

// 1-based line and column of the byte at `offset`.
inline Position position_of(std::string_view text, std::size_t offset) {
  Position p;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++p.line;
      p.column = 1;
    } else {
      ++p.column;
    }
  }
  return p;
}

[[noreturn]] inline void parse_fail(std::string_view text, std::size_t offset, const std::string& what) {
  const auto p = position_of(text, offset);
  fail(Errc::ParseError, "line " + std::to_string(p.line) + ", column " + std::to_string(p.column) + ": " + what);
}

inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    parse_fail(text, e.byte == 0 ? 0 : e.byte - 1, "malformed JSON");
  }
}

// Sorted keys (nlohmann objects are ordered maps), two-space indent, shortest
// round-trip doubles, trailing LF.
inline std::string dump(const Json& j) { return j.dump(2, ' ', false) + "\n"; }

inline std::string format_double(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

// ---------------------------------------------------------------------------
// Versioned documents

inline void check_fields(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  require(j.is_object(), Errc::SchemaError, std::string(where) + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == k;
    require(ok, Errc::SchemaError, "unknown field '" + k + "' in " + std::string(where));
  }
}

// Checks the format tag and version and returns the document.
inline const Json& open_document(const Json& j, std::string_view format) {
  require(j.is_object(), Errc::SchemaError, "document must be a JSON object");
  require(j.contains("format") && j["format"].is_string(), Errc::SchemaError, "document has no format tag");
  const auto tag = j["format"].get<std::string>();
  require(tag == format, Errc::SchemaError, "expected format '" + std::string(format) + "', found '" + tag + "'");
  require(j.contains("version"), Errc::VersionError, "document has no version");
  require(j["version"].is_number_integer() && j["version"].get<std::int64_t>() == kVersion, Errc::VersionError,
          "unsupported version " + j["version"].dump() + " (expected 1)");
  return j;
}

inline Json document(std::string_view format) { return Json{{"format", format}, {"version", kVersion}}; }

template <class T>
T field(const Json& j, std::string_view key, std::string_view where) {
  const std::string k(key);
  require(j.contains(k), Errc::SchemaError, "missing field '" + k + "' in " + std::string(where));
  try {
    return j[k].get<T>();
  } catch (const Json::exception&) {
    fail(Errc::SchemaError, "field '" + k + "' in " + std::string(where) + " has the wrong type");
  }
}

inline Eigen::VectorXd to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> from_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

inline Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows, std::string_view where) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    require(static_cast<Eigen::Index>(rows[i].size()) == c, Errc::SchemaError, "ragged matrix in " + std::string(where));
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = rows[i][k];
  }
  return m;
}

inline std::vector<std::vector<double>> from_matrix(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) rows[i].push_back(m(i, k));
  return rows;
}

// Row-major flat list with explicit shape.
inline Eigen::MatrixXd unflatten(const std::vector<double>& flat, Eigen::Index rows, Eigen::Index cols,
                                 std::string_view where) {
  require(static_cast<Eigen::Index>(flat.size()) == rows * cols, Errc::SchemaError,
          std::string(where) + " has " + std::to_string(flat.size()) + " weights, shape needs " +
              std::to_string(rows * cols));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = flat[static_cast<std::size_t>(i * cols + k)];
  return m;
}

inline std::vector<double> flatten(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) out.push_back(m(i, k));
  return out;
}

// ---------------------------------------------------------------------------
// CSV: comma separated, double quotes around fields holding a comma, quote or
// newline, LF line ends.

using CsvRows = std::vector<std::vector<std::string>>;

inline CsvRows parse_csv(std::string_view text) {
  CsvRows rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, cell_started = false;
  std::size_t quote_open = 0;
  auto end_row = [&] {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
    row.clear();
    cell.clear();
    cell_started = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch != '"') {
        cell += ch;
      } else if (i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else {
        quoted = false;
        if (i + 1 < text.size() && text[i + 1] != ',' && text[i + 1] != '\n' && text[i + 1] != '\r')
          parse_fail(text, i + 1, "text after a closing quote");
      }
      continue;
    }
    if (ch == '"') {
      if (cell_started || !cell.empty()) parse_fail(text, i, "quote inside an unquoted field");
      quoted = true;
      cell_started = true;
      quote_open = i;
    } else if (ch == ',') {
      row.push_back(std::move(cell));
      cell.clear();
      cell_started = false;
    } else if (ch == '\n') {
      end_row();
    } else if (ch == '\r') {
      if (i + 1 >= text.size() || text[i + 1] != '\n') parse_fail(text, i, "bare carriage return");
    } else {
      cell += ch;
      cell_started = true;
    }
  }
  if (quoted) parse_fail(text, quote_open, "unterminated quoted field");
  if (cell_started || !cell.empty() || !row.empty()) end_row();
  return rows;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string write_csv(const CsvRows& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(row[i]);
    }
    out += '\n';
  }
  return out;
}

// Labelled grid: header row of column ids (leading corner cell empty), then one
// row per row id.
struct Grid {
  std::vector<std::string> rows, cols;
  std::vector<std::vector<std::string>> cells;
};

inline Grid parse_grid(std::string_view text) {
  auto rows = parse_csv(text);
  require(!rows.empty(), Errc::SchemaError, "CSV has no header row");
  Grid g;
  require(rows[0].at(0).empty(), Errc::SchemaError, "CSV corner cell must be empty");
  g.cols.assign(rows[0].begin() + 1, rows[0].end());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    require(rows[r].size() == rows[0].size(), Errc::SchemaError,
            "CSV row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) + " cells, header has " +
                std::to_string(rows[0].size()));
    g.rows.push_back(rows[r][0]);
    g.cells.emplace_back(rows[r].begin() + 1, rows[r].end());
  }
  return g;
}

inline std::string write_grid(const Grid& g) {
  CsvRows rows;
  rows.push_back({""});
  rows[0].insert(rows[0].end(), g.cols.begin(), g.cols.end());
  for (std::size_t r = 0; r < g.rows.size(); ++r) {
    rows.push_back({g.rows[r]});
    rows.back().insert(rows.back().end(), g.cells[r].begin(), g.cells[r].end());
  }
  return write_csv(rows);
}

template <class T>
T parse_number(const std::string& s, std::string_view where) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size() && !s.empty(), Errc::SchemaError,
          "cell '" + s + "' in " + std::string(where) + " is not a number");
  return v;
}

// A real matrix with row and column ids.
struct LabeledMatrix {
  std::vector<std::string> rows, cols;
  Eigen::MatrixXd values;

  friend bool operator==(const LabeledMatrix& a, const LabeledMatrix& b) {
    return a.rows == b.rows && a.cols == b.cols && a.values == b.values;
  }
};

// ---------------------------------------------------------------------------
// Codecs. Codec<T>::encode gives canonical text, Codec<T>::decode validates.

template <class T>
struct Codec;

template <>
struct Codec<grammar::Grammar> {
  static constexpr std::string_view format = "grammar";

  static std::string encode(const grammar::Grammar& g) {
    Json j = document(format);
    j["terminals"] = g.terminals();
    j["nonterminals"] = g.nonterminals();
    j["start"] = g.start();
    j["rules"] = Json::array();
    for (const auto& r : g.rules()) {
      Json rule{{"lhs", r.lhs}, {"rhs", r.rhs}};
      if (r.head) rule["head"] = *r.head;
      j["rules"].push_back(rule);
    }
    return dump(j);
  }

  static grammar::Grammar decode(std::string_view text) {
    const Json j = parse_json(text);
    open_document(j, format);
    check_fields(j, {"format", "version", "terminals", "nonterminals", "start", "rules"}, "grammar");
    grammar::RawGrammar raw;
    raw.terminals = field<std::vector<std::string>>(j, "terminals", "grammar");
    raw.nonterminals = field<std::vector<std::string>>(j, "nonterminals", "grammar");
    raw.start = field<std::string>(j, "start", "grammar");
    const Json rules = field<Json>(j, "rules", "grammar");
    require(rules.is_array(), Errc::SchemaError, "rules must be a list");
    for (const auto& r : rules) {
      check_fields(r, {"lhs", "rhs", "head"}, "grammar rule");
      grammar::Rule rule{field<grammar::Form>(r, "lhs", "rule"), field<grammar::Form>(r, "rhs", "rule"), {}};
      if (r.contains("head")) rule.head = field<std::size_t>(r, "head", "rule");
      raw.rules.push_back(std::move(rule));
    }
    return grammar::Grammar::validate(std::move(raw));
  }
};

template <>
struct Codec<pregroup::Lexicon> {
  static constexpr std::string_view format = "pregroup-lexicon";

  static std::string encode(const pregroup::Lexicon& lex) {
    Json j = document(format);
    j["target"] = pregroup::format_type(lex.target);
    j["words"] = Json::object();
    for (const auto& [w, types] : lex.words)
      for (const auto& t : types) j["words"][w].push_back(pregroup::format_type(t));
    if (!lex.generators.empty()) j["generators"] = lex.generators;
    if (!lex.order.pairs().empty()) {
      j["order"] = Json::array();
      for (const auto& [a, b] : lex.order.pairs()) j["order"].push_back({a, b});
    }
    return dump(j);
  }

  static pregroup::Lexicon decode(std::string_view text) {
    const Json j = parse_json(text);
    open_document(j, format);
    check_fields(j, {"format", "version", "target", "words", "generators", "order"}, "lexicon");
    pregroup::Lexicon lex;
    lex.target = pregroup::parse_type(field<std::string>(j, "target", "lexicon"));
    const Json words = field<Json>(j, "words", "lexicon");
    for (const auto& [w, types] : words.items()) {
      require(types.is_array(), Errc::SchemaError, "types of '" + w + "' must be a list");
      for (const auto& t : types) {
        require(t.is_string(), Errc::SchemaError, "types of '" + w + "' must be strings");
        lex.words[w].push_back(pregroup::parse_type(t.get<std::string>()));
      }
    }
    if (j.contains("generators")) lex.generators = field<std::vector<std::string>>(j, "generators", "lexicon");
    if (j.contains("order"))
      lex.order = pregroup::Poset(field<std::vector<std::pair<std::string, std::string>>>(j, "order", "lexicon"));
    lex.validate();
    return lex;
  }
};

template <>
struct Codec<vsm::TermDocMatrix> {
  static constexpr std::string_view format = "term-doc-csv";

  // Terms as rows, docs as columns.
  static std::string encode(const vsm::TermDocMatrix& c) {
    Grid g{c.terms(), c.docs(), {}};
    for (std::size_t t = 0; t < c.terms().size(); ++t) {
      g.cells.emplace_back();
      for (std::size_t d = 0; d < c.docs().size(); ++d) g.cells.back().push_back(std::to_string(c.at(d, t)));
    }
    return write_grid(g);
  }

  static vsm::TermDocMatrix decode(std::string_view text) {
    const auto g = parse_grid(text);
    std::vector<std::vector<std::int64_t>> counts(g.cols.size(), std::vector<std::int64_t>(g.rows.size()));
    for (std::size_t t = 0; t < g.rows.size(); ++t)
      for (std::size_t d = 0; d < g.cols.size(); ++d) counts[d][t] = parse_number<std::int64_t>(g.cells[t][d], "term-doc CSV");
    return vsm::TermDocMatrix(g.cols, g.rows, counts);
  }
};

template <>
struct Codec<concepts::Context> {
  static constexpr std::string_view format = "context-csv";

  static std::string encode(const concepts::Context& r) {
    Grid g{r.users(), r.items(), {}};
    for (const auto& row : r.incidence()) {
      g.cells.emplace_back();
      for (bool b : row) g.cells.back().push_back(b ? "1" : "0");
    }
    return write_grid(g);
  }

  static concepts::Context decode(std::string_view text) {
    const auto g = parse_grid(text);
    std::vector<concepts::Bits> rel;
    for (const auto& row : g.cells) {
      rel.emplace_back();
      for (const auto& cell : row) {
        require(cell == "0" || cell == "1", Errc::SchemaError, "context cells must be 0 or 1, found '" + cell + "'");
        rel.back().push_back(cell == "1");
      }
    }
    return concepts::Context(g.rows, g.cols, rel);
  }
};

template <>
struct Codec<LabeledMatrix> {
  static constexpr std::string_view format = "matrix-csv";

  static std::string encode(const LabeledMatrix& m) {
    Grid g{m.rows, m.cols, {}};
    for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
      g.cells.emplace_back();
      for (Eigen::Index k = 0; k < m.values.cols(); ++k) g.cells.back().push_back(format_double(m.values(i, k)));
    }
    return write_grid(g);
  }

  static LabeledMatrix decode(std::string_view text) {
    const auto g = parse_grid(text);
    LabeledMatrix m{g.rows, g.cols, Eigen::MatrixXd(g.rows.size(), g.cols.size())};
    for (std::size_t i = 0; i < g.rows.size(); ++i)
      for (std::size_t k = 0; k < g.cols.size(); ++k) {
        m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = parse_number<double>(g.cells[i][k], "matrix CSV");
        require(std::isfinite(m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k))), Errc::SchemaError,
                "matrix cells must be finite");
      }
    std::set<std::string> seen;
    for (const auto& r : m.rows) require(seen.insert("r" + r).second, Errc::SchemaError, "duplicate row id '" + r + "'");
    for (const auto& c : m.cols) require(seen.insert("c" + c).second, Errc::SchemaError, "duplicate column id '" + c + "'");
    return m;
  }
};

template <>
struct Codec<stochastic::Channel> {
  static constexpr std::string_view format = "channel";

  static std::string encode(const stochastic::Channel& ch) {
    Json j = document(format);
    j["inputs"] = ch.inputs;
    j["outputs"] = ch.outputs;
    j["horizon"] = ch.horizon;
    j["input_kernels"] = Json::object();
    j["output_kernels"] = Json::object();
    for (const auto& [h, row] : ch.input_kernels) j["input_kernels"][stochastic::history_key(ch, h)] = row;
    for (const auto& [h, row] : ch.output_kernels) j["output_kernels"][stochastic::history_key(ch, h)] = row;
    return dump(j);
  }

  static stochastic::History parse_key(const stochastic::Channel& ch, const std::string& key) {
    stochastic::History h;
    if (key.empty()) return h;
    for (const auto& name : text::split_on(key, '|')) {
      const auto& alphabet = h.size() % 2 == 0 ? ch.inputs : ch.outputs;
      auto it = std::find(alphabet.begin(), alphabet.end(), name);
      require(it != alphabet.end(), Errc::SchemaError, "history key '" + key + "' uses unknown symbol '" + name + "'");
      h.push_back(static_cast<std::size_t>(it - alphabet.begin()));
    }
    return h;
  }

  static stochastic::Row kernel_row(const Json& row, const std::string& key) {
    require(row.is_array(), Errc::SchemaError, "kernel row '" + key + "' must be a list");
    stochastic::Row out;
    for (const auto& p : row) {
      require(p.is_number(), Errc::SchemaError, "kernel row '" + key + "' must hold numbers");
      out.push_back(p.get<double>());
    }
    return out;
  }

  static stochastic::Channel decode(std::string_view text) {
    const Json j = parse_json(text);
    open_document(j, format);
    check_fields(j, {"format", "version", "inputs", "outputs", "horizon", "input_kernels", "output_kernels"}, "channel");
    stochastic::Channel ch;
    ch.inputs = field<std::vector<std::string>>(j, "inputs", "channel");
    ch.outputs = field<std::vector<std::string>>(j, "outputs", "channel");
    ch.horizon = field<std::size_t>(j, "horizon", "channel");
    for (const auto* names : {&ch.inputs, &ch.outputs}) {
      std::set<std::string> seen;
      for (const auto& n : *names) {
        require(!n.empty() && n.find('|') == std::string::npos, Errc::SchemaError, "symbol '" + n + "' is empty or holds '|'");
        require(seen.insert(n).second, Errc::SchemaError, "duplicate symbol '" + n + "'");
      }
    }
    const Json in = field<Json>(j, "input_kernels", "channel"), out = field<Json>(j, "output_kernels", "channel");
    require(in.is_object() && out.is_object(), Errc::SchemaError, "kernels must be objects keyed by history");
    for (const auto& [k, row] : in.items()) ch.input_kernels[parse_key(ch, k)] = kernel_row(row, k);
    for (const auto& [k, row] : out.items()) ch.output_kernels[parse_key(ch, k)] = kernel_row(row, k);
    ch.validate();
    return ch;
  }
};

template <>
struct Codec<ngram::NGramModel> {
  static constexpr std::string_view format = "ngram-model";

  // n-gram keys are their tokens joined by single spaces.
  static std::string encode(const ngram::NGramModel& m) {
    Json j = document(format);
    j["order"] = m.order();
    j["total"] = m.total();
    j["vocabulary"] = m.vocabulary();
    j["counts"] = Json::object();
    for (const auto& w : m.vocabulary())
      require(!w.empty() && w.find_first_of(" \t\n\r") == std::string::npos, Errc::SchemaError,
              "token '" + w + "' cannot be stored in an n-gram key");
    for (const auto& [g, k] : m.counts()) j["counts"][text::join(g)] = k;
    return dump(j);
  }

  static ngram::NGramModel decode(std::string_view text) {
    const Json j = parse_json(text);
    open_document(j, format);
    check_fields(j, {"format", "version", "order", "total", "vocabulary", "counts"}, "ngram model");
    std::map<text::Tokens, std::int64_t> counts;
    const Json raw = field<Json>(j, "counts", "ngram model");
    require(raw.is_object(), Errc::SchemaError, "counts must be an object");
    for (const auto& [k, v] : raw.items()) {
      require(v.is_number_integer(), Errc::SchemaError, "count of '" + k + "' must be an integer");
      counts[text::split_ws(k)] = v.get<std::int64_t>();
    }
    return ngram::NGramModel(field<std::size_t>(j, "order", "ngram model"), field<std::int64_t>(j, "total", "ngram model"),
                             field<text::Tokens>(j, "vocabulary", "ngram model"), std::move(counts));
  }
};

template <>
struct Codec<neural::DeepNet> {
  static constexpr std::string_view format = "neural-model";

  static std::string encode(const neural::DeepNet& net) {
    net.validate();
    Json j = document(format);
    std::vector<Eigen::Index> layers{net.w0.rows()};
    for (const auto& h : net.hidden) layers.push_back(h.rows());
    j["shape"] = {{"input", net.input_dim()}, {"layers", layers}, {"output", net.output_dim()}};
    j["activations"] = Json::array();
    for (auto a : net.acts) j["activations"].push_back(std::string(neural::to_string(a)));
    j["w0"] = flatten(net.w0);
    j["hidden"] = Json::array();
    for (const auto& h : net.hidden) j["hidden"].push_back(flatten(h));
    j["v"] = flatten(net.v);
    return dump(j);
  }

  static neural::DeepNet decode(std::string_view text) {
    const Json j = parse_json(text);
    open_document(j, format);
    check_fields(j, {"format", "version", "shape", "activations", "w0", "hidden", "v"}, "neural model");
    const Json shape = field<Json>(j, "shape", "neural model");
    check_fields(shape, {"input", "layers", "output"}, "shape");
    const auto d = field<Eigen::Index>(shape, "input", "shape");
    const auto layers = field<std::vector<Eigen::Index>>(shape, "layers", "shape");
    const auto q = field<Eigen::Index>(shape, "output", "shape");
    require(!layers.empty() && d >= 0 && q >= 1, Errc::SchemaError, "shape needs at least one layer and one output");
    neural::DeepNet net;
    net.w0 = unflatten(field<std::vector<double>>(j, "w0", "neural model"), layers[0], d + 1, "w0");
    const auto hidden = field<std::vector<std::vector<double>>>(j, "hidden", "neural model");
    require(hidden.size() + 1 == layers.size(), Errc::SchemaError, "one hidden weight list per extra layer");
    for (std::size_t l = 0; l < hidden.size(); ++l)
      net.hidden.push_back(unflatten(hidden[l], layers[l + 1], layers[l], "hidden layer"));
    net.v = unflatten(field<std::vector<double>>(j, "v", "neural model"), q, layers.back(), "v");
    for (const auto& a : field<std::vector<std::string>>(j, "activations", "neural model"))
      net.acts.push_back(neural::parse_activation(a));
    net.validate();
    return net;
  }
};

template <>
struct Codec<neural::LearningTask> {
  static constexpr std::string_view format = "neural-task";

  static std::string encode(const neural::LearningTask& t) {
    t.validate();
    Json j = document(format);
    j["xs"] = Json::array();
    j["ys"] = Json::array();
    for (const auto& x : t.xs) j["xs"].push_back(from_vec(x));
    for (const auto& y : t.ys) j["ys"].push_back(from_vec(y));
    if (!t.weights.empty()) j["weights"] = t.weights;
    return dump(j);
  }

  static neural::LearningTask decode(std::string_view text) {
    const Json j = parse_json(text);
    open_document(j, format);
    check_fields(j, {"format", "version", "xs", "ys", "weights"}, "neural task");
    neural::LearningTask t;
    for (const auto& x : field<std::vector<std::vector<double>>>(j, "xs", "neural task")) t.xs.push_back(to_vec(x));
    for (const auto& y : field<std::vector<std::vector<double>>>(j, "ys", "neural task")) t.ys.push_back(to_vec(y));
    if (j.contains("weights")) t.weights = field<std::vector<double>>(j, "weights", "neural task");
    require(!t.xs.empty(), Errc::SchemaError, "neural task has no samples");
    t.validate();
    return t;
  }
};

template <>
struct Codec<belief::Scenario> {
  static constexpr std::string_view format = "belief-scenario";

  static std::string encode(const belief::Scenario& s) {
    s.machine.validate();
    Json j = document(format);
    j["machine"] = {{"dim", s.machine.dim()}, {"F", from_matrix(s.machine.f)}, {"M", from_matrix(s.machine.m)},
                    {"c", from_vec(s.machine.c)}};
    Json agent{{"mode", s.agent.mode}};
    if (s.agent.mode == "affine") agent["E"] = from_matrix(s.agent.e);
    if (s.agent.mode == "affine" || s.agent.mode == "ignore") agent["G"] = from_matrix(s.agent.g);
    if (s.agent.mode == "affine" || s.agent.mode == "ignore" || s.agent.mode == "realizable") agent["h"] = from_vec(s.agent.h);
    j["agent"] = agent;
    const auto& c = s.cfg;
    j["cfg"] = {{"lr", c.lr},         {"epochs", c.epochs},       {"tol", c.tol},
                {"seed", c.seed},     {"samples", c.samples},     {"held_out", c.held_out},
                {"min_pairs", c.min_pairs}, {"max_pairs", c.max_pairs}};
    return dump(j);
  }

  static belief::Scenario decode(std::string_view text) {
    const Json j = parse_json(text);
    open_document(j, format);
    check_fields(j, {"format", "version", "machine", "agent", "cfg"}, "belief scenario");
    belief::Scenario s;
    const Json mc = field<Json>(j, "machine", "belief scenario");
    check_fields(mc, {"dim", "F", "M", "c"}, "machine");
    const auto d = field<Eigen::Index>(mc, "dim", "machine");
    s.machine = {to_matrix(field<std::vector<std::vector<double>>>(mc, "F", "machine"), "F"),
                 to_matrix(field<std::vector<std::vector<double>>>(mc, "M", "machine"), "M"),
                 to_vec(field<std::vector<double>>(mc, "c", "machine"))};
    require(s.machine.dim() == d, Errc::DimMismatch, "machine dim does not match c");
    s.machine.validate();

    const Json ag = field<Json>(j, "agent", "belief scenario");
    check_fields(ag, {"mode", "E", "G", "h"}, "agent");
    const auto mode = field<std::string>(ag, "mode", "agent");
    auto mat = [&](const char* k) {
      return ag.contains(k) ? to_matrix(field<std::vector<std::vector<double>>>(ag, k, "agent"), k) : Eigen::MatrixXd();
    };
    const Eigen::VectorXd h = ag.contains("h") ? to_vec(field<std::vector<double>>(ag, "h", "agent")) : Eigen::VectorXd();
    const bool wants_e = mode == "affine", wants_g = wants_e || mode == "ignore", wants_h = wants_g || mode == "realizable";
    require(ag.contains("E") == wants_e && ag.contains("G") == wants_g && ag.contains("h") == wants_h, Errc::SchemaError,
            "agent fields do not match mode '" + mode + "'");
    s.agent = belief::make_agent(s.machine, mode, mat("E"), mat("G"), h);
    s.agent.validate(d);

    const Json c = field<Json>(j, "cfg", "belief scenario");
    check_fields(c, {"lr", "epochs", "tol", "seed", "samples", "held_out", "min_pairs", "max_pairs"}, "cfg");
    s.cfg.lr = field<double>(c, "lr", "cfg");
    s.cfg.epochs = field<std::size_t>(c, "epochs", "cfg");
    s.cfg.tol = field<double>(c, "tol", "cfg");
    s.cfg.seed = field<std::uint64_t>(c, "seed", "cfg");
    s.cfg.samples = field<std::size_t>(c, "samples", "cfg");
    s.cfg.held_out = field<std::size_t>(c, "held_out", "cfg");
    s.cfg.min_pairs = field<std::size_t>(c, "min_pairs", "cfg");
    s.cfg.max_pairs = field<std::size_t>(c, "max_pairs", "cfg");
    return s;
  }
};

// ---------------------------------------------------------------------------

template <class T>
T decode(std::string_view text) {
  return Codec<T>::decode(text);
}

template <class T>
std::string encode(const T& value) {
  return Codec<T>::encode(value);
}

template <class T>
T load(const std::filesystem::path& path) {
  const auto text = read_file(path);
  try {
    return Codec<T>::decode(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.filename().string() + ": " + e.detail());
  }
}

template <class T>
void save(const T& value, const std::filesystem::path& path) {
  write_file(path, Codec<T>::encode(value));
}

}  // namespace langlab::io
