#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "network.hpp"
#include "render.hpp"
#include "text.hpp"
#include "topics.hpp"

namespace teamportrait {

inline constexpr const char* kVersion = "1.0.0";

struct PipelineConfig {
  std::vector<std::string> inputs;
  std::string input_format = "auto";  // auto | json_lines | csv
  std::string csv_delimiter = ";";
  std::string alias_map;  // empty: none
  std::string stopwords;
  std::string tokens;
  std::string output_dir = "out";
  bool affiliation_discriminator = false;
  unsigned workers = 1;

  std::int64_t min_pubs = 10;
  std::int64_t min_edge_weight = 5;
  std::int64_t snowball_weight = 2;

  TextRankConfig textrank;
  std::optional<std::size_t> fusion_k;  // default 2 * topic_n
  std::size_t topic_n = 10;

  std::size_t max_cloud_terms = 50;
  double font_min_px = 12.0;
  double font_max_px = 48.0;

  void validate() const {
    if (input_format != "auto" && input_format != "json_lines" && input_format != "csv") {
      throw ConfigError("input_format must be auto, json_lines or csv");
    }
    if (csv_delimiter.empty()) throw ConfigError("csv_delimiter must not be empty");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (min_pubs < 0) throw ConfigError("thresholds.min_pubs must be >= 0");
    if (min_edge_weight < 1) throw ConfigError("thresholds.min_edge_weight must be >= 1");
    if (snowball_weight < 1) throw ConfigError("thresholds.snowball_weight must be >= 1");
    textrank.validate();
    if (fusion_k && *fusion_k == 0) throw ConfigError("fusion_k must be positive");
    if (topic_n < 1) throw ConfigError("topic_n must be positive");
    if (max_cloud_terms < 1) throw ConfigError("portrait.max_cloud_terms must be positive");
    render_options().validate();
  }

  TeamOptions team_options() const { return {min_pubs, min_edge_weight, snowball_weight, workers}; }
  RenderOptions render_options() const { return {font_min_px, font_max_px, 800.0}; }
  std::size_t effective_fusion_k() const { return fusion_k.value_or(2 * topic_n); }
};

// ---------------------------------------------------------------------------
// TOML subset: [tables], key = value, strings, integers, floats, booleans and
// single-line arrays. Enough for the pipeline config.

namespace toml_lite {

namespace detail {

struct Cursor {
  std::string_view s;
  std::size_t i = 0;
  std::size_t line;

  void skip_ws() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }
  bool done() const { return i >= s.size(); }
  [[noreturn]] void fail(const std::string& what) const { throw ConfigError("config line " + std::to_string(line) + ": " + what); }
};

inline json parse_value(Cursor& c);

inline std::string parse_basic_string(Cursor& c) {
  ++c.i;  // opening quote
  std::string out;
  while (true) {
    if (c.done()) c.fail("unterminated string");
    char ch = c.s[c.i++];
    if (ch == '"') return out;
    if (ch != '\\') {
      out.push_back(ch);
      continue;
    }
    if (c.done()) c.fail("unterminated escape");
    char e = c.s[c.i++];
    switch (e) {
      case '"': out.push_back('"'); break;
      case '\\': out.push_back('\\'); break;
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case 'r': out.push_back('\r'); break;
      default: c.fail(std::string("unsupported escape \\") + e);
    }
  }
}

inline std::string parse_literal_string(Cursor& c) {
  ++c.i;
  auto end = c.s.find('\'', c.i);
  if (end == std::string_view::npos) c.fail("unterminated literal string");
  std::string out(c.s.substr(c.i, end - c.i));
  c.i = end + 1;
  return out;
}

inline json parse_scalar(Cursor& c) {
  std::size_t start = c.i;
  while (!c.done() && c.s[c.i] != ',' && c.s[c.i] != ']' && c.s[c.i] != '#' && c.s[c.i] != ' ' && c.s[c.i] != '\t') ++c.i;
  std::string tok(c.s.substr(start, c.i - start));
  if (tok == "true") return true;
  if (tok == "false") return false;
  std::string digits;
  for (char ch : tok) {
    if (ch != '_') digits.push_back(ch);
  }
  if (digits.empty()) c.fail("missing value");
  bool is_float = digits.find_first_of(".eE") != std::string::npos;
  try {
    std::size_t used = 0;
    if (is_float) {
      double v = std::stod(digits, &used);
      if (used == digits.size()) return v;
    } else {
      long long v = std::stoll(digits, &used);
      if (used == digits.size()) return v;
    }
  } catch (const std::exception&) {
  }
  c.fail("cannot parse value \"" + tok + "\"");
}

inline json parse_array(Cursor& c) {
  ++c.i;
  json arr = json::array();
  while (true) {
    c.skip_ws();
    if (c.done()) c.fail("unterminated array (arrays must fit on one line)");
    if (c.s[c.i] == ']') {
      ++c.i;
      return arr;
    }
    arr.push_back(parse_value(c));
    c.skip_ws();
    if (!c.done() && c.s[c.i] == ',') ++c.i;
  }
}

inline json parse_value(Cursor& c) {
  c.skip_ws();
  if (c.done()) c.fail("missing value");
  switch (c.s[c.i]) {
    case '"': return parse_basic_string(c);
    case '\'': return parse_literal_string(c);
    case '[': return parse_array(c);
    default: return parse_scalar(c);
  }
}

inline std::string parse_key(std::string_view raw, std::size_t line) {
  std::string k = text::trim(raw);
  if (k.size() >= 2 && (k.front() == '"' || k.front() == '\'') && k.back() == k.front()) k = k.substr(1, k.size() - 2);
  if (k.empty()) throw ConfigError("config line " + std::to_string(line) + ": empty key");
  return k;
}

}  // namespace detail

inline json parse(std::string_view content) {
  json root = json::object();
  json* table = &root;
  std::size_t line_no = 0;
  for (const auto& raw_line : text::split(content, "\n")) {
    ++line_no;
    std::string line = text::trim(raw_line);
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '[') {
      auto close = line.find(']');
      if (close == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": unterminated table header");
      auto name = detail::parse_key(std::string_view(line).substr(1, close - 1), line_no);
      table = &root;
      for (const auto& part : text::split(name, ".")) {
        auto key = text::trim(part);
        if (!table->contains(key)) (*table)[key] = json::object();
        table = &(*table)[key];
        if (!table->is_object()) throw ConfigError("config line " + std::to_string(line_no) + ": \"" + key + "\" is not a table");
      }
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    auto key = detail::parse_key(std::string_view(line).substr(0, eq), line_no);
    detail::Cursor c{line, eq + 1, line_no};
    json value = detail::parse_value(c);
    c.skip_ws();
    if (!c.done() && c.s[c.i] != '#') c.fail("trailing characters after value");
    if (table->contains(key)) c.fail("duplicate key \"" + key + "\"");
    (*table)[key] = std::move(value);
  }
  return root;
}

}  // namespace toml_lite

// ---------------------------------------------------------------------------
// JSON mapping

namespace detail {

template <typename T>
T config_get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key \"" + where + key + "\" has the wrong type");
  }
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  if (!j.is_object()) throw ConfigError("config section \"" + where + "\" must be a table/object");
  std::set<std::string> k(known.begin(), known.end());
  for (const auto& [key, v] : j.items()) {
    if (!k.count(key)) throw ConfigError("unknown config key \"" + where + key + "\"");
  }
}

inline std::string resolve_path(const std::string& p, const std::filesystem::path& base) {
  if (p.empty() || base.empty()) return p;
  std::filesystem::path path(p);
  return path.is_absolute() ? p : (base / path).lexically_normal().string();
}

}  // namespace detail

/// Applies the keys present in `j` on top of `cfg`. Relative paths are resolved
/// against `base_dir` (the config file's directory) when it is non-empty.
inline void apply_config(PipelineConfig& cfg, const json& j, const std::filesystem::path& base_dir = {}) {
  using detail::config_get;
  detail::reject_unknown(j,
                         {"inputs", "input_format", "csv_delimiter", "alias_map", "stopwords", "tokens", "output_dir",
                          "affiliation_discriminator", "workers", "thresholds", "textrank", "fusion_k", "topic_n",
                          "portrait"},
                         "");
  if (j.contains("inputs")) {
    cfg.inputs.clear();
    for (auto& p : config_get<std::vector<std::string>>(j, "inputs", "")) {
      cfg.inputs.push_back(detail::resolve_path(p, base_dir));
    }
  }
  if (j.contains("input_format")) cfg.input_format = config_get<std::string>(j, "input_format", "");
  if (j.contains("csv_delimiter")) cfg.csv_delimiter = config_get<std::string>(j, "csv_delimiter", "");
  if (j.contains("alias_map")) cfg.alias_map = detail::resolve_path(config_get<std::string>(j, "alias_map", ""), base_dir);
  if (j.contains("stopwords")) cfg.stopwords = detail::resolve_path(config_get<std::string>(j, "stopwords", ""), base_dir);
  if (j.contains("tokens")) cfg.tokens = detail::resolve_path(config_get<std::string>(j, "tokens", ""), base_dir);
  if (j.contains("output_dir")) cfg.output_dir = detail::resolve_path(config_get<std::string>(j, "output_dir", ""), base_dir);
  if (j.contains("affiliation_discriminator")) {
    cfg.affiliation_discriminator = config_get<bool>(j, "affiliation_discriminator", "");
  }
  if (j.contains("workers")) {
    auto w = config_get<std::int64_t>(j, "workers", "");
    if (w < 1) throw ConfigError("workers must be >= 1");
    cfg.workers = static_cast<unsigned>(w);
  }
  if (j.contains("fusion_k")) {
    if (j["fusion_k"].is_null()) {
      cfg.fusion_k.reset();
    } else {
      auto k = config_get<std::int64_t>(j, "fusion_k", "");
      if (k < 1) throw ConfigError("fusion_k must be positive");
      cfg.fusion_k = static_cast<std::size_t>(k);
    }
  }
  if (j.contains("topic_n")) {
    auto n = config_get<std::int64_t>(j, "topic_n", "");
    if (n < 1) throw ConfigError("topic_n must be positive");
    cfg.topic_n = static_cast<std::size_t>(n);
  }
  if (j.contains("thresholds")) {
    const auto& t = j["thresholds"];
    detail::reject_unknown(t, {"min_pubs", "min_edge_weight", "snowball_weight"}, "thresholds.");
    if (t.contains("min_pubs")) cfg.min_pubs = config_get<std::int64_t>(t, "min_pubs", "thresholds.");
    if (t.contains("min_edge_weight")) cfg.min_edge_weight = config_get<std::int64_t>(t, "min_edge_weight", "thresholds.");
    if (t.contains("snowball_weight")) cfg.snowball_weight = config_get<std::int64_t>(t, "snowball_weight", "thresholds.");
  }
  if (j.contains("textrank")) {
    const auto& t = j["textrank"];
    detail::reject_unknown(t, {"damping", "window", "epsilon", "max_iterations"}, "textrank.");
    if (t.contains("damping")) cfg.textrank.damping = config_get<double>(t, "damping", "textrank.");
    if (t.contains("epsilon")) cfg.textrank.epsilon = config_get<double>(t, "epsilon", "textrank.");
    if (t.contains("window")) {
      auto w = config_get<std::int64_t>(t, "window", "textrank.");
      if (w < 1) throw ConfigError("textrank.window must be >= 1");
      cfg.textrank.window = static_cast<std::size_t>(w);
    }
    if (t.contains("max_iterations")) {
      auto m = config_get<std::int64_t>(t, "max_iterations", "textrank.");
      if (m < 1) throw ConfigError("textrank.max_iterations must be >= 1");
      cfg.textrank.max_iterations = static_cast<std::size_t>(m);
    }
  }
  if (j.contains("portrait")) {
    const auto& p = j["portrait"];
    detail::reject_unknown(p, {"max_cloud_terms", "font_min_px", "font_max_px"}, "portrait.");
    if (p.contains("max_cloud_terms")) {
      auto m = config_get<std::int64_t>(p, "max_cloud_terms", "portrait.");
      if (m < 1) throw ConfigError("portrait.max_cloud_terms must be positive");
      cfg.max_cloud_terms = static_cast<std::size_t>(m);
    }
    if (p.contains("font_min_px")) cfg.font_min_px = config_get<double>(p, "font_min_px", "portrait.");
    if (p.contains("font_max_px")) cfg.font_max_px = config_get<double>(p, "font_max_px", "portrait.");
  }
}

inline json config_to_json(const PipelineConfig& c) {
  json j;
  j["inputs"] = c.inputs;
  j["input_format"] = c.input_format;
  j["csv_delimiter"] = c.csv_delimiter;
  j["alias_map"] = c.alias_map;
  j["stopwords"] = c.stopwords;
  j["tokens"] = c.tokens;
  j["output_dir"] = c.output_dir;
  j["affiliation_discriminator"] = c.affiliation_discriminator;
  j["workers"] = c.workers;
  j["thresholds"] = {{"min_pubs", c.min_pubs}, {"min_edge_weight", c.min_edge_weight}, {"snowball_weight", c.snowball_weight}};
  j["textrank"] = {{"damping", c.textrank.damping},
                   {"window", c.textrank.window},
                   {"epsilon", c.textrank.epsilon},
                   {"max_iterations", c.textrank.max_iterations}};
  j["fusion_k"] = c.fusion_k ? json(*c.fusion_k) : json(nullptr);
  j["topic_n"] = c.topic_n;
  j["portrait"] = {{"max_cloud_terms", c.max_cloud_terms}, {"font_min_px", c.font_min_px}, {"font_max_px", c.font_max_px}};
  return j;
}

/// Loads a `.toml` or `.json` config file (chosen by extension; anything else is
/// sniffed: a leading '{' means JSON).
inline PipelineConfig load_config(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw MissingFileError(path);
  const std::string content = text::read_file(path);
  const auto ext = std::filesystem::path(path).extension().string();
  const auto first = text::trim(content);
  json j;
  if (ext == ".json" || (ext != ".toml" && !first.empty() && first[0] == '{')) {
    try {
      j = json::parse(content);
    } catch (const json::parse_error& e) {
      throw ConfigError(path + ": invalid JSON: " + e.what());
    }
  } else {
    j = toml_lite::parse(content);
  }
  PipelineConfig cfg;
  apply_config(cfg, j, std::filesystem::path(path).parent_path());
  cfg.validate();
  return cfg;
}

}  // namespace teamportrait
