#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "csv.hpp"
#include "error.hpp"
#include "text.hpp"

namespace teamportrait {

using json = nlohmann::json;

/// Canonical author identity. Ordered lexicographically; the order is used for tie-breaking.
struct AuthorId {
  std::string canonical;

  auto operator<=>(const AuthorId&) const = default;
};

struct AuthorRef {
  std::string raw_name;
  std::optional<std::string> affiliation;
  std::optional<AuthorId> id;  // set by canonicalize_authors

  bool operator==(const AuthorRef&) const = default;
};

enum class RecordKind { journal_paper, conference_paper, patent, thesis, monograph };

inline std::string_view to_string(RecordKind k) {
  switch (k) {
    case RecordKind::journal_paper: return "journal_paper";
    case RecordKind::conference_paper: return "conference_paper";
    case RecordKind::patent: return "patent";
    case RecordKind::thesis: return "thesis";
    case RecordKind::monograph: return "monograph";
  }
  return "journal_paper";
}

inline std::optional<RecordKind> parse_kind(std::string_view s) {
  for (auto k : {RecordKind::journal_paper, RecordKind::conference_paper, RecordKind::patent,
                 RecordKind::thesis, RecordKind::monograph}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

struct PublicationRecord {
  std::string id;
  RecordKind kind = RecordKind::journal_paper;
  std::string title;
  std::optional<std::string> abstract;
  std::vector<AuthorRef> authors;
  std::optional<AuthorRef> supervisor;  // thesis only
  std::optional<std::int64_t> year;
  std::optional<std::string> venue;
  std::optional<std::int64_t> citation_count;
  std::optional<std::string> project_id;
  std::optional<std::vector<std::string>> gold_keywords;
  std::optional<std::string> discipline;

  bool operator==(const PublicationRecord&) const = default;

  /// Distinct canonical author ids in listing order. Requires canonicalized authors.
  std::vector<AuthorId> author_ids() const {
    std::vector<AuthorId> ids;
    for (const auto& a : authors) {
      if (!a.id) throw InputError("record " + id + ": authors are not canonicalized");
      if (std::find(ids.begin(), ids.end(), *a.id) == ids.end()) ids.push_back(*a.id);
    }
    return ids;
  }

  std::optional<AuthorId> supervisor_id() const {
    if (!supervisor) return std::nullopt;
    if (!supervisor->id) throw InputError("record " + id + ": supervisor is not canonicalized");
    return supervisor->id;
  }
};

/// raw name -> canonical name. Keys and values are normalized before use.
using AliasMap = std::map<std::string, std::string>;

struct Corpus {
  std::vector<PublicationRecord> records;
  AliasMap alias_map;
};

enum class InputFormat { json_lines, csv };

struct ParseOptions {
  std::string csv_author_delimiter = ";";
};

// ---------------------------------------------------------------------------
// JSON mapping

namespace detail {

inline AuthorRef author_from_json(const json& j, std::size_t line, std::string_view what) {
  AuthorRef a;
  if (j.is_string()) {
    a.raw_name = j.get<std::string>();
  } else if (j.is_object()) {
    if (!j.contains("name") || !j["name"].is_string()) {
      throw ParseError(line, std::string(what) + " object needs a string \"name\"");
    }
    a.raw_name = j["name"].get<std::string>();
    if (j.contains("affiliation") && !j["affiliation"].is_null()) {
      if (!j["affiliation"].is_string()) throw ParseError(line, "affiliation must be a string");
      a.affiliation = j["affiliation"].get<std::string>();
    }
    if (j.contains("id") && !j["id"].is_null()) {
      if (!j["id"].is_string()) throw ParseError(line, "author id must be a string");
      a.id = AuthorId{j["id"].get<std::string>()};
    }
  } else {
    throw ParseError(line, std::string(what) + " must be a string or object");
  }
  if (text::trim(a.raw_name).empty()) throw ParseError(line, std::string(what) + " name is empty");
  return a;
}

inline json author_to_json(const AuthorRef& a) {
  json j = json::object();
  j["name"] = a.raw_name;
  if (a.affiliation) j["affiliation"] = *a.affiliation;
  if (a.id) j["id"] = a.id->canonical;
  return j;
}

inline std::optional<std::string> opt_string(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_string()) throw ParseError(line, std::string("\"") + key + "\" must be a string");
  return j[key].get<std::string>();
}

inline std::optional<std::int64_t> opt_int(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number_integer()) throw ParseError(line, std::string("\"") + key + "\" must be an integer");
  return j[key].get<std::int64_t>();
}

inline std::int64_t parse_int_cell(const std::string& cell, std::size_t line, std::string_view column) {
  std::string t = text::trim(cell);
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size()) {
    throw ParseError(line, "column \"" + std::string(column) + "\" is not an integer: \"" + cell + "\"");
  }
  return v;
}

inline void validate_record(const PublicationRecord& r, std::size_t line) {
  if (text::trim(r.id).empty()) throw ParseError(line, "record id is empty");
  if (text::trim(r.title).empty()) throw ParseError(line, "record " + r.id + ": title is empty");
  if (r.kind == RecordKind::thesis && r.authors.size() != 1) {
    throw ParseError(line, "record " + r.id + ": a thesis has exactly one author");
  }
  if (r.supervisor && r.kind != RecordKind::thesis) {
    throw ParseError(line, "record " + r.id + ": supervisor is only allowed on theses");
  }
  if (r.citation_count && *r.citation_count < 0) {
    throw ParseError(line, "record " + r.id + ": citation_count is negative");
  }
}

}  // namespace detail

inline PublicationRecord record_from_json(const json& j, std::size_t line = 0) {
  if (!j.is_object()) throw ParseError(line, "record must be a JSON object");
  for (const char* key : {"id", "kind", "title", "authors"}) {
    if (!j.contains(key)) throw ParseError(line, std::string("missing required key \"") + key + "\"");
  }
  PublicationRecord r;
  if (!j["id"].is_string()) throw ParseError(line, "\"id\" must be a string");
  r.id = j["id"].get<std::string>();
  if (!j["kind"].is_string()) throw ParseError(line, "\"kind\" must be a string");
  auto kind = parse_kind(j["kind"].get<std::string>());
  if (!kind) throw ParseError(line, "unknown kind \"" + j["kind"].get<std::string>() + "\"");
  r.kind = *kind;
  if (!j["title"].is_string()) throw ParseError(line, "\"title\" must be a string");
  r.title = j["title"].get<std::string>();
  if (!j["authors"].is_array()) throw ParseError(line, "\"authors\" must be an array");
  for (const auto& a : j["authors"]) r.authors.push_back(detail::author_from_json(a, line, "author"));
  if (j.contains("supervisor") && !j["supervisor"].is_null()) {
    r.supervisor = detail::author_from_json(j["supervisor"], line, "supervisor");
  }
  r.abstract = detail::opt_string(j, "abstract", line);
  r.year = detail::opt_int(j, "year", line);
  r.venue = detail::opt_string(j, "venue", line);
  r.citation_count = detail::opt_int(j, "citation_count", line);
  r.project_id = detail::opt_string(j, "project_id", line);
  r.discipline = detail::opt_string(j, "discipline", line);
  if (j.contains("gold_keywords") && !j["gold_keywords"].is_null()) {
    if (!j["gold_keywords"].is_array()) throw ParseError(line, "\"gold_keywords\" must be an array");
    std::vector<std::string> kws;
    for (const auto& k : j["gold_keywords"]) {
      if (!k.is_string()) throw ParseError(line, "gold keywords must be strings");
      kws.push_back(k.get<std::string>());
    }
    r.gold_keywords = std::move(kws);
  }
  detail::validate_record(r, line);
  return r;
}

inline json record_to_json(const PublicationRecord& r) {
  json j = json::object();
  j["id"] = r.id;
  j["kind"] = std::string(to_string(r.kind));
  j["title"] = r.title;
  j["authors"] = json::array();
  for (const auto& a : r.authors) j["authors"].push_back(detail::author_to_json(a));
  if (r.abstract) j["abstract"] = *r.abstract;
  if (r.supervisor) j["supervisor"] = detail::author_to_json(*r.supervisor);
  if (r.year) j["year"] = *r.year;
  if (r.venue) j["venue"] = *r.venue;
  if (r.citation_count) j["citation_count"] = *r.citation_count;
  if (r.project_id) j["project_id"] = *r.project_id;
  if (r.gold_keywords) j["gold_keywords"] = *r.gold_keywords;
  if (r.discipline) j["discipline"] = *r.discipline;
  return j;
}

// ---------------------------------------------------------------------------
// parse_records

namespace detail {

inline void check_unique(std::set<std::string>& seen, const PublicationRecord& r, std::size_t line) {
  if (!seen.insert(r.id).second) throw ParseError(line, "duplicate record id \"" + r.id + "\"");
}

inline std::vector<PublicationRecord> parse_json_lines(std::string_view input) {
  std::vector<PublicationRecord> out;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  for (const auto& line : text::split(input, "\n")) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    auto r = record_from_json(j, line_no);
    check_unique(seen, r, line_no);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<AuthorRef> split_authors(const std::string& cell, const std::string& delim) {
  std::vector<AuthorRef> authors;
  for (const auto& part : text::split(cell, delim)) {
    std::string name = text::trim(part);
    if (!name.empty()) authors.push_back(AuthorRef{name, std::nullopt, std::nullopt});
  }
  return authors;
}

inline std::vector<PublicationRecord> parse_csv(std::string_view input, const ParseOptions& opts) {
  auto rows = csv::read(input);
  std::vector<PublicationRecord> out;
  if (rows.empty()) return out;

  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].cells.size(); ++i) col[text::trim(rows[0].cells[i])] = i;
  for (const char* key : {"id", "kind", "title", "authors"}) {
    if (!col.count(key)) throw ParseError(rows[0].line, std::string("missing required column \"") + key + "\"");
  }
  const std::size_t width = rows[0].cells.size();

  std::set<std::string> seen;
  for (std::size_t ri = 1; ri < rows.size(); ++ri) {
    const auto& row = rows[ri];
    if (row.cells.size() != width) {
      throw ParseError(row.line, "expected " + std::to_string(width) + " cells, found " +
                                     std::to_string(row.cells.size()));
    }
    auto cell = [&](const char* name) -> std::optional<std::string> {
      auto it = col.find(name);
      if (it == col.end()) return std::nullopt;
      const auto& v = row.cells[it->second];
      if (text::trim(v).empty()) return std::nullopt;
      return v;
    };
    PublicationRecord r;
    for (const char* key : {"id", "kind", "title"}) {
      if (!cell(key)) throw ParseError(row.line, std::string("required field \"") + key + "\" is empty");
    }
    r.id = text::trim(*cell("id"));
    auto kind = parse_kind(text::trim(*cell("kind")));
    if (!kind) throw ParseError(row.line, "unknown kind \"" + *cell("kind") + "\"");
    r.kind = *kind;
    r.title = *cell("title");
    r.authors = split_authors(row.cells[col["authors"]], opts.csv_author_delimiter);
    if (auto aff = cell("affiliations")) {
      auto affs = text::split(*aff, opts.csv_author_delimiter);
      for (std::size_t i = 0; i < r.authors.size() && i < affs.size(); ++i) {
        auto a = text::trim(affs[i]);
        if (!a.empty()) r.authors[i].affiliation = a;
      }
    }
    if (auto s = cell("supervisor")) r.supervisor = AuthorRef{text::trim(*s), std::nullopt, std::nullopt};
    r.abstract = cell("abstract");
    if (auto y = cell("year")) r.year = parse_int_cell(*y, row.line, "year");
    r.venue = cell("venue");
    if (auto c = cell("citation_count")) r.citation_count = parse_int_cell(*c, row.line, "citation_count");
    if (auto p = cell("project_id")) r.project_id = text::trim(*p);
    if (auto g = cell("gold_keywords")) {
      std::vector<std::string> kws;
      for (const auto& k : text::split(*g, opts.csv_author_delimiter)) {
        auto t = text::trim(k);
        if (!t.empty()) kws.push_back(t);
      }
      r.gold_keywords = std::move(kws);
    }
    r.discipline = cell("discipline");
    validate_record(r, row.line);
    check_unique(seen, r, row.line);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace detail

/// Parse UTF-8 JSON-lines (one record object per line) or CSV with a header row.
/// Required keys/columns: id, kind, title, authors.
inline std::vector<PublicationRecord> parse_records(std::string_view input, InputFormat format,
                                                   const ParseOptions& opts = {}) {
  return format == InputFormat::csv ? detail::parse_csv(input, opts) : detail::parse_json_lines(input);
}

inline std::string write_records_jsonl(const std::vector<PublicationRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// clean_records

struct DroppedRecord {
  PublicationRecord record;
  std::string reason;
};

struct CleanResult {
  std::vector<PublicationRecord> kept;
  std::vector<DroppedRecord> dropped;
};

/// Drops non-thesis records with fewer than two authors. Theses keep their single
/// author because the supervisor supplies the collaboration edge.
inline CleanResult clean_records(std::vector<PublicationRecord> records) {
  CleanResult result;
  for (auto& r : records) {
    if (r.kind != RecordKind::thesis && r.authors.size() < 2) {
      std::string reason = r.authors.empty() ? "no-author" : "single-author";
      result.dropped.push_back({std::move(r), std::move(reason)});
    } else {
      result.kept.push_back(std::move(r));
    }
  }
  return result;
}

inline json drop_report(const std::vector<DroppedRecord>& dropped) {
  json j = json::array();
  for (const auto& d : dropped) j.push_back({{"record_id", d.record.id}, {"reason", d.reason}});
  return j;
}

// ---------------------------------------------------------------------------
// canonicalize_authors

struct CanonicalizeOptions {
  /// Append the normalized affiliation to the id, splitting same-name authors by institution.
  bool affiliation_discriminator = false;
};

/// Normalizes keys and values and resolves alias chains to their final target.
inline AliasMap resolve_aliases(const AliasMap& raw) {
  AliasMap normalized;
  for (const auto& [from, to] : raw) {
    auto k = text::normalize(from);
    auto v = text::normalize(to);
    if (k.empty()) throw ConfigError("alias map has an empty source name");
    if (v.empty()) throw ConfigError("alias \"" + from + "\" maps to an empty name");
    auto [it, inserted] = normalized.emplace(k, v);
    if (!inserted && it->second != v) {
      throw ConfigError("alias \"" + from + "\" has conflicting targets \"" + it->second + "\" and \"" + v + "\"");
    }
  }
  AliasMap resolved;
  for (const auto& [from, first] : normalized) {
    std::set<std::string> visited{from};
    std::string cur = first;
    while (true) {
      auto it = normalized.find(cur);
      if (it == normalized.end() || it->second == cur) break;
      if (!visited.insert(cur).second) throw ConfigError("alias map has a cycle through \"" + cur + "\"");
      cur = it->second;
    }
    resolved.emplace(from, cur);
  }
  return resolved;
}

inline AuthorId canonical_id(const AuthorRef& a, const AliasMap& resolved, const CanonicalizeOptions& opts = {}) {
  std::string name = text::normalize(a.raw_name);
  if (auto it = resolved.find(name); it != resolved.end()) name = it->second;
  if (opts.affiliation_discriminator && a.affiliation) {
    auto aff = text::normalize(*a.affiliation);
    if (!aff.empty()) name += " @ " + aff;
  }
  return AuthorId{name};
}

inline std::vector<PublicationRecord> canonicalize_authors(std::vector<PublicationRecord> records,
                                                           const AliasMap& alias_map,
                                                           const CanonicalizeOptions& opts = {}) {
  const AliasMap resolved = resolve_aliases(alias_map);
  for (auto& r : records) {
    for (auto& a : r.authors) a.id = canonical_id(a, resolved, opts);
    if (r.supervisor) r.supervisor->id = canonical_id(*r.supervisor, resolved, opts);
  }
  return records;
}

inline AliasMap alias_map_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("alias map must be a JSON object of name -> canonical name");
  AliasMap m;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) throw ConfigError("alias target for \"" + k + "\" must be a string");
    m.emplace(k, v.get<std::string>());
  }
  return m;
}

}  // namespace teamportrait
