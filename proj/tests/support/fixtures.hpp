#pragma once

#include <string>
#include <vector>

#include "teamportrait/teamportrait.hpp"

namespace fixtures {

inline std::string path(const std::string& name) { return std::string(TP_FIXTURE_DIR) + "/" + name; }

/// Parsed, cleaned and canonicalized records from a JSON-lines fixture.
inline std::vector<teamportrait::PublicationRecord> load(const std::string& name) {
  using namespace teamportrait;
  auto records = parse_records(text::read_file(path(name)), InputFormat::json_lines);
  return canonicalize_authors(clean_records(std::move(records)).kept, {});
}

inline teamportrait::AuthorId id(const std::string& canonical) { return teamportrait::AuthorId{canonical}; }

inline std::set<teamportrait::AuthorId> ids(std::initializer_list<const char*> names) {
  std::set<teamportrait::AuthorId> out;
  for (const char* n : names) out.insert({n});
  return out;
}

}  // namespace fixtures
