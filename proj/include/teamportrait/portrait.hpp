#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "ingest.hpp"
#include "network.hpp"
#include "topics.hpp"

namespace teamportrait {

inline constexpr const char* kLeaderProjectRule =
    "distinct project_id over records that list the leader as an author";

struct TeamProfile {
  std::int64_t member_count = 0;
  std::vector<std::string> research_fields;
  std::int64_t leader_project_count = 0;
  std::int64_t total_project_count = 0;
  std::int64_t paper_count = 0;  // journal + conference
  std::int64_t citation_total = 0;
  std::int64_t patent_count = 0;
  std::int64_t conference_paper_count = 0;
  std::int64_t journal_paper_count = 0;
  std::int64_t monograph_count = 0;
  std::int64_t thesis_count = 0;

  bool operator==(const TeamProfile&) const = default;
};

enum class NodeRole { leader, core, non_core };

inline std::string_view to_string(NodeRole r) {
  switch (r) {
    case NodeRole::leader: return "leader";
    case NodeRole::core: return "core";
    case NodeRole::non_core: return "non_core";
  }
  return "leader";
}

inline NodeRole parse_node_role(std::string_view s) {
  if (s == "leader") return NodeRole::leader;
  if (s == "core") return NodeRole::core;
  if (s == "non_core") return NodeRole::non_core;
  throw ParseError(0, "unknown node role \"" + std::string(s) + "\"");
}

enum class Relation { coauthor, mentoring };

inline std::string_view to_string(Relation r) { return r == Relation::coauthor ? "coauthor" : "mentoring"; }

inline Relation parse_relation(std::string_view s) {
  if (s == "coauthor") return Relation::coauthor;
  if (s == "mentoring") return Relation::mentoring;
  throw ParseError(0, "unknown relation \"" + std::string(s) + "\"");
}

struct CooperationNode {
  std::string author_id;
  std::string display_name;
  std::optional<std::string> institution;
  std::optional<std::string> discipline;
  NodeRole role = NodeRole::core;

  bool operator==(const CooperationNode&) const = default;
};

/// Coauthor edges have a < b. Mentoring edges run from supervisor (a) to student (b).
struct CooperationEdge {
  std::string a;
  std::string b;
  std::int64_t weight = 0;
  Relation relation = Relation::coauthor;

  bool operator==(const CooperationEdge&) const = default;
};

struct CooperationGraphExport {
  std::vector<CooperationNode> nodes;
  std::vector<CooperationEdge> edges;

  bool operator==(const CooperationGraphExport&) const = default;
};

struct TopicCloudItem {
  std::string term;
  double score = 0.0;
  double weight = 0.0;

  bool operator==(const TopicCloudItem&) const = default;
};

struct PortraitBundle {
  std::string leader;
  TeamProfile profile;
  CooperationGraphExport cooperation;
  std::vector<TopicCloudItem> cloud;
  std::map<std::string, std::string> metadata;

  bool operator==(const PortraitBundle&) const = default;
};

namespace detail {

inline bool lists_any(const PublicationRecord& r, const std::set<AuthorId>& who) {
  for (const auto& a : r.author_ids()) {
    if (who.count(a)) return true;
  }
  return false;
}

template <typename Counts>
std::optional<std::string> most_frequent(const Counts& counts) {
  std::optional<std::string> best;
  std::int64_t best_n = 0;
  for (const auto& [value, n] : counts) {  // map order breaks ties lexicographically
    if (n > best_n) {
      best = value;
      best_n = n;
    }
  }
  return best;
}

}  // namespace detail

/// Counts over records listing at least one team member as an author.
inline TeamProfile build_profile(const Team& team, const std::vector<PublicationRecord>& records,
                                 const std::vector<TeamTopic>& topics = {}, std::size_t fields = 5) {
  TeamProfile p;
  const auto members = team.members();
  p.member_count = static_cast<std::int64_t>(members.size());
  for (std::size_t i = 0; i < topics.size() && i < fields; ++i) p.research_fields.push_back(topics[i].term);

  std::set<std::string> projects, leader_projects;
  const std::set<AuthorId> leader{team.leader};
  for (const auto& r : records) {
    if (!detail::lists_any(r, members)) continue;
    switch (r.kind) {
      case RecordKind::journal_paper: ++p.journal_paper_count; break;
      case RecordKind::conference_paper: ++p.conference_paper_count; break;
      case RecordKind::patent: ++p.patent_count; break;
      case RecordKind::monograph: ++p.monograph_count; break;
      case RecordKind::thesis: ++p.thesis_count; break;
    }
    p.citation_total += r.citation_count.value_or(0);
    if (r.project_id) {
      projects.insert(*r.project_id);
      if (detail::lists_any(r, leader)) leader_projects.insert(*r.project_id);
    }
  }
  p.paper_count = p.journal_paper_count + p.conference_paper_count;
  p.total_project_count = static_cast<std::int64_t>(projects.size());
  p.leader_project_count = static_cast<std::int64_t>(leader_projects.size());
  return p;
}

/// Nodes are exactly the team members. Coauthor weights count records listing both
/// members as authors; a thesis whose author and supervisor are both members adds a
/// mentoring edge.
inline CooperationGraphExport build_cooperation_graph(const Team& team, const std::vector<PublicationRecord>& records) {
  const auto members = team.members();
  std::map<AuthorId, std::map<std::string, std::int64_t>> names, institutions, disciplines;
  std::map<std::pair<AuthorId, AuthorId>, std::int64_t> coauthor, mentoring;

  auto note = [&](const AuthorRef& a, const PublicationRecord& r) {
    if (!a.id || !members.count(*a.id)) return;
    ++names[*a.id][text::trim(a.raw_name)];
    if (a.affiliation && !text::trim(*a.affiliation).empty()) ++institutions[*a.id][text::trim(*a.affiliation)];
    if (r.discipline && !text::trim(*r.discipline).empty()) ++disciplines[*a.id][text::trim(*r.discipline)];
  };

  for (const auto& r : records) {
    for (const auto& a : r.authors) note(a, r);
    if (r.supervisor) note(*r.supervisor, r);
    auto ids = r.author_ids();
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        if (members.count(ids[i]) && members.count(ids[j])) ++coauthor[std::minmax(ids[i], ids[j])];
      }
    }
    if (r.kind == RecordKind::thesis) {
      auto sup = r.supervisor_id();
      if (sup && !ids.empty() && members.count(*sup) && members.count(ids[0]) && *sup != ids[0]) {
        ++mentoring[{*sup, ids[0]}];
      }
    }
  }

  CooperationGraphExport g;
  for (const auto& m : members) {
    CooperationNode n;
    n.author_id = m.canonical;
    n.display_name = detail::most_frequent(names[m]).value_or(m.canonical);
    n.institution = detail::most_frequent(institutions[m]);
    n.discipline = detail::most_frequent(disciplines[m]);
    n.role = m == team.leader ? NodeRole::leader : team.core.count(m) ? NodeRole::core : NodeRole::non_core;
    g.nodes.push_back(std::move(n));
  }
  for (const auto& [pair, w] : coauthor) g.edges.push_back({pair.first.canonical, pair.second.canonical, w, Relation::coauthor});
  for (const auto& [pair, w] : mentoring) g.edges.push_back({pair.first.canonical, pair.second.canonical, w, Relation::mentoring});
  std::sort(g.edges.begin(), g.edges.end(), [](const CooperationEdge& x, const CooperationEdge& y) {
    return std::tie(x.a, x.b, x.relation) < std::tie(y.a, y.b, y.relation);
  });
  return g;
}

/// Top `max_terms` topics; weight = score / max score (all 1.0 when the max is not positive).
inline std::vector<TopicCloudItem> build_topic_cloud(const std::vector<TeamTopic>& topics, std::size_t max_terms) {
  if (topics.empty()) throw InputError("topic cloud needs at least one topic");
  if (max_terms == 0) throw ConfigError("max_cloud_terms must be positive");
  std::vector<TopicCloudItem> items;
  double max_score = topics.front().score;
  for (std::size_t i = 0; i < topics.size() && i < max_terms; ++i) max_score = std::max(max_score, topics[i].score);
  for (std::size_t i = 0; i < topics.size() && i < max_terms; ++i) {
    const double w = max_score > 0.0 ? topics[i].score / max_score : 1.0;
    items.push_back({topics[i].term, topics[i].score, std::clamp(w, 0.0, 1.0)});
  }
  return items;
}

// ---------------------------------------------------------------------------
// JSON

inline json profile_to_json(const TeamProfile& p) {
  return {{"member_count", p.member_count},
          {"research_fields", p.research_fields},
          {"leader_project_count", p.leader_project_count},
          {"total_project_count", p.total_project_count},
          {"paper_count", p.paper_count},
          {"citation_total", p.citation_total},
          {"patent_count", p.patent_count},
          {"conference_paper_count", p.conference_paper_count},
          {"journal_paper_count", p.journal_paper_count},
          {"monograph_count", p.monograph_count},
          {"thesis_count", p.thesis_count}};
}

inline TeamProfile profile_from_json(const json& j) {
  TeamProfile p;
  p.member_count = j.at("member_count").get<std::int64_t>();
  p.research_fields = j.at("research_fields").get<std::vector<std::string>>();
  p.leader_project_count = j.at("leader_project_count").get<std::int64_t>();
  p.total_project_count = j.at("total_project_count").get<std::int64_t>();
  p.paper_count = j.at("paper_count").get<std::int64_t>();
  p.citation_total = j.at("citation_total").get<std::int64_t>();
  p.patent_count = j.at("patent_count").get<std::int64_t>();
  p.conference_paper_count = j.at("conference_paper_count").get<std::int64_t>();
  p.journal_paper_count = j.at("journal_paper_count").get<std::int64_t>();
  p.monograph_count = j.at("monograph_count").get<std::int64_t>();
  p.thesis_count = j.at("thesis_count").get<std::int64_t>();
  return p;
}

inline json cooperation_to_json(const CooperationGraphExport& g) {
  json j;
  j["nodes"] = json::array();
  for (const auto& n : g.nodes) {
    json o{{"author_id", n.author_id}, {"display_name", n.display_name}, {"role", std::string(to_string(n.role))}};
    o["institution"] = n.institution ? json(*n.institution) : json(nullptr);
    o["discipline"] = n.discipline ? json(*n.discipline) : json(nullptr);
    j["nodes"].push_back(std::move(o));
  }
  j["edges"] = json::array();
  for (const auto& e : g.edges) {
    j["edges"].push_back({{"a", e.a}, {"b", e.b}, {"weight", e.weight}, {"relation", std::string(to_string(e.relation))}});
  }
  return j;
}

inline CooperationGraphExport cooperation_from_json(const json& j) {
  CooperationGraphExport g;
  for (const auto& o : j.at("nodes")) {
    CooperationNode n;
    n.author_id = o.at("author_id").get<std::string>();
    n.display_name = o.at("display_name").get<std::string>();
    n.role = parse_node_role(o.at("role").get<std::string>());
    if (!o.at("institution").is_null()) n.institution = o["institution"].get<std::string>();
    if (!o.at("discipline").is_null()) n.discipline = o["discipline"].get<std::string>();
    g.nodes.push_back(std::move(n));
  }
  for (const auto& o : j.at("edges")) {
    g.edges.push_back({o.at("a").get<std::string>(), o.at("b").get<std::string>(), o.at("weight").get<std::int64_t>(),
                       parse_relation(o.at("relation").get<std::string>())});
  }
  return g;
}

inline json portrait_to_json(const PortraitBundle& b) {
  json j;
  j["leader"] = b.leader;
  j["profile"] = profile_to_json(b.profile);
  j["cooperation"] = cooperation_to_json(b.cooperation);
  j["cloud"] = json::array();
  for (const auto& c : b.cloud) j["cloud"].push_back({{"term", c.term}, {"score", c.score}, {"weight", c.weight}});
  j["metadata"] = b.metadata;
  return j;
}

inline PortraitBundle portrait_from_json(const json& j) {
  try {
    PortraitBundle b;
    b.leader = j.at("leader").get<std::string>();
    b.profile = profile_from_json(j.at("profile"));
    b.cooperation = cooperation_from_json(j.at("cooperation"));
    for (const auto& c : j.at("cloud")) {
      b.cloud.push_back({c.at("term").get<std::string>(), c.at("score").get<double>(), c.at("weight").get<double>()});
    }
    b.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
    return b;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("malformed portrait JSON: ") + e.what());
  }
}

/// Assembles the three portrait parts for one team.
inline PortraitBundle build_portrait(const Team& team, const std::vector<PublicationRecord>& records,
                                     const std::vector<TeamTopic>& topics, std::size_t max_cloud_terms) {
  PortraitBundle b;
  b.leader = team.leader.canonical;
  b.profile = build_profile(team, records, topics);
  b.cooperation = build_cooperation_graph(team, records);
  if (!topics.empty()) b.cloud = build_topic_cloud(topics, max_cloud_terms);
  b.metadata["leader_project_rule"] = kLeaderProjectRule;
  b.metadata["research_fields_rule"] = "top 5 team topics";
  b.metadata["cloud_layout"] = "greedy rows, no randomization";
  return b;
}

}  // namespace teamportrait
