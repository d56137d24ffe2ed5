#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "ingest.hpp"

namespace teamportrait {

struct Edge {
  AuthorId a;  // a < b
  AuthorId b;
  std::int64_t weight = 0;

  bool operator==(const Edge&) const = default;
};

/// Undirected co-authorship graph. Edge weight is the number of jointly authored
/// records; node publication_count is the number of records listing the author.
class CoauthorGraph {
 public:
  struct Node {
    std::int64_t publication_count = 0;
    std::map<AuthorId, std::int64_t> neighbors;
  };

  void add_node(const AuthorId& id, std::int64_t publications = 0) { nodes_[id].publication_count += publications; }

  /// Adds `weight` to the (a, b) edge, creating both endpoints if needed. Self-loops are ignored.
  void add_edge(const AuthorId& a, const AuthorId& b, std::int64_t weight = 1) {
    if (a == b || weight <= 0) return;
    nodes_[a].neighbors[b] += weight;
    nodes_[b].neighbors[a] += weight;
  }

  void remove_node(const AuthorId& id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) return;
    for (const auto& [nb, w] : it->second.neighbors) nodes_[nb].neighbors.erase(id);
    nodes_.erase(it);
  }

  bool contains(const AuthorId& id) const { return nodes_.count(id) != 0; }
  bool empty() const { return nodes_.empty(); }
  std::size_t node_count() const { return nodes_.size(); }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& [id, n] : nodes_) twice += n.neighbors.size();
    return twice / 2;
  }

  std::int64_t weight(const AuthorId& a, const AuthorId& b) const {
    auto it = nodes_.find(a);
    if (it == nodes_.end()) return 0;
    auto e = it->second.neighbors.find(b);
    return e == it->second.neighbors.end() ? 0 : e->second;
  }

  const Node& node(const AuthorId& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw InputError("author \"" + id.canonical + "\" is not in the graph");
    return it->second;
  }

  const std::map<AuthorId, Node>& nodes() const { return nodes_; }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (const auto& [id, n] : nodes_) {
      for (const auto& [nb, w] : n.neighbors) {
        if (id < nb) out.push_back({id, nb, w});
      }
    }
    return out;
  }

  bool operator==(const CoauthorGraph& o) const {
    if (nodes_.size() != o.nodes_.size()) return false;
    for (auto a = nodes_.begin(), b = o.nodes_.begin(); a != nodes_.end(); ++a, ++b) {
      if (a->first != b->first || a->second.publication_count != b->second.publication_count ||
          a->second.neighbors != b->second.neighbors) {
        return false;
      }
    }
    return true;
  }

 private:
  std::map<AuthorId, Node> nodes_;
};

/// Every unordered author pair of a record gets +1; a thesis also links author and supervisor.
/// Supervisors count as listed on the thesis for publication_count.
inline CoauthorGraph build_coauthor_graph(const std::vector<PublicationRecord>& records) {
  CoauthorGraph g;
  for (const auto& r : records) {
    auto ids = r.author_ids();
    if (auto sup = r.supervisor_id(); sup && std::find(ids.begin(), ids.end(), *sup) == ids.end()) {
      ids.push_back(*sup);
    }
    for (const auto& id : ids) g.add_node(id, 1);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) g.add_edge(ids[i], ids[j], 1);
    }
  }
  return g;
}

/// Keeps nodes with publication_count >= min_pubs and edges with weight >= min_weight
/// whose endpoints both survive.
inline CoauthorGraph threshold_subgraph(const CoauthorGraph& g, std::int64_t min_pubs, std::int64_t min_weight) {
  if (min_pubs < 0) throw ConfigError("min_pubs must be >= 0");
  if (min_weight < 1) throw ConfigError("min_weight must be >= 1");
  CoauthorGraph out;
  for (const auto& [id, n] : g.nodes()) {
    if (n.publication_count >= min_pubs) out.add_node(id, n.publication_count);
  }
  for (const auto& e : g.edges()) {
    if (e.weight >= min_weight && out.contains(e.a) && out.contains(e.b)) out.add_edge(e.a, e.b, e.weight);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Betweenness

using CentralityScores = std::map<AuthorId, double>;

namespace detail {

/// Compressed adjacency over nodes sorted by AuthorId.
struct IndexedGraph {
  std::vector<AuthorId> ids;
  std::vector<std::size_t> offsets;  // size n + 1
  std::vector<std::size_t> targets;

  explicit IndexedGraph(const CoauthorGraph& g) {
    ids.reserve(g.node_count());
    std::map<AuthorId, std::size_t> index;
    for (const auto& [id, n] : g.nodes()) {
      index.emplace(id, ids.size());
      ids.push_back(id);
    }
    offsets.reserve(ids.size() + 1);
    offsets.push_back(0);
    for (const auto& [id, n] : g.nodes()) {
      for (const auto& [nb, w] : n.neighbors) targets.push_back(index.at(nb));
      offsets.push_back(targets.size());
    }
  }

  std::size_t size() const { return ids.size(); }
};

/// Brandes dependency accumulation for sources [first, last), added into `acc`
/// in source order. Paths are unweighted (hop count).
inline void brandes_sources(const IndexedGraph& g, std::size_t first, std::size_t last, std::vector<double>& acc) {
  const std::size_t n = g.size();
  std::vector<std::int64_t> dist(n);
  std::vector<double> sigma(n), delta(n);
  std::vector<std::size_t> order, queue;
  order.reserve(n);
  queue.reserve(n);
  for (std::size_t s = first; s < last; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    order.clear();
    queue.clear();
    dist[s] = 0;
    sigma[s] = 1.0;
    queue.push_back(s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t v = queue[head];
      order.push_back(v);
      for (std::size_t k = g.offsets[v]; k < g.offsets[v + 1]; ++k) {
        const std::size_t w = g.targets[k];
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t w = *it;
      for (std::size_t k = g.offsets[w]; k < g.offsets[w + 1]; ++k) {
        const std::size_t v = g.targets[k];
        if (dist[v] == dist[w] - 1) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      }
      if (w != s) acc[w] += delta[w];
    }
  }
}

// Sources are processed in fixed-size blocks whose partial sums are added in block
// order, so the result does not depend on the worker count.
inline constexpr std::size_t kBetweennessBlock = 64;

}  // namespace detail

/// Exact unweighted betweenness, unnormalized, counted over unordered pairs.
inline CentralityScores betweenness(const CoauthorGraph& g, unsigned workers = 1) {
  const detail::IndexedGraph ig(g);
  const std::size_t n = ig.size();
  std::vector<double> total(n, 0.0);
  const std::size_t blocks = (n + detail::kBetweennessBlock - 1) / detail::kBetweennessBlock;
  const std::size_t wave = std::max<unsigned>(1, workers);

  std::vector<std::vector<double>> partial(std::min(wave, std::max<std::size_t>(blocks, 1)),
                                           std::vector<double>(n));
  for (std::size_t b0 = 0; b0 < blocks; b0 += wave) {
    const std::size_t count = std::min(wave, blocks - b0);
    auto run = [&](std::size_t slot) {
      auto& acc = partial[slot];
      std::fill(acc.begin(), acc.end(), 0.0);
      const std::size_t first = (b0 + slot) * detail::kBetweennessBlock;
      detail::brandes_sources(ig, first, std::min(n, first + detail::kBetweennessBlock), acc);
    };
    if (count == 1) {
      run(0);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t slot = 0; slot < count; ++slot) pool.emplace_back(run, slot);
    }
    for (std::size_t slot = 0; slot < count; ++slot) {
      for (std::size_t v = 0; v < n; ++v) total[v] += partial[slot][v];
    }
  }

  CentralityScores scores;
  for (std::size_t v = 0; v < n; ++v) scores.emplace(ig.ids[v], total[v] / 2.0);
  return scores;
}

// ---------------------------------------------------------------------------
// Table-1 style team identification

/// Scores closer than this are treated as equal for the argmax tie-break and the
/// stopping rule; floating-point accumulation order would otherwise decide.
inline constexpr double kScoreTolerance = 1e-9;

struct LeaderPick {
  AuthorId id;
  double betweenness = 0.0;

  bool operator==(const LeaderPick&) const = default;
};

struct LeaderOptions {
  double stop_at_or_below = 1.0;
  unsigned workers = 1;
};

/// Repeatedly extracts the top-betweenness node (ties: smallest AuthorId) and removes
/// it, until the maximum remaining score is <= stop_at_or_below.
inline std::vector<LeaderPick> identify_leaders(CoauthorGraph g, const LeaderOptions& opts = {}) {
  std::vector<LeaderPick> leaders;
  while (!g.empty()) {
    const auto scores = betweenness(g, opts.workers);
    double best = 0.0;
    for (const auto& [id, s] : scores) best = std::max(best, s);
    if (best <= opts.stop_at_or_below + kScoreTolerance) break;
    // std::map iterates in AuthorId order, so the first near-max entry is the tie winner.
    for (const auto& [id, s] : scores) {
      if (s >= best - kScoreTolerance * std::max(1.0, best)) {
        leaders.push_back({id, s});
        g.remove_node(id);
        break;
      }
    }
  }
  return leaders;
}

/// Closed-neighborhood 2-clique: the leader's neighbors, any two of which are within
/// two hops through the leader. The leader itself is excluded.
inline std::set<AuthorId> core_members(const CoauthorGraph& g, const AuthorId& leader) {
  std::set<AuthorId> core;
  for (const auto& [nb, w] : g.node(leader).neighbors) core.insert(nb);
  return core;
}

/// One breadth-first layer out of `seeds` in `g_freq`, minus the seeds.
inline std::set<AuthorId> snowball_expand(const CoauthorGraph& g_freq, const std::set<AuthorId>& seeds) {
  std::set<AuthorId> frontier;
  for (const auto& s : seeds) {
    auto it = g_freq.nodes().find(s);
    if (it == g_freq.nodes().end()) continue;
    for (const auto& [nb, w] : it->second.neighbors) {
      if (!seeds.count(nb)) frontier.insert(nb);
    }
  }
  return frontier;
}

enum class MemberRole { leader, two_faction, snowball };

inline std::string_view to_string(MemberRole r) {
  switch (r) {
    case MemberRole::leader: return "leader";
    case MemberRole::two_faction: return "two_faction";
    case MemberRole::snowball: return "snowball";
  }
  return "leader";
}

inline MemberRole parse_member_role(std::string_view s) {
  if (s == "leader") return MemberRole::leader;
  if (s == "two_faction") return MemberRole::two_faction;
  if (s == "snowball") return MemberRole::snowball;
  throw ParseError(0, "unknown member role \"" + std::string(s) + "\"");
}

struct Team {
  AuthorId leader;
  double leader_betweenness = 0.0;
  std::set<AuthorId> core;
  std::set<AuthorId> non_core;
  std::map<AuthorId, MemberRole> provenance;

  bool operator==(const Team&) const = default;

  std::set<AuthorId> members() const {
    std::set<AuthorId> all = core;
    all.insert(non_core.begin(), non_core.end());
    all.insert(leader);
    return all;
  }
};

struct TeamOptions {
  std::int64_t min_pubs = 10;
  std::int64_t min_edge_weight = 5;
  std::int64_t snowball_weight = 2;
  unsigned workers = 1;
};

struct TeamIdentification {
  CoauthorGraph full;
  CoauthorGraph thresholded;
  std::vector<LeaderPick> leaders;
  std::vector<Team> teams;
};

/// Leaders are reserved before any membership is assigned; members then go to the
/// earliest-extracted team that reaches them, so teams are pairwise disjoint.
inline TeamIdentification identify_teams(const std::vector<PublicationRecord>& records, const TeamOptions& opts = {}) {
  if (opts.snowball_weight < 1) throw ConfigError("snowball_weight must be >= 1");
  TeamIdentification out;
  out.full = build_coauthor_graph(records);
  out.thresholded = threshold_subgraph(out.full, opts.min_pubs, opts.min_edge_weight);
  out.leaders = identify_leaders(out.thresholded, {1.0, opts.workers});
  const CoauthorGraph g_freq = threshold_subgraph(out.full, 0, opts.snowball_weight);

  std::set<AuthorId> claimed;
  for (const auto& l : out.leaders) claimed.insert(l.id);

  for (const auto& l : out.leaders) {
    Team t;
    t.leader = l.id;
    t.leader_betweenness = l.betweenness;
    t.provenance[l.id] = MemberRole::leader;
    for (const auto& c : core_members(out.thresholded, l.id)) {
      if (claimed.insert(c).second) {
        t.core.insert(c);
        t.provenance[c] = MemberRole::two_faction;
      }
    }
    std::set<AuthorId> seeds = t.core;
    seeds.insert(l.id);
    for (const auto& s : snowball_expand(g_freq, seeds)) {
      if (claimed.insert(s).second) {
        t.non_core.insert(s);
        t.provenance[s] = MemberRole::snowball;
      }
    }
    out.teams.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline json graph_to_json(const CoauthorGraph& g) {
  json j;
  j["nodes"] = json::array();
  for (const auto& [id, n] : g.nodes()) {
    j["nodes"].push_back({{"id", id.canonical}, {"publication_count", n.publication_count}});
  }
  j["edges"] = json::array();
  for (const auto& e : g.edges()) {
    j["edges"].push_back({{"a", e.a.canonical}, {"b", e.b.canonical}, {"weight", e.weight}});
  }
  return j;
}

inline CoauthorGraph graph_from_json(const json& j) {
  CoauthorGraph g;
  try {
    for (const auto& n : j.at("nodes")) {
      auto pubs = n.at("publication_count").get<std::int64_t>();
      if (pubs < 1) throw ParseError(0, "publication_count must be >= 1");
      g.add_node(AuthorId{n.at("id").get<std::string>()}, pubs);
    }
    for (const auto& e : j.at("edges")) {
      AuthorId a{e.at("a").get<std::string>()}, b{e.at("b").get<std::string>()};
      auto w = e.at("weight").get<std::int64_t>();
      if (a == b) throw ParseError(0, "self-loop on \"" + a.canonical + "\"");
      if (w < 1) throw ParseError(0, "edge weight must be >= 1");
      if (!g.contains(a) || !g.contains(b)) throw ParseError(0, "edge endpoint is not a declared node");
      g.add_edge(a, b, w);
    }
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("malformed graph JSON: ") + e.what());
  }
  return g;
}

inline json team_to_json(const Team& t) {
  json j;
  j["leader"] = t.leader.canonical;
  j["leader_betweenness"] = t.leader_betweenness;
  j["core"] = json::array();
  for (const auto& c : t.core) j["core"].push_back(c.canonical);
  j["non_core"] = json::array();
  for (const auto& c : t.non_core) j["non_core"].push_back(c.canonical);
  j["provenance"] = json::object();
  for (const auto& [id, role] : t.provenance) j["provenance"][id.canonical] = std::string(to_string(role));
  return j;
}

inline Team team_from_json(const json& j) {
  Team t;
  try {
    t.leader = AuthorId{j.at("leader").get<std::string>()};
    t.leader_betweenness = j.at("leader_betweenness").get<double>();
    for (const auto& c : j.at("core")) t.core.insert(AuthorId{c.get<std::string>()});
    for (const auto& c : j.at("non_core")) t.non_core.insert(AuthorId{c.get<std::string>()});
    for (const auto& [k, v] : j.at("provenance").items()) {
      t.provenance[AuthorId{k}] = parse_member_role(v.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("malformed team JSON: ") + e.what());
  }
  if (t.core.count(t.leader) || t.non_core.count(t.leader)) throw ParseError(0, "leader listed as a member");
  for (const auto& c : t.core) {
    if (t.non_core.count(c)) throw ParseError(0, "\"" + c.canonical + "\" is both core and non-core");
  }
  return t;
}

}  // namespace teamportrait
