#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "ingest.hpp"
#include "network.hpp"
#include "portrait.hpp"
#include "render.hpp"
#include "text.hpp"
#include "topics.hpp"

namespace teamportrait {

namespace artifact {
inline constexpr const char* corpus = "corpus.jsonl";
inline constexpr const char* dropped = "dropped.json";
inline constexpr const char* graph = "graph.json";
inline constexpr const char* teams = "teams.json";
inline constexpr const char* topics = "topics.json";
inline constexpr const char* evaluation = "evaluation.json";
inline constexpr const char* portraits = "portraits";
}  // namespace artifact

inline const std::vector<std::string>& method_names() {
  static const std::vector<std::string> m{"TF-IDF", "TextRank", "TF-TR"};
  return m;
}

namespace detail {

inline std::filesystem::path out_path(const PipelineConfig& cfg, const char* name) {
  return std::filesystem::path(cfg.output_dir) / name;
}

inline std::string read_required(const std::filesystem::path& p) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(p, ec)) throw MissingFileError(p.string());
  return text::read_file(p.string());
}

inline json read_json_artifact(const std::filesystem::path& p) {
  const auto content = read_required(p);
  try {
    return json::parse(content);
  } catch (const json::parse_error& e) {
    throw ParseError(0, p.string() + ": invalid JSON: " + e.what());
  }
}

inline void ensure_output_dir(const PipelineConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError(cfg.output_dir, "cannot create output directory: " + ec.message());
}

inline void write_json(const std::filesystem::path& p, const json& j) { text::write_file(p.string(), j.dump(2) + "\n"); }

inline InputFormat format_for(const PipelineConfig& cfg, const std::string& path) {
  if (cfg.input_format == "csv") return InputFormat::csv;
  if (cfg.input_format == "json_lines") return InputFormat::json_lines;
  return std::filesystem::path(path).extension() == ".csv" ? InputFormat::csv : InputFormat::json_lines;
}

inline std::vector<PublicationRecord> load_corpus(const PipelineConfig& cfg) {
  return parse_records(read_required(out_path(cfg, artifact::corpus)), InputFormat::json_lines);
}

inline std::vector<Team> load_teams(const PipelineConfig& cfg) {
  const auto j = read_json_artifact(out_path(cfg, artifact::teams));
  std::vector<Team> teams;
  if (!j.contains("teams") || !j["teams"].is_array()) throw ParseError(0, "teams.json has no \"teams\" array");
  for (const auto& t : j["teams"]) teams.push_back(team_from_json(t));
  return teams;
}

inline std::vector<std::string> terms_of(const std::vector<RankedTerm>& ranked, std::size_t limit) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < limit; ++i) out.push_back(ranked[i].term);
  return out;
}

}  // namespace detail

/// Parses inputs, drops invalid records, canonicalizes authors.
inline void run_ingest(const PipelineConfig& cfg) {
  if (cfg.inputs.empty()) throw ConfigError("no input files configured");
  std::vector<PublicationRecord> records;
  std::set<std::string> ids;
  for (const auto& path : cfg.inputs) {
    auto parsed = parse_records(detail::read_required(path), detail::format_for(cfg, path), {cfg.csv_delimiter});
    for (auto& r : parsed) {
      if (!ids.insert(r.id).second) throw ParseError(0, path + ": duplicate record id \"" + r.id + "\"");
      records.push_back(std::move(r));
    }
  }
  AliasMap aliases;
  if (!cfg.alias_map.empty()) {
    try {
      aliases = alias_map_from_json(json::parse(detail::read_required(cfg.alias_map)));
    } catch (const json::parse_error& e) {
      throw ConfigError(cfg.alias_map + ": invalid JSON: " + e.what());
    }
  }
  auto cleaned = clean_records(std::move(records));
  auto canonical = canonicalize_authors(std::move(cleaned.kept), aliases, {cfg.affiliation_discriminator});

  detail::ensure_output_dir(cfg);
  text::write_file(detail::out_path(cfg, artifact::corpus).string(), write_records_jsonl(canonical));
  detail::write_json(detail::out_path(cfg, artifact::dropped), drop_report(cleaned.dropped));
}

/// Builds the co-authorship network and identifies teams.
inline void run_identify(const PipelineConfig& cfg) {
  const auto records = detail::load_corpus(cfg);
  const auto result = identify_teams(records, cfg.team_options());
  if (result.thresholded.edge_count() == 0) throw InputError("empty graph after thresholding");

  json teams;
  teams["thresholds"] = {{"min_pubs", cfg.min_pubs},
                         {"min_edge_weight", cfg.min_edge_weight},
                         {"snowball_weight", cfg.snowball_weight}};
  teams["thresholded_graph"] = {{"nodes", result.thresholded.node_count()}, {"edges", result.thresholded.edge_count()}};
  teams["leaders"] = json::array();
  for (const auto& l : result.leaders) teams["leaders"].push_back({{"id", l.id.canonical}, {"betweenness", l.betweenness}});
  teams["teams"] = json::array();
  for (const auto& t : result.teams) teams["teams"].push_back(team_to_json(t));

  detail::ensure_output_dir(cfg);
  detail::write_json(detail::out_path(cfg, artifact::graph), graph_to_json(result.full));
  detail::write_json(detail::out_path(cfg, artifact::teams), teams);
}

inline TopicOptions topic_options(const PipelineConfig& cfg) {
  TopicOptions opts;
  opts.textrank = cfg.textrank;
  opts.fusion_k = cfg.fusion_k;
  if (!cfg.stopwords.empty()) opts.stopwords = parse_stopwords(detail::read_required(cfg.stopwords));
  if (!cfg.tokens.empty()) opts.tokenized = parse_tokenized(detail::read_required(cfg.tokens));
  return opts;
}

/// Team topics plus per-document rankings of every method for records with gold keywords.
inline void run_topics(const PipelineConfig& cfg) {
  const auto records = detail::load_corpus(cfg);
  const auto teams = detail::load_teams(cfg);
  const TopicModel model(records, topic_options(cfg));
  const std::size_t eval_depth = std::max(cfg.topic_n, default_n_values().back());

  json out;
  out["settings"] = {{"topic_n", cfg.topic_n},
                     {"fusion_k", cfg.effective_fusion_k()},
                     {"documents", model.stats().documents},
                     {"textrank", config_to_json(cfg)["textrank"]}};
  out["teams"] = json::array();
  for (const auto& t : teams) {
    json jt;
    jt["leader"] = t.leader.canonical;
    jt["topics"] = json::array();
    try {
      for (const auto& topic : model.team_topics(t, records, cfg.topic_n)) jt["topics"].push_back(team_topic_to_json(topic));
    } catch (const InputError&) {
      // team without text-bearing records: empty topic list
    }
    out["teams"].push_back(std::move(jt));
  }
  out["documents"] = json::array();
  for (const auto& r : records) {
    if (!r.gold_keywords || r.gold_keywords->empty() || !model.has_document(r.id)) continue;
    const auto s = model.score(r.id, cfg.topic_n);
    json jd;
    jd["id"] = r.id;
    jd["gold"] = *r.gold_keywords;
    jd["tfidf"] = detail::terms_of(s.tfidf, eval_depth);
    jd["textrank"] = detail::terms_of(s.textrank, eval_depth);
    jd["textrank_iterations"] = s.textrank_iterations;
    jd["tf_tr"] = json::array();
    for (std::size_t i = 0; i < s.fused.size() && i < eval_depth; ++i) jd["tf_tr"].push_back(scored_topic_to_json(s.fused[i]));
    out["documents"].push_back(std::move(jd));
  }
  detail::ensure_output_dir(cfg);
  detail::write_json(detail::out_path(cfg, artifact::topics), out);
}

/// P/R/F1 at n in {1, 3, 5, 10}, macro-averaged, one row per method.
inline void run_evaluate(const PipelineConfig& cfg) {
  const auto topics = detail::read_json_artifact(detail::out_path(cfg, artifact::topics));
  std::map<std::string, std::vector<GoldDocument>> docs;
  try {
    for (const auto& d : topics.at("documents")) {
      const auto id = d.at("id").get<std::string>();
      const auto gold = d.at("gold").get<std::vector<std::string>>();
      docs["TF-IDF"].push_back({id, gold, d.at("tfidf").get<std::vector<std::string>>()});
      docs["TextRank"].push_back({id, gold, d.at("textrank").get<std::vector<std::string>>()});
      std::vector<std::string> fused;
      for (const auto& t : d.at("tf_tr")) fused.push_back(t.at("term").get<std::string>());
      docs["TF-TR"].push_back({id, gold, fused});
    }
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("topics.json: ") + e.what());
  }

  json out;
  out["n_values"] = default_n_values();
  out["documents"] = docs.empty() ? 0 : docs.begin()->second.size();
  std::map<std::string, std::vector<MacroResult>> by_method;
  for (const auto& [method, ds] : docs) by_method[method] = evaluate_corpus(ds);
  out["table"] = evaluation_table(by_method, method_names());
  detail::ensure_output_dir(cfg);
  detail::write_json(detail::out_path(cfg, artifact::evaluation), out);
}

inline std::string team_dir_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "team-%02zu", index + 1);
  return buf;
}

/// Renders one portrait directory per team plus portraits/index.json.
inline void run_portrait(const PipelineConfig& cfg) {
  const auto records = detail::load_corpus(cfg);
  const auto teams = detail::load_teams(cfg);
  const auto topics_json = detail::read_json_artifact(detail::out_path(cfg, artifact::topics));

  std::map<std::string, std::vector<TeamTopic>> topics_by_leader;
  try {
    for (const auto& t : topics_json.at("teams")) {
      auto& list = topics_by_leader[t.at("leader").get<std::string>()];
      for (const auto& topic : t.at("topics")) list.push_back(team_topic_from_json(topic));
    }
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("topics.json: ") + e.what());
  }

  const auto root = detail::out_path(cfg, artifact::portraits);
  json index = json::array();
  for (std::size_t i = 0; i < teams.size(); ++i) {
    const auto& topics = topics_by_leader[teams[i].leader.canonical];
    const auto bundle = build_portrait(teams[i], records, topics, cfg.max_cloud_terms);
    render_report(bundle, root / team_dir_name(i), cfg.render_options());
    index.push_back({{"leader", bundle.leader}, {"directory", team_dir_name(i)}, {"members", bundle.profile.member_count}});
  }
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw IoError(root.string(), "cannot create directory: " + ec.message());
  detail::write_json(root / "index.json", index);
}

inline void run_pipeline(const PipelineConfig& cfg) {
  run_ingest(cfg);
  run_identify(cfg);
  run_topics(cfg);
  run_evaluate(cfg);
  run_portrait(cfg);
}

}  // namespace teamportrait
