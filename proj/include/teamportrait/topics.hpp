#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "ingest.hpp"
#include "network.hpp"
#include "text.hpp"

namespace teamportrait {

enum class PosTag { noun, verb, adjective, gerund, adverb, other };

inline std::optional<PosTag> parse_pos(std::string_view s) {
  if (s == "noun" || s == "n") return PosTag::noun;
  if (s == "verb" || s == "v") return PosTag::verb;
  if (s == "adjective" || s == "adj" || s == "a") return PosTag::adjective;
  if (s == "gerund" || s == "vn") return PosTag::gerund;
  if (s == "adverb" || s == "adv" || s == "d") return PosTag::adverb;
  if (s == "other") return PosTag::other;
  return std::nullopt;
}

inline bool is_content_pos(PosTag p) { return p != PosTag::other; }

struct Token {
  std::string surface;
  std::optional<PosTag> pos;
  std::size_t position = 0;

  bool operator==(const Token&) const = default;
};

struct Document {
  std::string id;
  std::vector<Token> tokens;
};

using StopwordSet = std::set<std::string>;

/// One term per line; blank lines and lines starting with '#' are skipped.
inline StopwordSet parse_stopwords(std::string_view content) {
  StopwordSet s;
  for (const auto& line : text::split(content, "\n")) {
    auto t = text::normalize(line);
    if (!t.empty() && t[0] != '#') s.insert(t);
  }
  return s;
}

/// Default segmentation: ASCII letters and digits form words, every other ASCII byte
/// separates; bytes >= 0x80 are word characters so UTF-8 words survive intact.
inline std::vector<std::string> segment(std::string_view raw) {
  std::vector<std::string> words;
  std::string cur;
  for (char ch : raw) {
    auto c = static_cast<unsigned char>(ch);
    bool word = c >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    if (word) {
      cur.push_back(ch);
    } else if (!cur.empty()) {
      words.push_back(text::fold_case(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(text::fold_case(cur));
  return words;
}

/// Drops stopwords and, where POS tags are present, everything outside
/// {noun, verb, adjective, gerund, adverb}. Positions are renumbered from 0.
inline Document preprocess(std::string id, const std::vector<Token>& tokens, const StopwordSet& stopwords) {
  Document doc{std::move(id), {}};
  for (const auto& t : tokens) {
    auto surface = text::normalize(t.surface);
    if (surface.empty() || stopwords.count(surface)) continue;
    if (t.pos && !is_content_pos(*t.pos)) continue;
    doc.tokens.push_back({surface, t.pos, doc.tokens.size()});
  }
  if (doc.tokens.empty()) throw InputError("document \"" + doc.id + "\": empty document after filtering");
  return doc;
}

inline Document preprocess(std::string id, std::string_view raw_text, const StopwordSet& stopwords) {
  std::vector<Token> tokens;
  for (auto& w : segment(raw_text)) tokens.push_back({std::move(w), std::nullopt, tokens.size()});
  return preprocess(std::move(id), tokens, stopwords);
}

// ---------------------------------------------------------------------------
// TF-IDF

struct CorpusStats {
  std::size_t documents = 0;
  std::map<std::string, std::size_t> df;

  void add(const Document& d) {
    ++documents;
    std::set<std::string> seen;
    for (const auto& t : d.tokens) {
      if (seen.insert(t.surface).second) ++df[t.surface];
    }
  }

  std::size_t document_frequency(const std::string& term) const {
    auto it = df.find(term);
    return it == df.end() ? 0 : it->second;
  }
};

inline double idf(std::size_t documents, std::size_t df) {
  return std::log(static_cast<double>(documents) / (static_cast<double>(df) + 1.0));
}

/// tf = count / |d|.
inline std::map<std::string, double> term_frequencies(const Document& doc) {
  std::map<std::string, std::size_t> counts;
  for (const auto& t : doc.tokens) ++counts[t.surface];
  const double length = static_cast<double>(doc.tokens.size());
  std::map<std::string, double> tf;
  for (const auto& [term, c] : counts) tf.emplace(term, static_cast<double>(c) / length);
  return tf;
}

/// tfidf = tf * ln(D / (df + 1)). Terms present in every document get a negative idf.
inline std::map<std::string, double> tfidf_scores(const Document& doc, const CorpusStats& stats) {
  if (stats.documents < 1) throw InputError("corpus statistics cover no documents");
  std::map<std::string, double> scores;
  for (const auto& [term, tf] : term_frequencies(doc)) {
    scores.emplace(term, tf * idf(stats.documents, stats.document_frequency(term)));
  }
  return scores;
}

// ---------------------------------------------------------------------------
// TextRank

struct TextRankConfig {
  double damping = 0.85;
  std::size_t window = 4;
  std::size_t max_iterations = 100;
  double epsilon = 1e-6;

  void validate() const {
    if (!(damping > 0.0 && damping < 1.0)) throw ConfigError("textrank damping must be in (0, 1)");
    if (window < 1) throw ConfigError("textrank window must be >= 1");
    if (max_iterations < 1) throw ConfigError("textrank max_iterations must be >= 1");
    if (!(epsilon > 0.0)) throw ConfigError("textrank epsilon must be > 0");
  }
};

struct TextRankResult {
  std::map<std::string, double> scores;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> max_deltas;  // per iteration
};

/// Term co-occurrence weights: every pair of token positions i < j with j - i < window
/// and distinct terms adds 1 to the undirected edge.
inline std::map<std::pair<std::string, std::string>, double> cooccurrence_weights(const Document& doc,
                                                                                  std::size_t window) {
  std::map<std::pair<std::string, std::string>, double> w;
  const auto& tk = doc.tokens;
  for (std::size_t i = 0; i < tk.size(); ++i) {
    for (std::size_t j = i + 1; j < tk.size() && j - i < window; ++j) {
      if (tk[i].surface == tk[j].surface) continue;
      auto key = std::minmax(tk[i].surface, tk[j].surface);
      w[{key.first, key.second}] += 1.0;
    }
  }
  return w;
}

/// Synchronous (Jacobi) iteration from all-ones, so the result is independent of node order.
inline TextRankResult textrank(const Document& doc, const TextRankConfig& cfg = {}) {
  cfg.validate();
  std::map<std::string, std::size_t> index;
  for (const auto& t : doc.tokens) index.emplace(t.surface, 0);
  std::vector<std::string> terms;
  for (auto& [term, i] : index) {
    i = terms.size();
    terms.push_back(term);
  }
  const std::size_t n = terms.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  std::vector<double> out_weight(n, 0.0);
  for (const auto& [pair, w] : cooccurrence_weights(doc, cfg.window)) {
    const std::size_t a = index.at(pair.first), b = index.at(pair.second);
    adj[a].emplace_back(b, w);
    adj[b].emplace_back(a, w);
    out_weight[a] += w;
    out_weight[b] += w;
  }

  TextRankResult result;
  std::vector<double> score(n, 1.0), next(n);
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    double max_delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (const auto& [j, w] : adj[i]) sum += w / out_weight[j] * score[j];
      next[i] = (1.0 - cfg.damping) + cfg.damping * sum;
      max_delta = std::max(max_delta, std::abs(next[i] - score[i]));
    }
    score.swap(next);
    result.iterations = it + 1;
    result.max_deltas.push_back(max_delta);
    if (max_delta < cfg.epsilon) {
      result.converged = true;
      break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) result.scores.emplace(terms[i], score[i]);
  return result;
}

inline std::map<std::string, double> textrank_scores(const Document& doc, const TextRankConfig& cfg = {}) {
  return textrank(doc, cfg).scores;
}

// ---------------------------------------------------------------------------
// Fusion

struct RankedTerm {
  std::string term;
  double score = 0.0;

  bool operator==(const RankedTerm&) const = default;
};

/// Descending by score, ties by term.
inline std::vector<RankedTerm> rank_scores(const std::map<std::string, double>& scores) {
  std::vector<RankedTerm> out;
  for (const auto& [t, s] : scores) out.push_back({t, s});
  std::stable_sort(out.begin(), out.end(), [](const RankedTerm& a, const RankedTerm& b) { return a.score > b.score; });
  return out;
}

struct ScoredTopic {
  std::string term;
  double tfidf = 0.0;
  double tr = 0.0;
  std::optional<std::size_t> rank_tfidf;  // 1-based position in the TF-IDF top-K
  std::optional<std::size_t> rank_tr;     // 1-based position in the TextRank top-K
  double fused = 0.0;

  bool operator==(const ScoredTopic&) const = default;
};

/// Position-weighted sum; a component outside its list's top-K contributes 0.
inline double fused_score(double tfidf, std::optional<std::size_t> rank_tfidf, double tr,
                          std::optional<std::size_t> rank_tr) {
  double s = 0.0;
  if (rank_tfidf) s += (1.0 / static_cast<double>(*rank_tfidf)) * tfidf;
  if (rank_tr) s += (1.0 / static_cast<double>(*rank_tr)) * tr;
  return s;
}

/// Candidates are the union of both top-K lists. Inputs must already be sorted
/// descending; scores for a candidate are looked up in the full lists.
inline std::vector<ScoredTopic> fuse(const std::vector<RankedTerm>& tfidf_ranked, const std::vector<RankedTerm>& tr_ranked,
                                     std::size_t k) {
  if (k == 0) throw ConfigError("fusion K must be positive");
  std::map<std::string, ScoredTopic> cand;
  auto take = [&](const std::vector<RankedTerm>& list, bool is_tfidf) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      auto& t = cand[list[i].term];
      t.term = list[i].term;
      (is_tfidf ? t.tfidf : t.tr) = list[i].score;
      if (i < k) (is_tfidf ? t.rank_tfidf : t.rank_tr) = i + 1;
    }
  };
  take(tfidf_ranked, true);
  take(tr_ranked, false);

  std::vector<ScoredTopic> out;
  for (auto& [term, t] : cand) {
    if (!t.rank_tfidf && !t.rank_tr) continue;
    t.fused = fused_score(t.tfidf, t.rank_tfidf, t.tr, t.rank_tr);
    out.push_back(std::move(t));
  }
  std::stable_sort(out.begin(), out.end(), [](const ScoredTopic& a, const ScoredTopic& b) { return a.fused > b.fused; });
  return out;
}

struct DocumentScores {
  std::vector<RankedTerm> tfidf;
  std::vector<RankedTerm> textrank;
  std::vector<ScoredTopic> fused;
  std::size_t textrank_iterations = 0;
};

inline DocumentScores score_document(const Document& doc, const CorpusStats& stats, const TextRankConfig& cfg,
                                     std::size_t k) {
  DocumentScores s;
  s.tfidf = rank_scores(tfidf_scores(doc, stats));
  auto tr = textrank(doc, cfg);
  s.textrank_iterations = tr.iterations;
  s.textrank = rank_scores(tr.scores);
  s.fused = fuse(s.tfidf, s.textrank, k);
  return s;
}

// ---------------------------------------------------------------------------
// Team topics

struct TopicOptions {
  TextRankConfig textrank;
  std::optional<std::size_t> fusion_k;  // defaults to 2 * n
  StopwordSet stopwords;
  /// Pre-tokenized (optionally POS-tagged) documents, keyed by record id; these replace
  /// the default segmentation of title + abstract.
  std::map<std::string, std::vector<Token>> tokenized;
};

struct TeamTopic {
  std::string term;
  double score = 0.0;           // sum of per-document fused scores
  std::size_t documents = 0;    // team documents in which the term was a fusion candidate

  bool operator==(const TeamTopic&) const = default;
};

/// Documents and corpus statistics for a record set. Records whose text is empty after
/// filtering carry no document.
class TopicModel {
 public:
  TopicModel(const std::vector<PublicationRecord>& records, TopicOptions opts) : opts_(std::move(opts)) {
    opts_.textrank.validate();
    if (opts_.fusion_k && *opts_.fusion_k == 0) throw ConfigError("fusion K must be positive");
    for (const auto& r : records) {
      std::optional<Document> doc;
      try {
        if (auto it = opts_.tokenized.find(r.id); it != opts_.tokenized.end()) {
          doc = preprocess(r.id, it->second, opts_.stopwords);
        } else {
          std::string raw = r.title;
          if (r.abstract) raw += "\n" + *r.abstract;
          doc = preprocess(r.id, raw, opts_.stopwords);
        }
      } catch (const InputError&) {
        continue;
      }
      stats_.add(*doc);
      docs_.emplace(r.id, std::move(*doc));
    }
  }

  const CorpusStats& stats() const { return stats_; }
  const TopicOptions& options() const { return opts_; }
  bool has_document(const std::string& record_id) const { return docs_.count(record_id) != 0; }

  const Document& document(const std::string& record_id) const {
    auto it = docs_.find(record_id);
    if (it == docs_.end()) throw InputError("record \"" + record_id + "\" has no text-bearing document");
    return it->second;
  }

  std::size_t fusion_k(std::size_t n) const { return opts_.fusion_k.value_or(2 * n); }

  DocumentScores score(const std::string& record_id, std::size_t n) const {
    return score_document(document(record_id), stats_, opts_.textrank, fusion_k(n));
  }

  /// Sums each term's fused score over the team's documents and returns the top n.
  std::vector<TeamTopic> team_topics(const Team& team, const std::vector<PublicationRecord>& records,
                                     std::size_t n) const {
    if (n == 0) throw ConfigError("topic n must be positive");
    const auto members = team.members();
    std::map<std::string, TeamTopic> acc;
    std::size_t used = 0;
    for (const auto& r : records) {
      if (!has_document(r.id)) continue;
      bool ours = false;
      for (const auto& a : r.author_ids()) ours = ours || members.count(a);
      if (!ours) continue;
      ++used;
      for (const auto& t : score(r.id, n).fused) {
        auto& slot = acc[t.term];
        slot.term = t.term;
        slot.score += t.fused;
        ++slot.documents;
      }
    }
    if (used == 0) throw InputError("team led by \"" + team.leader.canonical + "\" has no text-bearing records");
    std::vector<TeamTopic> out;
    for (auto& [term, t] : acc) out.push_back(std::move(t));
    std::stable_sort(out.begin(), out.end(), [](const TeamTopic& a, const TeamTopic& b) { return a.score > b.score; });
    if (out.size() > n) out.resize(n);
    return out;
  }

 private:
  TopicOptions opts_;
  CorpusStats stats_;
  std::map<std::string, Document> docs_;
};

inline std::vector<TeamTopic> extract_team_topics(const Team& team, const std::vector<PublicationRecord>& records,
                                                  std::size_t n, const TopicOptions& opts) {
  return TopicModel(records, opts).team_topics(team, records, n);
}

// ---------------------------------------------------------------------------
// JSON

inline json scored_topic_to_json(const ScoredTopic& t) {
  json j;
  j["term"] = t.term;
  j["tfidf"] = t.tfidf;
  j["tr"] = t.tr;
  j["rank_tfidf"] = t.rank_tfidf ? json(*t.rank_tfidf) : json(nullptr);
  j["rank_tr"] = t.rank_tr ? json(*t.rank_tr) : json(nullptr);
  j["fused"] = t.fused;
  return j;
}

inline ScoredTopic scored_topic_from_json(const json& j) {
  ScoredTopic t;
  t.term = j.at("term").get<std::string>();
  t.tfidf = j.at("tfidf").get<double>();
  t.tr = j.at("tr").get<double>();
  if (!j.at("rank_tfidf").is_null()) t.rank_tfidf = j["rank_tfidf"].get<std::size_t>();
  if (!j.at("rank_tr").is_null()) t.rank_tr = j["rank_tr"].get<std::size_t>();
  t.fused = j.at("fused").get<double>();
  return t;
}

inline json team_topic_to_json(const TeamTopic& t) {
  return {{"term", t.term}, {"score", t.score}, {"documents", t.documents}};
}

inline TeamTopic team_topic_from_json(const json& j) {
  return {j.at("term").get<std::string>(), j.at("score").get<double>(), j.at("documents").get<std::size_t>()};
}

/// Tokenized document: {"id": ..., "tokens": [{"surface": ..., "pos": ...}, ...]}.
inline std::pair<std::string, std::vector<Token>> tokenized_from_json(const json& j, std::size_t line = 0) {
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("tokens") || !j["tokens"].is_array()) {
    throw ParseError(line, "tokenized document needs string \"id\" and array \"tokens\"");
  }
  std::vector<Token> tokens;
  for (const auto& t : j["tokens"]) {
    if (!t.is_object() || !t.contains("surface") || !t["surface"].is_string()) {
      throw ParseError(line, "token needs a string \"surface\"");
    }
    Token tok{t["surface"].get<std::string>(), std::nullopt, tokens.size()};
    if (t.contains("pos") && !t["pos"].is_null()) {
      if (!t["pos"].is_string()) throw ParseError(line, "\"pos\" must be a string");
      auto p = parse_pos(t["pos"].get<std::string>());
      if (!p) throw ParseError(line, "unknown POS tag \"" + t["pos"].get<std::string>() + "\"");
      tok.pos = p;
    }
    tokens.push_back(std::move(tok));
  }
  return {j["id"].get<std::string>(), std::move(tokens)};
}

/// JSON-lines of tokenized documents keyed by record id.
inline std::map<std::string, std::vector<Token>> parse_tokenized(std::string_view content) {
  std::map<std::string, std::vector<Token>> out;
  std::size_t line_no = 0;
  for (const auto& line : text::split(content, "\n")) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    auto [id, tokens] = tokenized_from_json(j, line_no);
    if (!out.emplace(id, std::move(tokens)).second) throw ParseError(line_no, "duplicate document id \"" + id + "\"");
  }
  return out;
}

}  // namespace teamportrait
