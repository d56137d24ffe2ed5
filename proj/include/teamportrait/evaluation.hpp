#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "text.hpp"

namespace teamportrait {

struct EvalResult {
  std::size_t n = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  bool operator==(const EvalResult&) const = default;
};

inline double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

/// Precision/recall/F1 of the top n extracted terms against the gold set. Terms are
/// compared after trim + whitespace collapse + case fold; duplicates collapse to the
/// first occurrence. Zero denominators yield 0 for the affected metric.
inline EvalResult evaluate_at_n(const std::vector<std::string>& extracted, const std::vector<std::string>& gold,
                                std::size_t n) {
  if (n < 1) throw InputError("n must be >= 1");
  std::set<std::string> gold_set;
  for (const auto& g : gold) {
    auto t = text::normalize(g);
    if (!t.empty()) gold_set.insert(t);
  }
  if (gold_set.empty()) throw InputError("gold keyword set is empty");

  std::vector<std::string> top;
  std::set<std::string> seen;
  for (const auto& e : extracted) {
    if (top.size() == n) break;
    auto t = text::normalize(e);
    if (t.empty() || !seen.insert(t).second) continue;
    top.push_back(t);
  }

  EvalResult r;
  r.n = n;
  for (const auto& t : top) r.tp += gold_set.count(t);
  r.fp = top.size() - r.tp;
  r.fn = gold_set.size() - r.tp;
  r.precision = safe_ratio(static_cast<double>(r.tp), static_cast<double>(r.tp + r.fp));
  r.recall = safe_ratio(static_cast<double>(r.tp), static_cast<double>(r.tp + r.fn));
  // 2PR/(P+R) reduces to 2tp/(2tp+fp+fn); one division of integers keeps it correctly rounded
  r.f1 = safe_ratio(2.0 * static_cast<double>(r.tp), static_cast<double>(2 * r.tp + r.fp + r.fn));
  return r;
}

struct MacroResult {
  std::size_t n = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t documents = 0;

  bool operator==(const MacroResult&) const = default;
};

inline const std::vector<std::size_t>& default_n_values() {
  static const std::vector<std::size_t> v{1, 3, 5, 10};
  return v;
}

/// Unweighted mean over documents, per n. `per_doc[i]` holds document i's results.
inline std::vector<MacroResult> macro_average(const std::vector<std::vector<EvalResult>>& per_doc,
                                              const std::vector<std::size_t>& n_values = default_n_values()) {
  if (per_doc.empty()) throw InputError("no documents with gold keywords to evaluate");
  std::vector<MacroResult> out;
  for (std::size_t n : n_values) {
    MacroResult m;
    m.n = n;
    for (const auto& doc : per_doc) {
      const EvalResult* hit = nullptr;
      for (const auto& r : doc) {
        if (r.n == n) hit = &r;
      }
      if (!hit) throw InputError("document is missing a result for n = " + std::to_string(n));
      m.precision += hit->precision;
      m.recall += hit->recall;
      m.f1 += hit->f1;
    }
    const double d = static_cast<double>(per_doc.size());
    m.precision /= d;
    m.recall /= d;
    m.f1 /= d;
    m.documents = per_doc.size();
    out.push_back(m);
  }
  return out;
}

struct GoldDocument {
  std::string id;
  std::vector<std::string> gold;
  std::vector<std::string> extracted;  // ranked
};

/// Scores every document at each n and macro-averages.
inline std::vector<MacroResult> evaluate_corpus(const std::vector<GoldDocument>& docs,
                                                const std::vector<std::size_t>& n_values = default_n_values()) {
  std::vector<std::vector<EvalResult>> per_doc;
  for (const auto& d : docs) {
    std::vector<EvalResult> rs;
    for (std::size_t n : n_values) rs.push_back(evaluate_at_n(d.extracted, d.gold, n));
    per_doc.push_back(std::move(rs));
  }
  return macro_average(per_doc, n_values);
}

/// One row per method; columns "P@n", "R@n", "F1@n".
inline json evaluation_table(const std::map<std::string, std::vector<MacroResult>>& by_method,
                             const std::vector<std::string>& method_order) {
  json rows = json::array();
  for (const auto& m : method_order) {
    auto it = by_method.find(m);
    if (it == by_method.end()) continue;
    json row;
    row["method"] = m;
    for (const auto& r : it->second) {
      row["P@" + std::to_string(r.n)] = r.precision;
      row["R@" + std::to_string(r.n)] = r.recall;
      row["F1@" + std::to_string(r.n)] = r.f1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace teamportrait
