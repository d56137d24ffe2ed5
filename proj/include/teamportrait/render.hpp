#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "error.hpp"
#include "portrait.hpp"
#include "text.hpp"

namespace teamportrait {

struct RenderOptions {
  double font_min_px = 12.0;
  double font_max_px = 48.0;
  double cloud_width_px = 800.0;

  void validate() const {
    if (!(font_min_px > 0.0) || !(font_max_px >= font_min_px)) {
      throw ConfigError("font px range must satisfy 0 < min <= max");
    }
    if (!(cloud_width_px > 0.0)) throw ConfigError("cloud width must be positive");
  }
};

// ---------------------------------------------------------------------------
// DOT

inline std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string_view dot_shape(NodeRole r) {
  switch (r) {
    case NodeRole::leader: return "doubleoctagon";
    case NodeRole::core: return "box";
    case NodeRole::non_core: return "ellipse";
  }
  return "ellipse";
}

/// Undirected DOT graph. Every node and edge carries a `role`/`relation` attribute;
/// coauthor edges are solid, mentoring edges dashed with an arrow toward the student.
inline std::string render_dot(const PortraitBundle& b) {
  std::string out = "graph team {\n";
  out += "  graph [label=" + dot_quote("Research team of " + b.leader) + ", labelloc=t, overlap=false];\n";
  out += "  node [fontname=\"Helvetica\"];\n";
  for (const auto& n : b.cooperation.nodes) {
    std::string label = n.display_name;
    if (n.institution) label += "\n" + *n.institution;
    out += "  " + dot_quote(n.author_id) + " [label=" + dot_quote(label) + ", shape=" + std::string(dot_shape(n.role)) +
           ", role=" + std::string(to_string(n.role));
    if (n.discipline) out += ", discipline=" + dot_quote(*n.discipline);
    out += "];\n";
  }
  for (const auto& e : b.cooperation.edges) {
    out += "  " + dot_quote(e.a) + " -- " + dot_quote(e.b) + " [relation=" + std::string(to_string(e.relation)) +
           ", weight=" + std::to_string(e.weight);
    if (e.relation == Relation::coauthor) {
      out += ", style=solid, color=\"#4a6fa5\", penwidth=" +
             text::fixed(1.0 + std::log2(static_cast<double>(std::max<std::int64_t>(e.weight, 1))), 2) +
             ", label=" + dot_quote(std::to_string(e.weight));
    } else {
      out += ", style=dashed, color=\"#b03a2e\", dir=forward, label=\"mentor\"";
    }
    out += "];\n";
  }
  out += "}\n";
  return out;
}

// ---------------------------------------------------------------------------
// Word cloud

struct CloudPlacement {
  std::string term;
  double font_px = 0.0;
  double x = 0.0;         // left edge
  double baseline = 0.0;  // text baseline
  double width = 0.0;
  double height = 0.0;
};

struct CloudLayout {
  double width = 0.0;
  double height = 0.0;
  std::vector<CloudPlacement> items;
};

/// Advance-width estimate: 0.6 em per ASCII code point, 1 em otherwise.
inline double estimate_text_width(std::string_view s, double font_px) {
  double em = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto c = static_cast<unsigned char>(s[i]);
    if ((c & 0xC0) == 0x80) continue;
    em += c < 0x80 ? 0.6 : 1.0;
  }
  return em * font_px;
}

inline double cloud_font_px(double weight, const RenderOptions& o) {
  return o.font_min_px + std::clamp(weight, 0.0, 1.0) * (o.font_max_px - o.font_min_px);
}

/// Greedy row packing in input order; each row is centered. Items never overlap:
/// rows are stacked by their tallest glyph and items in a row are separated by a gap.
inline CloudLayout layout_cloud(const std::vector<TopicCloudItem>& cloud, const RenderOptions& o) {
  o.validate();
  constexpr double margin = 10.0, gap = 8.0, line = 1.25;
  CloudLayout layout;
  layout.width = o.cloud_width_px;
  const double usable = o.cloud_width_px - 2 * margin;

  std::vector<std::vector<CloudPlacement>> rows(1);
  double row_width = 0.0;
  for (const auto& item : cloud) {
    CloudPlacement p;
    p.term = item.term;
    p.font_px = cloud_font_px(item.weight, o);
    p.width = estimate_text_width(item.term, p.font_px);
    p.height = p.font_px * line;
    const double needed = rows.back().empty() ? p.width : row_width + gap + p.width;
    if (!rows.back().empty() && needed > usable) {
      rows.emplace_back();
      row_width = p.width;
    } else {
      row_width = needed;
    }
    rows.back().push_back(std::move(p));
  }

  double y = margin;
  for (auto& row : rows) {
    if (row.empty()) continue;
    double total = 0.0, tallest = 0.0, max_font = 0.0;
    for (const auto& p : row) {
      total += p.width;
      tallest = std::max(tallest, p.height);
      max_font = std::max(max_font, p.font_px);
    }
    total += gap * static_cast<double>(row.size() - 1);
    double x = margin + std::max(0.0, (usable - total) / 2.0);
    for (auto& p : row) {
      p.x = x;
      p.baseline = y + max_font;
      x += p.width + gap;
      layout.items.push_back(p);
    }
    y += tallest;
  }
  layout.height = y + margin;
  return layout;
}

inline std::string_view cloud_color(std::size_t i) {
  static constexpr std::string_view palette[] = {"#1f4e79", "#2e75b6", "#c55a11", "#548235", "#7030a0", "#bf9000"};
  return palette[i % std::size(palette)];
}

inline std::string render_cloud_svg(const std::vector<TopicCloudItem>& cloud, const RenderOptions& o) {
  const auto layout = layout_cloud(cloud, o);
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + text::fixed(layout.width, 0) +
                    "\" height=\"" + text::fixed(layout.height, 0) + "\" viewBox=\"0 0 " +
                    text::fixed(layout.width, 0) + " " + text::fixed(layout.height, 0) + "\">\n";
  out += "  <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  for (std::size_t i = 0; i < layout.items.size(); ++i) {
    const auto& p = layout.items[i];
    out += "  <text x=\"" + text::fixed(p.x, 1) + "\" y=\"" + text::fixed(p.baseline, 1) +
           "\" font-family=\"Helvetica, Arial, sans-serif\" font-size=\"" + text::fixed(p.font_px, 1) +
           "\" fill=\"" + std::string(cloud_color(i)) + "\">" + text::xml_escape(p.term) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

// ---------------------------------------------------------------------------
// Cooperation diagram (leader centered, core on the inner ring, non-core outside)

inline std::string render_cooperation_svg(const CooperationGraphExport& g) {
  constexpr double w = 640, h = 640, cx = w / 2, cy = h / 2, r_core = 150, r_outer = 270;
  std::map<std::string, std::pair<double, double>> pos;
  std::vector<const CooperationNode*> core, outer;
  for (const auto& n : g.nodes) {
    if (n.role == NodeRole::leader) pos[n.author_id] = {cx, cy};
    else (n.role == NodeRole::core ? core : outer).push_back(&n);
  }
  auto ring = [&](const std::vector<const CooperationNode*>& ns, double radius, double phase) {
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const double a = phase + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(ns.size());
      pos[ns[i]->author_id] = {cx + radius * std::cos(a), cy + radius * std::sin(a)};
    }
  };
  ring(core, r_core, -std::numbers::pi / 2);
  ring(outer, r_outer, -std::numbers::pi / 2 + 0.3);

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" viewBox=\"0 0 640 640\">\n";
  for (const auto& e : g.edges) {
    const auto& [x1, y1] = pos.at(e.a);
    const auto& [x2, y2] = pos.at(e.b);
    out += "  <line x1=\"" + text::fixed(x1, 1) + "\" y1=\"" + text::fixed(y1, 1) + "\" x2=\"" + text::fixed(x2, 1) +
           "\" y2=\"" + text::fixed(y2, 1) + "\" class=\"" + std::string(to_string(e.relation)) + "\"" +
           (e.relation == Relation::mentoring ? " stroke=\"#b03a2e\" stroke-dasharray=\"6 4\" stroke-width=\"2\""
                                              : " stroke=\"#4a6fa5\" stroke-width=\"" +
                                                    text::fixed(1.0 + std::log2(static_cast<double>(std::max<std::int64_t>(e.weight, 1))), 2) + "\"") +
           "/>\n";
  }
  for (const auto& n : g.nodes) {
    const auto& [x, y] = pos.at(n.author_id);
    const char* fill = n.role == NodeRole::leader ? "#c55a11" : n.role == NodeRole::core ? "#2e75b6" : "#a9c4e4";
    const double radius = n.role == NodeRole::leader ? 16 : n.role == NodeRole::core ? 11 : 8;
    out += "  <circle cx=\"" + text::fixed(x, 1) + "\" cy=\"" + text::fixed(y, 1) + "\" r=\"" + text::fixed(radius, 0) +
           "\" fill=\"" + fill + "\"/>\n";
    out += "  <text x=\"" + text::fixed(x, 1) + "\" y=\"" + text::fixed(y + radius + 12, 1) +
           "\" text-anchor=\"middle\" font-family=\"Helvetica, Arial, sans-serif\" font-size=\"11\">" +
           text::xml_escape(n.display_name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

// ---------------------------------------------------------------------------
// HTML report

inline std::string render_html(const PortraitBundle& b, const std::string& dot, const std::string& cloud_svg) {
  const auto& p = b.profile;
  auto row = [](std::string_view k, const std::string& v) {
    return "      <tr><th>" + std::string(k) + "</th><td>" + text::xml_escape(v) + "</td></tr>\n";
  };
  std::string fields;
  for (std::size_t i = 0; i < p.research_fields.size(); ++i) fields += (i ? ", " : "") + p.research_fields[i];

  std::string leader_name = b.leader;
  for (const auto& n : b.cooperation.nodes) {
    if (n.role == NodeRole::leader) leader_name = n.display_name;
  }

  std::string out = "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  out += "<title>Team portrait: " + text::xml_escape(leader_name) + "</title>\n";
  out += "<style>body{font-family:Helvetica,Arial,sans-serif;margin:2em;color:#222}"
         "table{border-collapse:collapse}th,td{border:1px solid #ccc;padding:4px 10px;text-align:left}"
         "section{margin-bottom:2em}pre{background:#f6f6f6;padding:1em;overflow:auto}</style>\n";
  out += "</head>\n<body>\n";
  out += "<h1>Research team led by " + text::xml_escape(leader_name) + "</h1>\n";
  out += "<section id=\"profile\">\n  <h2>Team profile</h2>\n  <table>\n";
  out += row("Members", std::to_string(p.member_count));
  out += row("Research fields", fields);
  out += row("Projects hosted by the leader", std::to_string(p.leader_project_count));
  out += row("Team projects", std::to_string(p.total_project_count));
  out += row("Papers", std::to_string(p.paper_count));
  out += row("Journal papers", std::to_string(p.journal_paper_count));
  out += row("Conference papers", std::to_string(p.conference_paper_count));
  out += row("Monographs", std::to_string(p.monograph_count));
  out += row("Theses", std::to_string(p.thesis_count));
  out += row("Patents", std::to_string(p.patent_count));
  out += row("Citations", std::to_string(p.citation_total));
  out += "  </table>\n</section>\n";
  out += "<section id=\"cooperation\">\n  <h2>Cooperation and mentoring</h2>\n";
  out += render_cooperation_svg(b.cooperation);
  out += "  <details><summary>Graphviz source</summary><pre>" + text::xml_escape(dot) + "</pre></details>\n";
  out += "</section>\n";
  out += "<section id=\"topics\">\n  <h2>Research topics</h2>\n" + cloud_svg + "</section>\n";
  out += "</body>\n</html>\n";
  return out;
}

struct ReportFiles {
  std::filesystem::path portrait_json;
  std::filesystem::path cooperation_dot;
  std::filesystem::path cloud_svg;
  std::filesystem::path report_html;
};

/// Writes portrait.json, cooperation.dot, cloud.svg and report.html into out_dir.
inline ReportFiles render_report(const PortraitBundle& b, const std::filesystem::path& out_dir,
                                 const RenderOptions& o = {}) {
  o.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string(), "cannot create directory: " + ec.message());

  ReportFiles files{out_dir / "portrait.json", out_dir / "cooperation.dot", out_dir / "cloud.svg",
                    out_dir / "report.html"};
  const std::string dot = render_dot(b);
  const std::string svg = render_cloud_svg(b.cloud, o);
  text::write_file(files.portrait_json.string(), portrait_to_json(b).dump(2) + "\n");
  text::write_file(files.cooperation_dot.string(), dot);
  text::write_file(files.cloud_svg.string(), svg);
  text::write_file(files.report_html.string(), render_html(b, dot, svg));
  return files;
}

}  // namespace teamportrait
