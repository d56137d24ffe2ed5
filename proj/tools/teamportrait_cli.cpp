// teamportrait: command-line driver for the team-portrait pipeline.
//
// Exit codes: 0 success, 1 I/O failure, 2 missing input file or upstream artifact,
// 3 configuration / validation failure. Errors are printed to stderr as one JSON object.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "teamportrait/teamportrait.hpp"

namespace tp = teamportrait;

namespace {

struct Overrides {
  std::vector<std::string> inputs;
  std::optional<std::string> input_format, csv_delimiter, aliases, stopwords, tokens, out;
  std::optional<std::int64_t> min_pubs, min_edge_weight, snowball_weight;
  std::optional<double> damping, epsilon, font_min, font_max;
  std::optional<std::size_t> window, max_iterations, fusion_k, topic_n, max_cloud_terms;
  std::optional<unsigned> workers;
  bool affiliation_discriminator = false;

  void apply(tp::PipelineConfig& c) const {
    if (!inputs.empty()) c.inputs = inputs;
    if (input_format) c.input_format = *input_format;
    if (csv_delimiter) c.csv_delimiter = *csv_delimiter;
    if (aliases) c.alias_map = *aliases;
    if (stopwords) c.stopwords = *stopwords;
    if (tokens) c.tokens = *tokens;
    if (out) c.output_dir = *out;
    if (min_pubs) c.min_pubs = *min_pubs;
    if (min_edge_weight) c.min_edge_weight = *min_edge_weight;
    if (snowball_weight) c.snowball_weight = *snowball_weight;
    if (damping) c.textrank.damping = *damping;
    if (epsilon) c.textrank.epsilon = *epsilon;
    if (window) c.textrank.window = *window;
    if (max_iterations) c.textrank.max_iterations = *max_iterations;
    if (fusion_k) c.fusion_k = *fusion_k;
    if (topic_n) c.topic_n = *topic_n;
    if (max_cloud_terms) c.max_cloud_terms = *max_cloud_terms;
    if (font_min) c.font_min_px = *font_min;
    if (font_max) c.font_max_px = *font_max;
    if (workers) c.workers = *workers;
    if (affiliation_discriminator) c.affiliation_discriminator = true;
  }
};

int fail(int code, const std::string& kind, const std::string& message, const std::string& path = {}) {
  nlohmann::json j{{"error", message}, {"kind", kind}, {"exit_code", code}};
  if (!path.empty()) j["path"] = path;
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Research-team identification, topic extraction and portrait rendering"};
  app.set_version_flag("--version", std::string("teamportrait ") + tp::kVersion);
  app.fallthrough();

  std::string config_path;
  bool config_dump = false;
  Overrides ov;
  app.add_option("-c,--config", config_path, "TOML or JSON config file");
  app.add_flag("--config-dump", config_dump, "Print the effective configuration as JSON and exit");
  app.add_option("-i,--input", ov.inputs, "Input record file(s): .jsonl or .csv");
  app.add_option("--input-format", ov.input_format, "auto | json_lines | csv");
  app.add_option("--csv-delimiter", ov.csv_delimiter, "Author delimiter inside CSV cells");
  app.add_option("--aliases", ov.aliases, "JSON alias map (raw name -> canonical name)");
  app.add_option("--stopwords", ov.stopwords, "Stopword file, one term per line");
  app.add_option("--tokens", ov.tokens, "Pre-tokenized documents (JSON lines)");
  app.add_option("-o,--out", ov.out, "Output directory");
  app.add_option("--min-pubs", ov.min_pubs, "Minimum publications per author");
  app.add_option("--min-edge-weight", ov.min_edge_weight, "Minimum co-authoring frequency for leader mining");
  app.add_option("--snowball-weight", ov.snowball_weight, "Minimum co-authoring frequency for snowball expansion");
  app.add_option("--damping", ov.damping, "TextRank damping");
  app.add_option("--window", ov.window, "TextRank co-occurrence window");
  app.add_option("--epsilon", ov.epsilon, "TextRank convergence threshold");
  app.add_option("--max-iterations", ov.max_iterations, "TextRank iteration cap");
  app.add_option("--fusion-k", ov.fusion_k, "Top-K of each ranking entering fusion");
  app.add_option("--topic-n", ov.topic_n, "Topics kept per team");
  app.add_option("--max-cloud-terms", ov.max_cloud_terms, "Terms in the word cloud");
  app.add_option("--font-min", ov.font_min, "Smallest cloud font size, px");
  app.add_option("--font-max", ov.font_max, "Largest cloud font size, px");
  app.add_option("--workers", ov.workers, "Worker threads for betweenness");
  app.add_flag("--affiliation-discriminator", ov.affiliation_discriminator,
               "Split same-name authors by affiliation");

  auto* ingest = app.add_subcommand("ingest", "Parse, clean and canonicalize records");
  auto* identify = app.add_subcommand("identify", "Build the network and identify teams");
  auto* topics = app.add_subcommand("topics", "Extract team and document topics");
  auto* evaluate = app.add_subcommand("evaluate", "Score document topics against gold keywords");
  auto* portrait = app.add_subcommand("portrait", "Render team portraits");
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage in order");
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(3, "usage", e.what());
  }

  try {
    tp::PipelineConfig cfg;
    if (!config_path.empty()) cfg = tp::load_config(config_path);
    ov.apply(cfg);
    cfg.validate();

    if (config_dump) {
      std::cout << tp::config_to_json(cfg).dump(2) << "\n";
      return 0;
    }
    if (*ingest) tp::run_ingest(cfg);
    else if (*identify) tp::run_identify(cfg);
    else if (*topics) tp::run_topics(cfg);
    else if (*evaluate) tp::run_evaluate(cfg);
    else if (*portrait) tp::run_portrait(cfg);
    else if (*pipeline) tp::run_pipeline(cfg);
    else return fail(3, "usage", "a subcommand is required: ingest, identify, topics, evaluate, portrait, pipeline");
  } catch (const tp::MissingFileError& e) {
    return fail(2, "missing_file", e.what(), e.path());
  } catch (const tp::IoError& e) {
    return fail(1, "io", e.what(), e.path());
  } catch (const tp::ConfigError& e) {
    return fail(3, "config", e.what());
  } catch (const tp::ParseError& e) {
    return fail(3, "parse", e.what());
  } catch (const tp::InputError& e) {
    return fail(3, "validation", e.what());
  } catch (const std::exception& e) {
    return fail(1, "internal", e.what());
  }
  return 0;
}
