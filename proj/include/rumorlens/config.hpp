#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "rumorlens/features.hpp"
#include "rumorlens/projection.hpp"

namespace rumorlens {

/// Propagation view geometry in layout units (total_radius = 400 by default).
struct GeometryConfig {
  double total_radius = 400.0;
  double center_scale = 80.0;  // center radius at full normalized influence
  double center_min = 20.0;
  double center_max = 80.0;
  double pad = 8.0;
  double min_ring_width = 12.0;
  double gap_angle = 0.02;
  double min_sector_angle = 0.03;
  // keyword labels need this much room, measured at total_radius = 400
  double label_arc_length = 28.0;
  double label_radial_extent = 12.0;
};

struct ColorConfig {
  std::string negative = "#D0342C";
  std::string neutral = "#E7C24B";
  std::string positive = "#3FA34D";
  std::string ring_stroke = "#FFFFFF";
  std::string center = "#5B6770";
  std::vector<std::string> topics = {"#1F77B4", "#FF7F0E", "#2CA02C", "#9467BD", "#8C8C8C"};

  const std::string& topic(int index) const { return topics[static_cast<std::size_t>(index) % topics.size()]; }
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string audit_path = "verdicts.jsonl";
  // filtered subsets up to this size are embedded inline; larger ones run
  // as background jobs and answer 202 until done
  std::size_t sync_embedding_max = 300;
  std::size_t series_keywords = 5;
};

struct Config {
  std::unordered_set<std::string> stopwords;
  Lexicon lexicon;
  double sentiment_tau = 0.1;
  std::size_t keywords_per_case = 10;
  Taxonomy taxonomy;
  std::vector<std::string> regions;
  EmbeddingConfig tsne;
  GlyphConfig glyph;
  GeometryConfig geometry;
  ColorConfig colors;
  ServerConfig server;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Built-in defaults: small bilingual lexicon and stopword list, the five
/// shipped topics, province codes plus "overseas".
Config default_config();

/// Overlays a JSON document on the defaults. Relative file references
/// (lexicon_file, stopwords_file, taxonomy as a string) resolve against
/// `base_dir`.
Config config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
Config load_config(const std::filesystem::path& path);

/// Explicit path, else $RUMORLENS_CONFIG, else none.
std::optional<std::filesystem::path> resolve_config_path(const std::optional<std::string>& explicit_path);

Lexicon load_lexicon(const std::filesystem::path& path);
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);
Taxonomy taxonomy_from_json(const nlohmann::json& list);

nlohmann::json config_to_json(const Config& cfg);

}  // namespace rumorlens
