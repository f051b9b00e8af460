#include "rumorlens/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace rumorlens {

using json = nlohmann::json;

Config default_config() {
  Config c;
  c.stopwords = {"a",    "an",  "and",  "are", "as",  "at",   "be",  "by",  "for", "from", "has", "have", "he",
                 "in",   "is",  "it",   "its", "of",  "on",   "or",  "she", "that", "the", "their", "there",
                 "they", "this", "to",  "was", "were", "will", "with", "we",  "you", "i",   "our",
                 "的",   "了",  "是",   "在",  "和",  "也",   "就",  "都",  "而",  "及",  "与",  "着"};
  c.lexicon = {{"good", 0.6},      {"great", 0.8},     {"true", 0.3},     {"safe", 0.5},     {"support", 0.4},
               {"thanks", 0.5},    {"hope", 0.4},      {"happy", 0.7},    {"calm", 0.3},     {"bad", -0.6},
               {"terrible", -0.9}, {"fake", -0.7},     {"false", -0.5},   {"lie", -0.8},     {"misleading", -0.7},
               {"panic", -0.7},    {"danger", -0.6},   {"angry", -0.8},   {"violence", -0.8}, {"chaos", -0.7},
               {"支持", 0.5},      {"安全", 0.5},      {"希望", 0.4},     {"感谢", 0.6},     {"真相", 0.2},
               {"谣言", -0.7},     {"虚假", -0.8},     {"恐慌", -0.7},    {"愤怒", -0.8},    {"危险", -0.6},
               {"暴力", -0.8},     {"误导", -0.7}};
  c.sentiment_tau = 0.1;
  c.taxonomy = {
      {"World News",
       {"election", "protest", "protests", "government", "president", "war", "military", "embassy", "foreign",
        "demonstration", "border", "选举", "抗议", "政府", "总统", "战争", "军队", "外交", "示威"}},
      {"Health",
       {"virus", "covid", "vaccine", "hospital", "epidemic", "mask", "masks", "infection", "doctor", "病毒", "疫苗",
        "医院", "疫情", "口罩", "感染", "医生"}},
      {"Finance",
       {"stock", "stocks", "bank", "market", "price", "prices", "economy", "tax", "股票", "银行", "市场", "价格",
        "经济"}},
      {"Society",
       {"police", "school", "street", "city", "crime", "traffic", "accident", "id", "card", "警察", "学校", "街道",
        "城市", "犯罪", "事故", "身份"}},
      {"Other", {}},
  };
  c.regions = {"BJ", "TJ", "HE", "SX", "NM", "LN", "JL", "HL", "SH", "JS", "ZJ", "AH",
               "FJ", "JX", "SD", "HA", "HB", "HN", "GD", "GX", "HI", "CQ", "SC", "GZ",
               "YN", "XZ", "SN", "GS", "QH", "NX", "XJ", "TW", "HK", "MO", "overseas"};
  return c;
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

template <typename T>
void read_if(const json& obj, const char* key, T& target) {
  if (auto it = obj.find(key); it != obj.end()) {
    try {
      target = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
  }
}

const json& section(const json& doc, const char* name) {
  static const json empty = json::object();
  auto it = doc.find(name);
  if (it == doc.end()) return empty;
  if (!it->is_object()) throw ConfigError(std::string("config section '") + name + "' must be an object");
  return *it;
}

}  // namespace

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lexicon file " + path.string());
  Lexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected token<TAB>score");
    double score = 0.0;
    try {
      std::size_t used = 0;
      score = std::stod(line.substr(tab + 1), &used);
    } catch (const std::exception&) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": invalid score");
    }
    if (score < -1.0 || score > 1.0)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": score outside [-1, 1]");
    lex[line.substr(0, tab)] = score;
  }
  return lex;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open stopword file " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) words.insert(line);
  }
  return words;
}

Taxonomy taxonomy_from_json(const json& list) {
  if (!list.is_array()) throw ConfigError("taxonomy must be a JSON list of {label, triggers}");
  Taxonomy tax;
  for (const auto& entry : list) {
    if (!entry.is_object() || !entry.contains("label") || !entry["label"].is_string())
      throw ConfigError("taxonomy entry needs a string 'label'");
    TopicRule rule;
    rule.label = entry["label"].get<std::string>();
    if (auto it = entry.find("triggers"); it != entry.end()) {
      if (!it->is_array()) throw ConfigError("taxonomy entry '" + rule.label + "': triggers must be a list");
      for (const auto& t : *it) rule.triggers.insert(t.get<std::string>());
    }
    tax.push_back(std::move(rule));
  }
  try {
    validate_taxonomy(tax);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return tax;
}

Config config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  Config c = default_config();

  const json& tok = section(doc, "tokenizer");
  if (tok.contains("stopwords")) {
    std::vector<std::string> words;
    read_if(tok, "stopwords", words);
    c.stopwords = {words.begin(), words.end()};
  }
  if (tok.contains("stopwords_file")) c.stopwords = load_stopwords(resolve(base_dir, tok["stopwords_file"].get<std::string>()));
  read_if(tok, "keywords_per_case", c.keywords_per_case);

  const json& sent = section(doc, "sentiment");
  read_if(sent, "tau", c.sentiment_tau);
  if (sent.contains("lexicon")) {
    std::map<std::string, double> lex;
    read_if(sent, "lexicon", lex);
    c.lexicon = {lex.begin(), lex.end()};
  }
  if (sent.contains("lexicon_file")) c.lexicon = load_lexicon(resolve(base_dir, sent["lexicon_file"].get<std::string>()));
  for (const auto& [tok_, v] : c.lexicon)
    if (v < -1.0 || v > 1.0) throw ConfigError("lexicon value for '" + tok_ + "' outside [-1, 1]");

  if (auto it = doc.find("taxonomy"); it != doc.end()) {
    if (it->is_string()) {
      const auto path = resolve(base_dir, it->get<std::string>());
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot open taxonomy file " + path.string());
      json list = json::parse(in, nullptr, false);
      if (list.is_discarded()) throw ConfigError("taxonomy file is not valid JSON: " + path.string());
      c.taxonomy = taxonomy_from_json(list);
    } else {
      c.taxonomy = taxonomy_from_json(*it);
    }
  }
  if (auto it = doc.find("regions"); it != doc.end()) c.regions = it->get<std::vector<std::string>>();

  const json& tsne = section(doc, "tsne");
  read_if(tsne, "perplexity", c.tsne.perplexity);
  read_if(tsne, "iterations", c.tsne.iterations);
  read_if(tsne, "early_exaggeration", c.tsne.early_exaggeration);
  read_if(tsne, "exaggeration_iterations", c.tsne.exaggeration_iterations);
  read_if(tsne, "learning_rate", c.tsne.learning_rate);
  read_if(tsne, "initial_momentum", c.tsne.initial_momentum);
  read_if(tsne, "final_momentum", c.tsne.final_momentum);
  read_if(tsne, "momentum_switch_iteration", c.tsne.momentum_switch_iteration);
  read_if(tsne, "seed", c.tsne.seed);

  const json& geo = section(doc, "geometry");
  GeometryConfig& g = c.geometry;
  read_if(geo, "total_radius", g.total_radius);
  read_if(geo, "center_scale", g.center_scale);
  read_if(geo, "center_min", g.center_min);
  read_if(geo, "center_max", g.center_max);
  read_if(geo, "pad", g.pad);
  read_if(geo, "min_ring_width", g.min_ring_width);
  read_if(geo, "gap_angle", g.gap_angle);
  read_if(geo, "min_sector_angle", g.min_sector_angle);
  read_if(geo, "label_arc_length", g.label_arc_length);
  read_if(geo, "label_radial_extent", g.label_radial_extent);
  const json& glyph = section(geo, "glyph");
  read_if(glyph, "r_min", c.glyph.r_min);
  read_if(glyph, "r_max", c.glyph.r_max);
  read_if(glyph, "arc_gap", c.glyph.arc_gap);

  const json& col = section(doc, "colors");
  read_if(col, "negative", c.colors.negative);
  read_if(col, "neutral", c.colors.neutral);
  read_if(col, "positive", c.colors.positive);
  read_if(col, "ring_stroke", c.colors.ring_stroke);
  read_if(col, "center", c.colors.center);
  read_if(col, "topics", c.colors.topics);
  if (c.colors.topics.empty()) throw ConfigError("colors.topics must be non-empty");

  const json& srv = section(doc, "server");
  read_if(srv, "host", c.server.host);
  read_if(srv, "port", c.server.port);
  read_if(srv, "audit_path", c.server.audit_path);
  read_if(srv, "sync_embedding_max", c.server.sync_embedding_max);
  read_if(srv, "series_keywords", c.server.series_keywords);
  if (!c.server.audit_path.empty()) c.server.audit_path = resolve(base_dir, c.server.audit_path).string();
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());
  return config_from_json(doc, path.parent_path());
}

std::optional<std::filesystem::path> resolve_config_path(const std::optional<std::string>& explicit_path) {
  if (explicit_path && !explicit_path->empty()) return std::filesystem::path(*explicit_path);
  if (const char* env = std::getenv("RUMORLENS_CONFIG"); env && *env) return std::filesystem::path(env);
  return std::nullopt;
}

json config_to_json(const Config& c) {
  json tax = json::array();
  for (const auto& rule : c.taxonomy) tax.push_back({{"label", rule.label}, {"triggers", rule.triggers}});
  const auto& g = c.geometry;
  return {
      {"taxonomy", tax},
      {"regions", c.regions},
      {"colors",
       {{"negative", c.colors.negative},
        {"neutral", c.colors.neutral},
        {"positive", c.colors.positive},
        {"ring_stroke", c.colors.ring_stroke},
        {"center", c.colors.center},
        {"topics", c.colors.topics}}},
      {"geometry",
       {{"total_radius", g.total_radius},
        {"center_scale", g.center_scale},
        {"center_min", g.center_min},
        {"center_max", g.center_max},
        {"pad", g.pad},
        {"min_ring_width", g.min_ring_width},
        {"gap_angle", g.gap_angle},
        {"min_sector_angle", g.min_sector_angle},
        {"label_arc_length", g.label_arc_length},
        {"label_radial_extent", g.label_radial_extent},
        {"glyph", {{"r_min", c.glyph.r_min}, {"r_max", c.glyph.r_max}, {"arc_gap", c.glyph.arc_gap}}}}},
      {"sentiment", {{"tau", c.sentiment_tau}}},
      {"tsne",
       {{"perplexity", c.tsne.perplexity},
        {"iterations", c.tsne.iterations},
        {"early_exaggeration", c.tsne.early_exaggeration},
        {"learning_rate", c.tsne.learning_rate},
        {"seed", c.tsne.seed}}},
  };
}

}  // namespace rumorlens
