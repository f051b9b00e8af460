#include "rumorlens/pipeline.hpp"

#include <chrono>
#include <fstream>

namespace rumorlens {

using json = nlohmann::json;

namespace {

class Stopwatch {
 public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

json diagnostics_json(const std::vector<Diagnostic>& diags, std::size_t cap) {
  json arr = json::array();
  for (std::size_t i = 0; i < std::min(cap, diags.size()); ++i) {
    json d{{"subject", diags[i].subject}, {"message", diags[i].message}};
    if (diags[i].line) d["line"] = diags[i].line;
    arr.push_back(std::move(d));
  }
  return {{"total", diags.size()}, {"items", arr}};
}

}  // namespace

std::shared_ptr<const Dataset> build_dataset(std::vector<Post> posts, std::vector<UserProfile> users, Config config,
                                             BuildReport report) {
  validate_taxonomy(config.taxonomy);
  Stopwatch clock;
  auto ds = std::make_shared<Dataset>();
  ds->config = std::move(config);
  const Config& cfg = ds->config;
  report.posts_read = posts.size();
  report.users_read = users.size();

  CascadeBuild built = build_cascades(posts);
  if (built.cascades.empty()) throw PipelineError("no cases", report.post_diagnostics);
  report.cascade_diagnostics = std::move(built.diagnostics);
  report.dropped_posts = built.dropped.size();
  ds->cascades = std::move(built.cascades);
  report.timings_ms["cascades"] = clock.lap_ms();

  for (auto& u : users) {
    std::string id = u.id;
    ds->users.emplace(std::move(id), std::move(u));
  }

  const Tokenizer tokenizer(cfg.stopwords);
  const LexiconSentimentScorer scorer(tokenizer, cfg.lexicon, cfg.sentiment_tau);

  // per-post features; the keyword is the post's top TF-IDF token over all
  // cascade posts
  std::vector<const Post*> all_posts;
  for (std::size_t c = 0; c < ds->cascades.size(); ++c) {
    for (const auto& [id, post] : ds->cascades[c].nodes) {
      all_posts.push_back(&post);
      ds->post_case.emplace(id, c);
    }
  }
  report.cascade_nodes = all_posts.size();
  {
    std::vector<std::vector<std::string>> corpus;
    corpus.reserve(all_posts.size());
    for (const Post* p : all_posts) corpus.push_back(tokenizer.tokenize(p->text));
    const auto weights = tf_idf(corpus);
    for (std::size_t i = 0; i < all_posts.size(); ++i) {
      PostFeatures pf;
      pf.word_count = count_words(all_posts[i]->text);
      pf.sentiment = scorer.score(all_posts[i]->text);
      if (!weights[i].empty()) pf.keyword = weights[i].front().token;
      ds->post_features.emplace(all_posts[i]->id, std::move(pf));
    }
  }
  report.timings_ms["post_features"] = clock.lap_ms();

  {
    std::vector<std::vector<std::string>> corpus;
    corpus.reserve(ds->cascades.size());
    for (const auto& c : ds->cascades) corpus.push_back(tokenizer.tokenize(c.root().text));
    auto keywords = tf_idf(corpus);
    ds->features.reserve(ds->cascades.size());
    for (std::size_t c = 0; c < ds->cascades.size(); ++c) {
      const Cascade& cascade = ds->cascades[c];
      auto& kw = keywords[c];
      if (kw.size() > cfg.keywords_per_case) kw.resize(cfg.keywords_per_case);
      const UserProfile* author = nullptr;
      if (auto it = ds->users.find(cascade.root().user_id); it != ds->users.end())
        author = &it->second;
      else
        ++report.missing_authors;
      ds->features.push_back(extract_case_features(cascade, author, std::move(kw), scorer, cfg.taxonomy));
      ds->case_index.emplace(cascade.root_id, c);
    }
    assign_feature_vectors(ds->features, cfg.taxonomy);
  }
  report.cases = ds->cascades.size();
  report.vector_length = ds->features.front().vector.size();
  report.timings_ms["case_features"] = clock.lap_ms();

  ds->known_regions.insert(cfg.regions.begin(), cfg.regions.end());
  for (const auto& c : ds->cascades) ds->known_regions.insert(c.root().region);

  ds->overview = {{"regions", region_counts(*ds, {})},
                  {"topic_series", series_to_json(topic_series(*ds, {}, cfg.server.series_keywords))}};
  report.timings_ms["aggregates"] = clock.lap_ms();

  ds->report = std::move(report);
  return ds;
}

std::shared_ptr<const Dataset> run_pipeline(const std::filesystem::path& posts_path,
                                            const std::filesystem::path& users_path, Config config) {
  Stopwatch clock;
  BuildReport report;

  std::ifstream posts_in(posts_path);
  if (!posts_in) throw PipelineError("cannot read posts file " + posts_path.string());
  ParseResult<Post> posts;
  try {
    posts = parse_posts(posts_in);
  } catch (const IngestError& e) {
    throw PipelineError(posts_path.string() + ": " + e.what());
  }
  report.post_diagnostics = std::move(posts.diagnostics);
  report.timings_ms["parse_posts"] = clock.lap_ms();

  std::ifstream users_in(users_path);
  if (!users_in) throw PipelineError("cannot read users file " + users_path.string());
  ParseResult<UserProfile> users;
  try {
    users = parse_users(users_in);
  } catch (const IngestError& e) {
    throw PipelineError(users_path.string() + ": " + e.what());
  }
  report.user_diagnostics = std::move(users.diagnostics);
  report.timings_ms["parse_users"] = clock.lap_ms();

  return build_dataset(std::move(posts.records), std::move(users.records), std::move(config), std::move(report));
}

json report_to_json(const Dataset& ds, std::size_t max_diagnostics) {
  const BuildReport& r = ds.report;
  json timings = json::object();
  for (const auto& [k, v] : r.timings_ms) timings[k] = v;
  return {
      {"posts_read", r.posts_read},
      {"users_read", r.users_read},
      {"cases", r.cases},
      {"cascade_nodes", r.cascade_nodes},
      {"descendants", r.cascade_nodes - r.cases},
      {"dropped_posts", r.dropped_posts},
      {"missing_authors", r.missing_authors},
      {"vector_length", r.vector_length},
      {"diagnostics",
       {{"posts", diagnostics_json(r.post_diagnostics, max_diagnostics)},
        {"users", diagnostics_json(r.user_diagnostics, max_diagnostics)},
        {"cascades", diagnostics_json(r.cascade_diagnostics, max_diagnostics)}}},
      {"timings_ms", timings},
  };
}

}  // namespace rumorlens
