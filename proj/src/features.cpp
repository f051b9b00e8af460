#include "rumorlens/features.hpp"

#include <algorithm>
#include <stdexcept>

namespace rumorlens {

std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::negative: return "negative";
    case Polarity::neutral: return "neutral";
    case Polarity::positive: return "positive";
  }
  return "neutral";
}

SentimentLabel label_for_score(double score, double tau) {
  SentimentLabel s{score, Polarity::neutral};
  if (score < -tau)
    s.label = Polarity::negative;
  else if (score > tau)
    s.label = Polarity::positive;
  return s;
}

SentimentLabel sentiment_score(std::span<const std::string> tokens, const Lexicon& lexicon, double tau) {
  std::vector<double> hits;
  for (const auto& tok : tokens)
    if (auto it = lexicon.find(tok); it != lexicon.end()) hits.push_back(it->second);
  if (hits.empty()) return label_for_score(0.0, tau);
  // summing in sorted order makes the result exactly order independent
  std::sort(hits.begin(), hits.end());
  double sum = 0.0;
  for (double h : hits) sum += h;
  return label_for_score(std::clamp(sum / static_cast<double>(hits.size()), -1.0, 1.0), tau);
}

SentimentLabel sentiment_score(std::string_view text, const Lexicon& lexicon, double tau, const Tokenizer& tokenizer) {
  const auto tokens = tokenizer.tokenize(text);
  return sentiment_score(std::span<const std::string>(tokens), lexicon, tau);
}

void validate_taxonomy(const Taxonomy& taxonomy) {
  if (taxonomy.empty()) throw std::invalid_argument("taxonomy must be non-empty");
  if (!taxonomy.back().triggers.empty())
    throw std::invalid_argument("taxonomy: last entry '" + taxonomy.back().label + "' must have no triggers");
  std::set<std::string> labels;
  for (const auto& rule : taxonomy)
    if (!labels.insert(rule.label).second) throw std::invalid_argument("taxonomy: duplicate label '" + rule.label + "'");
}

std::optional<std::size_t> topic_index(const Taxonomy& taxonomy, std::string_view label) {
  for (std::size_t i = 0; i < taxonomy.size(); ++i)
    if (taxonomy[i].label == label) return i;
  return std::nullopt;
}

std::string classify_topic(std::span<const WeightedToken> keywords, const Taxonomy& taxonomy) {
  validate_taxonomy(taxonomy);
  std::size_t best = taxonomy.size() - 1;
  double best_score = 0.0;
  for (std::size_t i = 0; i + 1 < taxonomy.size(); ++i) {
    double score = 0.0;
    for (const auto& kw : keywords)
      if (taxonomy[i].triggers.contains(kw.token)) score += kw.weight;
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return taxonomy[best].label;
}

std::size_t compute_influence(const Cascade& cascade) { return cascade.size - 1; }

double profile_integrity(const UserProfile& u) {
  const int set = int{u.verified} + int{u.has_bio} + int{u.has_avatar} + int{u.has_location} + int{u.has_gender};
  return set / 5.0;
}

std::vector<double> raw_feature_vector(const CaseFeatures& cf, const Taxonomy& taxonomy) {
  std::vector<double> v{cf.log_fans,
                        cf.log_followees,
                        cf.log_tweets,
                        cf.integrity,
                        std::log10(1.0 + static_cast<double>(cf.influence)),
                        cf.sentiment,
                        static_cast<double>(cf.max_depth),
                        cf.duration_days};
  const auto idx = topic_index(taxonomy, cf.topic);
  if (!idx) throw std::invalid_argument("case '" + cf.case_id + "' has topic '" + cf.topic + "' outside the taxonomy");
  v.resize(kScalarFeatureCount + taxonomy.size(), 0.0);
  v[kScalarFeatureCount + *idx] = 1.0;
  return v;
}

FeatureStats compute_feature_stats(std::span<const CaseFeatures> cases, const Taxonomy& taxonomy) {
  const std::size_t dim = kScalarFeatureCount + taxonomy.size();
  FeatureStats stats{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  if (cases.empty()) return stats;

  std::vector<std::vector<double>> rows;
  rows.reserve(cases.size());
  for (const auto& cf : cases) rows.push_back(raw_feature_vector(cf, taxonomy));

  const double n = static_cast<double>(rows.size());
  for (std::size_t j = 0; j < dim; ++j) {
    double lo = rows[0][j], hi = rows[0][j], sum = 0.0;
    for (const auto& r : rows) {
      lo = std::min(lo, r[j]);
      hi = std::max(hi, r[j]);
      sum += r[j];
    }
    const double mean = sum / n;
    stats.mean[j] = mean;
    if (lo == hi) continue;  // constant column
    double ss = 0.0;
    for (const auto& r : rows) ss += (r[j] - mean) * (r[j] - mean);
    stats.stddev[j] = std::sqrt(ss / n);
  }
  return stats;
}

std::vector<double> build_feature_vector(const CaseFeatures& cf, const FeatureStats& stats, const Taxonomy& taxonomy) {
  auto v = raw_feature_vector(cf, taxonomy);
  for (std::size_t j = 0; j < v.size(); ++j)
    v[j] = stats.stddev[j] == 0.0 ? 0.0 : (v[j] - stats.mean[j]) / stats.stddev[j];
  return v;
}

void assign_feature_vectors(std::span<CaseFeatures> cases, const Taxonomy& taxonomy) {
  const FeatureStats stats = compute_feature_stats(cases, taxonomy);
  for (auto& cf : cases) cf.vector = build_feature_vector(cf, stats, taxonomy);
}

CaseFeatures extract_case_features(const Cascade& cascade, const UserProfile* author,
                                   std::vector<WeightedToken> keywords, const SentimentScorer& scorer,
                                   const Taxonomy& taxonomy) {
  CaseFeatures cf;
  cf.case_id = cascade.root_id;
  const Post& root = cascade.root();
  cf.topic = classify_topic(keywords, taxonomy);
  cf.keywords = std::move(keywords);
  cf.sentiment = scorer.score(root.text).score;
  cf.influence = compute_influence(cascade);
  if (author) {
    cf.log_fans = log_count(author->fans);
    cf.log_followees = log_count(author->followees);
    cf.log_tweets = log_count(author->tweets);
    cf.integrity = profile_integrity(*author);
  }
  cf.max_depth = cascade.max_depth;
  Timestamp last = root.created_at;
  for (const auto& [_, post] : cascade.nodes) last = std::max(last, post.created_at);
  cf.duration_days = static_cast<double>(last.seconds - root.created_at.seconds) / 86400.0;
  return cf;
}

}  // namespace rumorlens
