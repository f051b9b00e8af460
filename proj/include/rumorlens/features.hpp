#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rumorlens/ingest.hpp"
#include "rumorlens/text.hpp"

namespace rumorlens {

enum class Polarity { negative, neutral, positive };
std::string_view to_string(Polarity p);

struct SentimentLabel {
  double score = 0.0;
  Polarity label = Polarity::neutral;
};

/// label = negative iff score < -tau, positive iff score > tau.
SentimentLabel label_for_score(double score, double tau);

using Lexicon = std::unordered_map<std::string, double>;

/// Mean lexicon value over matched tokens, clamped to [-1, 1]. Independent
/// of token order.
SentimentLabel sentiment_score(std::span<const std::string> tokens, const Lexicon& lexicon, double tau);
SentimentLabel sentiment_score(std::string_view text, const Lexicon& lexicon, double tau = 0.1,
                               const Tokenizer& tokenizer = Tokenizer{});

class SentimentScorer {
 public:
  virtual ~SentimentScorer() = default;
  virtual SentimentLabel score(std::string_view text) const = 0;
};

class LexiconSentimentScorer final : public SentimentScorer {
 public:
  LexiconSentimentScorer(Tokenizer tokenizer, Lexicon lexicon, double tau)
      : tokenizer_(std::move(tokenizer)), lexicon_(std::move(lexicon)), tau_(tau) {}
  SentimentLabel score(std::string_view text) const override {
    return sentiment_score(text, lexicon_, tau_, tokenizer_);
  }

 private:
  Tokenizer tokenizer_;
  Lexicon lexicon_;
  double tau_;
};

struct TopicRule {
  std::string label;
  std::set<std::string> triggers;
};

/// Ordered topic rules; the last entry is the catch-all with no triggers.
using Taxonomy = std::vector<TopicRule>;

void validate_taxonomy(const Taxonomy& taxonomy);
std::optional<std::size_t> topic_index(const Taxonomy& taxonomy, std::string_view label);

std::string classify_topic(std::span<const WeightedToken> keywords, const Taxonomy& taxonomy);

/// Descendant count (retweets and comments).
std::size_t compute_influence(const Cascade& cascade);

/// Share of the five profile completeness flags that are set.
double profile_integrity(const UserProfile& user);

inline double log_count(std::uint64_t x) { return std::log10(1.0 + static_cast<double>(x)); }

struct CaseFeatures {
  std::string case_id;
  std::vector<WeightedToken> keywords;
  double sentiment = 0.0;
  std::string topic;
  std::size_t influence = 0;
  double log_fans = 0.0;
  double log_followees = 0.0;
  double log_tweets = 0.0;
  double integrity = 0.0;
  int max_depth = 0;
  double duration_days = 0.0;
  std::vector<double> vector;
};

/// Number of scalar columns ahead of the one-hot topic block.
inline constexpr std::size_t kScalarFeatureCount = 8;

/// Unstandardized vector: log_fans, log_followees, log_tweets, integrity,
/// log10(1 + influence), sentiment, max_depth, duration_days, one-hot topic.
std::vector<double> raw_feature_vector(const CaseFeatures& cf, const Taxonomy& taxonomy);

struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // 0 marks a constant column
};

FeatureStats compute_feature_stats(std::span<const CaseFeatures> cases, const Taxonomy& taxonomy);
std::vector<double> build_feature_vector(const CaseFeatures& cf, const FeatureStats& stats, const Taxonomy& taxonomy);

/// Fills CaseFeatures::vector for every case from dataset-wide statistics.
void assign_feature_vectors(std::span<CaseFeatures> cases, const Taxonomy& taxonomy);

/// Scalar features for one cascade. `author` may be null when the root's
/// author has no profile; user metrics are then zero.
CaseFeatures extract_case_features(const Cascade& cascade, const UserProfile* author,
                                   std::vector<WeightedToken> keywords, const SentimentScorer& scorer,
                                   const Taxonomy& taxonomy);

struct PostFeatures {
  std::size_t word_count = 0;
  SentimentLabel sentiment;
  std::optional<std::string> keyword;
};

}  // namespace rumorlens
