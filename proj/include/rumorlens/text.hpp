#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace rumorlens {

struct WeightedToken {
  std::string token;
  double weight = 0.0;
  bool operator==(const WeightedToken&) const = default;
};

/// Splits text into lowercase Latin/digit runs and overlapping CJK bigrams.
class Tokenizer {
 public:
  Tokenizer() = default;
  explicit Tokenizer(std::unordered_set<std::string> stopwords) : stopwords_(std::move(stopwords)) {}

  std::vector<std::string> tokenize(std::string_view text) const;
  const std::unordered_set<std::string>& stopwords() const { return stopwords_; }

 private:
  std::unordered_set<std::string> stopwords_;
};

/// Latin runs plus individual CJK characters; stopwords are not removed.
std::size_t count_words(std::string_view text);

/// Smoothed TF-IDF. Each document's list is sorted by weight descending,
/// ties by token. Throws std::invalid_argument on an empty corpus.
std::vector<std::vector<WeightedToken>> tf_idf(const std::vector<std::vector<std::string>>& corpus);

}  // namespace rumorlens
