#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rumorlens/dataset.hpp"

namespace rumorlens {

/// Conjunctive case filter; an absent field does not constrain.
struct FilterSpec {
  std::optional<std::set<std::string>> regions;
  std::optional<std::set<std::string>> topics;
  std::optional<Timestamp> time_from;  // inclusive
  std::optional<Timestamp> time_to;    // exclusive
  std::optional<std::set<std::string>> case_ids;

  bool operator==(const FilterSpec&) const = default;
};

/// Invalid filter. `field` names the offending FilterSpec field.
class FilterError : public std::invalid_argument {
 public:
  FilterError(std::string field, const std::string& msg) : std::invalid_argument(msg), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

FilterSpec filter_from_json(const nlohmann::json& doc);
/// Canonical form: sorted keys and values, absent fields omitted.
nlohmann::json filter_to_json(const FilterSpec& f);
/// Hex digest of the canonical JSON, used as a cache key.
std::string filter_fingerprint(const FilterSpec& f);

/// Throws FilterError for an inverted time window or unknown regions/topics.
void validate_filter(const Dataset& ds, const FilterSpec& f);

/// Matching case ids, ordered by root creation time then id.
std::vector<std::string> filter_cases(const Dataset& ds, const FilterSpec& f);

/// Filtered case counts per root region, ignoring the region constraint.
/// Every known region is present.
std::map<std::string, std::size_t> region_counts(const Dataset& ds, const FilterSpec& f);

struct SeriesPoint {
  Day day;
  std::size_t count = 0;
};

struct TopicSeries {
  std::string topic;
  std::vector<SeriesPoint> points;
  std::map<Day, std::vector<std::string>> keywords_by_day;
};

/// One series per topic in the filtered set, in taxonomy order, bucketed by
/// the root's UTC day over the filtered set's full day range.
std::vector<TopicSeries> topic_series(const Dataset& ds, const FilterSpec& f, std::size_t k);

nlohmann::json series_to_json(const std::vector<TopicSeries>& series);

}  // namespace rumorlens
