#include "rumorlens/aggregation.hpp"

#include <algorithm>
#include <cstdio>

namespace rumorlens {

using json = nlohmann::json;

namespace {

std::set<std::string> string_set(const json& doc, const std::string& field) {
  const json& v = doc.at(field);
  if (!v.is_array()) throw FilterError(field, "filter field '" + field + "' must be a list of strings");
  std::set<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) throw FilterError(field, "filter field '" + field + "' must be a list of strings");
    out.insert(item.get<std::string>());
  }
  return out;
}

Timestamp time_field(const json& doc, const std::string& field) {
  const json& v = doc.at(field);
  if (!v.is_string()) throw FilterError(field, "filter field '" + field + "' must be a timestamp string");
  try {
    return parse_timestamp(v.get<std::string>());
  } catch (const TimeParseError& e) {
    throw FilterError(field, "filter field '" + field + "': " + e.what());
  }
}

bool matches(const Dataset& ds, std::size_t idx, const FilterSpec& f, bool use_regions) {
  const Post& root = ds.cascades[idx].root();
  if (use_regions && f.regions && !f.regions->contains(root.region)) return false;
  if (f.topics && !f.topics->contains(ds.features[idx].topic)) return false;
  if (f.time_from && root.created_at < *f.time_from) return false;
  if (f.time_to && !(root.created_at < *f.time_to)) return false;
  if (f.case_ids && !f.case_ids->contains(root.id)) return false;
  return true;
}

std::vector<std::size_t> matching_indices(const Dataset& ds, const FilterSpec& f, bool use_regions) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ds.cascades.size(); ++i)
    if (matches(ds, i, f, use_regions)) out.push_back(i);
  return out;
}

}  // namespace

FilterSpec filter_from_json(const json& doc) {
  if (doc.is_null()) return {};
  if (!doc.is_object()) throw FilterError("filter", "filter must be a JSON object");
  FilterSpec f;
  for (const auto& [key, _] : doc.items()) {
    if (key == "regions")
      f.regions = string_set(doc, key);
    else if (key == "topics")
      f.topics = string_set(doc, key);
    else if (key == "case_ids")
      f.case_ids = string_set(doc, key);
    else if (key == "time_from")
      f.time_from = time_field(doc, key);
    else if (key == "time_to")
      f.time_to = time_field(doc, key);
    else
      throw FilterError(key, "unknown filter field '" + key + "'");
  }
  if (f.time_from && f.time_to && !(*f.time_from < *f.time_to))
    throw FilterError("time_to", "filter requires time_from < time_to");
  return f;
}

json filter_to_json(const FilterSpec& f) {
  json doc = json::object();
  if (f.regions) doc["regions"] = *f.regions;
  if (f.topics) doc["topics"] = *f.topics;
  if (f.case_ids) doc["case_ids"] = *f.case_ids;
  if (f.time_from) doc["time_from"] = format_timestamp(*f.time_from);
  if (f.time_to) doc["time_to"] = format_timestamp(*f.time_to);
  return doc;
}

std::string filter_fingerprint(const FilterSpec& f) {
  // FNV-1a 64 over the canonical dump
  const std::string canonical = filter_to_json(f).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void validate_filter(const Dataset& ds, const FilterSpec& f) {
  if (f.time_from && f.time_to && !(*f.time_from < *f.time_to))
    throw FilterError("time_to", "filter requires time_from < time_to");
  auto report_unknown = [](const std::string& field, const std::vector<std::string>& unknown) {
    std::string msg = "unknown " + field + ":";
    for (const auto& u : unknown) msg += " " + u;
    throw FilterError(field, msg);
  };
  if (f.regions) {
    std::vector<std::string> unknown;
    for (const auto& r : *f.regions)
      if (!ds.known_regions.contains(r)) unknown.push_back(r);
    if (!unknown.empty()) report_unknown("regions", unknown);
  }
  if (f.topics) {
    std::vector<std::string> unknown;
    for (const auto& t : *f.topics)
      if (!topic_index(ds.config.taxonomy, t)) unknown.push_back(t);
    if (!unknown.empty()) report_unknown("topics", unknown);
  }
}

std::vector<std::string> filter_cases(const Dataset& ds, const FilterSpec& f) {
  validate_filter(ds, f);
  std::vector<std::string> out;
  for (std::size_t idx : matching_indices(ds, f, true)) out.push_back(ds.cascades[idx].root_id);
  return out;
}

std::map<std::string, std::size_t> region_counts(const Dataset& ds, const FilterSpec& f) {
  FilterSpec without_regions = f;
  without_regions.regions.reset();
  validate_filter(ds, without_regions);
  std::map<std::string, std::size_t> counts;
  for (const auto& r : ds.known_regions) counts[r] = 0;
  for (std::size_t idx : matching_indices(ds, f, false)) ++counts[ds.cascades[idx].root().region];
  return counts;
}

std::vector<TopicSeries> topic_series(const Dataset& ds, const FilterSpec& f, std::size_t k) {
  validate_filter(ds, f);
  const auto indices = matching_indices(ds, f, true);
  std::vector<TopicSeries> out;
  if (indices.empty()) return out;

  Day first{INT64_MAX}, last{INT64_MIN};
  for (std::size_t idx : indices) {
    const Day d = day_of(ds.cascades[idx].root().created_at);
    first = std::min(first, d);
    last = std::max(last, d);
  }
  const auto span_days = static_cast<std::size_t>(last.index - first.index + 1);

  const Taxonomy& tax = ds.config.taxonomy;
  std::vector<std::vector<std::size_t>> counts(tax.size(), std::vector<std::size_t>(span_days, 0));
  std::vector<std::map<Day, std::map<std::string, double>>> weights(tax.size());
  for (std::size_t idx : indices) {
    const auto t = topic_index(tax, ds.features[idx].topic).value_or(tax.size() - 1);
    const Day d = day_of(ds.cascades[idx].root().created_at);
    ++counts[t][static_cast<std::size_t>(d.index - first.index)];
    auto& bucket = weights[t][d];
    for (const auto& kw : ds.features[idx].keywords) bucket[kw.token] += kw.weight;
  }

  for (std::size_t t = 0; t < tax.size(); ++t) {
    if (weights[t].empty()) continue;
    TopicSeries s;
    s.topic = tax[t].label;
    for (std::size_t i = 0; i < span_days; ++i)
      s.points.push_back({Day{first.index + static_cast<std::int64_t>(i)}, counts[t][i]});
    for (const auto& [day, tokens] : weights[t]) {
      std::vector<std::pair<std::string, double>> ranked(tokens.begin(), tokens.end());
      std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
      });
      auto& top = s.keywords_by_day[day];
      for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) top.push_back(ranked[i].first);
    }
    out.push_back(std::move(s));
  }
  return out;
}

json series_to_json(const std::vector<TopicSeries>& series) {
  json arr = json::array();
  for (const auto& s : series) {
    json points = json::array();
    for (const auto& p : s.points) points.push_back({{"day", format_day(p.day)}, {"count", p.count}});
    json keywords = json::object();
    for (const auto& [day, toks] : s.keywords_by_day) keywords[format_day(day)] = toks;
    arr.push_back({{"topic", s.topic}, {"points", points}, {"keywords_by_day", keywords}});
  }
  return arr;
}

}  // namespace rumorlens
