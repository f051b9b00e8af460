#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "rumorlens/config.hpp"
#include "rumorlens/features.hpp"
#include "rumorlens/ingest.hpp"

namespace rumorlens {

struct BuildReport {
  std::size_t posts_read = 0;
  std::size_t users_read = 0;
  std::size_t cases = 0;
  std::size_t cascade_nodes = 0;
  std::size_t dropped_posts = 0;
  std::size_t missing_authors = 0;
  std::size_t vector_length = 0;
  std::vector<Diagnostic> post_diagnostics;
  std::vector<Diagnostic> user_diagnostics;
  std::vector<Diagnostic> cascade_diagnostics;
  std::map<std::string, double> timings_ms;
};

/// Everything the views read. Immutable once built.
struct Dataset {
  Config config;
  std::vector<Cascade> cascades;       // ordered by root time, then id
  std::vector<CaseFeatures> features;  // parallel to cascades
  std::map<std::string, std::size_t> case_index;
  std::unordered_map<std::string, UserProfile> users;
  std::unordered_map<std::string, PostFeatures> post_features;
  std::unordered_map<std::string, std::size_t> post_case;  // post id -> cascade index
  std::set<std::string> known_regions;
  BuildReport report;
  // region counts and topic series of the unfiltered set
  nlohmann::json overview;

  const Cascade* find_case(const std::string& id) const {
    auto it = case_index.find(id);
    return it == case_index.end() ? nullptr : &cascades[it->second];
  }
  const CaseFeatures* find_features(const std::string& id) const {
    auto it = case_index.find(id);
    return it == case_index.end() ? nullptr : &features[it->second];
  }
};

}  // namespace rumorlens
