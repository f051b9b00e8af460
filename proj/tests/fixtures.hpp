#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "rumorlens/ingest.hpp"
#include "rumorlens/pipeline.hpp"

namespace fixture {

inline std::filesystem::path dir() { return RUMORLENS_FIXTURE_DIR; }
inline std::filesystem::path five_case_posts() { return dir() / "five_case" / "posts.jsonl"; }
inline std::filesystem::path five_case_users() { return dir() / "five_case" / "users.jsonl"; }

inline rumorlens::Post post(std::string id, std::optional<std::string> parent, const std::string& when,
                            rumorlens::PostKind kind = rumorlens::PostKind::retweet) {
  rumorlens::Post p;
  p.id = std::move(id);
  p.user_id = "u1";
  p.parent_id = std::move(parent);
  p.created_at = rumorlens::parse_timestamp(when);
  p.text = "text of " + p.id;
  p.region = "overseas";
  p.kind = p.parent_id ? kind : rumorlens::PostKind::original;
  return p;
}

/// A(orig) <- B <- C, A <- D. B and C share a day, D is a day later.
inline std::vector<rumorlens::Post> four_node() {
  return {post("A", std::nullopt, "2020-03-01T08:00:00Z"), post("B", "A", "2020-03-01T09:00:00Z"),
          post("C", "B", "2020-03-01T10:00:00Z"), post("D", "A", "2020-03-02T07:00:00Z")};
}

inline std::shared_ptr<const rumorlens::Dataset> five_case(rumorlens::Config cfg = rumorlens::default_config()) {
  return rumorlens::run_pipeline(five_case_posts(), five_case_users(), std::move(cfg));
}

/// Unique scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("rumorlens-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fixture
