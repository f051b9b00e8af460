#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "rumorlens/ingest.hpp"

namespace rumorlens {

/// Parameters for a synthetic dump. Defaults match the scale of the
/// reference collection (936 cases, 80,000 descendants, 53,843 users).
struct SynthSpec {
  std::size_t cases = 936;
  std::size_t descendants = 80000;
  std::size_t users = 53843;
  std::uint64_t seed = 7;
  std::string first_day = "2019-12-27";
  std::string last_day = "2020-12-14";
  double comment_fraction = 0.15;
  double overseas_fraction = 0.2;
  int max_depth = 8;
};

struct SynthDump {
  std::vector<Post> posts;
  std::vector<UserProfile> users;
};

/// Deterministic for a given spec. Every post is attached to a cascade, so
/// the dump has exactly `cases + descendants` posts.
SynthDump generate_dump(const SynthSpec& spec);

void write_dump(const SynthDump& dump, const std::filesystem::path& posts_path,
                const std::filesystem::path& users_path);

/// One cascade of `nodes` posts (root included): retweets only, depth at
/// most `max_depth`, timestamps spread over `days` days after `start`.
std::vector<Post> random_cascade_posts(const std::string& root_id, std::size_t nodes, int max_depth, int days,
                                       Timestamp start, std::mt19937_64& rng);

/// Root plus a single retweet chain reaching exactly `depth`.
std::vector<Post> chain_cascade_posts(const std::string& root_id, int depth, Timestamp start);

}  // namespace rumorlens
