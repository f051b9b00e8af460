#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rumorlens/timeutil.hpp"

namespace rumorlens {

enum class PostKind { original, retweet, comment };

std::string_view to_string(PostKind kind);
std::optional<PostKind> parse_post_kind(std::string_view text);

struct Post {
  std::string id;
  std::string user_id;
  std::optional<std::string> parent_id;
  std::optional<std::string> root_id;
  Timestamp created_at;
  std::string text;
  std::string region;
  PostKind kind = PostKind::original;
};

struct UserProfile {
  std::string id;
  std::string screen_name;
  bool verified = false;
  std::uint64_t fans = 0;
  std::uint64_t followees = 0;
  std::uint64_t tweets = 0;
  bool has_bio = false;
  bool has_avatar = false;
  bool has_location = false;
  bool has_gender = false;
};

/// One non-fatal problem found while loading. `line` is 1-based, 0 when the
/// problem is not tied to an input line.
struct Diagnostic {
  std::size_t line = 0;
  std::string subject;
  std::string message;
};

template <typename T>
struct ParseResult {
  std::vector<T> records;
  std::vector<Diagnostic> diagnostics;
};

class IngestError : public std::exception {
 public:
  explicit IngestError(std::string msg) : msg_(std::move(msg)) {}
  const char* what() const noexcept override { return msg_.c_str(); }

 private:
  std::string msg_;
};

// Line-delimited JSON readers. Malformed records become diagnostics; a
// stream that cannot be read throws IngestError. Duplicate ids keep the
// first occurrence.
ParseResult<Post> parse_posts(std::istream& in);
ParseResult<UserProfile> parse_users(std::istream& in);

std::string post_to_json_line(const Post& post);
std::string user_to_json_line(const UserProfile& user);

/// A rooted tree of posts for one suspected rumor.
struct Cascade {
  std::string root_id;
  std::map<std::string, Post> nodes;
  std::map<std::string, int> depth;
  // Effective tree parent. Differs from Post::parent_id only for orphans
  // re-attached under the root.
  std::map<std::string, std::string> parent;
  int max_depth = 0;
  std::size_t size = 0;

  const Post& root() const { return nodes.at(root_id); }
};

struct CascadeBuild {
  std::vector<Cascade> cascades;
  std::vector<std::string> dropped;  // sorted post ids
  std::vector<Diagnostic> diagnostics;
};

/// Groups posts into one cascade per original post. Output order is by root
/// creation time, then root id, and does not depend on input order.
CascadeBuild build_cascades(std::span<const Post> posts);

}  // namespace rumorlens
