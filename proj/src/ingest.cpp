#include "rumorlens/ingest.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace rumorlens {

using json = nlohmann::json;

std::string_view to_string(PostKind kind) {
  switch (kind) {
    case PostKind::original: return "original";
    case PostKind::retweet: return "retweet";
    case PostKind::comment: return "comment";
  }
  return "original";
}

std::optional<PostKind> parse_post_kind(std::string_view text) {
  if (text == "original") return PostKind::original;
  if (text == "retweet") return PostKind::retweet;
  if (text == "comment") return PostKind::comment;
  return std::nullopt;
}

namespace {

// Thrown inside the per-line parsers and turned into a diagnostic.
struct FieldError {
  std::string message;
};

const json& require(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end()) throw FieldError{std::string("missing field '") + field + "'"};
  return *it;
}

std::string require_string(const json& obj, const char* field) {
  const json& v = require(obj, field);
  if (!v.is_string()) throw FieldError{std::string("field '") + field + "' must be a string"};
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end()) return std::nullopt;
  if (!it->is_string()) throw FieldError{std::string("field '") + field + "' must be a string when present"};
  return it->get<std::string>();
}

bool bool_field(const json& obj, const char* field, std::optional<bool> fallback) {
  auto it = obj.find(field);
  if (it == obj.end()) {
    if (fallback) return *fallback;
    throw FieldError{std::string("missing field '") + field + "'"};
  }
  if (!it->is_boolean()) throw FieldError{std::string("field '") + field + "' must be a boolean"};
  return it->get<bool>();
}

std::uint64_t count_field(const json& obj, const char* field) {
  const json& v = require(obj, field);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) throw FieldError{std::string("field '") + field + "' must be non-negative"};
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d < 0) throw FieldError{std::string("field '") + field + "' must be non-negative"};
    throw FieldError{std::string("field '") + field + "' must be an integer"};
  }
  throw FieldError{std::string("field '") + field + "' must be an integer"};
}

Post post_from_json(const json& obj) {
  if (!obj.is_object()) throw FieldError{"record is not a JSON object"};
  Post p;
  p.id = require_string(obj, "id");
  if (p.id.empty()) throw FieldError{"field 'id' must be non-empty"};
  p.user_id = require_string(obj, "user_id");
  p.parent_id = optional_string(obj, "parent_id");
  p.root_id = optional_string(obj, "root_id");
  const std::string created = require_string(obj, "created_at");
  try {
    p.created_at = parse_timestamp(created);
  } catch (const TimeParseError& e) {
    throw FieldError{std::string("field 'created_at': ") + e.what()};
  }
  p.text = require_string(obj, "text");
  p.region = require_string(obj, "region");
  if (p.region.empty()) throw FieldError{"field 'region' must be non-empty"};

  if (auto kind = optional_string(obj, "kind")) {
    auto parsed = parse_post_kind(*kind);
    if (!parsed) throw FieldError{"field 'kind' must be one of original, retweet, comment"};
    p.kind = *parsed;
    if ((p.kind == PostKind::original) != !p.parent_id.has_value())
      throw FieldError{"field 'kind' is inconsistent with 'parent_id' (original iff no parent)"};
  } else {
    p.kind = p.parent_id ? PostKind::retweet : PostKind::original;
  }
  return p;
}

UserProfile user_from_json(const json& obj) {
  if (!obj.is_object()) throw FieldError{"record is not a JSON object"};
  UserProfile u;
  u.id = require_string(obj, "id");
  if (u.id.empty()) throw FieldError{"field 'id' must be non-empty"};
  u.screen_name = require_string(obj, "screen_name");
  u.verified = bool_field(obj, "verified", std::nullopt);
  u.fans = count_field(obj, "fans");
  u.followees = count_field(obj, "followees");
  u.tweets = count_field(obj, "tweets");
  u.has_bio = bool_field(obj, "has_bio", false);
  u.has_avatar = bool_field(obj, "has_avatar", false);
  u.has_location = bool_field(obj, "has_location", false);
  u.has_gender = bool_field(obj, "has_gender", false);
  return u;
}

template <typename T, typename Decode>
ParseResult<T> parse_lines(std::istream& in, Decode decode) {
  if (!in.good()) throw IngestError("input stream is not readable");
  ParseResult<T> result;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded()) {
      result.diagnostics.push_back({line_no, "", "malformed JSON"});
      continue;
    }
    try {
      T record = decode(obj);
      if (!seen.insert(record.id).second) {
        result.diagnostics.push_back({line_no, record.id, "duplicate id; keeping first occurrence"});
        continue;
      }
      result.records.push_back(std::move(record));
    } catch (const FieldError& e) {
      std::string subject;
      if (obj.is_object() && obj.contains("id") && obj["id"].is_string()) subject = obj["id"].get<std::string>();
      result.diagnostics.push_back({line_no, std::move(subject), e.message});
    }
  }
  if (in.bad()) throw IngestError("I/O error while reading input stream");
  return result;
}

}  // namespace

ParseResult<Post> parse_posts(std::istream& in) { return parse_lines<Post>(in, post_from_json); }

ParseResult<UserProfile> parse_users(std::istream& in) { return parse_lines<UserProfile>(in, user_from_json); }

std::string post_to_json_line(const Post& post) {
  json obj;
  obj["id"] = post.id;
  obj["user_id"] = post.user_id;
  if (post.parent_id) obj["parent_id"] = *post.parent_id;
  if (post.root_id) obj["root_id"] = *post.root_id;
  obj["created_at"] = format_timestamp(post.created_at);
  obj["text"] = post.text;
  obj["region"] = post.region;
  obj["kind"] = std::string(to_string(post.kind));
  return obj.dump();
}

std::string user_to_json_line(const UserProfile& u) {
  json obj{{"id", u.id},           {"screen_name", u.screen_name},   {"verified", u.verified},
           {"fans", u.fans},       {"followees", u.followees},       {"tweets", u.tweets},
           {"has_bio", u.has_bio}, {"has_avatar", u.has_avatar},     {"has_location", u.has_location},
           {"has_gender", u.has_gender}};
  return obj.dump();
}

CascadeBuild build_cascades(std::span<const Post> posts) {
  CascadeBuild out;
  const std::size_t n = posts.size();

  std::unordered_map<std::string_view, std::size_t> index;
  index.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!index.emplace(posts[i].id, i).second) throw IngestError("build_cascades: duplicate post id " + posts[i].id);
  }

  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(n, none);
  std::vector<std::vector<std::size_t>> children(n);
  std::vector<bool> orphan_dropped(n, false);

  for (std::size_t i = 0; i < n; ++i) {
    const Post& p = posts[i];
    if (p.kind == PostKind::original) continue;
    if (!p.parent_id) {
      orphan_dropped[i] = true;
      out.diagnostics.push_back({0, p.id, "non-original post without parent_id; dropped"});
      continue;
    }
    if (auto it = index.find(*p.parent_id); it != index.end()) {
      parent[i] = it->second;
      children[it->second].push_back(i);
      continue;
    }
    if (p.root_id) {
      if (auto it = index.find(*p.root_id); it != index.end() && posts[it->second].kind == PostKind::original) {
        parent[i] = it->second;
        children[it->second].push_back(i);
        out.diagnostics.push_back(
            {0, p.id, "parent '" + *p.parent_id + "' not found; attached under root '" + *p.root_id + "'"});
        continue;
      }
    }
    orphan_dropped[i] = true;
    out.diagnostics.push_back({0, p.id, "parent '" + *p.parent_id + "' not found and root unresolvable; dropped"});
  }

  std::vector<bool> reached(n, false);
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < n; ++i)
    if (posts[i].kind == PostKind::original) roots.push_back(i);
  std::sort(roots.begin(), roots.end(), [&](std::size_t a, std::size_t b) {
    if (posts[a].created_at != posts[b].created_at) return posts[a].created_at < posts[b].created_at;
    return posts[a].id < posts[b].id;
  });

  out.cascades.reserve(roots.size());
  std::deque<std::size_t> queue;
  for (std::size_t r : roots) {
    Cascade c;
    c.root_id = posts[r].id;
    queue.assign({r});
    reached[r] = true;
    c.nodes.emplace(posts[r].id, posts[r]);
    c.depth.emplace(posts[r].id, 0);
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      const int d = c.depth.at(posts[cur].id);
      for (std::size_t ch : children[cur]) {
        // a child reached twice would mean a parent pointer is shared, which
        // cannot happen since each post has one parent
        reached[ch] = true;
        const Post& cp = posts[ch];
        c.nodes.emplace(cp.id, cp);
        c.depth.emplace(cp.id, d + 1);
        c.parent.emplace(cp.id, posts[cur].id);
        c.max_depth = std::max(c.max_depth, d + 1);
        if (cp.created_at < posts[cur].created_at)
          out.diagnostics.push_back({0, cp.id, "created before its parent '" + posts[cur].id + "'"});
        if (cp.root_id && *cp.root_id != c.root_id)
          out.diagnostics.push_back({0, cp.id, "declared root '" + *cp.root_id + "' differs from resolved root '" +
                                                   c.root_id + "'"});
        queue.push_back(ch);
      }
    }
    c.size = c.nodes.size();
    out.cascades.push_back(std::move(c));
  }

  // Everything unreached sits on, or hangs below, a parent cycle or a
  // dropped orphan. Walk parent pointers to tell the two apart.
  std::vector<int> state(n, 0);  // 0 unvisited, 1 on current walk, 2 done
  std::vector<bool> on_cycle(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (reached[s] || state[s] != 0) continue;
    std::vector<std::size_t> walk;
    std::size_t cur = s;
    while (cur != none && !reached[cur] && state[cur] == 0) {
      state[cur] = 1;
      walk.push_back(cur);
      cur = parent[cur];
    }
    if (cur != none && !reached[cur] && state[cur] == 1) {
      for (auto it = walk.rbegin(); it != walk.rend(); ++it) {
        on_cycle[*it] = true;
        if (*it == cur) break;
      }
    }
    for (std::size_t w : walk) state[w] = 2;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (reached[i]) continue;
    out.dropped.push_back(posts[i].id);
    if (on_cycle[i])
      out.diagnostics.push_back({0, posts[i].id, "parent chain forms a cycle; dropped"});
    else if (!orphan_dropped[i])
      out.diagnostics.push_back({0, posts[i].id, "no path to an original post; dropped"});
  }
  std::sort(out.dropped.begin(), out.dropped.end());
  std::sort(out.diagnostics.begin(), out.diagnostics.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.subject, a.message) < std::tie(b.subject, b.message);
  });
  return out;
}

}  // namespace rumorlens
