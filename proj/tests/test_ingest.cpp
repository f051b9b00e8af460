#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "rumorlens/ingest.hpp"
#include "rumorlens/synth.hpp"

using namespace rumorlens;

namespace {

ParseResult<Post> posts_from(const std::string& text) {
  std::istringstream in(text);
  return parse_posts(in);
}

ParseResult<UserProfile> users_from(const std::string& text) {
  std::istringstream in(text);
  return parse_users(in);
}

bool has_diagnostic(const std::vector<Diagnostic>& diags, const std::string& subject, const std::string& fragment) {
  return std::any_of(diags.begin(), diags.end(), [&](const Diagnostic& d) {
    return d.subject == subject && d.message.find(fragment) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("parse_posts: minimal record without parent is original") {
  auto r = posts_from(R"({"id":"p1","user_id":"u1","created_at":"2020-03-01T08:00:00Z","text":"hi","region":"HB"})");
  REQUIRE(r.records.size() == 1);
  CHECK(r.diagnostics.empty());
  CHECK(r.records[0].kind == PostKind::original);
  CHECK_FALSE(r.records[0].parent_id.has_value());
}

TEST_CASE("parse_posts: missing created_at yields one diagnostic naming the field") {
  auto r = posts_from(R"({"id":"p1","user_id":"u1","text":"hi","region":"HB"})");
  CHECK(r.records.empty());
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].line == 1);
  CHECK(r.diagnostics[0].message.find("created_at") != std::string::npos);
}

TEST_CASE("parse_posts: diagnostics carry line numbers; well-formed lines survive in order") {
  const std::string text =
      R"({"id":"a","user_id":"u","created_at":"2020-03-01T08:00:00Z","text":"","region":"GD"})"
      "\n"
      "not json\n"
      "\n"
      R"({"id":"b","user_id":"u","parent_id":"a","created_at":"2020-03-01T09:00:00Z","text":"","region":"GD","kind":"comment"})"
      "\n"
      R"({"id":"a","user_id":"other","created_at":"2020-03-01T08:00:00Z","text":"dup","region":"GD"})"
      "\n"
      R"({"id":"c","user_id":"u","created_at":"2020-03-01T08:00:00Z","text":"","region":"GD","kind":"retweet"})"
      "\n"
      R"({"id":"d","user_id":"u","parent_id":null,"created_at":"2020-03-01T08:00:00Z","text":"","region":"GD"})"
      "\n";
  auto r = posts_from(text);
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].id == "a");
  CHECK(r.records[0].user_id == "u");  // first occurrence kept
  CHECK(r.records[1].kind == PostKind::comment);
  REQUIRE(r.diagnostics.size() == 4);
  CHECK(r.diagnostics[0].line == 2);
  CHECK(r.diagnostics[1].line == 5);
  CHECK(r.diagnostics[1].message.find("duplicate") != std::string::npos);
  CHECK(r.diagnostics[2].line == 6);  // kind retweet without parent
  CHECK(r.diagnostics[3].line == 7);  // null instead of omitted
}

TEST_CASE("parse_posts: unreadable stream is fatal") {
  std::istringstream in;
  in.setstate(std::ios::badbit);
  CHECK_THROWS_AS(parse_posts(in), IngestError);
}

TEST_CASE("parse_users: valid profile and negative count") {
  auto ok = users_from(
      R"({"id":"u1","screen_name":"x","verified":true,"fans":5,"followees":6,"tweets":7,"has_bio":true})");
  REQUIRE(ok.records.size() == 1);
  CHECK(ok.records[0].fans == 5);
  CHECK(ok.records[0].has_bio);
  CHECK_FALSE(ok.records[0].has_gender);

  auto bad = users_from(R"({"id":"u1","screen_name":"x","verified":true,"fans":-5,"followees":6,"tweets":7})");
  CHECK(bad.records.empty());
  REQUIRE(bad.diagnostics.size() == 1);
  CHECK(bad.diagnostics[0].message.find("fans") != std::string::npos);
}

TEST_CASE("parse_posts/parse_users: synthetic dump at reference scale") {
  SynthSpec spec;
  const SynthDump dump = generate_dump(spec);
  std::ostringstream posts, users;
  for (const auto& p : dump.posts) posts << post_to_json_line(p) << '\n';
  for (const auto& u : dump.users) users << user_to_json_line(u) << '\n';
  auto pr = posts_from(posts.str());
  auto ur = users_from(users.str());
  CHECK(pr.records.size() == 80936);
  CHECK(pr.diagnostics.empty());
  CHECK(ur.records.size() == 53843);
  CHECK(ur.diagnostics.empty());
}

TEST_CASE("build_cascades: single original") {
  const std::vector<Post> posts{fixture::post("A", std::nullopt, "2020-03-01T08:00:00Z")};
  auto b = build_cascades(posts);
  REQUIRE(b.cascades.size() == 1);
  CHECK(b.cascades[0].size == 1);
  CHECK(b.cascades[0].max_depth == 0);
}

TEST_CASE("build_cascades: four-node tree depths match BFS oracle") {
  const auto posts = fixture::four_node();
  auto b = build_cascades(posts);
  REQUIRE(b.cascades.size() == 1);
  const Cascade& c = b.cascades[0];
  const std::map<std::string, int> expected{{"A", 0}, {"B", 1}, {"C", 2}, {"D", 1}};
  CHECK(c.depth == expected);
  CHECK(c.depth == oracle::bfs_depths(posts, "A"));
  CHECK(c.size == 4);
  CHECK(c.max_depth == 2);
}

TEST_CASE("build_cascades: chain of six") {
  const auto posts = chain_cascade_posts("R", 6, parse_timestamp("2020-05-01T00:00:00Z"));
  auto b = build_cascades(posts);
  REQUIRE(b.cascades.size() == 1);
  CHECK(b.cascades[0].max_depth == 6);
}

TEST_CASE("build_cascades: orphans attach under a resolvable root, otherwise drop") {
  auto posts = fixture::four_node();
  auto orphan = fixture::post("O", "missing", "2020-03-01T11:00:00Z");
  orphan.root_id = "A";
  posts.push_back(orphan);
  posts.push_back(fixture::post("X", "gone", "2020-03-01T11:00:00Z"));
  auto lost = fixture::post("Y", "gone", "2020-03-01T11:00:00Z");
  lost.root_id = "nowhere";
  posts.push_back(lost);

  auto b = build_cascades(posts);
  REQUIRE(b.cascades.size() == 1);
  const Cascade& c = b.cascades[0];
  CHECK(c.depth.at("O") == 1);
  CHECK(c.parent.at("O") == "A");
  CHECK(c.size == 5);
  CHECK(b.dropped == std::vector<std::string>{"X", "Y"});
  CHECK(has_diagnostic(b.diagnostics, "O", "attached under root"));
  CHECK(has_diagnostic(b.diagnostics, "X", "dropped"));
}

TEST_CASE("build_cascades: cycles are dropped with a diagnostic") {
  auto posts = fixture::four_node();
  posts.push_back(fixture::post("P", "Q", "2020-03-01T11:00:00Z"));
  posts.push_back(fixture::post("Q", "P", "2020-03-01T11:00:00Z"));
  posts.push_back(fixture::post("S", "S", "2020-03-01T11:00:00Z"));
  posts.push_back(fixture::post("T", "P", "2020-03-01T11:00:00Z"));  // hangs below the cycle
  auto b = build_cascades(posts);
  REQUIRE(b.cascades.size() == 1);
  CHECK(b.cascades[0].size == 4);
  CHECK(b.dropped == std::vector<std::string>{"P", "Q", "S", "T"});
  CHECK(has_diagnostic(b.diagnostics, "P", "cycle"));
  CHECK(has_diagnostic(b.diagnostics, "Q", "cycle"));
  CHECK(has_diagnostic(b.diagnostics, "S", "cycle"));
  CHECK(has_diagnostic(b.diagnostics, "T", "no path"));
}

TEST_CASE("build_cascades: timestamp before parent is flagged but kept") {
  auto posts = fixture::four_node();
  posts[2].created_at = parse_timestamp("2020-02-01T00:00:00Z");
  auto b = build_cascades(posts);
  CHECK(b.cascades[0].size == 4);
  CHECK(has_diagnostic(b.diagnostics, "C", "before its parent"));
}

namespace {

// Random forest with orphans, resolvable orphans and cycles mixed in.
std::vector<Post> random_forest(std::mt19937_64& rng) {
  std::vector<Post> posts;
  std::uniform_int_distribution<int> roots_d(1, 6), size_d(0, 60), coin(0, 19);
  const int roots = roots_d(rng);
  std::vector<std::string> root_ids;
  for (int r = 0; r < roots; ++r) {
    root_ids.push_back("r" + std::to_string(r));
    posts.push_back(fixture::post(root_ids.back(), std::nullopt, "2020-03-01T00:00:00Z"));
  }
  const int extra = size_d(rng);
  for (int i = 0; i < extra; ++i) {
    const std::string id = "n" + std::to_string(i);
    const int kind = coin(rng);
    std::uniform_int_distribution<std::size_t> pick(0, posts.size() - 1);
    Post p;
    if (kind == 0) {
      p = fixture::post(id, "missing" + id, "2020-03-02T00:00:00Z");
      p.root_id = root_ids[static_cast<std::size_t>(i) % root_ids.size()];
    } else if (kind == 1) {
      p = fixture::post(id, "missing" + id, "2020-03-02T00:00:00Z");
    } else if (kind == 2) {
      p = fixture::post(id, "n" + std::to_string(i + 1), "2020-03-02T00:00:00Z");
      posts.push_back(p);
      p = fixture::post("n" + std::to_string(i + 1), id, "2020-03-02T00:00:00Z");
      ++i;
    } else {
      p = fixture::post(id, posts[pick(rng)].id, "2020-03-02T00:00:00Z");
      if (kind == 3) p.kind = PostKind::comment;
    }
    posts.push_back(p);
  }
  return posts;
}

}  // namespace

TEST_CASE("build_cascades: fuzzed forests keep the tree invariant and account for every post") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 300; ++trial) {
    auto posts = random_forest(rng);
    const auto b = build_cascades(posts);
    std::size_t total = 0;
    for (const auto& c : b.cascades) {
      total += c.size;
      CHECK(c.depth.at(c.root_id) == 0);
      CHECK(c.nodes.size() == c.size);
      int max_depth = 0;
      for (const auto& [id, d] : c.depth) {
        max_depth = std::max(max_depth, d);
        if (id == c.root_id) continue;
        CHECK(d == c.depth.at(c.parent.at(id)) + 1);
      }
      CHECK(max_depth == c.max_depth);
    }
    CHECK(total + b.dropped.size() == posts.size());

    // order independence
    std::shuffle(posts.begin(), posts.end(), rng);
    const auto shuffled = build_cascades(posts);
    REQUIRE(shuffled.cascades.size() == b.cascades.size());
    for (std::size_t i = 0; i < b.cascades.size(); ++i) {
      CHECK(shuffled.cascades[i].root_id == b.cascades[i].root_id);
      CHECK(shuffled.cascades[i].depth == b.cascades[i].depth);
    }
    CHECK(shuffled.dropped == b.dropped);
  }
}

TEST_CASE("build_cascades: depths on random trees agree with BFS") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto posts = random_cascade_posts("R", 1 + trial * 7, 12, 5, parse_timestamp("2020-01-01T00:00:00Z"), rng);
    const auto b = build_cascades(posts);
    REQUIRE(b.cascades.size() == 1);
    CHECK(b.cascades[0].depth == oracle::bfs_depths(posts, "R"));
  }
}
