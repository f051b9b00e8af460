#include "rumorlens/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

namespace rumorlens {

namespace {

constexpr std::array<std::string_view, 4> kTopicWords[] = {
    {"election", "protest", "government", "embassy"},
    {"virus", "vaccine", "hospital", "mask"},
    {"stock", "bank", "market", "price"},
    {"police", "school", "street", "accident"},
};
constexpr std::array<std::string_view, 12> kFiller = {"news",   "report", "today", "people", "video", "photo",
                                                      "update", "breaking", "local", "claim", "source", "share"};
constexpr std::array<std::string_view, 8> kTone = {"good", "great", "support", "hope",
                                                   "fake", "panic", "misleading", "terrible"};
constexpr std::array<std::string_view, 6> kProvinces = {"GD", "BJ", "SH", "HB", "ZJ", "SC"};

std::string pick(std::span<const std::string_view> words, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, words.size() - 1);
  return std::string(words[d(rng)]);
}

std::string make_text(int topic, std::size_t length, std::mt19937_64& rng) {
  std::string text;
  std::bernoulli_distribution topical(0.35), toned(0.2);
  for (std::size_t i = 0; i < length; ++i) {
    if (!text.empty()) text += ' ';
    if (topic >= 0 && topical(rng))
      text += pick(kTopicWords[topic], rng);
    else if (toned(rng))
      text += pick(kTone, rng);
    else
      text += pick(kFiller, rng);
  }
  return text;
}

std::string padded(const char* prefix, std::size_t i, int width) {
  std::string digits = std::to_string(i);
  if (static_cast<int>(digits.size()) < width) digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return prefix + digits;
}

}  // namespace

SynthDump generate_dump(const SynthSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  SynthDump dump;

  dump.users.reserve(spec.users);
  std::lognormal_distribution<double> fans(5.0, 2.2), followees(5.0, 1.2), tweets(6.0, 1.5);
  std::bernoulli_distribution verified(0.1), flag(0.6);
  for (std::size_t i = 0; i < spec.users; ++i) {
    UserProfile u;
    u.id = padded("u", i, 6);
    u.screen_name = "user_" + std::to_string(i);
    u.verified = verified(rng);
    u.fans = static_cast<std::uint64_t>(fans(rng));
    u.followees = static_cast<std::uint64_t>(followees(rng));
    u.tweets = static_cast<std::uint64_t>(tweets(rng));
    u.has_bio = flag(rng);
    u.has_avatar = flag(rng);
    u.has_location = flag(rng);
    u.has_gender = flag(rng);
    dump.users.push_back(std::move(u));
  }
  const std::size_t user_count = std::max<std::size_t>(spec.users, 1);
  std::uniform_int_distribution<std::size_t> any_user(0, user_count - 1);
  auto user_id = [&](std::size_t i) { return spec.users == 0 ? std::string("u000000") : padded("u", i, 6); };

  // heavy-tailed share of descendants per case
  std::vector<double> share(spec.cases);
  std::exponential_distribution<double> expo(1.0);
  double total_share = 0.0;
  for (auto& s : share) {
    s = std::pow(expo(rng) + 0.05, 1.6);
    total_share += s;
  }
  std::vector<std::size_t> per_case(spec.cases, 0);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < spec.cases; ++c) {
    per_case[c] = static_cast<std::size_t>(std::floor(share[c] / total_share * static_cast<double>(spec.descendants)));
    assigned += per_case[c];
  }
  if (spec.cases > 0) {
    std::uniform_int_distribution<std::size_t> any_case(0, spec.cases - 1);
    while (assigned < spec.descendants) {
      ++per_case[any_case(rng)];
      ++assigned;
    }
  }

  const std::int64_t first = parse_day(spec.first_day).index;
  const std::int64_t last = parse_day(spec.last_day).index;
  std::uniform_int_distribution<std::int64_t> any_second(first * 86400, last * 86400 + 86399 - 7 * 86400);
  std::uniform_int_distribution<int> any_topic(-1, 3);
  std::bernoulli_distribution overseas(spec.overseas_fraction), comment(spec.comment_fraction);
  std::uniform_int_distribution<std::size_t> length(4, 18);
  std::exponential_distribution<double> delay(1.0 / 7200.0);

  std::size_t post_serial = 0;
  dump.posts.reserve(spec.cases + spec.descendants);
  for (std::size_t c = 0; c < spec.cases; ++c) {
    const int topic = any_topic(rng);
    Post root;
    root.id = padded("p", post_serial++, 7);
    root.user_id = user_id(any_user(rng));
    root.created_at = Timestamp{any_second(rng)};
    root.text = make_text(topic, length(rng), rng);
    root.region = overseas(rng) ? "overseas" : pick(kProvinces, rng);
    root.kind = PostKind::original;
    const std::string root_id = root.id;

    std::vector<std::pair<std::size_t, int>> retweet_nodes{{dump.posts.size(), 0}};  // (index, depth)
    dump.posts.push_back(std::move(root));
    for (std::size_t k = 0; k < per_case[c]; ++k) {
      Post p;
      p.id = padded("p", post_serial++, 7);
      p.user_id = user_id(any_user(rng));
      p.root_id = root_id;
      p.text = make_text(topic, length(rng), rng);
      p.region = overseas(rng) ? "overseas" : pick(kProvinces, rng);

      // prefer recent nodes so cascades grow deep as well as wide
      std::size_t parent_slot;
      do {
        std::uniform_int_distribution<std::size_t> recent(retweet_nodes.size() > 8 ? retweet_nodes.size() - 8 : 0,
                                                          retweet_nodes.size() - 1);
        std::uniform_int_distribution<std::size_t> any(0, retweet_nodes.size() - 1);
        parent_slot = std::bernoulli_distribution(0.5)(rng) ? recent(rng) : any(rng);
      } while (retweet_nodes[parent_slot].second >= spec.max_depth);
      const auto [parent_index, parent_depth] = retweet_nodes[parent_slot];
      const Post& parent = dump.posts[parent_index];
      p.parent_id = parent.id;
      p.created_at = Timestamp{parent.created_at.seconds + static_cast<std::int64_t>(delay(rng))};
      p.kind = comment(rng) ? PostKind::comment : PostKind::retweet;
      if (p.kind == PostKind::retweet) retweet_nodes.emplace_back(dump.posts.size(), parent_depth + 1);
      dump.posts.push_back(std::move(p));
    }
  }
  return dump;
}

void write_dump(const SynthDump& dump, const std::filesystem::path& posts_path,
                const std::filesystem::path& users_path) {
  std::ofstream posts(posts_path);
  if (!posts) throw IngestError("cannot write " + posts_path.string());
  for (const auto& p : dump.posts) posts << post_to_json_line(p) << '\n';
  std::ofstream users(users_path);
  if (!users) throw IngestError("cannot write " + users_path.string());
  for (const auto& u : dump.users) users << user_to_json_line(u) << '\n';
}

std::vector<Post> random_cascade_posts(const std::string& root_id, std::size_t nodes, int max_depth, int days,
                                       Timestamp start, std::mt19937_64& rng) {
  std::vector<Post> posts;
  if (nodes == 0) return posts;
  std::vector<int> depth;
  Post root;
  root.id = root_id;
  root.user_id = "u0";
  root.created_at = start;
  root.text = make_text(0, 8, rng);
  root.region = "overseas";
  posts.push_back(std::move(root));
  depth.push_back(0);

  std::uniform_int_distribution<std::int64_t> offset(0, static_cast<std::int64_t>(days) * 86400 - 1);
  std::uniform_int_distribution<std::size_t> length(0, 30);
  for (std::size_t i = 1; i < nodes; ++i) {
    std::uniform_int_distribution<std::size_t> any(0, posts.size() - 1);
    std::size_t parent;
    do parent = any(rng);
    while (depth[parent] >= max_depth);
    Post p;
    p.id = root_id + "-" + std::to_string(i);
    p.user_id = "u" + std::to_string(i % 97);
    p.parent_id = posts[parent].id;
    p.root_id = root_id;
    p.created_at = Timestamp{start.seconds + offset(rng)};
    p.text = make_text(static_cast<int>(i % 4), length(rng), rng);
    p.region = "GD";
    p.kind = PostKind::retweet;
    posts.push_back(std::move(p));
    depth.push_back(depth[parent] + 1);
  }
  return posts;
}

std::vector<Post> chain_cascade_posts(const std::string& root_id, int depth, Timestamp start) {
  std::vector<Post> posts;
  Post root;
  root.id = root_id;
  root.user_id = "u0";
  root.created_at = start;
  root.text = "street demonstration reported downtown";
  root.region = "overseas";
  posts.push_back(root);
  for (int d = 1; d <= depth; ++d) {
    Post p;
    p.id = root_id + "-d" + std::to_string(d);
    p.user_id = "u" + std::to_string(d);
    p.parent_id = posts.back().id;
    p.root_id = root_id;
    p.created_at = Timestamp{start.seconds + d * 3600};
    p.text = "retweet at depth " + std::to_string(d);
    p.region = "overseas";
    p.kind = PostKind::retweet;
    posts.push_back(std::move(p));
  }
  return posts;
}

}  // namespace rumorlens
