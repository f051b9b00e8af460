#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "rumorlens/layout.hpp"
#include "rumorlens/synth.hpp"

using namespace rumorlens;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

std::unordered_map<std::string, PostFeatures> word_features(const std::vector<Post>& posts, std::mt19937_64* rng) {
  std::unordered_map<std::string, PostFeatures> out;
  std::uniform_int_distribution<std::size_t> words(0, 40);
  std::size_t i = 0;
  for (const auto& p : posts) {
    PostFeatures pf;
    pf.word_count = rng ? words(*rng) : 5;
    pf.sentiment.label = static_cast<Polarity>(i++ % 3);
    pf.keyword = "kw" + p.id;
    out.emplace(p.id, pf);
  }
  return out;
}

PropagationLayout layout_of(const std::vector<Post>& posts, std::mt19937_64* rng = nullptr,
                            const GeometryConfig& geo = {}) {
  const auto b = build_cascades(posts);
  REQUIRE(b.cascades.size() == 1);
  return compute_layout(b.cascades[0], word_features(posts, rng), 0.5, geo);
}

std::vector<CellInput> inputs(std::initializer_list<std::size_t> words) {
  std::vector<CellInput> out;
  int i = 0;
  for (std::size_t w : words) {
    CellInput c;
    c.post_id = "n" + std::to_string(i);
    c.created_at = Timestamp{1000 + i++};
    c.word_count = w;
    out.push_back(c);
  }
  return out;
}

}  // namespace

TEST_CASE("proportional_split") {
  const std::vector<double> w{3, 1};
  const auto s = proportional_split(w, 4.0, 0.1);
  CHECK(s[0] == doctest::Approx(3.0));
  CHECK(s[1] == doctest::Approx(1.0));
  const std::vector<double> skew{1000, 1};
  const auto f = proportional_split(skew, 10.0, 1.0);
  CHECK(f[1] == doctest::Approx(1.0));
  CHECK(f[0] == doctest::Approx(9.0));
  CHECK_THROWS_AS(proportional_split(w, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("singleton cascade has no rings and empty histogram") {
  const auto l = layout_of({fixture::post("A", std::nullopt, "2020-03-01T08:00:00Z")});
  CHECK(l.rings.empty());
  CHECK(l.histogram.empty());
  CHECK(l.center_radius > 0);
}

TEST_CASE("one retweet: one ring, one full sector, one cell") {
  const auto l = layout_of({fixture::post("A", std::nullopt, "2020-03-01T08:00:00Z"),
                            fixture::post("B", "A", "2020-03-01T09:00:00Z")});
  const GeometryConfig geo;
  REQUIRE(l.rings.size() == 1);
  REQUIRE(l.rings[0].sectors.size() == 1);
  const Sector& s = l.rings[0].sectors[0];
  CHECK(std::abs(s.theta_extent - (kTwoPi - geo.gap_angle)) < 1e-12);
  REQUIRE(s.cells.size() == 1);
  const Cell& c = s.cells[0];
  CHECK(c.theta0 == s.theta_start);
  CHECK(c.theta1 == doctest::Approx(s.theta_start + s.theta_extent));
  CHECK(c.r0 == l.rings[0].r_inner);
  CHECK(c.r1 == l.rings[0].r_outer);
  CHECK(l.rings[0].r_outer == geo.total_radius);
}

TEST_CASE("sector angles follow node counts 3:1") {
  std::vector<Post> posts{fixture::post("R", std::nullopt, "2020-03-01T00:00:00Z")};
  for (int i = 0; i < 30; ++i) posts.push_back(fixture::post("a" + std::to_string(i), "R", "2020-03-01T05:00:00Z"));
  for (int i = 0; i < 10; ++i) posts.push_back(fixture::post("b" + std::to_string(i), "R", "2020-03-02T05:00:00Z"));
  const auto l = layout_of(posts);
  REQUIRE(l.rings.at(0).sectors.size() == 2);
  const auto& s = l.rings[0].sectors;
  CHECK(std::abs(s[0].theta_extent / s[1].theta_extent - 3.0) < 1e-9);
  CHECK(s[0].day < s[1].day);
  CHECK(s[1].theta_start > s[0].theta_start);
}

TEST_CASE("max_depth 6 gives 6 contiguous rings") {
  const auto posts = chain_cascade_posts("R", 6, parse_timestamp("2020-05-01T00:00:00Z"));
  const auto l = layout_of(posts);
  REQUIRE(l.rings.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(l.rings[i].depth == static_cast<int>(i) + 1);
  CHECK(oracle::check_layout(l, GeometryConfig{}.gap_angle).rings_contiguous);
  CHECK(l.rings.front().r_inner >= l.center_radius + GeometryConfig{}.pad);
}

TEST_CASE("infeasible geometry names the constraint") {
  const auto posts = chain_cascade_posts("R", 6, parse_timestamp("2020-05-01T00:00:00Z"));
  GeometryConfig geo;
  geo.min_ring_width = 100;
  try {
    layout_of(posts, nullptr, geo);
    FAIL("expected LayoutError");
  } catch (const LayoutError& e) {
    CHECK(e.constraint() == "min_ring_width");
  }

  std::vector<Post> many{fixture::post("R", std::nullopt, "2020-01-01T00:00:00Z")};
  for (int d = 0; d < 200; ++d) {
    many.push_back(fixture::post("x" + std::to_string(d), "R", "2020-01-01T00:00:00Z"));
    many.back().created_at = Timestamp{many.back().created_at.seconds + d * 86400};
  }
  try {
    layout_of(many);
    FAIL("expected LayoutError");
  } catch (const LayoutError& e) {
    CHECK(e.constraint() == "min_sector_angle");
  }
}

TEST_CASE("pack_cells") {
  const GeometryConfig geo;
  const Wedge w{0.3, 1.2, 100, 160};
  SUBCASE("single node spans the wedge") {
    const auto cells = pack_cells(w, inputs({7}), geo);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].theta0 == 0.3);
    CHECK(cells[0].theta1 == doctest::Approx(1.5));
    CHECK(cells[0].r0 == 100);
    CHECK(cells[0].r1 == 160);
  }
  SUBCASE("four equal nodes have comparable areas") {
    const auto cells = pack_cells(w, inputs({3, 3, 3, 3}), geo);
    REQUIRE(cells.size() == 4);
    for (const auto& a : cells)
      for (const auto& b : cells) {
        CHECK(a.area() / b.area() >= 0.5);
        CHECK(a.area() / b.area() <= 2.0);
      }
  }
  SUBCASE("areas follow 1 + word_count and tile the wedge") {
    const auto in = inputs({0, 10, 3, 0, 25, 1, 7, 7, 2});
    const auto cells = pack_cells(w, in, geo);
    REQUIRE(cells.size() == in.size());
    double total_weight = 0, total_area = 0;
    for (const auto& c : in) total_weight += 1.0 + static_cast<double>(c.word_count);
    for (const auto& c : cells) total_area += c.area();
    const double wedge_area = 0.5 * (160.0 * 160.0 - 100.0 * 100.0) * 1.2;
    CHECK(total_area == doctest::Approx(wedge_area).epsilon(1e-12));
    for (std::size_t i = 0; i < cells.size(); ++i) {
      CHECK(cells[i].post_id == in[i].post_id);
      CHECK(cells[i].area() > 0.0);
      const double target = wedge_area * (1.0 + static_cast<double>(in[i].word_count)) / total_weight;
      CHECK(cells[i].area() == doctest::Approx(target).epsilon(1e-9));
    }
  }
}

TEST_CASE("retweet_histogram and cells_for_day on the four-node cascade") {
  const auto posts = fixture::four_node();
  const auto l = layout_of(posts);
  REQUIRE(l.histogram.size() == 2);
  CHECK(l.histogram[0].count == 2);
  CHECK(l.histogram[1].count == 1);
  auto b_day = cells_for_day(l, parse_day("2020-03-01"));
  std::sort(b_day.begin(), b_day.end());
  CHECK(b_day == std::vector<std::string>{"B", "C"});
  CHECK(cells_for_day(l, parse_day("2020-03-02")) == std::vector<std::string>{"D"});
  CHECK(cells_for_day(l, parse_day("2021-01-01")).empty());
}

TEST_CASE("comments take no cells") {
  auto posts = fixture::four_node();
  posts.push_back(fixture::post("K", "A", "2020-03-01T12:00:00Z", PostKind::comment));
  const auto l = layout_of(posts);
  std::set<std::string> ids;
  for (const auto& h : l.histogram) {
    for (const auto& id : cells_for_day(l, h.day)) ids.insert(id);
  }
  CHECK(ids == std::set<std::string>{"B", "C", "D"});
  std::size_t hist = 0;
  for (const auto& h : l.histogram) hist += h.count;
  CHECK(hist == 3);
}

TEST_CASE("random cascades satisfy closure, non-overlap, containment, monotone encoding") {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<std::size_t> size_d(2, 600);
  const GeometryConfig geo;
  for (int trial = 0; trial < 30; ++trial) {
    const auto posts =
        random_cascade_posts("R", size_d(rng), 7, 12, parse_timestamp("2020-02-01T00:00:00Z"), rng);
    const auto l = layout_of(posts, &rng);
    const auto chk = oracle::check_layout(l, geo.gap_angle);
    CHECK(chk.worst_closure < 1e-9);
    CHECK(chk.total_overlap == 0.0);
    CHECK(chk.worst_containment < 1e-9);
    CHECK(chk.rings_contiguous);
    CHECK(l.rings.back().r_outer == doctest::Approx(geo.total_radius));

    for (const auto& ring : l.rings) {
      for (const auto& s : ring.sectors) {
        CHECK(s.theta_extent >= geo.min_sector_angle);
        for (const auto& a : s.cells)
          for (const auto& b : s.cells)
            if (a.word_count > b.word_count) CHECK(a.area() >= b.area());
        for (const auto& c : s.cells) {
          if (!c.keyword) continue;
          const double scale = geo.total_radius / 400.0;
          CHECK((c.r1 - c.r0) >= geo.label_radial_extent * scale);
          CHECK(0.5 * (c.r0 + c.r1) * (c.theta1 - c.theta0) >= geo.label_arc_length * scale);
        }
      }
    }
    const auto again = layout_of(posts, nullptr);
    const auto twice = layout_of(posts, nullptr);
    CHECK(layout_to_json(again).dump() == layout_to_json(twice).dump());
  }
}

TEST_CASE("layout_to_json schema") {
  const auto l = layout_of(fixture::four_node());
  const auto j = layout_to_json(l);
  CHECK(j.at("case_id") == "A");
  CHECK(j.at("center").contains("r"));
  CHECK(j.at("center").at("influence") == 3);
  const auto& cell = j.at("rings").at(0).at("sectors").at(0).at("cells").at(0);
  for (const char* key : {"post_id", "t0", "t1", "r0", "r1", "words", "sentiment"}) CHECK(cell.contains(key));
  CHECK(j.at("rings").at(0).at("sectors").at(0).at("day") == "2020-03-01");
  CHECK(j.at("histogram").is_array());
}
