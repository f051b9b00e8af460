#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rumorlens/projection.hpp"

using namespace rumorlens;

namespace {

Matrix random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, d);
  for (double& v : m.data()) v = g(rng);
  return m;
}

void check_joint(const Matrix& p) {
  double sum = 0;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    CHECK(p(i, i) == 0.0);
    for (std::size_t j = 0; j < p.cols(); ++j) {
      sum += p(i, j);
      CHECK(std::abs(p(i, j) - p(j, i)) < 1e-12);
      if (i != j) CHECK(p(i, j) >= kAffinityFloor * 0.5);
    }
  }
  CHECK(std::abs(sum - 1.0) < 1e-9);
}

CaseFeatures glyph_case(const std::string& id, std::uint64_t fans, std::size_t influence, const std::string& topic) {
  CaseFeatures cf;
  cf.case_id = id;
  cf.log_fans = log_count(fans);
  cf.log_followees = log_count(fans / 2);
  cf.log_tweets = 1.0;
  cf.integrity = 0.6;
  cf.influence = influence;
  cf.topic = topic;
  return cf;
}

const Taxonomy kTax{{"World News", {"election"}}, {"Health", {"virus"}}, {"Other", {}}};

}  // namespace

TEST_CASE("pairwise_affinities: two points") {
  const auto a = pairwise_affinities(Matrix::from_rows({{0.0, 0.0}, {3.0, 4.0}}), 1.0);
  CHECK(a.joint(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a.joint(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a.joint(0, 0) == 0.0);
  CHECK(a.unconverged_rows.empty());
}

TEST_CASE("pairwise_affinities: three equidistant points") {
  const auto a = pairwise_affinities(Matrix::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}), 2.0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) CHECK(a.joint(i, j) == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
}

TEST_CASE("pairwise_affinities: realized perplexity per row on random inputs") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Matrix x = random_points(10, 3, seed);
    const double target = 3.0;
    const auto a = pairwise_affinities(x, target);
    CHECK(a.unconverged_rows.empty());
    for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(oracle::row_perplexity(a.conditional.row(i)) - target) < 1e-4);
    check_joint(a.joint);
  }
}

TEST_CASE("pairwise_affinities: duplicates are flagged, not fatal") {
  const auto a = pairwise_affinities(Matrix::from_rows({{1, 1}, {1, 1}, {1, 1}, {5, 5}}), 2.5);
  CHECK_FALSE(a.unconverged_rows.empty());
  check_joint(a.joint);
}

TEST_CASE("pairwise_affinities: preconditions") {
  CHECK_THROWS_AS(pairwise_affinities(Matrix(1, 2), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(pairwise_affinities(Matrix(4, 2), 4.0), std::invalid_argument);
  Matrix bad = random_points(4, 2, 1);
  bad(2, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(pairwise_affinities(bad, 1.5), std::invalid_argument);
}

TEST_CASE("kl_gradient matches central finite differences") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const std::size_t n = 5 + seed;
    const auto a = pairwise_affinities(random_points(n, 4, seed), 2.0);
    const Matrix y = random_points(n, 2, seed + 100);
    const Matrix g = kl_gradient(a.joint, y);
    const Matrix fd = oracle::kl_gradient_fd(a.joint, y, 1e-5);
    double num = 0, den = 0;
    for (std::size_t k = 0; k < g.data().size(); ++k) {
      num += (g.data()[k] - fd.data()[k]) * (g.data()[k] - fd.data()[k]);
      den += fd.data()[k] * fd.data()[k];
    }
    CHECK(std::sqrt(num / den) < 1e-4);
  }
}

TEST_CASE("effective_perplexity") {
  CHECK(effective_perplexity(30, 1000) == 30);
  CHECK(effective_perplexity(30, 31) == 10);
  CHECK(effective_perplexity(30, 2) == 1);
}

TEST_CASE("tsne_embed: single point and two points") {
  const auto one = tsne_embed(Matrix::from_rows({{1, 2, 3}}), {});
  CHECK(one.coords(0, 0) == 0.5);
  CHECK(one.coords(0, 1) == 0.5);
  const auto two = tsne_embed(Matrix::from_rows({{0, 0}, {1, 1}}), {});
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(std::min(two.coords(0, c), two.coords(1, c)) == 0.0);
    CHECK(std::max(two.coords(0, c), two.coords(1, c)) == 1.0);
  }
}

TEST_CASE("tsne_embed: deterministic, normalized, KL decreases") {
  const Matrix x = random_points(40, 5, 9);
  const EmbeddingConfig cfg;
  const auto a = tsne_embed(x, cfg);
  const auto b = tsne_embed(x, cfg);
  CHECK(a.coords == b.coords);
  CHECK(a.perplexity == 13.0);
  for (std::size_t c = 0; c < 2; ++c) {
    double lo = 1, hi = 0;
    for (std::size_t i = 0; i < 40; ++i) {
      lo = std::min(lo, a.coords(i, c));
      hi = std::max(hi, a.coords(i, c));
    }
    CHECK(lo == 0.0);
    CHECK(hi == 1.0);
  }
  REQUIRE(a.kl_trace.size() >= 2);
  CHECK(a.kl_trace.front().iteration == 0);
  CHECK(a.kl_trace.back().iteration == cfg.iterations);
  CHECK(a.kl_trace.back().kl < a.kl_trace.front().kl);

  Matrix again = a.coords;
  normalize_unit_square(again);
  CHECK(again == a.coords);
}

TEST_CASE("tsne_embed: rejects non-finite input") {
  Matrix x = random_points(6, 2, 4);
  x(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS(tsne_embed(x, {}));
}

TEST_CASE("normalize_unit_square: zero-range axis maps to 0") {
  Matrix m = Matrix::from_rows({{1, 5}, {3, 5}, {2, 5}});
  normalize_unit_square(m);
  CHECK(m == Matrix::from_rows({{0, 0}, {1, 0}, {0.5, 0}}));
}

TEST_CASE("build_glyphs") {
  std::vector<CaseFeatures> cases{glyph_case("a", 0, 1, "Health"), glyph_case("b", 999, 4, "World News"),
                                  glyph_case("c", 999999, 9, "Other")};
  Embedding e;
  e.coords = Matrix::from_rows({{0, 0}, {0.25, 1}, {1, 0.5}});
  const GlyphConfig cfg;
  const auto glyphs = build_glyphs(e, cases, kTax, cfg);
  REQUIRE(glyphs.size() == 3);
  CHECK(glyphs[0].arcs[0].fraction == 0.0);
  CHECK(glyphs[1].arcs[0].fraction == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(glyphs[2].arcs[0].fraction == 1.0);
  CHECK(glyphs[1].x == 0.25);
  CHECK(glyphs[1].y == 1.0);
  CHECK(glyphs[0].topic_color_index == 1);
  CHECK(glyphs[1].topic_color_index == 0);
  CHECK(glyphs[2].topic_color_index == 2);
  CHECK(glyphs[0].inner_radius == cfg.r_min);
  CHECK(glyphs[2].inner_radius == cfg.r_max);
  CHECK(glyphs[1].inner_radius == doctest::Approx(cfg.r_max * std::sqrt(3.0 / 8.0)));
  CHECK(glyphs[0].arcs[3].fraction == 0.6);  // integrity used raw

  const double q = std::numbers::pi / 2;
  for (const auto& g : glyphs) {
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(static_cast<std::size_t>(g.arcs[k].metric) == k);
      CHECK(g.arcs[k].fraction >= 0.0);
      CHECK(g.arcs[k].fraction <= 1.0);
      CHECK(g.arcs[k].start == doctest::Approx(static_cast<double>(k) * q + cfg.arc_gap / 2));
      CHECK(g.arcs[k].extent == doctest::Approx(g.arcs[k].fraction * (q - cfg.arc_gap)));
    }
  }
}

TEST_CASE("build_glyphs: equal influence gives r_min everywhere") {
  std::vector<CaseFeatures> cases{glyph_case("a", 1, 5, "Health"), glyph_case("b", 10, 5, "Health")};
  Embedding e;
  e.coords = Matrix::from_rows({{0, 0}, {1, 1}});
  for (const auto& g : build_glyphs(e, cases, kTax, {})) CHECK(g.inner_radius == GlyphConfig{}.r_min);
}
