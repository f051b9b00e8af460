#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rumorlens/features.hpp"

namespace rumorlens {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline constexpr double kPerplexityTolerance = 1e-4;
inline constexpr int kMaxBandwidthSteps = 64;
inline constexpr double kAffinityFloor = 1e-12;

struct Affinities {
  Matrix joint;        // symmetric, zero diagonal, sums to 1
  Matrix conditional;  // row i holds p(j|i)
  std::vector<double> betas;  // per-row precision 1 / (2 sigma^2)
  std::vector<std::size_t> unconverged_rows;
};

/// Gaussian input affinities with per-row bandwidths found by bisection.
/// Throws std::invalid_argument for n < 2, non-finite rows, or perplexity
/// outside (0, n).
Affinities pairwise_affinities(const Matrix& points, double perplexity);

/// KL(P || Q) with Student-t output affinities.
double kl_divergence(const Matrix& joint, const Matrix& coords);
/// Exact gradient of kl_divergence with respect to the coordinates.
Matrix kl_gradient(const Matrix& joint, const Matrix& coords);

struct EmbeddingConfig {
  double perplexity = 30.0;
  int iterations = 750;
  double early_exaggeration = 12.0;
  int exaggeration_iterations = 250;
  double learning_rate = 200.0;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  int momentum_switch_iteration = 250;
  std::uint64_t seed = 42;
};

struct KlSample {
  int iteration = 0;
  double kl = 0.0;
};

struct Embedding {
  Matrix coords;  // n x 2 in [0,1]^2
  std::vector<KlSample> kl_trace;
  double perplexity = 0.0;  // after clamping
  std::vector<std::size_t> unconverged_rows;
};

class EmbeddingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Perplexity actually used for n points: clamped to (n-1)/3, never below 1.
double effective_perplexity(double requested, std::size_t n);

/// Exact t-SNE. Deterministic for a given seed. Throws EmbeddingError when
/// the optimization produces non-finite values.
Embedding tsne_embed(const Matrix& points, const EmbeddingConfig& cfg);

/// Min-max normalizes each column to [0,1]; a zero-range column maps to 0,
/// a single row maps to 0.5.
void normalize_unit_square(Matrix& coords);

enum class GlyphMetric { fans, followees, tweets, integrity };
std::string_view to_string(GlyphMetric m);

/// One outer arc. Angles are radians clockwise from 12 o'clock.
struct GlyphArc {
  GlyphMetric metric = GlyphMetric::fans;
  double fraction = 0.0;
  double start = 0.0;
  double extent = 0.0;
};

struct GlyphSpec {
  std::string case_id;
  double x = 0.5;
  double y = 0.5;
  double inner_radius = 0.0;
  int topic_color_index = 0;
  std::array<GlyphArc, 4> arcs;  // fans NE, followees SE, tweets SW, integrity NW
};

struct GlyphConfig {
  double r_min = 4.0;
  double r_max = 16.0;
  double arc_gap = 0.2;
};

/// Maps v into [0,1] over [lo, hi]; a zero range maps to 0.
double min_max_normalize(double v, double lo, double hi);

/// Glyphs for each embedded case, normalized over the supplied set. Row i of
/// the embedding belongs to cases[i].
std::vector<GlyphSpec> build_glyphs(const Embedding& embedding, std::span<const CaseFeatures> cases,
                                    const Taxonomy& taxonomy, const GlyphConfig& cfg);

}  // namespace rumorlens
