#include "rumorlens/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace rumorlens {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw std::invalid_argument("Matrix::from_rows: ragged rows");
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

namespace {

Matrix squared_distances(const Matrix& x) {
  const std::size_t n = x.rows();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto xj = x.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < x.cols(); ++k) s += (xi[k] - xj[k]) * (xi[k] - xj[k]);
      d(i, j) = s;
      d(j, i) = s;
    }
  }
  return d;
}

// Fills out[j] = p(j|i) for precision beta and returns exp(entropy). The
// smallest distance is subtracted first so large betas stay representable.
double conditional_row(std::span<const double> dist, std::size_t self, double dmin, double beta,
                       std::span<double> out) {
  double sum = 0.0;
  double weighted = 0.0;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    if (j == self) {
      out[j] = 0.0;
      continue;
    }
    const double shifted = dist[j] - dmin;
    const double p = std::exp(-beta * shifted);
    out[j] = p;
    sum += p;
    weighted += p * shifted;
  }
  for (std::size_t j = 0; j < dist.size(); ++j) out[j] /= sum;
  const double entropy = std::log(sum) + beta * weighted / sum;
  return std::exp(entropy);
}

// Raises entries below the floor and rescales the rest so the total stays 1.
void apply_floor(Matrix& p) {
  const std::size_t n = p.rows();
  for (int round = 0; round < 16; ++round) {
    double floored_mass = 0.0;
    double free_mass = 0.0;
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        double& v = p(i, j);
        if (v <= kAffinityFloor) {
          if (v != kAffinityFloor) changed = true;
          v = kAffinityFloor;
          floored_mass += v;
        } else {
          free_mass += v;
        }
      }
    }
    if (!changed && round > 0) return;
    const double scale = (1.0 - floored_mass) / free_mass;
    if (scale == 1.0) return;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && p(i, j) > kAffinityFloor) p(i, j) *= scale;
  }
}

void check_finite(const Matrix& m, const char* what) {
  for (double v : m.data())
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite input value");
}

// Student-t kernel matrix with zero diagonal; returns the normalizer Z.
double student_kernel(const Matrix& y, Matrix& w) {
  const std::size_t n = y.rows();
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w(i, i) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = y(i, 0) - y(j, 0);
      const double dy = y(i, 1) - y(j, 1);
      const double k = 1.0 / (1.0 + dx * dx + dy * dy);
      w(i, j) = k;
      w(j, i) = k;
      z += 2.0 * k;
    }
  }
  return z;
}

void gradient_into(const Matrix& joint, double exaggeration, const Matrix& y, Matrix& w, Matrix& grad) {
  const std::size_t n = y.rows();
  const double z = student_kernel(y, w);
  for (std::size_t i = 0; i < n; ++i) {
    double gx = 0.0, gy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double k = w(i, j);
      const double mult = (exaggeration * joint(i, j) - k / z) * k;
      gx += mult * (y(i, 0) - y(j, 0));
      gy += mult * (y(i, 1) - y(j, 1));
    }
    grad(i, 0) = 4.0 * gx;
    grad(i, 1) = 4.0 * gy;
  }
}

}  // namespace

Affinities pairwise_affinities(const Matrix& points, double perplexity) {
  const std::size_t n = points.rows();
  if (n < 2) throw std::invalid_argument("pairwise_affinities: need at least 2 points");
  if (!(perplexity > 0.0) || perplexity >= static_cast<double>(n))
    throw std::invalid_argument("pairwise_affinities: perplexity must lie in (0, n)");
  check_finite(points, "pairwise_affinities");

  const Matrix dist = squared_distances(points);
  Affinities out{Matrix(n, n), Matrix(n, n), std::vector<double>(n, 1.0), {}};

  for (std::size_t i = 0; i < n; ++i) {
    const auto di = dist.row(i);
    double dmin = std::numeric_limits<double>::infinity();
    double dsum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      dmin = std::min(dmin, di[j]);
      dsum += di[j];
    }
    const double spread = dsum / static_cast<double>(n - 1) - dmin;
    double beta = spread > 0.0 ? 1.0 / spread : 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    auto row = out.conditional.row(i);
    bool converged = false;
    for (int step = 0; step < kMaxBandwidthSteps; ++step) {
      const double realized = conditional_row(di, i, dmin, beta, row);
      if (std::abs(realized - perplexity) < kPerplexityTolerance) {
        converged = true;
        break;
      }
      if (realized > perplexity) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : (lo + hi) / 2.0;
      } else {
        hi = beta;
        beta = (lo + hi) / 2.0;
      }
    }
    if (!converged) {
      conditional_row(di, i, dmin, beta, row);
      out.unconverged_rows.push_back(i);
    }
    out.betas[i] = beta;
  }

  const double denom = 2.0 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = (out.conditional(i, j) + out.conditional(j, i)) / denom;
      out.joint(i, j) = v;
      out.joint(j, i) = v;
    }
  }
  apply_floor(out.joint);
  return out;
}

double kl_divergence(const Matrix& joint, const Matrix& coords) {
  const std::size_t n = coords.rows();
  Matrix w(n, n);
  const double z = student_kernel(coords, w);
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double p = joint(i, j);
      if (p > 0.0) kl += p * std::log(p / (w(i, j) / z));
    }
  return kl;
}

Matrix kl_gradient(const Matrix& joint, const Matrix& coords) {
  const std::size_t n = coords.rows();
  Matrix w(n, n), grad(n, 2);
  gradient_into(joint, 1.0, coords, w, grad);
  return grad;
}

double effective_perplexity(double requested, std::size_t n) {
  const double cap = (static_cast<double>(n) - 1.0) / 3.0;
  return std::max(1.0, std::min(requested, cap));
}

void normalize_unit_square(Matrix& coords) {
  const std::size_t n = coords.rows();
  if (n == 0) return;
  for (std::size_t c = 0; c < coords.cols(); ++c) {
    if (n == 1) {
      coords(0, c) = 0.5;
      continue;
    }
    double lo = coords(0, c), hi = coords(0, c);
    for (std::size_t r = 1; r < n; ++r) {
      lo = std::min(lo, coords(r, c));
      hi = std::max(hi, coords(r, c));
    }
    for (std::size_t r = 0; r < n; ++r) coords(r, c) = min_max_normalize(coords(r, c), lo, hi);
  }
}

Embedding tsne_embed(const Matrix& points, const EmbeddingConfig& cfg) {
  const std::size_t n = points.rows();
  if (n == 0) throw std::invalid_argument("tsne_embed: need at least 1 point");
  if (cfg.iterations <= 0 || cfg.learning_rate <= 0.0 || cfg.early_exaggeration <= 0.0 || cfg.perplexity <= 0.0)
    throw std::invalid_argument("tsne_embed: configuration values must be positive");

  Embedding out;
  if (n == 1) {
    out.coords = Matrix(1, 2, 0.5);
    out.perplexity = 0.0;
    return out;
  }

  out.perplexity = effective_perplexity(cfg.perplexity, n);
  Affinities aff = pairwise_affinities(points, out.perplexity);
  out.unconverged_rows = std::move(aff.unconverged_rows);
  const Matrix& joint = aff.joint;

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1e-4);
  Matrix y(n, 2);
  for (double& v : y.data()) v = gauss(rng);

  Matrix velocity(n, 2), gains(n, 2, 1.0), grad(n, 2), w(n, n);
  auto record = [&](int it) {
    const double kl = kl_divergence(joint, y);
    if (!std::isfinite(kl)) throw EmbeddingError("tsne_embed: non-finite KL divergence at iteration " + std::to_string(it));
    out.kl_trace.push_back({it, kl});
  };

  for (int it = 0; it < cfg.iterations; ++it) {
    if (it % 50 == 0) record(it);
    const double exaggeration = it < cfg.exaggeration_iterations ? cfg.early_exaggeration : 1.0;
    const double momentum = it < cfg.momentum_switch_iteration ? cfg.initial_momentum : cfg.final_momentum;
    gradient_into(joint, exaggeration, y, w, grad);

    auto& g = grad.data();
    auto& v = velocity.data();
    auto& gn = gains.data();
    auto& yd = y.data();
    for (std::size_t k = 0; k < yd.size(); ++k) {
      gn[k] = (g[k] > 0.0) != (v[k] > 0.0) ? gn[k] + 0.2 : gn[k] * 0.8;
      gn[k] = std::max(gn[k], 0.01);
      v[k] = momentum * v[k] - cfg.learning_rate * gn[k] * g[k];
      yd[k] += v[k];
    }
    for (std::size_t c = 0; c < 2; ++c) {
      double mean = 0.0;
      for (std::size_t r = 0; r < n; ++r) mean += y(r, c);
      mean /= static_cast<double>(n);
      for (std::size_t r = 0; r < n; ++r) y(r, c) -= mean;
    }
    for (double val : yd)
      if (!std::isfinite(val))
        throw EmbeddingError("tsne_embed: non-finite coordinate at iteration " + std::to_string(it));
  }
  if (out.kl_trace.empty() || out.kl_trace.back().iteration != cfg.iterations) record(cfg.iterations);

  normalize_unit_square(y);
  out.coords = std::move(y);
  return out;
}

std::string_view to_string(GlyphMetric m) {
  switch (m) {
    case GlyphMetric::fans: return "fans";
    case GlyphMetric::followees: return "followees";
    case GlyphMetric::tweets: return "tweets";
    case GlyphMetric::integrity: return "integrity";
  }
  return "fans";
}

double min_max_normalize(double v, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  return std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
}

std::vector<GlyphSpec> build_glyphs(const Embedding& embedding, std::span<const CaseFeatures> cases,
                                    const Taxonomy& taxonomy, const GlyphConfig& cfg) {
  if (embedding.coords.rows() != cases.size())
    throw std::invalid_argument("build_glyphs: embedding and feature counts differ");
  std::vector<GlyphSpec> out;
  if (cases.empty()) return out;

  struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  };
  Range influence, fans, followees, tweets;
  for (const auto& cf : cases) {
    influence.add(static_cast<double>(cf.influence));
    fans.add(cf.log_fans);
    followees.add(cf.log_followees);
    tweets.add(cf.log_tweets);
  }

  constexpr double quarter = std::numbers::pi / 2.0;
  out.reserve(cases.size());
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const CaseFeatures& cf = cases[i];
    GlyphSpec g;
    g.case_id = cf.case_id;
    g.x = embedding.coords(i, 0);
    g.y = embedding.coords(i, 1);
    const double inf = min_max_normalize(static_cast<double>(cf.influence), influence.lo, influence.hi);
    g.inner_radius = std::clamp(cfg.r_max * std::sqrt(inf), cfg.r_min, cfg.r_max);
    const auto idx = topic_index(taxonomy, cf.topic);
    g.topic_color_index = idx ? static_cast<int>(*idx) : static_cast<int>(taxonomy.size()) - 1;
    const std::array<std::pair<GlyphMetric, double>, 4> metrics{{
        {GlyphMetric::fans, min_max_normalize(cf.log_fans, fans.lo, fans.hi)},
        {GlyphMetric::followees, min_max_normalize(cf.log_followees, followees.lo, followees.hi)},
        {GlyphMetric::tweets, min_max_normalize(cf.log_tweets, tweets.lo, tweets.hi)},
        {GlyphMetric::integrity, std::clamp(cf.integrity, 0.0, 1.0)},
    }};
    for (std::size_t q = 0; q < 4; ++q) {
      GlyphArc& arc = g.arcs[q];
      arc.metric = metrics[q].first;
      arc.fraction = metrics[q].second;
      arc.start = static_cast<double>(q) * quarter + cfg.arc_gap / 2.0;
      arc.extent = arc.fraction * (quarter - cfg.arc_gap);
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace rumorlens
