#include "rumorlens/layout.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

namespace rumorlens {

using json = nlohmann::json;

std::vector<double> proportional_split(std::span<const double> weights, double total, double floor) {
  const std::size_t n = weights.size();
  if (n == 0) return {};
  if (static_cast<double>(n) * floor > total * (1.0 + 1e-12))
    throw std::invalid_argument("proportional_split: floor too large for total");
  for (double w : weights)
    if (!(w > 0.0)) throw std::invalid_argument("proportional_split: weights must be positive");

  std::vector<bool> floored(n, false);
  std::size_t n_floored = 0;
  double free_total = total;
  double free_weight = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (bool changed = true; changed && free_weight > 0.0;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (floored[i]) continue;
      if (free_total * weights[i] / free_weight < floor) {
        floored[i] = true;
        ++n_floored;
        changed = true;
      }
    }
    free_total = total - static_cast<double>(n_floored) * floor;
    free_weight = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (!floored[i]) free_weight += weights[i];
  }

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = floored[i] ? floor : free_total * weights[i] / free_weight;
  return out;
}

std::vector<Cell> pack_cells(const Wedge& wedge, std::span<const CellInput> nodes, const GeometryConfig& geometry) {
  const std::size_t n = nodes.size();
  std::vector<Cell> cells;
  if (n == 0) return cells;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (nodes[a].created_at != nodes[b].created_at) return nodes[a].created_at < nodes[b].created_at;
    return nodes[a].post_id < nodes[b].post_id;
  });

  std::vector<double> weight(n);
  double total_weight = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    weight[i] = 1.0 + static_cast<double>(nodes[order[i]].word_count);
    total_weight += weight[i];
  }

  // roughly square cells: rows ~ sqrt(n * radial extent / mid arc length)
  const double height = wedge.r1 - wedge.r0;
  const double arc = 0.5 * (wedge.r0 + wedge.r1) * wedge.dtheta;
  std::size_t rows = 1;
  if (arc > 0.0 && height > 0.0) {
    const double ideal = std::sqrt(static_cast<double>(n) * height / arc);
    rows = static_cast<std::size_t>(std::clamp<double>(std::round(ideal), 1.0, static_cast<double>(n)));
  }

  // consecutive groups of roughly equal weight, none empty
  std::vector<std::size_t> row_end;
  {
    std::size_t idx = 0;
    double cum = 0.0;
    for (std::size_t k = 0; k + 1 < rows; ++k) {
      const double target = total_weight * static_cast<double>(k + 1) / static_cast<double>(rows);
      const std::size_t limit = n - (rows - k - 1);
      cum += weight[idx++];
      while (idx < limit && cum + weight[idx] / 2.0 <= target) cum += weight[idx++];
      row_end.push_back(idx);
    }
    row_end.push_back(n);
  }

  // each row's annular area is its share of the total weight, so every cell
  // gets the same area per unit weight
  const double r0_sq = wedge.r0 * wedge.r0;
  const double annulus = wedge.r1 * wedge.r1 - r0_sq;
  const double theta_end = wedge.theta0 + wedge.dtheta;
  const double scale = geometry.total_radius / 400.0;
  const double label_arc = geometry.label_arc_length * scale;
  const double label_radial = geometry.label_radial_extent * scale;

  cells.reserve(n);
  double cum_weight = 0.0;
  double row_r0 = wedge.r0;
  std::size_t begin = 0;
  for (std::size_t k = 0; k < row_end.size(); ++k) {
    const std::size_t end = row_end[k];
    double row_weight = 0.0;
    for (std::size_t i = begin; i < end; ++i) row_weight += weight[i];
    cum_weight += row_weight;
    const double row_r1 = k + 1 == row_end.size() ? wedge.r1 : std::sqrt(r0_sq + annulus * cum_weight / total_weight);

    double acc = 0.0;
    double t0 = wedge.theta0;
    for (std::size_t i = begin; i < end; ++i) {
      acc += weight[i];
      const double t1 = i + 1 == end ? theta_end : wedge.theta0 + wedge.dtheta * (acc / row_weight);
      const CellInput& node = nodes[order[i]];
      Cell c;
      c.post_id = node.post_id;
      c.theta0 = t0;
      c.theta1 = t1;
      c.r0 = row_r0;
      c.r1 = row_r1;
      c.word_count = node.word_count;
      c.sentiment = node.sentiment;
      const double arc_len = 0.5 * (row_r0 + row_r1) * (t1 - t0);
      if (node.keyword && arc_len >= label_arc && row_r1 - row_r0 >= label_radial) c.keyword = node.keyword;
      cells.push_back(std::move(c));
      t0 = t1;
    }
    row_r0 = row_r1;
    begin = end;
  }
  return cells;
}

std::vector<SeriesPoint> retweet_histogram(const Cascade& cascade) {
  std::map<Day, std::size_t> per_day;
  for (const auto& [id, post] : cascade.nodes)
    if (id != cascade.root_id && post.kind == PostKind::retweet) ++per_day[day_of(post.created_at)];
  std::vector<SeriesPoint> out;
  if (per_day.empty()) return out;
  const Day first = per_day.begin()->first;
  const Day last = per_day.rbegin()->first;
  for (std::int64_t d = first.index; d <= last.index; ++d) {
    auto it = per_day.find(Day{d});
    out.push_back({Day{d}, it == per_day.end() ? 0 : it->second});
  }
  return out;
}

PropagationLayout compute_layout(const Cascade& cascade,
                                 const std::unordered_map<std::string, PostFeatures>& post_features,
                                 double normalized_influence, const GeometryConfig& g) {
  if (cascade.size == 0 || !cascade.nodes.contains(cascade.root_id))
    throw std::invalid_argument("compute_layout: empty cascade");

  PropagationLayout layout;
  layout.case_id = cascade.root_id;
  layout.influence = compute_influence(cascade);
  layout.total_radius = g.total_radius;
  layout.center_radius =
      std::clamp(g.center_scale * std::sqrt(std::clamp(normalized_influence, 0.0, 1.0)), g.center_min, g.center_max);
  layout.histogram = retweet_histogram(cascade);

  const int depth_count = cascade.max_depth;
  if (depth_count == 0) return layout;

  const double inner = layout.center_radius + g.pad;
  const double annulus = g.total_radius - inner;
  if (annulus <= 0.0 || static_cast<double>(depth_count) * g.min_ring_width > annulus)
    throw LayoutError("min_ring_width", "min_ring_width " + std::to_string(g.min_ring_width) + " x " +
                                            std::to_string(depth_count) + " rings exceeds the available annulus " +
                                            std::to_string(annulus));

  std::vector<double> nodes_at_depth(static_cast<std::size_t>(depth_count), 0.0);
  // depth -> day -> retweets
  std::vector<std::map<Day, std::vector<CellInput>>> groups(static_cast<std::size_t>(depth_count));
  for (const auto& [id, post] : cascade.nodes) {
    const int d = cascade.depth.at(id);
    if (d == 0) continue;
    nodes_at_depth[static_cast<std::size_t>(d - 1)] += 1.0;
    if (post.kind != PostKind::retweet) continue;
    auto pf = post_features.find(id);
    if (pf == post_features.end()) throw std::invalid_argument("compute_layout: no features for post " + id);
    groups[static_cast<std::size_t>(d - 1)][day_of(post.created_at)].push_back(
        {id, post.created_at, pf->second.word_count, pf->second.sentiment.label, pf->second.keyword});
  }

  std::vector<double> ring_weights;
  for (double count : nodes_at_depth) ring_weights.push_back(std::log2(2.0 + count));
  const auto widths = proportional_split(ring_weights, annulus, g.min_ring_width);

  constexpr double full_turn = 2.0 * std::numbers::pi;
  double r = inner;
  for (int d = 1; d <= depth_count; ++d) {
    const auto di = static_cast<std::size_t>(d - 1);
    Ring ring;
    ring.depth = d;
    ring.r_inner = r;
    ring.r_outer = d == depth_count ? g.total_radius : r + widths[di];
    r = ring.r_outer;

    const auto& days = groups[di];
    const double sector_count = static_cast<double>(days.size());
    const double available = full_turn - sector_count * g.gap_angle;
    if (!days.empty() && (available <= 0.0 || sector_count * g.min_sector_angle > available))
      throw LayoutError("min_sector_angle", "min_sector_angle " + std::to_string(g.min_sector_angle) + " x " +
                                                std::to_string(days.size()) + " sectors at depth " +
                                                std::to_string(d) + " exceeds the available angle");
    std::vector<double> counts;
    for (const auto& [_, nodes] : days) counts.push_back(static_cast<double>(nodes.size()));
    const auto extents = proportional_split(counts, available, g.min_sector_angle);

    double theta = g.gap_angle / 2.0;
    std::size_t s = 0;
    for (const auto& [day, nodes] : days) {
      Sector sector;
      sector.day = day;
      sector.theta_start = theta;
      sector.theta_extent = extents[s++];
      sector.cells = pack_cells({sector.theta_start, sector.theta_extent, ring.r_inner, ring.r_outer}, nodes, g);
      theta += sector.theta_extent + g.gap_angle;
      ring.sectors.push_back(std::move(sector));
    }
    layout.rings.push_back(std::move(ring));
  }
  return layout;
}

std::vector<std::string> cells_for_day(const PropagationLayout& layout, Day day) {
  std::vector<std::string> ids;
  for (const auto& ring : layout.rings)
    for (const auto& sector : ring.sectors)
      if (sector.day == day)
        for (const auto& cell : sector.cells) ids.push_back(cell.post_id);
  return ids;
}

json histogram_to_json(const std::vector<SeriesPoint>& histogram) {
  json arr = json::array();
  for (const auto& p : histogram) arr.push_back({{"day", format_day(p.day)}, {"count", p.count}});
  return arr;
}

json layout_to_json(const PropagationLayout& layout) {
  json rings = json::array();
  for (const auto& ring : layout.rings) {
    json sectors = json::array();
    for (const auto& sector : ring.sectors) {
      json cells = json::array();
      for (const auto& c : sector.cells) {
        json cell{{"post_id", c.post_id}, {"t0", c.theta0},       {"t1", c.theta1},
                  {"r0", c.r0},           {"r1", c.r1},           {"words", c.word_count},
                  {"sentiment", std::string(to_string(c.sentiment))}};
        if (c.keyword) cell["keyword"] = *c.keyword;
        cells.push_back(std::move(cell));
      }
      sectors.push_back(
          {{"day", format_day(sector.day)}, {"t0", sector.theta_start}, {"dt", sector.theta_extent}, {"cells", cells}});
    }
    rings.push_back({{"depth", ring.depth}, {"r0", ring.r_inner}, {"r1", ring.r_outer}, {"sectors", sectors}});
  }
  return {{"case_id", layout.case_id},
          {"center", {{"r", layout.center_radius}, {"influence", layout.influence}}},
          {"total_radius", layout.total_radius},
          {"rings", rings},
          {"histogram", histogram_to_json(layout.histogram)}};
}

}  // namespace rumorlens
