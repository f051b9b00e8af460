#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "rumorlens/aggregation.hpp"
#include "rumorlens/config.hpp"
#include "rumorlens/features.hpp"
#include "rumorlens/ingest.hpp"

namespace rumorlens {

// Angles are radians measured clockwise from 12 o'clock; radii are in
// layout units with the outermost ring ending at total_radius.

/// One retweet as a polar rectangle.
struct Cell {
  std::string post_id;
  double theta0 = 0.0;
  double theta1 = 0.0;
  double r0 = 0.0;
  double r1 = 0.0;
  std::size_t word_count = 0;
  Polarity sentiment = Polarity::neutral;
  std::optional<std::string> keyword;

  double area() const { return 0.5 * (r1 * r1 - r0 * r0) * (theta1 - theta0); }
  bool operator==(const Cell&) const = default;
};

/// All retweets of one calendar day at one depth.
struct Sector {
  Day day;
  double theta_start = 0.0;
  double theta_extent = 0.0;
  std::vector<Cell> cells;
  bool operator==(const Sector&) const = default;
};

struct Ring {
  int depth = 1;
  double r_inner = 0.0;
  double r_outer = 0.0;
  std::vector<Sector> sectors;
  bool operator==(const Ring&) const = default;
};

struct PropagationLayout {
  std::string case_id;
  double center_radius = 0.0;
  std::size_t influence = 0;
  std::vector<Ring> rings;  // depth 1..max_depth
  double total_radius = 0.0;
  std::vector<SeriesPoint> histogram;
};

class LayoutError : public std::runtime_error {
 public:
  LayoutError(std::string constraint, const std::string& msg)
      : std::runtime_error(msg), constraint_(std::move(constraint)) {}
  const std::string& constraint() const { return constraint_; }

 private:
  std::string constraint_;
};

/// Splits `total` proportionally to positive `weights`, raising shares below
/// `floor` to the floor and rescaling the rest. Throws std::invalid_argument
/// when weights.size() * floor exceeds total.
std::vector<double> proportional_split(std::span<const double> weights, double total, double floor);

struct Wedge {
  double theta0 = 0.0;
  double dtheta = 0.0;
  double r0 = 0.0;
  double r1 = 0.0;
};

struct CellInput {
  std::string post_id;
  Timestamp created_at;
  std::size_t word_count = 0;
  Polarity sentiment = Polarity::neutral;
  std::optional<std::string> keyword;
};

/// Strip-packs retweets into a wedge. Nodes are placed in timestamp order
/// (ties by id) into radial rows, inner row first, clockwise within a row.
/// Cell area is proportional to 1 + word_count and the cells tile the wedge.
std::vector<Cell> pack_cells(const Wedge& wedge, std::span<const CellInput> nodes, const GeometryConfig& geometry);

/// Concentric propagation layout for one cascade. `normalized_influence` is
/// the case's influence min-max normalized over the dataset.
PropagationLayout compute_layout(const Cascade& cascade,
                                 const std::unordered_map<std::string, PostFeatures>& post_features,
                                 double normalized_influence, const GeometryConfig& geometry);

/// Retweets per UTC day over a contiguous, zero-filled range.
std::vector<SeriesPoint> retweet_histogram(const Cascade& cascade);

/// Post ids of every cell whose sector falls on `day`, across all rings.
std::vector<std::string> cells_for_day(const PropagationLayout& layout, Day day);

nlohmann::json layout_to_json(const PropagationLayout& layout);
nlohmann::json histogram_to_json(const std::vector<SeriesPoint>& histogram);

}  // namespace rumorlens
