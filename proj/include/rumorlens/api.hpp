#pragma once

#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rumorlens/aggregation.hpp"
#include "rumorlens/dataset.hpp"
#include "rumorlens/layout.hpp"
#include "rumorlens/projection.hpp"

namespace rumorlens {

struct ApiRequest {
  std::string method = "GET";
  std::string path;
  std::map<std::string, std::string> params;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
  std::map<std::string, std::string> headers;
};

/// Embedding plus glyphs for one filtered subset.
struct Projection {
  std::string fingerprint;
  nlohmann::json filter;
  std::vector<std::string> case_ids;
  Embedding embedding;
  std::vector<GlyphSpec> glyphs;
};

/// Glyph export: [{case_id, x, y, glyph:{inner_radius, topic_color_index, arcs}}].
nlohmann::json glyphs_to_json(std::span<const GlyphSpec> glyphs);

/// Read-only query surface over one immutable dataset, plus the verdict log.
/// Thread-safe; a dataset swap is atomic with respect to readers.
class Service {
 public:
  explicit Service(std::shared_ptr<const Dataset> dataset);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  void swap_dataset(std::shared_ptr<const Dataset> dataset);
  std::shared_ptr<const Dataset> dataset() const;

  ApiResponse handle(const ApiRequest& request);

  /// Cached layout, or nullptr for an unknown case id.
  std::shared_ptr<const PropagationLayout> propagation(const std::string& case_id);

  /// Projection for the filter. With `wait` false, a subset larger than
  /// server.sync_embedding_max starts a background job and returns nullopt
  /// until it finishes. At most one job runs per fingerprint.
  std::optional<std::shared_ptr<const Projection>> projection(const FilterSpec& filter, bool wait);

  /// Blocks until every background embedding job has finished.
  void wait_for_jobs();

 private:
  struct State;
  std::shared_ptr<State> state() const;

  ApiResponse regions(const ApiRequest& req);
  ApiResponse topic_series_endpoint(const ApiRequest& req);
  ApiResponse cases(const ApiRequest& req);
  ApiResponse case_detail(const std::string& id);
  ApiResponse case_propagation(const std::string& id);
  ApiResponse case_histogram(const std::string& id);
  ApiResponse case_cells(const std::string& id, const ApiRequest& req);
  ApiResponse posts(const ApiRequest& req);
  ApiResponse verdict(const std::string& id, const ApiRequest& req);

  mutable std::mutex state_mutex_;
  std::shared_ptr<State> state_;

  std::mutex jobs_mutex_;
  std::vector<std::thread> jobs_;

  std::mutex verdict_mutex_;
};

}  // namespace rumorlens
