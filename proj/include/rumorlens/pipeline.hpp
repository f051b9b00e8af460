#pragma once

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "rumorlens/aggregation.hpp"
#include "rumorlens/dataset.hpp"

namespace rumorlens {

class PipelineError : public std::runtime_error {
 public:
  PipelineError(const std::string& msg, std::vector<Diagnostic> diagnostics = {})
      : std::runtime_error(msg), diagnostics_(std::move(diagnostics)) {}
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// Cascades, per-case and per-post features, and feature vectors from
/// already parsed records. Throws PipelineError("no cases") when nothing
/// roots a cascade.
std::shared_ptr<const Dataset> build_dataset(std::vector<Post> posts, std::vector<UserProfile> users, Config config,
                                             BuildReport report = {});

/// Reads both dumps and builds the dataset. Unreadable files throw
/// PipelineError.
std::shared_ptr<const Dataset> run_pipeline(const std::filesystem::path& posts_path,
                                            const std::filesystem::path& users_path, Config config);

/// Machine-readable build report. Diagnostic lists are capped at
/// `max_diagnostics` entries each; totals are always exact.
nlohmann::json report_to_json(const Dataset& ds, std::size_t max_diagnostics = 100);

}  // namespace rumorlens
