#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rumorlens/api.hpp"
#include "rumorlens/config.hpp"
#include "rumorlens/pipeline.hpp"
#include "rumorlens/server.hpp"
#include "rumorlens/svg.hpp"
#include "rumorlens/synth.hpp"

using namespace rumorlens;
using json = nlohmann::json;

namespace {

struct DataArgs {
  std::string posts;
  std::string users;
};

void add_data_options(CLI::App* cmd, DataArgs& args) {
  cmd->add_option("--posts", args.posts, "Line-delimited JSON posts file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--users", args.users, "Line-delimited JSON user profiles file")->required()->check(CLI::ExistingFile);
}

Config load(const std::optional<std::string>& config_path) {
  if (auto path = resolve_config_path(config_path)) return load_config(*path);
  return default_config();
}

void print_diagnostics(const PipelineError& e) {
  std::cerr << "error: " << e.what() << '\n';
  for (const auto& d : e.diagnostics()) {
    std::cerr << "  ";
    if (d.line) std::cerr << "line " << d.line << ": ";
    if (!d.subject.empty()) std::cerr << d.subject << ": ";
    std::cerr << d.message << '\n';
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Suspected-rumor analytics engine"};
  app.require_subcommand(1);
  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "JSON config file (default: $RUMORLENS_CONFIG)");

  DataArgs ingest_args;
  std::string report_out;
  auto* ingest = app.add_subcommand("ingest", "Run the pipeline and emit the build report as JSON");
  add_data_options(ingest, ingest_args);
  ingest->add_option("--out", report_out, "Write the report here instead of stdout");

  DataArgs report_args;
  auto* report = app.add_subcommand("report", "Summarize cases by region and topic");
  add_data_options(report, report_args);

  DataArgs serve_args;
  std::optional<int> port;
  std::optional<std::string> host;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the read-only HTTP API");
  add_data_options(serve_cmd, serve_args);
  serve_cmd->add_option("--port", port, "Listen port (default: server.port from config)");
  serve_cmd->add_option("--host", host, "Listen address (default: server.host from config)");

  DataArgs svg_args;
  std::string view, case_id, filter_text, svg_out;
  auto* svg = app.add_subcommand("export-svg", "Render the propagation or projection view to SVG");
  add_data_options(svg, svg_args);
  svg->add_option("--view", view, "propagation or projection")
      ->required()
      ->check(CLI::IsMember({"propagation", "projection"}));
  svg->add_option("--case", case_id, "Case id (propagation view)");
  svg->add_option("--filter", filter_text, "FilterSpec JSON (projection view)");
  svg->add_option("--out", svg_out, "Output SVG path")->required();

  DataArgs emb_args;
  std::string emb_filter, emb_out;
  auto* emb = app.add_subcommand("export-embedding", "Write projection coordinates and glyphs as JSON");
  add_data_options(emb, emb_args);
  emb->add_option("--filter", emb_filter, "FilterSpec JSON");
  emb->add_option("--out", emb_out, "Output JSON path")->required();

  SynthSpec synth_spec;
  std::string synth_dir = ".";
  auto* synth = app.add_subcommand("synth", "Generate a synthetic posts/users dump");
  synth->add_option("--out-dir", synth_dir, "Directory for posts.jsonl and users.jsonl");
  synth->add_option("--cases", synth_spec.cases, "Number of original posts");
  synth->add_option("--descendants", synth_spec.descendants, "Number of retweets and comments");
  synth->add_option("--users", synth_spec.users, "Number of user profiles");
  synth->add_option("--seed", synth_spec.seed, "Random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      const std::filesystem::path dir(synth_dir);
      std::filesystem::create_directories(dir);
      write_dump(generate_dump(synth_spec), dir / "posts.jsonl", dir / "users.jsonl");
      std::cout << "wrote " << (dir / "posts.jsonl").string() << " and " << (dir / "users.jsonl").string() << '\n';
      return 0;
    }

    const Config config = load(config_path);

    if (*ingest) {
      auto ds = run_pipeline(ingest_args.posts, ingest_args.users, config);
      const std::string body = report_to_json(*ds).dump(2) + "\n";
      if (report_out.empty())
        std::cout << body;
      else
        write_file(report_out, body);
      return 0;
    }

    if (*report) {
      auto ds = run_pipeline(report_args.posts, report_args.users, config);
      std::cout << "cases: " << ds->report.cases << "  descendants: " << ds->report.cascade_nodes - ds->report.cases
                << "  dropped: " << ds->report.dropped_posts << "  users: " << ds->report.users_read << '\n';
      std::cout << "by region:\n";
      for (const auto& [region, n] : ds->overview["regions"].items())
        if (n.get<std::size_t>() > 0) std::cout << "  " << region << '\t' << n.get<std::size_t>() << '\n';
      std::cout << "by topic:\n";
      for (const auto& s : ds->overview["topic_series"]) {
        std::size_t total = 0;
        for (const auto& p : s["points"]) total += p["count"].get<std::size_t>();
        std::cout << "  " << s["topic"].get<std::string>() << '\t' << total << '\n';
      }
      return 0;
    }

    if (*serve_cmd) {
      auto ds = run_pipeline(serve_args.posts, serve_args.users, config);
      Service service(ds);
      const std::string h = host.value_or(config.server.host);
      const int p = port.value_or(config.server.port);
      std::cerr << "serving " << ds->report.cases << " cases on http://" << h << ':' << p << "/api/\n";
      if (!serve(service, h, p)) {
        std::cerr << "error: cannot listen on " << h << ':' << p << '\n';
        return 1;
      }
      return 0;
    }

    if (*svg) {
      auto ds = run_pipeline(svg_args.posts, svg_args.users, config);
      Service service(ds);
      if (view == "propagation") {
        if (case_id.empty()) throw std::runtime_error("--case is required for the propagation view");
        auto layout = service.propagation(case_id);
        if (!layout) throw std::runtime_error("unknown case: " + case_id);
        write_file(svg_out, propagation_svg(*layout, config.colors));
      } else {
        const FilterSpec f = filter_text.empty() ? FilterSpec{} : filter_from_json(json::parse(filter_text));
        auto proj = *service.projection(f, true);
        write_file(svg_out, projection_svg(proj->glyphs, config.glyph, config.colors));
      }
      return 0;
    }

    if (*emb) {
      auto ds = run_pipeline(emb_args.posts, emb_args.users, config);
      Service service(ds);
      const FilterSpec f = emb_filter.empty() ? FilterSpec{} : filter_from_json(json::parse(emb_filter));
      auto proj = *service.projection(f, true);
      write_file(emb_out, glyphs_to_json(proj->glyphs).dump(2) + "\n");
      return 0;
    }
  } catch (const PipelineError& e) {
    print_diagnostics(e);
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
