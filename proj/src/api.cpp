#include "rumorlens/api.hpp"

#include <chrono>
#include <fstream>

#include "rumorlens/pipeline.hpp"

namespace rumorlens {

using json = nlohmann::json;

struct Service::State {
  std::shared_ptr<const Dataset> ds;
  double influence_lo = 0.0;
  double influence_hi = 0.0;

  std::mutex layout_mutex;
  std::map<std::string, std::shared_ptr<const PropagationLayout>> layouts;

  std::mutex projection_mutex;
  std::map<std::string, std::shared_future<std::shared_ptr<const Projection>>> projections;
};

namespace {

ApiResponse json_response(int status, const json& body) {
  ApiResponse r;
  r.status = status;
  r.body = body.dump();
  return r;
}

ApiResponse error_response(int status, const std::string& message, const std::string& field = {}) {
  json body{{"error", message}, {"status", status}};
  if (!field.empty()) body["field"] = field;
  return json_response(status, body);
}

// Thrown by request parsing helpers; becomes a 400.
struct BadRequest {
  std::string field;
  std::string message;
};

FilterSpec parse_filter_param(const ApiRequest& req) {
  auto it = req.params.find("filter");
  if (it == req.params.end() || it->second.empty()) return {};
  json doc = json::parse(it->second, nullptr, false);
  if (doc.is_discarded()) throw BadRequest{"filter", "filter is not valid JSON"};
  return filter_from_json(doc);
}

std::size_t parse_count_param(const ApiRequest& req, const std::string& name, std::size_t fallback, std::size_t max) {
  auto it = req.params.find(name);
  if (it == req.params.end()) return fallback;
  const std::string& s = it->second;
  if (s.empty() || s.size() > 9 || s.find_first_not_of("0123456789") != std::string::npos)
    throw BadRequest{name, "parameter '" + name + "' must be a non-negative integer"};
  const std::size_t v = std::stoul(s);
  if (v > max) throw BadRequest{name, "parameter '" + name + "' exceeds " + std::to_string(max)};
  return v;
}

// Non-empty pieces of `text` between separators.
std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find(sep, pos);
    const auto end = next == std::string::npos ? text.size() : next;
    if (end > pos) parts.push_back(text.substr(pos, end - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return parts;
}

json user_json(const UserProfile& u) {
  return {{"id", u.id},
          {"screen_name", u.screen_name},
          {"verified", u.verified},
          {"fans", u.fans},
          {"followees", u.followees},
          {"tweets", u.tweets},
          {"has_bio", u.has_bio},
          {"has_avatar", u.has_avatar},
          {"has_location", u.has_location},
          {"has_gender", u.has_gender},
          {"integrity", profile_integrity(u)}};
}

json glyph_json(const GlyphSpec& g) {
  json arcs = json::array();
  for (const auto& a : g.arcs)
    arcs.push_back(
        {{"metric", std::string(to_string(a.metric))}, {"fraction", a.fraction}, {"start", a.start}, {"extent", a.extent}});
  return {{"inner_radius", g.inner_radius}, {"topic_color_index", g.topic_color_index}, {"arcs", arcs}};
}

json case_summary(const Dataset& ds, std::size_t idx) {
  const Cascade& c = ds.cascades[idx];
  const CaseFeatures& f = ds.features[idx];
  json keywords = json::array();
  for (const auto& kw : f.keywords) keywords.push_back({{"token", kw.token}, {"weight", kw.weight}});
  return {{"case_id", c.root_id},
          {"region", c.root().region},
          {"created_at", format_timestamp(c.root().created_at)},
          {"topic", f.topic},
          {"influence", f.influence},
          {"sentiment", f.sentiment},
          {"max_depth", c.max_depth},
          {"size", c.size},
          {"duration_days", f.duration_days},
          {"integrity", f.integrity},
          {"log_fans", f.log_fans},
          {"log_followees", f.log_followees},
          {"log_tweets", f.log_tweets},
          {"keywords", keywords}};
}

std::shared_ptr<const Projection> compute_projection(const Dataset& ds, const FilterSpec& filter) {
  auto out = std::make_shared<Projection>();
  out->fingerprint = filter_fingerprint(filter);
  out->filter = filter_to_json(filter);
  out->case_ids = filter_cases(ds, filter);
  if (out->case_ids.empty()) return out;

  std::vector<CaseFeatures> subset;
  subset.reserve(out->case_ids.size());
  std::vector<std::vector<double>> rows;
  for (const auto& id : out->case_ids) {
    const CaseFeatures* f = ds.find_features(id);
    subset.push_back(*f);
    rows.push_back(f->vector);
  }
  out->embedding = tsne_embed(Matrix::from_rows(rows), ds.config.tsne);
  out->glyphs = build_glyphs(out->embedding, subset, ds.config.taxonomy, ds.config.glyph);
  return out;
}

}  // namespace

json glyphs_to_json(std::span<const GlyphSpec> glyphs) {
  json arr = json::array();
  for (const auto& g : glyphs) arr.push_back({{"case_id", g.case_id}, {"x", g.x}, {"y", g.y}, {"glyph", glyph_json(g)}});
  return arr;
}

Service::Service(std::shared_ptr<const Dataset> dataset) { swap_dataset(std::move(dataset)); }

Service::~Service() { wait_for_jobs(); }

void Service::swap_dataset(std::shared_ptr<const Dataset> dataset) {
  auto fresh = std::make_shared<State>();
  fresh->ds = std::move(dataset);
  if (!fresh->ds->features.empty()) {
    fresh->influence_lo = fresh->influence_hi = static_cast<double>(fresh->ds->features.front().influence);
    for (const auto& f : fresh->ds->features) {
      fresh->influence_lo = std::min(fresh->influence_lo, static_cast<double>(f.influence));
      fresh->influence_hi = std::max(fresh->influence_hi, static_cast<double>(f.influence));
    }
  }
  std::lock_guard lock(state_mutex_);
  state_ = std::move(fresh);
}

std::shared_ptr<Service::State> Service::state() const {
  std::lock_guard lock(state_mutex_);
  return state_;
}

std::shared_ptr<const Dataset> Service::dataset() const { return state()->ds; }

void Service::wait_for_jobs() {
  std::vector<std::thread> jobs;
  {
    std::lock_guard lock(jobs_mutex_);
    jobs.swap(jobs_);
  }
  for (auto& t : jobs) t.join();
}

std::shared_ptr<const PropagationLayout> Service::propagation(const std::string& case_id) {
  auto st = state();
  const auto it = st->ds->case_index.find(case_id);
  if (it == st->ds->case_index.end()) return nullptr;
  {
    std::lock_guard lock(st->layout_mutex);
    if (auto hit = st->layouts.find(case_id); hit != st->layouts.end()) return hit->second;
  }
  const double norm = min_max_normalize(static_cast<double>(st->ds->features[it->second].influence), st->influence_lo,
                                        st->influence_hi);
  auto layout = std::make_shared<const PropagationLayout>(
      compute_layout(st->ds->cascades[it->second], st->ds->post_features, norm, st->ds->config.geometry));
  std::lock_guard lock(st->layout_mutex);
  return st->layouts.emplace(case_id, std::move(layout)).first->second;
}

std::optional<std::shared_ptr<const Projection>> Service::projection(const FilterSpec& filter, bool wait) {
  auto st = state();
  validate_filter(*st->ds, filter);
  const std::string fp = filter_fingerprint(filter);

  std::shared_future<std::shared_ptr<const Projection>> future;
  std::packaged_task<std::shared_ptr<const Projection>()> task;
  bool run_here = false;
  {
    std::lock_guard lock(st->projection_mutex);
    if (auto it = st->projections.find(fp); it != st->projections.end()) {
      future = it->second;
    } else {
      task = std::packaged_task<std::shared_ptr<const Projection>()>(
          [st, filter] { return compute_projection(*st->ds, filter); });
      future = task.get_future().share();
      st->projections.emplace(fp, future);
      run_here = wait || filter_cases(*st->ds, filter).size() <= st->ds->config.server.sync_embedding_max;
      if (!run_here) {
        std::lock_guard jobs_lock(jobs_mutex_);
        jobs_.emplace_back(std::move(task));
      }
    }
  }
  if (run_here) task();
  if (wait || future.wait_for(std::chrono::seconds(0)) == std::future_status::ready) return future.get();
  return std::nullopt;
}

ApiResponse Service::handle(const ApiRequest& req) {
  try {
    const auto parts = split(req.path, '/');
    if (parts.size() < 2 || parts[0] != "api") return error_response(404, "no such endpoint: " + req.path);
    const std::string& resource = parts[1];

    if (req.method == "POST") {
      if (parts.size() == 4 && resource == "cases" && parts[3] == "verdict") return verdict(parts[2], req);
      return error_response(405, "method not allowed: POST " + req.path);
    }
    if (req.method != "GET") return error_response(405, "method not allowed: " + req.method + " " + req.path);

    if (parts.size() == 2) {
      if (resource == "regions") return regions(req);
      if (resource == "cases") return cases(req);
      if (resource == "posts") return posts(req);
      if (resource == "meta") return json_response(200, config_to_json(state()->ds->config));
      if (resource == "report") return json_response(200, report_to_json(*state()->ds));
    } else if (parts.size() == 3) {
      if (resource == "topics" && parts[2] == "series") return topic_series_endpoint(req);
      if (resource == "cases") return case_detail(parts[2]);
    } else if (parts.size() == 4 && resource == "cases") {
      if (parts[3] == "propagation") return case_propagation(parts[2]);
      if (parts[3] == "histogram") return case_histogram(parts[2]);
      if (parts[3] == "cells") return case_cells(parts[2], req);
    }
    return error_response(404, "no such endpoint: " + req.path);
  } catch (const BadRequest& e) {
    return error_response(400, e.message, e.field);
  } catch (const FilterError& e) {
    return error_response(400, e.what(), e.field());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

ApiResponse Service::regions(const ApiRequest& req) {
  const FilterSpec f = parse_filter_param(req);
  auto st = state();
  validate_filter(*st->ds, f);
  json counts = json::object();
  std::size_t total = 0;
  for (const auto& [region, n] : region_counts(*st->ds, f)) {
    counts[region] = n;
    total += n;
  }
  return json_response(200, {{"filter", filter_to_json(f)}, {"total", total}, {"counts", counts}});
}

ApiResponse Service::topic_series_endpoint(const ApiRequest& req) {
  const FilterSpec f = parse_filter_param(req);
  auto st = state();
  const std::size_t k = parse_count_param(req, "k", st->ds->config.server.series_keywords, 100);
  return json_response(200, {{"filter", filter_to_json(f)}, {"k", k}, {"series", series_to_json(topic_series(*st->ds, f, k))}});
}

ApiResponse Service::cases(const ApiRequest& req) {
  const FilterSpec f = parse_filter_param(req);
  auto st = state();
  auto result = projection(f, false);
  const std::string fp = filter_fingerprint(f);
  if (!result) {
    ApiResponse r = json_response(202, {{"status", "pending"}, {"retry_after", 1}, {"token", fp}});
    r.headers["Retry-After"] = "1";
    return r;
  }
  const Projection& p = **result;
  json list = json::array();
  for (std::size_t i = 0; i < p.case_ids.size(); ++i) {
    json entry = case_summary(*st->ds, st->ds->case_index.at(p.case_ids[i]));
    entry["x"] = p.glyphs[i].x;
    entry["y"] = p.glyphs[i].y;
    entry["glyph"] = glyph_json(p.glyphs[i]);
    list.push_back(std::move(entry));
  }
  return json_response(200, {{"fingerprint", p.fingerprint},
                             {"filter", p.filter},
                             {"count", p.case_ids.size()},
                             {"perplexity", p.embedding.perplexity},
                             {"cases", list}});
}

ApiResponse Service::case_detail(const std::string& id) {
  auto st = state();
  const auto it = st->ds->case_index.find(id);
  if (it == st->ds->case_index.end()) return error_response(404, "unknown case: " + id);
  json body = case_summary(*st->ds, it->second);
  const Post& root = st->ds->cascades[it->second].root();
  body["text"] = root.text;
  body["user_id"] = root.user_id;
  if (auto u = st->ds->users.find(root.user_id); u != st->ds->users.end())
    body["user"] = user_json(u->second);
  else
    body["user"] = nullptr;
  return json_response(200, body);
}

ApiResponse Service::case_propagation(const std::string& id) {
  auto layout = propagation(id);
  if (!layout) return error_response(404, "unknown case: " + id);
  return json_response(200, layout_to_json(*layout));
}

ApiResponse Service::case_histogram(const std::string& id) {
  auto st = state();
  const Cascade* c = st->ds->find_case(id);
  if (!c) return error_response(404, "unknown case: " + id);
  return json_response(200, {{"case_id", id}, {"histogram", histogram_to_json(retweet_histogram(*c))}});
}

ApiResponse Service::case_cells(const std::string& id, const ApiRequest& req) {
  auto layout = propagation(id);
  if (!layout) return error_response(404, "unknown case: " + id);
  auto it = req.params.find("day");
  if (it == req.params.end()) throw BadRequest{"day", "missing parameter 'day'"};
  Day day;
  try {
    day = parse_day(it->second);
  } catch (const TimeParseError& e) {
    throw BadRequest{"day", e.what()};
  }
  return json_response(200, {{"case_id", id}, {"day", format_day(day)}, {"post_ids", cells_for_day(*layout, day)}});
}

ApiResponse Service::posts(const ApiRequest& req) {
  auto st = state();
  const Dataset& ds = *st->ds;
  auto it = req.params.find("ids");
  if (it == req.params.end() || it->second.empty()) throw BadRequest{"ids", "missing parameter 'ids'"};
  const std::vector<std::string> ids = split(it->second, ',');
  if (ids.empty()) throw BadRequest{"ids", "parameter 'ids' lists no post ids"};
  const std::size_t offset = parse_count_param(req, "offset", 0, 1'000'000);
  const std::size_t limit = parse_count_param(req, "limit", 50, 500);

  std::vector<std::string> unknown;
  for (const auto& id : ids)
    if (!ds.post_case.contains(id)) unknown.push_back(id);
  if (!unknown.empty()) {
    std::string msg = "unknown post ids:";
    for (const auto& u : unknown) msg += " " + u;
    return error_response(404, msg);
  }

  json records = json::array();
  for (std::size_t i = offset; i < ids.size() && i < offset + limit; ++i) {
    const std::string& id = ids[i];
    const Cascade& c = ds.cascades[ds.post_case.at(id)];
    const Post& p = c.nodes.at(id);
    const PostFeatures& pf = ds.post_features.at(id);
    json rec{{"id", p.id},
             {"case_id", c.root_id},
             {"kind", std::string(to_string(p.kind))},
             {"depth", c.depth.at(id)},
             {"created_at", format_timestamp(p.created_at)},
             {"text", p.text},
             {"region", p.region},
             {"user_id", p.user_id},
             {"word_count", pf.word_count},
             {"sentiment", {{"score", pf.sentiment.score}, {"label", std::string(to_string(pf.sentiment.label))}}}};
    if (p.parent_id) rec["parent_id"] = *p.parent_id;
    if (auto par = c.parent.find(id); par != c.parent.end()) rec["tree_parent"] = par->second;
    if (pf.keyword) rec["keyword"] = *pf.keyword;
    if (auto u = ds.users.find(p.user_id); u != ds.users.end())
      rec["user"] = user_json(u->second);
    else
      rec["user"] = nullptr;
    records.push_back(std::move(rec));
  }
  return json_response(200, {{"total", ids.size()}, {"offset", offset}, {"limit", limit}, {"posts", records}});
}

ApiResponse Service::verdict(const std::string& id, const ApiRequest& req) {
  auto st = state();
  if (!st->ds->find_case(id)) return error_response(404, "unknown case: " + id);
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) throw BadRequest{"body", "verdict body must be a JSON object"};
  if (!body.contains("label") || !body["label"].is_string()) throw BadRequest{"label", "missing string field 'label'"};
  const std::string label = body["label"].get<std::string>();
  if (label != "approve" && label != "refute" && label != "undecided")
    throw BadRequest{"label", "label must be approve, refute or undecided"};
  std::string note;
  if (body.contains("note")) {
    if (!body["note"].is_string()) throw BadRequest{"note", "field 'note' must be a string"};
    note = body["note"].get<std::string>();
  }

  const auto now = std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
  json record{{"case_id", id},
              {"label", label},
              {"note", note},
              {"recorded_at", format_timestamp(Timestamp{now.time_since_epoch().count()})}};
  const std::string& path = st->ds->config.server.audit_path;
  {
    std::lock_guard lock(verdict_mutex_);
    std::ofstream out(path, std::ios::app);
    if (!out) return error_response(500, "cannot open audit file " + path);
    out << record.dump() << '\n';
    if (!out) return error_response(500, "cannot write audit file " + path);
  }
  return json_response(201, record);
}

}  // namespace rumorlens
