#include "rumorlens/server.hpp"

#include <httplib.h>

namespace rumorlens {

namespace {

void dispatch(Service& service, const httplib::Request& req, httplib::Response& res) {
  ApiRequest api;
  api.method = req.method;
  api.path = req.path;
  for (const auto& [k, v] : req.params) api.params.emplace(k, v);
  api.body = req.body;
  const ApiResponse out = service.handle(api);
  res.status = out.status;
  for (const auto& [k, v] : out.headers) res.set_header(k, v);
  res.set_content(out.body, out.content_type);
}

}  // namespace

void mount_routes(httplib::Server& server, Service& service) {
  const char* pattern = R"(/api/.*)";
  server.Get(pattern, [&service](const httplib::Request& req, httplib::Response& res) { dispatch(service, req, res); });
  server.Post(pattern, [&service](const httplib::Request& req, httplib::Response& res) { dispatch(service, req, res); });
}

bool serve(Service& service, const std::string& host, int port) {
  httplib::Server server;
  mount_routes(server, service);
  return server.listen(host, port);
}

}  // namespace rumorlens
