#pragma once

#include <string>

#include "rumorlens/api.hpp"

namespace httplib {
class Server;
}

namespace rumorlens {

/// Routes every /api/* request on `server` through `service.handle`.
void mount_routes(httplib::Server& server, Service& service);

/// Blocking HTTP server. Returns false if the socket could not be bound.
bool serve(Service& service, const std::string& host, int port);

}  // namespace rumorlens
