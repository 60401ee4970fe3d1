#pragma once

#include <string>

#include <httplib.h>

#include "exai/service.hpp"

namespace exai::service {

/// Forwards every /api request to the store. Responses are JSON.
inline void bind_routes(httplib::Server& server, SessionStore& store) {
  auto forward = [&store](const httplib::Request& req, httplib::Response& res) {
    const Response r = store.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Get(R"(/api/.*)", forward);
  server.Post(R"(/api/.*)", forward);
  server.Put(R"(/api/.*)", forward);
  server.Delete(R"(/api/.*)", forward);
}

}  // namespace exai::service
