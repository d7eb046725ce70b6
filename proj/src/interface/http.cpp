#include <string>

#include "httplib.h"
#include "riskpref/error.hpp"
#include "riskpref/interface.hpp"

namespace riskpref::interface {

void register_routes(httplib::Server& server, const Service& service) {
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    const auto q = req.target.find('?');
    const std::string query = q == std::string::npos ? std::string() : req.target.substr(q + 1);
    const Response r = service.handle(req.method, req.path, query, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Get(R"(/.*)", handler);
  server.Post(R"(/.*)", handler);
}

void serve(const std::string& host, int port, SessionStore& store) {
  httplib::Server server;
  const Service service(store);
  register_routes(server, service);
  if (!server.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  server.listen_after_bind();
}

}  // namespace riskpref::interface
