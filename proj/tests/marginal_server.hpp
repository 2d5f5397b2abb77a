#pragma once

// In-process HTTP test double for the marginal wire protocol. The reply
// function sees the decoded request and returns the JSON body to send.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <functional>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "velm/protocol.hpp"

namespace fixture {

/// A loopback port with nothing listening on it.
inline int unused_port() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
  socklen_t len = sizeof(addr);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return ntohs(addr.sin_port);
}

class MarginalServer {
 public:
  using Reply = std::function<nlohmann::json(const velm::protocol::Request&)>;

  explicit MarginalServer(Reply reply, nlohmann::json health = default_health()) : reply_(std::move(reply)) {
    server_.Get("/health", [health](const httplib::Request&, httplib::Response& res) {
      res.set_content(health.dump(), "application/json");
    });
    server_.Post("/marginals", [this](const httplib::Request& req, httplib::Response& res) {
      const auto request = velm::protocol::decode_request(nlohmann::json::parse(req.body));
      res.set_content(reply_(request).dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MarginalServer() {
    server_.stop();
    thread_.join();
  }

  MarginalServer(const MarginalServer&) = delete;
  MarginalServer& operator=(const MarginalServer&) = delete;

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  static nlohmann::json default_health() {
    return {{"id", "stub"}, {"kind", "remote"}, {"version", "test"}, {"max_length", 512}, {"protocol", 1}};
  }

  /// Uniform distributions at every requested position.
  static nlohmann::json uniform(const velm::protocol::Request& r, double mass = 1.0) {
    std::vector<velm::MarginalDistribution> out;
    for (auto p : r.positions) {
      velm::MarginalDistribution m{p, {}};
      m.log_probs.fill(std::log(mass / 20.0));
      out.push_back(m);
    }
    return velm::protocol::encode_response(r.id, out);
  }

 private:
  Reply reply_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace fixture
