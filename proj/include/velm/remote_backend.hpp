#pragma once

#include <atomic>
#include <chrono>
#include <mutex>
#include <optional>
#include <string>

#include "httplib.h"
#include "json.hpp"
#include "velm/backend.hpp"
#include "velm/protocol.hpp"

namespace velm {

struct RemoteOptions {
  std::chrono::milliseconds timeout{60'000};
  std::chrono::milliseconds connect_timeout{5'000};
};

/// Client for a marginal server speaking the JSON wire protocol over HTTP.
///
/// The descriptor is fetched from GET /health on first use and cached; a
/// protocol version other than ours fails that first call with ProtocolError.
/// Each request opens its own connection, so concurrent queries never share
/// client state; replies are matched to requests by id.
class RemoteBackend final : public LikelihoodBackend {
 public:
  explicit RemoteBackend(std::string url, RemoteOptions options = {})
      : url_(std::move(url)), options_(options) {
    if (url_.rfind("http://", 0) != 0 && url_.rfind("https://", 0) != 0) {
      throw Error(ErrorCode::InvalidArgument, "remote backend url must start with http:// : '" + url_ + "'");
    }
    // Split "http://host:port/prefix" into the client base and a path prefix.
    const auto host_start = url_.find("//") + 2;
    const auto path_start = url_.find('/', host_start);
    if (path_start != std::string::npos) {
      base_ = url_.substr(0, path_start);
      prefix_ = url_.substr(path_start);
      while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    } else {
      base_ = url_;
    }
  }

  const std::string& url() const noexcept { return url_; }

  BackendDescriptor descriptor() const override {
    std::lock_guard lock(descriptor_mutex_);
    if (descriptor_) return *descriptor_;
    auto client = make_client();
    const auto started = std::chrono::steady_clock::now();
    auto res = client.Get(prefix_ + "/health");
    if (!res) fail_transport(res.error(), started);
    if (res->status != 200) {
      throw Error(ErrorCode::BackendUnavailable, "health check at " + url_ + " returned HTTP " +
                                                     std::to_string(res->status));
    }
    auto [desc, version] = protocol::decode_descriptor(parse(res->body));
    if (version != protocol::kVersion) {
      throw Error(ErrorCode::ProtocolError, "server speaks protocol " + std::to_string(version) + ", client " +
                                                std::to_string(protocol::kVersion));
    }
    descriptor_ = desc;
    return desc;
  }

  std::vector<MarginalDistribution> marginals(const MaskedQuery& query) const override {
    descriptor();
    const auto id = "q" + std::to_string(next_id_.fetch_add(1));
    const auto body = protocol::encode_request(id, query).dump();
    auto client = make_client();
    const auto started = std::chrono::steady_clock::now();
    auto res = client.Post(prefix_ + "/marginals", body, "application/json");
    if (!res) fail_transport(res.error(), started);
    if (res->status != 200 && res->status != 400 && res->status != 422) {
      throw Error(ErrorCode::BackendUnavailable, "POST /marginals returned HTTP " + std::to_string(res->status));
    }
    return protocol::decode_response(parse(res->body), id, query.query_positions());
  }

 private:
  httplib::Client make_client() const {
    httplib::Client client(base_);
    client.set_connection_timeout(options_.connect_timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    return client;
  }

  [[noreturn]] void fail_transport(httplib::Error err, std::chrono::steady_clock::time_point started) const {
    const auto elapsed = std::chrono::steady_clock::now() - started;
    if (err == httplib::Error::Read && elapsed >= options_.timeout) {
      throw Error(ErrorCode::Timeout, "no reply from " + url_ + " within " +
                                          std::to_string(options_.timeout.count()) + " ms");
    }
    throw Error(ErrorCode::BackendUnavailable, url_ + ": " + httplib::to_string(err));
  }

  static nlohmann::json parse(const std::string& body) {
    try {
      return nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ProtocolError, std::string("reply is not JSON: ") + e.what());
    }
  }

  std::string url_;
  std::string base_;
  std::string prefix_;
  RemoteOptions options_;
  mutable std::mutex descriptor_mutex_;
  mutable std::optional<BackendDescriptor> descriptor_;
  mutable std::atomic<std::uint64_t> next_id_{0};
};

}  // namespace velm
