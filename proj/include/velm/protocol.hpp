#pragma once

// JSON bodies of the masked-marginal wire protocol (version 1).
//
//   request  {"id": str, "protocol": 1, "sequence": str with '?' at masked positions,
//             "positions": [1-based ints]}
//   response {"id": str, "marginals": [{"position": int, "log_probs": {"A": x, ..., "Y": x}}]}
//   error    {"id": str, "error": str}
//
// The same bodies travel as HTTP POST /marginals; GET /health answers with a
// backend descriptor {"id", "kind", "version", "max_length", "protocol"}.

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "velm/backend.hpp"

namespace velm::protocol {

inline constexpr int kVersion = 1;
/// Replies this close to normalized are rescaled; anything further is rejected.
inline constexpr double kRenormalizeTolerance = 1e-3;

struct Request {
  std::string id;
  int protocol = kVersion;
  std::string sequence;
  std::vector<std::size_t> positions;
};

inline nlohmann::json encode_request(const std::string& id, const MaskedQuery& query) {
  return {{"id", id},
          {"protocol", kVersion},
          {"sequence", query.masked().str()},
          {"positions", std::vector<std::size_t>(query.query_positions().begin(), query.query_positions().end())}};
}

/// Server-side decoding, used by test doubles and protocol tooling.
inline Request decode_request(const nlohmann::json& j) {
  try {
    Request r;
    r.id = j.at("id").get<std::string>();
    r.protocol = j.at("protocol").get<int>();
    r.sequence = j.at("sequence").get<std::string>();
    r.positions = j.at("positions").get<std::vector<std::size_t>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ProtocolError, std::string("malformed request: ") + e.what());
  }
}

inline nlohmann::json encode_response(const std::string& id, const std::vector<MarginalDistribution>& marginals) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& m : marginals) {
    nlohmann::json probs = nlohmann::json::object();
    for (std::size_t a = 0; a < kNumCanonical; ++a) {
      probs[std::string(1, kCanonicalLetters[a])] = m.log_probs[a];
    }
    list.push_back({{"position", m.position}, {"log_probs", std::move(probs)}});
  }
  return {{"id", id}, {"marginals", std::move(list)}};
}

inline nlohmann::json encode_error(const std::string& id, const std::string& message) {
  return {{"id", id}, {"error", message}};
}

/// Rescale a distribution whose mass is within `kRenormalizeTolerance` of 1.
inline void renormalize(MarginalDistribution& m) {
  const double err = m.normalization_error();
  if (!(err <= kRenormalizeTolerance)) {
    throw Error(ErrorCode::NonNormalizedReply, "marginal at position " + std::to_string(m.position) +
                                                   " is off by " + std::to_string(err));
  }
  double total = 0.0;
  for (double lp : m.log_probs) total += std::exp(lp);
  const double shift = std::log(total);
  for (double& lp : m.log_probs) lp -= shift;
}

/// Decode and validate a reply to the request `expected_id` that asked for
/// `positions`. Marginals come back in the order of `positions`.
inline std::vector<MarginalDistribution> decode_response(const nlohmann::json& j, const std::string& expected_id,
                                                         std::span<const std::size_t> positions) {
  if (!j.is_object()) throw Error(ErrorCode::ProtocolError, "reply is not a JSON object");
  const auto id = j.find("id");
  if (id == j.end() || !id->is_string()) throw Error(ErrorCode::ProtocolError, "reply lacks an id");
  if (id->get<std::string>() != expected_id) {
    throw Error(ErrorCode::ProtocolError, "reply id '" + id->get<std::string>() + "' does not match request '" +
                                              expected_id + "'");
  }
  if (const auto err = j.find("error"); err != j.end()) {
    const auto message = err->is_string() ? err->get<std::string>() : err->dump();
    if (message.rfind("SequenceTooLong", 0) == 0) throw Error(ErrorCode::SequenceTooLong, message);
    throw Error(ErrorCode::BackendUnavailable, "server error: " + message);
  }
  const auto list = j.find("marginals");
  if (list == j.end() || !list->is_array()) throw Error(ErrorCode::ProtocolError, "reply lacks marginals");

  std::map<std::size_t, MarginalDistribution> by_position;
  for (const auto& entry : *list) {
    if (!entry.is_object() || !entry.contains("position") || !entry.contains("log_probs")) {
      throw Error(ErrorCode::ProtocolError, "malformed marginal entry");
    }
    const auto& pos = entry["position"];
    const auto& probs = entry["log_probs"];
    if (!pos.is_number_unsigned() || !probs.is_object() || probs.size() != kNumCanonical) {
      throw Error(ErrorCode::ProtocolError, "marginal entry needs a position and exactly 20 log_probs");
    }
    MarginalDistribution m;
    m.position = pos.get<std::size_t>();
    for (std::size_t a = 0; a < kNumCanonical; ++a) {
      const auto key = std::string(1, kCanonicalLetters[a]);
      const auto value = probs.find(key);
      if (value == probs.end() || !value->is_number()) {
        throw Error(ErrorCode::ProtocolError, "log_probs lacks numeric '" + key + "'");
      }
      m.log_probs[a] = value->get<double>();
    }
    if (!by_position.emplace(m.position, m).second) {
      throw Error(ErrorCode::ProtocolError, "position " + std::to_string(m.position) + " answered twice");
    }
  }
  std::vector<MarginalDistribution> out;
  out.reserve(positions.size());
  for (auto p : positions) {
    auto it = by_position.find(p);
    if (it == by_position.end()) {
      throw Error(ErrorCode::ProtocolError, "reply lacks position " + std::to_string(p));
    }
    renormalize(it->second);
    out.push_back(it->second);
    by_position.erase(it);
  }
  if (!by_position.empty()) {
    throw Error(ErrorCode::ProtocolError,
                "reply has unrequested position " + std::to_string(by_position.begin()->first));
  }
  return out;
}

inline nlohmann::json encode_descriptor(const BackendDescriptor& d) {
  nlohmann::json j = {{"id", d.id}, {"kind", to_string(d.kind)}, {"version", d.version}, {"protocol", kVersion}};
  j["max_length"] = d.max_length ? nlohmann::json(*d.max_length) : nlohmann::json(nullptr);
  return j;
}

/// Returns the descriptor and the protocol version the server advertises.
inline std::pair<BackendDescriptor, int> decode_descriptor(const nlohmann::json& j) {
  try {
    BackendDescriptor d;
    d.id = j.at("id").get<std::string>();
    d.kind = BackendKind::Remote;
    d.version = j.at("version").get<std::string>();
    if (j.contains("max_length") && !j["max_length"].is_null()) d.max_length = j["max_length"].get<std::size_t>();
    return {d, j.at("protocol").get<int>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ProtocolError, std::string("malformed descriptor: ") + e.what());
  }
}

}  // namespace velm::protocol
