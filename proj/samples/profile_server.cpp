// Serve a saved profile over the HTTP marginal protocol.
//
//   profile_server <profile.json> [port] [max_length]
//
// Then point the CLI at it with --backend remote:http://127.0.0.1:<port>.
// A model server answers the same two endpoints.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "httplib.h"
#include "json.hpp"
#include "velm/velm.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: profile_server <profile.json> [port] [max_length]\n";
    return 2;
  }
  std::ifstream in(argv[1]);
  const auto profile = velm::ProfileBackend::load(in);
  const int port = argc > 2 ? std::atoi(argv[2]) : 8750;
  auto descriptor = profile.descriptor();
  if (argc > 3) descriptor.max_length = std::strtoull(argv[3], nullptr, 10);

  httplib::Server server;
  server.Get("/health", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(velm::protocol::encode_descriptor(descriptor).dump(), "application/json");
  });
  server.Post("/marginals", [&](const httplib::Request& req, httplib::Response& res) {
    std::string id;
    try {
      const auto request = velm::protocol::decode_request(nlohmann::json::parse(req.body));
      id = request.id;
      if (request.protocol != velm::protocol::kVersion) {
        throw velm::Error(velm::ErrorCode::ProtocolError, "unsupported protocol");
      }
      if (descriptor.max_length && request.sequence.size() > *descriptor.max_length) {
        throw velm::Error(velm::ErrorCode::SequenceTooLong, std::to_string(request.sequence.size()) + " > " +
                                                                std::to_string(*descriptor.max_length));
      }
      // Unmasked context is irrelevant to a profile, so '?' stands in for any residue.
      std::vector<velm::AminoAcid> residues;
      for (char c : request.sequence) {
        const auto aa = velm::from_char(c);
        if (!aa) throw velm::Error(velm::ErrorCode::InvalidResidue, std::string("bad residue '") + c + "'");
        residues.push_back(*aa == velm::AminoAcid::Mask ? velm::AminoAcid::A : *aa);
      }
      const velm::ProteinSequence seq("query", residues);
      const velm::MaskedQuery query(velm::mask_at(seq, request.positions), request.positions);
      res.set_content(velm::protocol::encode_response(id, profile.marginals(query)).dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 422;
      res.set_content(velm::protocol::encode_error(id, e.what()).dump(), "application/json");
    }
  });
  std::cerr << "serving " << descriptor.id << " on 127.0.0.1:" << port << '\n';
  return server.listen("127.0.0.1", port) ? 0 : 1;
}
