#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "velm/backend.hpp"

namespace velm {

/// Position-specific residue profile used as a deterministic reference
/// backend. Each column is a categorical distribution estimated from an
/// aligned corpus with a symmetric pseudocount:
///
///     P(a at i) = (count_i(a) + alpha) / (N_i + 20 * alpha)
///
/// where N_i counts canonical residues in column i. Answers ignore the
/// unmasked context entirely; a sequence longer than the profile is rejected
/// through the descriptor's `max_length`.
class ProfileBackend final : public LikelihoodBackend {
 public:
  using Column = std::array<std::uint64_t, kNumCanonical>;

  static constexpr int kFormatVersion = 1;

  ProfileBackend(std::vector<Column> counts, double alpha, std::string id = "profile")
      : counts_(std::move(counts)), alpha_(alpha), id_(std::move(id)) {
    if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) {
      throw Error(ErrorCode::NonPositivePseudocount, "pseudocount must be positive and finite");
    }
    if (counts_.empty()) throw Error(ErrorCode::EmptyCorpus, "profile has no columns");
    log_probs_.resize(counts_.size());
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      double total = 0.0;
      for (auto c : counts_[i]) total += static_cast<double>(c);
      const double denom = total + static_cast<double>(kNumCanonical) * alpha_;
      for (std::size_t a = 0; a < kNumCanonical; ++a) {
        log_probs_[i][a] = std::log((static_cast<double>(counts_[i][a]) + alpha_) / denom);
      }
    }
  }

  std::size_t length() const noexcept { return counts_.size(); }
  double alpha() const noexcept { return alpha_; }
  std::span<const Column> counts() const noexcept { return counts_; }

  /// 1-based.
  double log_prob(std::size_t position, AminoAcid aa) const {
    if (position < 1 || position > counts_.size()) {
      throw Error(ErrorCode::PositionOutOfRange, "profile has no position " + std::to_string(position));
    }
    if (!is_canonical(aa)) throw Error(ErrorCode::InvalidArgument, "non-canonical residue");
    return log_probs_[position - 1][index_of(aa)];
  }

  BackendDescriptor descriptor() const override {
    return {id_, BackendKind::Profile, counts_.size(), std::to_string(kFormatVersion)};
  }

  std::vector<MarginalDistribution> marginals(const MaskedQuery& query) const override {
    if (query.masked().length() > counts_.size()) {
      throw Error(ErrorCode::SequenceTooLong, "sequence longer than profile");
    }
    std::vector<MarginalDistribution> out;
    out.reserve(query.query_positions().size());
    for (auto p : query.query_positions()) {
      out.push_back({p, log_probs_.at(p - 1)});
    }
    return out;
  }

  void save(std::ostream& out) const {
    nlohmann::json j;
    j["format"] = "velm-profile";
    j["version"] = kFormatVersion;
    j["id"] = id_;
    j["alpha"] = alpha_;
    j["alphabet"] = std::string(kCanonicalLetters);
    j["length"] = counts_.size();
    j["counts"] = counts_;
    out << j.dump() << '\n';
  }

  static ProfileBackend load(std::istream& in) {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedProfile, e.what());
    }
    try {
      if (j.at("format") != "velm-profile") throw Error(ErrorCode::MalformedProfile, "not a velm profile");
      if (j.at("version").get<int>() != kFormatVersion) {
        throw Error(ErrorCode::MalformedProfile, "unsupported profile version " + j.at("version").dump());
      }
      if (j.at("alphabet").get<std::string>() != kCanonicalLetters) {
        throw Error(ErrorCode::MalformedProfile, "unexpected alphabet");
      }
      auto counts = j.at("counts").get<std::vector<Column>>();
      if (counts.size() != j.at("length").get<std::size_t>()) {
        throw Error(ErrorCode::MalformedProfile, "length does not match column count");
      }
      return ProfileBackend(std::move(counts), j.at("alpha").get<double>(), j.at("id").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedProfile, e.what());
    }
  }

 private:
  std::vector<Column> counts_;
  std::vector<std::array<double, kNumCanonical>> log_probs_;
  double alpha_;
  std::string id_;
};

/// Count residues column-wise over an equal-length corpus. Unknown residues
/// contribute nothing to their column.
inline ProfileBackend train_profile(std::span<const ProteinSequence> corpus, double pseudocount = 1.0,
                                    std::string id = "profile") {
  if (!(pseudocount > 0.0) || !std::isfinite(pseudocount)) {
    throw Error(ErrorCode::NonPositivePseudocount, "pseudocount must be positive and finite");
  }
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot train a profile on an empty corpus");
  const auto length = corpus.front().length();
  std::vector<ProfileBackend::Column> counts(length, ProfileBackend::Column{});
  for (const auto& seq : corpus) {
    if (seq.length() != length) {
      throw Error(ErrorCode::RaggedCorpus, "'" + seq.gene_id() + "' has length " + std::to_string(seq.length()) +
                                               ", expected " + std::to_string(length));
    }
    for (std::size_t i = 0; i < length; ++i) {
      const auto aa = seq.residues()[i];
      if (is_canonical(aa)) ++counts[i][index_of(aa)];
    }
  }
  return ProfileBackend(std::move(counts), pseudocount, std::move(id));
}

}  // namespace velm
