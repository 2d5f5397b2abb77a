#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "velm/amino_acid.hpp"
#include "velm/error.hpp"
#include "velm/sequence.hpp"

namespace velm {

inline constexpr double kNormalizationTolerance = 1e-6;

/// Masked context plus the masked positions whose marginals are wanted.
class MaskedQuery {
 public:
  MaskedQuery(MaskedSequence masked, std::vector<std::size_t> query_positions)
      : masked_(std::move(masked)), query_positions_(std::move(query_positions)) {
    if (query_positions_.empty()) throw Error(ErrorCode::EmptyMaskSet, "query has no positions");
    std::sort(query_positions_.begin(), query_positions_.end());
    query_positions_.erase(std::unique(query_positions_.begin(), query_positions_.end()), query_positions_.end());
    for (auto p : query_positions_) {
      if (!masked_.is_masked(p)) {
        throw Error(ErrorCode::InvalidArgument, "query position " + std::to_string(p) + " is not masked");
      }
    }
  }

  /// Query every masked position.
  explicit MaskedQuery(MaskedSequence masked)
      : MaskedQuery(masked, std::vector<std::size_t>(masked.masked_positions().begin(),
                                                     masked.masked_positions().end())) {}

  const MaskedSequence& masked() const noexcept { return masked_; }
  std::span<const std::size_t> query_positions() const noexcept { return query_positions_; }

 private:
  MaskedSequence masked_;
  std::vector<std::size_t> query_positions_;
};

/// Natural-log probabilities over the 20 canonical residues at one position,
/// indexed by `index_of(AminoAcid)`.
struct MarginalDistribution {
  std::size_t position = 0;
  std::array<double, kNumCanonical> log_probs{};

  double log_prob(AminoAcid aa) const { return log_probs[index_of(aa)]; }

  /// |sum(exp(log_probs)) - 1|, or infinity if any entry is NaN/+inf.
  double normalization_error() const {
    double total = 0.0;
    for (double lp : log_probs) {
      if (std::isnan(lp) || lp == std::numeric_limits<double>::infinity()) {
        return std::numeric_limits<double>::infinity();
      }
      total += std::exp(lp);
    }
    return std::abs(total - 1.0);
  }

  bool is_normalized(double tolerance = kNormalizationTolerance) const {
    return std::all_of(log_probs.begin(), log_probs.end(),
                       [&](double lp) { return std::isfinite(lp) && lp <= tolerance; }) &&
           normalization_error() <= tolerance;
  }

  friend bool operator==(const MarginalDistribution&, const MarginalDistribution&) = default;
};

enum class BackendKind { Profile, Remote };

inline std::string_view to_string(BackendKind kind) {
  return kind == BackendKind::Profile ? "profile" : "remote";
}

struct BackendDescriptor {
  std::string id;
  BackendKind kind = BackendKind::Profile;
  std::optional<std::size_t> max_length;
  std::string version;

  friend bool operator==(const BackendDescriptor&, const BackendDescriptor&) = default;
};

/// Anything that answers masked-marginal queries P(x_i = a | x_{\M}).
///
/// Implementations return one distribution per query position, in the order
/// of `MaskedQuery::query_positions()`. Callers should go through
/// `query_marginals`, which enforces the length bound and checks
/// normalization at the boundary.
class LikelihoodBackend {
 public:
  virtual ~LikelihoodBackend() = default;

  virtual BackendDescriptor descriptor() const = 0;

  /// Single-flight backends get their queries serialized by the scorer.
  virtual bool single_flight() const { return false; }

  virtual std::vector<MarginalDistribution> marginals(const MaskedQuery& query) const = 0;
};

inline std::vector<MarginalDistribution> query_marginals(const LikelihoodBackend& backend,
                                                         const MaskedQuery& query) {
  const auto desc = backend.descriptor();
  if (desc.max_length && query.masked().length() > *desc.max_length) {
    throw Error(ErrorCode::SequenceTooLong, "sequence length " + std::to_string(query.masked().length()) +
                                                " exceeds backend '" + desc.id + "' limit " +
                                                std::to_string(*desc.max_length));
  }
  auto out = backend.marginals(query);
  const auto positions = query.query_positions();
  if (out.size() != positions.size()) {
    throw Error(ErrorCode::ProtocolError, "backend '" + desc.id + "' returned " + std::to_string(out.size()) +
                                              " marginals for " + std::to_string(positions.size()) + " positions");
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].position != positions[i]) {
      throw Error(ErrorCode::ProtocolError, "backend '" + desc.id + "' answered position " +
                                                std::to_string(out[i].position) + " for " +
                                                std::to_string(positions[i]));
    }
    if (!out[i].is_normalized()) {
      throw Error(ErrorCode::NonNormalizedReply, "backend '" + desc.id + "' marginal at position " +
                                                     std::to_string(positions[i]) + " is not normalized");
    }
  }
  return out;
}

}  // namespace velm
