#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "velm/amino_acid.hpp"
#include "velm/error.hpp"

namespace velm {

/// Residue acceptance policy for sequences read from outside the program.
struct SequenceOptions {
  /// Admit `X` and map B/Z/U/O/J to it. Positions holding `X` stay unscorable.
  bool allow_unknown = false;
};

/// Wildtype protein sequence for one gene. Positions are 1-based on every
/// public accessor.
class ProteinSequence {
 public:
  ProteinSequence(std::string gene_id, std::vector<AminoAcid> residues)
      : gene_id_(std::move(gene_id)), residues_(std::move(residues)) {
    if (residues_.empty()) {
      throw Error(ErrorCode::EmptySequence, "sequence '" + gene_id_ + "' has no residues");
    }
    for (std::size_t i = 0; i < residues_.size(); ++i) {
      if (residues_[i] == AminoAcid::Mask) {
        throw Error(ErrorCode::InvalidResidue, "mask symbol at position " + std::to_string(i + 1) +
                                                   " of '" + gene_id_ + "'");
      }
    }
  }

  static ProteinSequence from_string(std::string gene_id, std::string_view letters,
                                     const SequenceOptions& options = {}) {
    std::vector<AminoAcid> residues;
    residues.reserve(letters.size());
    for (std::size_t i = 0; i < letters.size(); ++i) {
      const char c = letters[i];
      auto aa = from_char(c);
      if (options.allow_unknown && is_noncanonical_letter(c)) aa = AminoAcid::Unknown;
      if (!aa || *aa == AminoAcid::Mask || (*aa == AminoAcid::Unknown && !options.allow_unknown)) {
        throw Error(ErrorCode::InvalidResidue, "character '" + std::string(1, c) + "' at position " +
                                                   std::to_string(i + 1) + " of '" + gene_id + "'");
      }
      residues.push_back(*aa);
    }
    return ProteinSequence(std::move(gene_id), std::move(residues));
  }

  const std::string& gene_id() const noexcept { return gene_id_; }
  std::span<const AminoAcid> residues() const noexcept { return residues_; }
  std::size_t length() const noexcept { return residues_.size(); }

  AminoAcid at(std::size_t position) const {
    if (position < 1 || position > residues_.size()) {
      throw Error(ErrorCode::PositionOutOfRange,
                  "position " + std::to_string(position) + " outside 1.." +
                      std::to_string(residues_.size()) + " of '" + gene_id_ + "'");
    }
    return residues_[position - 1];
  }

  std::string str() const {
    std::string out;
    out.reserve(residues_.size());
    for (auto aa : residues_) out.push_back(to_char(aa));
    return out;
  }

  friend bool operator==(const ProteinSequence&, const ProteinSequence&) = default;

 private:
  std::string gene_id_;
  std::vector<AminoAcid> residues_;
};

struct Substitution {
  std::size_t position = 0;  // 1-based
  AminoAcid wildtype = AminoAcid::Unknown;
  AminoAcid mutant = AminoAcid::Unknown;

  friend bool operator==(const Substitution&, const Substitution&) = default;
};

/// A missense variant: one or more substitutions at distinct positions of one
/// gene. Substitutions are kept sorted by position, so two variants with the
/// same content compare equal regardless of construction order.
class Variant {
 public:
  Variant(std::string gene_id, std::vector<Substitution> substitutions)
      : gene_id_(std::move(gene_id)), substitutions_(std::move(substitutions)) {
    if (substitutions_.empty()) {
      throw Error(ErrorCode::EmptyVariant, "variant of '" + gene_id_ + "' has no substitutions");
    }
    std::sort(substitutions_.begin(), substitutions_.end(),
              [](const Substitution& a, const Substitution& b) { return a.position < b.position; });
    for (std::size_t i = 0; i < substitutions_.size(); ++i) {
      const auto& s = substitutions_[i];
      if (s.position < 1) {
        throw Error(ErrorCode::PositionOutOfRange, "substitution position must be >= 1");
      }
      if (i > 0 && substitutions_[i - 1].position == s.position) {
        throw Error(ErrorCode::DuplicatePosition,
                    "position " + std::to_string(s.position) + " substituted twice");
      }
      if (!is_canonical(s.wildtype) || !is_canonical(s.mutant)) {
        throw Error(ErrorCode::InvalidResidue,
                    "substitution at " + std::to_string(s.position) + " uses a non-canonical residue");
      }
      if (s.wildtype == s.mutant) {
        throw Error(ErrorCode::SynonymousVariant,
                    "substitution at " + std::to_string(s.position) + " does not change the residue");
      }
    }
  }

  const std::string& gene_id() const noexcept { return gene_id_; }
  std::span<const Substitution> substitutions() const noexcept { return substitutions_; }
  std::size_t size() const noexcept { return substitutions_.size(); }

  /// Sorted substitution positions: the mutation set M.
  std::vector<std::size_t> positions() const {
    std::vector<std::size_t> out;
    out.reserve(substitutions_.size());
    for (const auto& s : substitutions_) out.push_back(s.position);
    return out;
  }

  friend bool operator==(const Variant&, const Variant&) = default;

 private:
  std::string gene_id_;
  std::vector<Substitution> substitutions_;
};

/// Swap wildtype and mutant residues at every position.
inline Variant inverse(const Variant& v) {
  std::vector<Substitution> subs(v.substitutions().begin(), v.substitutions().end());
  for (auto& s : subs) std::swap(s.wildtype, s.mutant);
  return Variant(v.gene_id(), std::move(subs));
}

/// Check that `variant` refers to `wildtype` and that every claimed wildtype
/// residue agrees with the sequence.
inline void bind_variant(const ProteinSequence& wildtype, const Variant& variant) {
  if (variant.gene_id() != wildtype.gene_id()) {
    throw Error(ErrorCode::GeneMismatch,
                "variant of '" + variant.gene_id() + "' applied to '" + wildtype.gene_id() + "'");
  }
  for (const auto& s : variant.substitutions()) {
    const AminoAcid actual = wildtype.at(s.position);
    if (actual == AminoAcid::Unknown) {
      throw Error(ErrorCode::UnscorablePosition,
                  "position " + std::to_string(s.position) + " of '" + wildtype.gene_id() +
                      "' holds an unknown residue");
    }
    if (actual != s.wildtype) {
      throw Error(ErrorCode::WildtypeMismatch,
                  "position " + std::to_string(s.position) + " of '" + wildtype.gene_id() + "' is " +
                      std::string(1, to_char(actual)) + ", variant claims " +
                      std::string(1, to_char(s.wildtype)));
    }
  }
}

inline std::vector<std::size_t> mutation_set(const ProteinSequence& wildtype, const Variant& variant) {
  bind_variant(wildtype, variant);
  return variant.positions();
}

inline ProteinSequence apply_variant(const ProteinSequence& wildtype, const Variant& variant) {
  bind_variant(wildtype, variant);
  std::vector<AminoAcid> residues(wildtype.residues().begin(), wildtype.residues().end());
  for (const auto& s : variant.substitutions()) residues[s.position - 1] = s.mutant;
  return ProteinSequence(wildtype.gene_id(), std::move(residues));
}

/// Substitutions that turn `wildtype` into `mutant`, position-ascending.
inline std::vector<Substitution> derive_substitutions(const ProteinSequence& wildtype,
                                                      const ProteinSequence& mutant) {
  if (wildtype.length() != mutant.length()) {
    throw Error(ErrorCode::InvalidArgument, "sequences differ in length");
  }
  std::vector<Substitution> out;
  for (std::size_t i = 0; i < wildtype.length(); ++i) {
    if (wildtype.residues()[i] != mutant.residues()[i]) {
      out.push_back({i + 1, wildtype.residues()[i], mutant.residues()[i]});
    }
  }
  return out;
}

/// A sequence with the mask symbol at a set of positions.
class MaskedSequence {
 public:
  const std::string& gene_id() const noexcept { return gene_id_; }
  std::span<const std::size_t> masked_positions() const noexcept { return masked_positions_; }
  std::span<const AminoAcid> rendered() const noexcept { return rendered_; }
  std::size_t length() const noexcept { return rendered_.size(); }

  /// Rendered residues with `?` at masked positions.
  std::string str() const {
    std::string out;
    out.reserve(rendered_.size());
    for (auto aa : rendered_) out.push_back(to_char(aa));
    return out;
  }

  bool is_masked(std::size_t position) const {
    return std::binary_search(masked_positions_.begin(), masked_positions_.end(), position);
  }

  friend bool operator==(const MaskedSequence&, const MaskedSequence&) = default;

 private:
  friend MaskedSequence mask_at(const ProteinSequence&, std::span<const std::size_t>);

  std::string gene_id_;
  std::vector<std::size_t> masked_positions_;
  std::vector<AminoAcid> rendered_;
};

inline MaskedSequence mask_at(const ProteinSequence& seq, std::span<const std::size_t> positions) {
  if (positions.empty()) throw Error(ErrorCode::EmptyMaskSet, "no positions to mask");
  MaskedSequence out;
  out.gene_id_ = seq.gene_id();
  out.masked_positions_.assign(positions.begin(), positions.end());
  std::sort(out.masked_positions_.begin(), out.masked_positions_.end());
  out.masked_positions_.erase(std::unique(out.masked_positions_.begin(), out.masked_positions_.end()),
                              out.masked_positions_.end());
  out.rendered_.assign(seq.residues().begin(), seq.residues().end());
  for (auto p : out.masked_positions_) {
    seq.at(p);  // range check
    out.rendered_[p - 1] = AminoAcid::Mask;
  }
  return out;
}

inline MaskedSequence mask_at(const ProteinSequence& seq, std::initializer_list<std::size_t> positions) {
  return mask_at(seq, std::span<const std::size_t>(positions.begin(), positions.size()));
}

}  // namespace velm
