#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string_view>

namespace velm {

// Canonical residues in one-letter alphabetical order, followed by the two
// non-residue symbols. The canonical ordinal doubles as the index into
// marginal log-probability arrays.
enum class AminoAcid : std::uint8_t {
  A, C, D, E, F, G, H, I, K, L, M, N, P, Q, R, S, T, V, W, Y,
  Unknown,
  Mask,
};

inline constexpr std::size_t kNumCanonical = 20;
inline constexpr std::size_t kNumSymbols = 22;
inline constexpr char kMaskChar = '?';
inline constexpr char kUnknownChar = 'X';

inline constexpr std::string_view kCanonicalLetters = "ACDEFGHIKLMNPQRSTVWY";

inline constexpr std::array<std::string_view, kNumCanonical> kThreeLetterCodes = {
    "Ala", "Cys", "Asp", "Glu", "Phe", "Gly", "His", "Ile", "Lys", "Leu",
    "Met", "Asn", "Pro", "Gln", "Arg", "Ser", "Thr", "Val", "Trp", "Tyr"};

constexpr bool is_canonical(AminoAcid aa) {
  return static_cast<std::uint8_t>(aa) < kNumCanonical;
}

constexpr std::size_t index_of(AminoAcid aa) {
  return static_cast<std::size_t>(aa);
}

constexpr AminoAcid canonical_at(std::size_t index) {
  return static_cast<AminoAcid>(index);
}

constexpr char to_char(AminoAcid aa) {
  if (aa == AminoAcid::Mask) return kMaskChar;
  if (aa == AminoAcid::Unknown) return kUnknownChar;
  return kCanonicalLetters[index_of(aa)];
}

/// One-letter lookup, case-insensitive. Only the 20 canonical letters, `X`
/// and `?` map to a symbol.
constexpr std::optional<AminoAcid> from_char(char c) {
  if (c == kMaskChar) return AminoAcid::Mask;
  const char upper = (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c;
  if (upper == kUnknownChar) return AminoAcid::Unknown;
  for (std::size_t i = 0; i < kNumCanonical; ++i) {
    if (kCanonicalLetters[i] == upper) return canonical_at(i);
  }
  return std::nullopt;
}

/// B, Z, U, O and J: ambiguity codes and rare residues that are never scored.
constexpr bool is_noncanonical_letter(char c) {
  switch (c) {
    case 'B': case 'Z': case 'U': case 'O': case 'J':
    case 'b': case 'z': case 'u': case 'o': case 'j':
      return true;
    default:
      return false;
  }
}

constexpr std::string_view three_letter(AminoAcid aa) {
  return is_canonical(aa) ? kThreeLetterCodes[index_of(aa)] : std::string_view{};
}

/// Three-letter lookup, case-insensitive ("Arg", "ARG", "arg").
constexpr std::optional<AminoAcid> from_three_letter(std::string_view code) {
  if (code.size() != 3) return std::nullopt;
  auto lower = [](char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  };
  for (std::size_t i = 0; i < kNumCanonical; ++i) {
    const auto ref = kThreeLetterCodes[i];
    if (lower(ref[0]) == lower(code[0]) && lower(ref[1]) == lower(code[1]) &&
        lower(ref[2]) == lower(code[2])) {
      return canonical_at(i);
    }
  }
  return std::nullopt;
}

}  // namespace velm
