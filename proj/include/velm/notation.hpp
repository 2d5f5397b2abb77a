#pragma once

// Parsers for wildtype FASTA files and protein-level variant notation.
//
// Variant grammar:
//   short := <AA><digits><AA>                 e.g. R123C
//   hgvs  := "p." <AAA><digits><AAA>          e.g. p.Arg123Cys  (p.(Arg123Cys) also accepted)
//   multi := item (";" item)*                 e.g. R123C;K7A
//
// Stop-gain, frameshift and indel notations are recognised and rejected with
// their own error codes so they never surface as generic parse failures.

#include <cctype>
#include <charconv>
#include <istream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "velm/amino_acid.hpp"
#include "velm/error.hpp"
#include "velm/sequence.hpp"

namespace velm {

enum class NotationStyle { Short, Hgvs };

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool icontains(std::string_view haystack, std::string_view needle) {
  if (needle.size() > haystack.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < needle.size(); ++j) {
      if (std::tolower(static_cast<unsigned char>(haystack[i + j])) !=
          std::tolower(static_cast<unsigned char>(needle[j]))) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

inline bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && icontains(a, b);
}

// Reject out-of-scope variant classes before attempting the missense grammar.
inline void reject_non_missense(std::string_view item, std::string_view raw) {
  if (icontains(item, "fs")) {
    throw Error(ErrorCode::FrameshiftNotation, "frameshift notation not supported: '" + std::string(raw) + "'");
  }
  if (icontains(item, "delins") || icontains(item, "del") || icontains(item, "ins") ||
      icontains(item, "dup") || item.find('_') != std::string_view::npos) {
    throw Error(ErrorCode::IndelNotation, "insertion/deletion notation not supported: '" + std::string(raw) + "'");
  }
  if (item.find('*') != std::string_view::npos || icontains(item, "Ter")) {
    throw Error(ErrorCode::StopGainNotation, "stop-gain notation not supported: '" + std::string(raw) + "'");
  }
}

inline std::size_t parse_position(std::string_view digits, std::string_view raw) {
  std::size_t value = 0;
  const auto* first = digits.data();
  const auto* last = digits.data() + digits.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (digits.empty() || ec != std::errc{} || ptr != last || value == 0) {
    throw Error(ErrorCode::UnrecognizedNotation, "bad position in '" + std::string(raw) + "'");
  }
  return value;
}

inline Substitution parse_short_item(std::string_view item, std::string_view raw) {
  if (item.size() < 3 || !std::isalpha(static_cast<unsigned char>(item.front())) ||
      !std::isalpha(static_cast<unsigned char>(item.back()))) {
    throw Error(ErrorCode::UnrecognizedNotation, "cannot parse '" + std::string(raw) + "'");
  }
  const auto digits = item.substr(1, item.size() - 2);
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw Error(ErrorCode::UnrecognizedNotation, "cannot parse '" + std::string(raw) + "'");
    }
  }
  auto residue = [&](char c) {
    auto aa = from_char(c);
    if (!aa || !is_canonical(*aa)) {
      throw Error(ErrorCode::UnknownResidueName,
                  "unknown residue '" + std::string(1, c) + "' in '" + std::string(raw) + "'");
    }
    return *aa;
  };
  return {parse_position(digits, raw), residue(item.front()), residue(item.back())};
}

inline Substitution parse_hgvs_item(std::string_view item, std::string_view raw) {
  item.remove_prefix(2);  // "p."
  if (item.size() >= 2 && item.front() == '(' && item.back() == ')') {
    item = item.substr(1, item.size() - 2);
  }
  std::size_t digits_begin = 0;
  while (digits_begin < item.size() && std::isalpha(static_cast<unsigned char>(item[digits_begin]))) {
    ++digits_begin;
  }
  std::size_t digits_end = digits_begin;
  while (digits_end < item.size() && std::isdigit(static_cast<unsigned char>(item[digits_end]))) {
    ++digits_end;
  }
  const auto ref = item.substr(0, digits_begin);
  const auto digits = item.substr(digits_begin, digits_end - digits_begin);
  const auto alt = item.substr(digits_end);
  for (char c : alt) {
    if (!std::isalpha(static_cast<unsigned char>(c))) {
      throw Error(ErrorCode::UnrecognizedNotation, "cannot parse '" + std::string(raw) + "'");
    }
  }
  if (ref.empty() || alt.empty() || digits.empty()) {
    throw Error(ErrorCode::UnrecognizedNotation, "cannot parse '" + std::string(raw) + "'");
  }
  auto residue = [&](std::string_view code) {
    auto aa = from_three_letter(code);
    if (!aa) {
      throw Error(ErrorCode::UnknownResidueName,
                  "unknown residue '" + std::string(code) + "' in '" + std::string(raw) + "'");
    }
    return *aa;
  };
  return {parse_position(digits, raw), residue(ref), residue(alt)};
}

}  // namespace detail

/// Parse short ("R123C") or HGVS protein ("p.Arg123Cys") notation, with `;`
/// joining multiple substitutions. Either yields a complete Variant or throws.
inline Variant parse_variant(std::string_view notation, const std::string& gene_id) {
  const auto raw = notation;
  notation = detail::trim(notation);
  if (notation.empty()) throw Error(ErrorCode::UnrecognizedNotation, "empty variant notation");
  std::vector<Substitution> subs;
  std::size_t start = 0;
  while (start <= notation.size()) {
    auto end = notation.find(';', start);
    if (end == std::string_view::npos) end = notation.size();
    const auto item = detail::trim(notation.substr(start, end - start));
    if (item.empty()) {
      throw Error(ErrorCode::UnrecognizedNotation, "empty item in '" + std::string(raw) + "'");
    }
    const bool hgvs = item.size() > 2 && (item[0] == 'p' || item[0] == 'P') && item[1] == '.';
    detail::reject_non_missense(hgvs ? item.substr(2) : item, raw);
    subs.push_back(hgvs ? detail::parse_hgvs_item(item, raw) : detail::parse_short_item(item, raw));
    if (subs.back().wildtype == subs.back().mutant) {
      throw Error(ErrorCode::SynonymousVariant, "'" + std::string(raw) + "' does not change the residue");
    }
    start = end + 1;
  }
  return Variant(gene_id, std::move(subs));
}

inline std::string format_variant(const Variant& v, NotationStyle style = NotationStyle::Short) {
  std::string out;
  for (const auto& s : v.substitutions()) {
    if (!out.empty()) out.push_back(';');
    if (style == NotationStyle::Short) {
      out.push_back(to_char(s.wildtype));
      out += std::to_string(s.position);
      out.push_back(to_char(s.mutant));
    } else {
      out += "p.";
      out += three_letter(s.wildtype);
      out += std::to_string(s.position);
      out += three_letter(s.mutant);
    }
  }
  return out;
}

/// Read every record of a protein FASTA stream. The gene id is the first
/// whitespace-delimited token of the header; bodies may span many lines and
/// both LF and CRLF endings are accepted.
inline std::vector<ProteinSequence> parse_fasta(std::istream& in, const SequenceOptions& options = {}) {
  std::vector<ProteinSequence> out;
  std::set<std::string> seen;
  std::string line;
  std::string gene_id;
  std::string body;
  std::size_t header_line = 0;
  std::size_t line_no = 0;
  bool in_record = false;

  auto flush = [&] {
    if (!in_record) return;
    if (body.empty()) {
      throw Error(ErrorCode::EmptySequence,
                  "record '" + gene_id + "' (line " + std::to_string(header_line) + ") has no residues");
    }
    out.push_back(ProteinSequence::from_string(gene_id, body, options));
    body.clear();
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '>') {
      flush();
      std::string_view header(line);
      header.remove_prefix(1);
      header = detail::trim(header);
      const auto token_end = header.find_first_of(" \t");
      const auto id = header.substr(0, token_end);
      if (id.empty()) {
        throw Error(ErrorCode::MalformedHeader, "empty gene id at line " + std::to_string(line_no));
      }
      gene_id.assign(id);
      if (!seen.insert(gene_id).second) {
        throw Error(ErrorCode::DuplicateGeneId,
                    "gene id '" + gene_id + "' repeated at line " + std::to_string(line_no));
      }
      header_line = line_no;
      in_record = true;
      continue;
    }
    if (!in_record) {
      throw Error(ErrorCode::MalformedHeader,
                  "sequence data before first header at line " + std::to_string(line_no));
    }
    for (std::size_t col = 0; col < line.size(); ++col) {
      const char c = line[col];
      if (c == ' ' || c == '\t') continue;
      auto aa = from_char(c);
      const bool ok = (aa && is_canonical(*aa)) ||
                      (options.allow_unknown && (is_noncanonical_letter(c) || aa == AminoAcid::Unknown));
      if (!ok) {
        throw Error(ErrorCode::InvalidResidue, "line " + std::to_string(line_no) + ", column " +
                                                   std::to_string(col + 1) + ": invalid residue '" +
                                                   std::string(1, c) + "'");
      }
      body.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  }
  flush();
  return out;
}

}  // namespace velm
