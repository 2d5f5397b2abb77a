#pragma once

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "velm/error.hpp"
#include "velm/notation.hpp"
#include "velm/sequence.hpp"

namespace velm {

/// Positive class is Pathogenic for every downstream metric.
enum class ClinicalLabel { Pathogenic, Benign };

inline std::string_view to_string(ClinicalLabel label) {
  return label == ClinicalLabel::Pathogenic ? "pathogenic" : "benign";
}

using SequenceMap = std::map<std::string, ProteinSequence, std::less<>>;
using FocusPositions = std::map<std::string, std::set<std::size_t>, std::less<>>;

inline SequenceMap make_sequence_map(std::vector<ProteinSequence> sequences) {
  SequenceMap out;
  for (auto& s : sequences) {
    auto id = s.gene_id();
    if (!out.emplace(id, std::move(s)).second) {
      throw Error(ErrorCode::DuplicateGeneId, "gene id '" + id + "' repeated");
    }
  }
  return out;
}

struct LabeledVariant {
  Variant variant;
  ClinicalLabel label;
  int stars = 0;
  std::string raw_label;
  std::size_t row_number = 0;  // 1-based line number in the source file
  std::string source_row;
  /// Extra columns keyed by header name, kept verbatim.
  std::map<std::string, std::string> annotations;

  friend bool operator==(const LabeledVariant&, const LabeledVariant&) = default;
};

struct EvalFilterConfig {
  int min_stars = 1;
  std::size_t max_length = 512;
  std::optional<FocusPositions> focus_positions;
  bool include_likely = false;

  void validate() const {
    if (min_stars < 0) throw Error(ErrorCode::InvalidArgument, "min_stars must be >= 0");
    if (max_length < 1) throw Error(ErrorCode::InvalidArgument, "max_length must be >= 1");
  }
};

enum class RejectionReason {
  MalformedRow,
  ParseError,
  UnknownGene,
  BindError,
  LabelExcluded,
  ConflictingLabel,
  StarFilter,
  LengthFilter,
  FocusFilter,
  ScoreError,
};

inline std::string_view to_string(RejectionReason reason) {
  switch (reason) {
    case RejectionReason::MalformedRow: return "MalformedRow";
    case RejectionReason::ParseError: return "ParseError";
    case RejectionReason::UnknownGene: return "UnknownGene";
    case RejectionReason::BindError: return "BindError";
    case RejectionReason::LabelExcluded: return "LabelExcluded";
    case RejectionReason::ConflictingLabel: return "ConflictingLabel";
    case RejectionReason::StarFilter: return "StarFilter";
    case RejectionReason::LengthFilter: return "LengthFilter";
    case RejectionReason::FocusFilter: return "FocusFilter";
    case RejectionReason::ScoreError: return "ScoreError";
  }
  return "Unknown";
}

struct Rejection {
  std::size_t row_number = 0;
  RejectionReason reason = RejectionReason::MalformedRow;
  std::string detail;
  std::string raw_row;
};

struct EvalSetSummary {
  std::size_t genes = 0;
  std::size_t variants = 0;
  std::size_t pathogenic = 0;
  std::size_t benign = 0;

  friend bool operator==(const EvalSetSummary&, const EvalSetSummary&) = default;
};

struct LoadResult {
  std::vector<LabeledVariant> records;
  std::vector<Rejection> rejections;
  std::vector<std::string> annotation_columns;
  std::size_t rows_read = 0;
};

struct FilterResult {
  std::vector<LabeledVariant> records;
  std::vector<Rejection> rejections;
  EvalSetSummary summary;
};

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto end = line.find('\t', start);
    out.push_back(line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

inline std::string normalize_label(std::string_view raw) {
  std::string out;
  for (char c : trim(raw)) {
    if (c == ' ' || c == '-') {
      out.push_back('_');
    } else {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

inline std::optional<ClinicalLabel> map_label(std::string_view raw, bool include_likely) {
  const auto label = normalize_label(raw);
  if (label == "pathogenic") return ClinicalLabel::Pathogenic;
  if (label == "benign") return ClinicalLabel::Benign;
  if (include_likely && label == "likely_pathogenic") return ClinicalLabel::Pathogenic;
  if (include_likely && label == "likely_benign") return ClinicalLabel::Benign;
  return std::nullopt;
}

inline std::optional<int> parse_stars(std::string_view field) {
  field = trim(field);
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || value < 0) {
    return std::nullopt;
  }
  return value;
}

inline FilterResult summarize(FilterResult result) {
  std::set<std::string_view> genes;
  for (const auto& r : result.records) {
    genes.insert(r.variant.gene_id());
    (r.label == ClinicalLabel::Pathogenic ? result.summary.pathogenic : result.summary.benign)++;
  }
  result.summary.genes = genes.size();
  result.summary.variants = result.records.size();
  return result;
}

}  // namespace detail

/// Read a labeled-variant TSV with at least the columns `gene_id`, `variant`,
/// `label` and `stars`. Lines starting with `#` are comments. Any other column
/// is carried through as an annotation (external method scores, for instance).
///
/// Rows that cannot be parsed, bound to their wildtype, or mapped to a label
/// are recorded in `rejections`; only a missing required column throws.
/// Duplicate rows for the same gene and variant that disagree on the label
/// are all rejected as ConflictingLabel.
inline LoadResult load_labeled_tsv(std::istream& in, const SequenceMap& sequences,
                                   const EvalFilterConfig& config = {}) {
  LoadResult result;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::size_t col_gene = 0, col_variant = 0, col_label = 0, col_stars = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    for (auto field : detail::split_tabs(line)) header.emplace_back(detail::trim(field));
    break;
  }
  auto column = [&](std::string_view name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw Error(ErrorCode::MissingColumn, "labeled TSV lacks column '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  col_gene = column("gene_id");
  col_variant = column("variant");
  col_label = column("label");
  col_stars = column("stars");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i != col_gene && i != col_variant && i != col_label && i != col_stars) {
      result.annotation_columns.push_back(header[i]);
    }
  }

  // Conflict detection needs every admitted row, so admit first and resolve after.
  std::map<std::pair<std::string, std::string>, std::set<ClinicalLabel>> labels_by_key;
  std::vector<std::pair<std::string, std::string>> keys;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    ++result.rows_read;
    auto reject = [&](RejectionReason reason, std::string detail) {
      result.rejections.push_back({line_no, reason, std::move(detail), line});
    };
    const auto fields = detail::split_tabs(line);
    if (fields.size() != header.size()) {
      reject(RejectionReason::MalformedRow, "expected " + std::to_string(header.size()) + " fields, found " +
                                                std::to_string(fields.size()));
      continue;
    }
    const std::string gene_id(detail::trim(fields[col_gene]));
    const auto stars = detail::parse_stars(fields[col_stars]);
    if (!stars) {
      reject(RejectionReason::MalformedRow, "stars is not a non-negative integer");
      continue;
    }
    std::optional<Variant> variant;
    try {
      variant = parse_variant(fields[col_variant], gene_id);
    } catch (const Error& e) {
      reject(RejectionReason::ParseError, e.what());
      continue;
    }
    const auto seq = sequences.find(gene_id);
    if (seq == sequences.end()) {
      reject(RejectionReason::UnknownGene, "no wildtype sequence for '" + gene_id + "'");
      continue;
    }
    try {
      bind_variant(seq->second, *variant);
    } catch (const Error& e) {
      reject(RejectionReason::BindError, e.what());
      continue;
    }
    const auto label = detail::map_label(fields[col_label], config.include_likely);
    if (!label) {
      reject(RejectionReason::LabelExcluded, "label '" + std::string(fields[col_label]) + "' not admitted");
      continue;
    }
    LabeledVariant record{*variant, *label, *stars, std::string(detail::trim(fields[col_label])), line_no, line, {}};
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i != col_gene && i != col_variant && i != col_label && i != col_stars) {
        record.annotations.emplace(header[i], std::string(detail::trim(fields[i])));
      }
    }
    std::pair<std::string, std::string> key{gene_id, format_variant(*variant)};
    labels_by_key[key].insert(*label);
    keys.push_back(std::move(key));
    result.records.push_back(std::move(record));
  }

  std::vector<LabeledVariant> admitted;
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    if (labels_by_key[keys[i]].size() > 1) {
      result.rejections.push_back({result.records[i].row_number, RejectionReason::ConflictingLabel,
                                   "conflicting labels for " + keys[i].first + " " + keys[i].second,
                                   result.records[i].source_row});
    } else {
      admitted.push_back(std::move(result.records[i]));
    }
  }
  result.records = std::move(admitted);
  std::sort(result.rejections.begin(), result.rejections.end(),
            [](const Rejection& a, const Rejection& b) { return a.row_number < b.row_number; });
  return result;
}

/// Keep records with enough review stars, a short-enough wildtype and, when a
/// focus map is configured, every mutated position inside the gene's focus set.
inline FilterResult apply_filters(std::span<const LabeledVariant> records, const EvalFilterConfig& config,
                                  const SequenceMap& sequences) {
  config.validate();
  FilterResult result;
  for (const auto& r : records) {
    auto reject = [&](RejectionReason reason, std::string detail) {
      result.rejections.push_back({r.row_number, reason, std::move(detail), r.source_row});
    };
    const auto seq = sequences.find(r.variant.gene_id());
    if (seq == sequences.end()) {
      reject(RejectionReason::UnknownGene, "no wildtype sequence for '" + r.variant.gene_id() + "'");
      continue;
    }
    if (r.stars < config.min_stars) {
      reject(RejectionReason::StarFilter,
             std::to_string(r.stars) + " stars < " + std::to_string(config.min_stars));
      continue;
    }
    if (seq->second.length() > config.max_length) {
      reject(RejectionReason::LengthFilter, "length " + std::to_string(seq->second.length()) + " > " +
                                                std::to_string(config.max_length));
      continue;
    }
    if (config.focus_positions) {
      const auto focus = config.focus_positions->find(r.variant.gene_id());
      const bool inside =
          focus != config.focus_positions->end() &&
          std::all_of(r.variant.substitutions().begin(), r.variant.substitutions().end(),
                      [&](const Substitution& s) { return focus->second.contains(s.position); });
      if (!inside) {
        reject(RejectionReason::FocusFilter, "mutated position outside focus set");
        continue;
      }
    }
    result.records.push_back(r);
  }
  return detail::summarize(std::move(result));
}

/// Load and filter in one step. Every data row of the input ends up either in
/// `records` or in `rejections`.
inline FilterResult load_evaluation_set(std::istream& in, const SequenceMap& sequences,
                                        const EvalFilterConfig& config, LoadResult* load_out = nullptr) {
  config.validate();
  auto loaded = load_labeled_tsv(in, sequences, config);
  auto filtered = apply_filters(loaded.records, config, sequences);
  filtered.rejections.insert(filtered.rejections.begin(), loaded.rejections.begin(), loaded.rejections.end());
  std::stable_sort(filtered.rejections.begin(), filtered.rejections.end(),
                   [](const Rejection& a, const Rejection& b) { return a.row_number < b.row_number; });
  if (load_out) {
    loaded.records.clear();
    loaded.rejections.clear();
    *load_out = std::move(loaded);
  }
  return filtered;
}

/// Focus sidecar: one gene per line, `gene_id<TAB>pos,pos,...`.
inline FocusPositions parse_focus_file(std::istream& in) {
  FocusPositions out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "focus file line " + std::to_string(line_no) + " lacks a tab");
    }
    auto& positions = out[std::string(detail::trim(std::string_view(line).substr(0, tab)))];
    std::string_view rest = std::string_view(line).substr(tab + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto token = detail::trim(rest.substr(0, comma));
      if (!token.empty()) {
        std::size_t pos = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), pos);
        if (ec != std::errc{} || ptr != token.data() + token.size() || pos == 0) {
          throw Error(ErrorCode::InvalidArgument, "focus file line " + std::to_string(line_no) +
                                                      ": bad position '" + std::string(token) + "'");
        }
        positions.insert(pos);
      }
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  return out;
}

/// Rejection log: `row_number<TAB>reason<TAB>raw_row`, no header.
inline void write_rejection_log(std::ostream& out, std::span<const Rejection> rejections) {
  for (const auto& r : rejections) {
    out << r.row_number << '\t' << to_string(r.reason) << '\t' << r.raw_row << '\n';
  }
}

}  // namespace velm
