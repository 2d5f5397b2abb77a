#pragma once

// End-to-end commands behind the `velm` executable. Each command returns an
// exit code instead of throwing so the CLI and the tests see the same
// contract:
//
//   0  success
//   2  input error (unreadable or malformed inputs, bad configuration)
//   3  backend error (backend cannot be resolved, reached, or answers badly)
//   4  degenerate classes (evaluation set lacks pathogenic or benign labels)

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "json.hpp"
#include "velm/backend.hpp"
#include "velm/eval.hpp"
#include "velm/ingest.hpp"
#include "velm/notation.hpp"
#include "velm/profile_backend.hpp"
#include "velm/remote_backend.hpp"
#include "velm/report.hpp"
#include "velm/scorer.hpp"
#include "velm/synthetic.hpp"
#include "velm/version.hpp"

namespace velm {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitInternal = 1,
  kExitInput = 2,
  kExitBackend = 3,
  kExitDegenerate = 4,
};

struct RunConfig {
  std::string backend;  // "profile:<path>" or "remote:<url>"
  int min_stars = 1;
  std::size_t max_length = 512;
  std::string focus_path;
  bool include_likely = false;
  bool allow_unknown = false;
  std::size_t parallelism = 1;
  std::size_t cache_capacity = 4096;
  std::string out_dir = "velm-out";
  std::uint64_t seed = 1;
  Weighting weighting = Weighting::Total;
  std::vector<std::size_t> mauc_levels{1, 3, 5};
  std::size_t histogram_bins = 20;
  double timeout_seconds = 60.0;
  double floor_log_prob = std::log(1e-10);
};

inline nlohmann::json to_json(const RunConfig& c) {
  return {{"backend", c.backend},
          {"min_stars", c.min_stars},
          {"max_length", c.max_length},
          {"focus", c.focus_path},
          {"include_likely", c.include_likely},
          {"allow_unknown", c.allow_unknown},
          {"parallelism", c.parallelism},
          {"cache_capacity", c.cache_capacity},
          {"out", c.out_dir},
          {"seed", c.seed},
          {"weighting", to_string(c.weighting)},
          {"mauc_levels", c.mauc_levels},
          {"histogram_bins", c.histogram_bins},
          {"timeout_seconds", c.timeout_seconds},
          {"floor_log_prob", c.floor_log_prob}};
}

struct CommandResult {
  int exit_code = kExitSuccess;
  std::string message;
};

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Write via a temporary sibling and rename, so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::IoError, "short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

template <typename Fn>
void write_stream_atomic(const std::filesystem::path& path, Fn&& fn) {
  std::ostringstream buf;
  fn(buf);
  write_file_atomic(path, buf.str());
}

/// Resolve "profile:<path>" or "remote:<url>". Malformed specs are input
/// errors; everything after that is a backend error.
inline std::unique_ptr<LikelihoodBackend> make_backend(const std::string& spec, double timeout_seconds = 60.0) {
  if (spec.rfind("profile:", 0) == 0) {
    std::ifstream in(spec.substr(8));
    if (!in) throw Error(ErrorCode::BackendUnavailable, "cannot open profile '" + spec.substr(8) + "'");
    return std::make_unique<ProfileBackend>(ProfileBackend::load(in));
  }
  if (spec.rfind("remote:", 0) == 0) {
    RemoteOptions options;
    options.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_seconds * 1000.0));
    return std::make_unique<RemoteBackend>(spec.substr(7), options);
  }
  throw Error(ErrorCode::InvalidArgument, "backend spec must be profile:<path> or remote:<url>, got '" + spec + "'");
}

namespace detail {

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

inline nlohmann::json descriptor_json(const BackendDescriptor& d) {
  nlohmann::json j = {{"id", d.id}, {"kind", to_string(d.kind)}, {"version", d.version}};
  j["max_length"] = d.max_length ? nlohmann::json(*d.max_length) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json input_json(const std::string& path, const std::string& content) {
  return {{"path", path}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}};
}

inline std::string profile_path(const std::string& spec) {
  return spec.rfind("profile:", 0) == 0 ? spec.substr(8) : std::string{};
}

inline RejectionReason classify(const Error& e) {
  switch (e.code()) {
    case ErrorCode::UnknownGene: return RejectionReason::UnknownGene;
    case ErrorCode::PositionOutOfRange:
    case ErrorCode::WildtypeMismatch:
    case ErrorCode::GeneMismatch:
    case ErrorCode::UnscorablePosition:
      return RejectionReason::BindError;
    default:
      return RejectionReason::ScoreError;
  }
}


struct ResolvedBackend {
  std::unique_ptr<LikelihoodBackend> backend;
  BackendDescriptor descriptor;
};

inline ResolvedBackend resolve_backend(const RunConfig& config) {
  ResolvedBackend r;
  r.backend = make_backend(config.backend, config.timeout_seconds);
  r.descriptor = r.backend->descriptor();
  return r;
}

inline std::optional<double> parse_method_score(std::string_view field, bool& numeric) {
  field = trim(field);
  if (field.empty() || field == "NA" || field == "na" || field == "nan" || field == "NaN" || field == ".") {
    return std::nullopt;
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
    numeric = false;
    return std::nullopt;
  }
  return value;
}

}  // namespace detail

/// Score every variant in a TSV with `gene_id` and `variant` columns. Writes
/// scores.tsv, rejections.tsv and manifest.json to `config.out_dir`.
inline CommandResult cmd_score(const RunConfig& config, const std::string& fasta_path,
                               const std::string& variants_path) {
  detail::Stopwatch clock;
  const std::filesystem::path out_dir(config.out_dir);
  std::string fasta_text, variants_text;
  SequenceMap sequences;
  std::vector<Variant> variants;
  std::vector<Rejection> rejections;
  std::vector<std::pair<std::size_t, std::string>> origin;  // row number and raw row per variant
  std::size_t rows = 0;
  try {
    fasta_text = read_file(fasta_path);
    variants_text = read_file(variants_path);
    std::istringstream fasta(fasta_text);
    sequences = make_sequence_map(parse_fasta(fasta, {config.allow_unknown}));

    std::istringstream in(variants_text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    std::size_t col_gene = 0, col_variant = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      if (header.empty()) {
        for (auto f : detail::split_tabs(line)) header.emplace_back(detail::trim(f));
        auto find = [&](std::string_view name) {
          auto it = std::find(header.begin(), header.end(), name);
          if (it == header.end()) throw Error(ErrorCode::MissingColumn, "variants TSV lacks '" + std::string(name) + "'");
          return static_cast<std::size_t>(it - header.begin());
        };
        col_gene = find("gene_id");
        col_variant = find("variant");
        continue;
      }
      ++rows;
      const auto fields = detail::split_tabs(line);
      if (fields.size() <= std::max(col_gene, col_variant)) {
        rejections.push_back({line_no, RejectionReason::MalformedRow, "too few fields", line});
        continue;
      }
      try {
        variants.push_back(parse_variant(fields[col_variant], std::string(detail::trim(fields[col_gene]))));
        origin.emplace_back(line_no, line);
      } catch (const Error& e) {
        rejections.push_back({line_no, RejectionReason::ParseError, e.what(), line});
      }
    }
    if (header.empty()) throw Error(ErrorCode::MissingColumn, "variants TSV has no header");
  } catch (const Error& e) {
    return {kExitInput, e.what()};
  }

  detail::ResolvedBackend resolved;
  try {
    resolved = detail::resolve_backend(config);
  } catch (const Error& e) {
    return {e.code() == ErrorCode::InvalidArgument ? kExitInput : kExitBackend, e.what()};
  }

  MarginalCache cache(config.cache_capacity);
  BatchStats stats;
  const auto outcomes = score_batch(sequences, variants, *resolved.backend, cache, config.parallelism,
                                    {config.floor_log_prob}, &stats);
  std::vector<VariantScore> scores;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (const auto* err = std::get_if<Error>(&outcomes[i])) {
      if (is_backend_error(err->code())) return {kExitBackend, err->what()};
      rejections.push_back({origin[i].first, detail::classify(*err), err->what(), origin[i].second});
    } else {
      scores.push_back(std::get<VariantScore>(outcomes[i]));
    }
  }
  std::sort(rejections.begin(), rejections.end(),
            [](const Rejection& a, const Rejection& b) { return a.row_number < b.row_number; });

  try {
    write_stream_atomic(out_dir / "scores.tsv", [&](std::ostream& o) { write_scores_tsv(o, scores); });
    write_stream_atomic(out_dir / "rejections.tsv", [&](std::ostream& o) { write_rejection_log(o, rejections); });
    nlohmann::json manifest;
    manifest["command"] = "score";
    manifest["velm_version"] = kVersionString;
    manifest["config"] = to_json(config);
    manifest["backend"] = detail::descriptor_json(resolved.descriptor);
    manifest["inputs"] = {{"fasta", detail::input_json(fasta_path, fasta_text)},
                          {"variants", detail::input_json(variants_path, variants_text)}};
    if (const auto p = detail::profile_path(config.backend); !p.empty()) {
      manifest["inputs"]["profile"] = detail::input_json(p, read_file(p));
    }
    manifest["counts"] = {{"rows", rows},
                          {"scored", scores.size()},
                          {"rejected", rejections.size()},
                          {"backend_queries", stats.backend_queries},
                          {"distinct_masks", stats.distinct_keys}};
    manifest["wall_time_seconds"] = clock.seconds();
    write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    return {kExitInput, e.what()};
  }
  return {kExitSuccess, std::to_string(scores.size()) + " scored, " + std::to_string(rejections.size()) + " rejected"};
}

/// Ingest a labeled TSV, score the evaluation set and write the report
/// (report.json, roc.csv, histogram.csv, roc.svg, histogram.svg) together with
/// scores.tsv, rejections.tsv and manifest.json.
inline CommandResult cmd_evaluate(const RunConfig& config, const std::string& fasta_path,
                                  const std::string& labels_path) {
  detail::Stopwatch clock;
  const std::filesystem::path out_dir(config.out_dir);
  std::string fasta_text, labels_text, focus_text;
  SequenceMap sequences;
  FilterResult eval_set;
  LoadResult load_info;
  EvalFilterConfig filters;
  try {
    filters.min_stars = config.min_stars;
    filters.max_length = config.max_length;
    filters.include_likely = config.include_likely;
    if (!config.focus_path.empty()) {
      focus_text = read_file(config.focus_path);
      std::istringstream focus(focus_text);
      filters.focus_positions = parse_focus_file(focus);
    }
    filters.validate();
    if (config.mauc_levels.empty()) throw Error(ErrorCode::InvalidArgument, "no mAUC levels requested");
    fasta_text = read_file(fasta_path);
    labels_text = read_file(labels_path);
    std::istringstream fasta(fasta_text);
    sequences = make_sequence_map(parse_fasta(fasta, {config.allow_unknown}));
    std::istringstream labels(labels_text);
    eval_set = load_evaluation_set(labels, sequences, filters, &load_info);
  } catch (const Error& e) {
    return {kExitInput, e.what()};
  }

  detail::ResolvedBackend resolved;
  try {
    resolved = detail::resolve_backend(config);
  } catch (const Error& e) {
    return {e.code() == ErrorCode::InvalidArgument ? kExitInput : kExitBackend, e.what()};
  }

  std::vector<Variant> variants;
  variants.reserve(eval_set.records.size());
  for (const auto& r : eval_set.records) variants.push_back(r.variant);
  MarginalCache cache(config.cache_capacity);
  BatchStats stats;
  const auto outcomes = score_batch(sequences, variants, *resolved.backend, cache, config.parallelism,
                                    {config.floor_log_prob}, &stats);

  // Method columns: every annotation column whose values are numeric or missing.
  std::vector<std::string> method_columns;
  std::vector<std::string> column_warnings;
  for (const auto& column : load_info.annotation_columns) {
    bool numeric = true;
    for (const auto& r : eval_set.records) {
      detail::parse_method_score(r.annotations.at(column), numeric);
      if (!numeric) break;
    }
    if (numeric) {
      method_columns.push_back(column);
    } else {
      column_warnings.push_back("column '" + column + "' is not numeric; not treated as a method score");
    }
  }

  std::vector<ScoredLabel> scored;
  std::vector<ComparisonRow> comparison;
  std::vector<VariantScore> scores;
  auto rejections = eval_set.rejections;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& record = eval_set.records[i];
    if (const auto* err = std::get_if<Error>(&outcomes[i])) {
      if (is_backend_error(err->code())) return {kExitBackend, err->what()};
      rejections.push_back({record.row_number, RejectionReason::ScoreError, err->what(), record.source_row});
      continue;
    }
    const auto& s = std::get<VariantScore>(outcomes[i]);
    scores.push_back(s);
    scored.push_back({record.variant.gene_id(), s.score, record.label});
    ComparisonRow row{record.variant.gene_id(), record.label, {}};
    for (const auto& column : method_columns) {
      bool numeric = true;
      row.method_scores[column] = detail::parse_method_score(record.annotations.at(column), numeric);
    }
    comparison.push_back(std::move(row));
  }
  std::stable_sort(rejections.begin(), rejections.end(),
                   [](const Rejection& a, const Rejection& b) { return a.row_number < b.row_number; });

  std::size_t n_path = 0, n_ben = 0;
  for (const auto& s : scored) (s.label == ClinicalLabel::Pathogenic ? n_path : n_ben)++;

  nlohmann::json manifest;
  manifest["command"] = "evaluate";
  manifest["velm_version"] = kVersionString;
  manifest["config"] = to_json(config);
  manifest["backend"] = detail::descriptor_json(resolved.descriptor);
  manifest["inputs"] = {{"fasta", detail::input_json(fasta_path, fasta_text)},
                        {"labels", detail::input_json(labels_path, labels_text)}};
  if (!config.focus_path.empty()) manifest["inputs"]["focus"] = detail::input_json(config.focus_path, focus_text);
  manifest["counts"] = {{"rows", load_info.rows_read},
                        {"evaluation_set", eval_set.summary.variants},
                        {"genes", eval_set.summary.genes},
                        {"pathogenic", n_path},
                        {"benign", n_ben},
                        {"rejected", rejections.size()},
                        {"backend_queries", stats.backend_queries},
                        {"distinct_masks", stats.distinct_keys}};

  try {
    if (const auto p = detail::profile_path(config.backend); !p.empty()) {
      manifest["inputs"]["profile"] = detail::input_json(p, read_file(p));
    }
    write_stream_atomic(out_dir / "rejections.tsv", [&](std::ostream& o) { write_rejection_log(o, rejections); });
    if (n_path == 0 || n_ben == 0) {
      manifest["wall_time_seconds"] = clock.seconds();
      write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
      return {kExitDegenerate, "DegenerateClasses: " + std::to_string(n_path) + " pathogenic, " +
                                   std::to_string(n_ben) + " benign after filtering"};
    }
    auto report = build_report(scored, comparison, config.mauc_levels, config.weighting, config.histogram_bins);
    report.methods.warnings.insert(report.methods.warnings.begin(), column_warnings.begin(), column_warnings.end());
    auto report_json = to_json(report);
    report_json["evaluation_set"] = {{"genes", eval_set.summary.genes},
                                     {"variants", eval_set.summary.variants},
                                     {"pathogenic", eval_set.summary.pathogenic},
                                     {"benign", eval_set.summary.benign}};
    write_file_atomic(out_dir / "report.json", report_json.dump(2) + "\n");
    write_stream_atomic(out_dir / "scores.tsv", [&](std::ostream& o) { write_scores_tsv(o, scores); });
    write_stream_atomic(out_dir / "roc.csv", [&](std::ostream& o) { write_roc_csv(o, report.roc); });
    write_stream_atomic(out_dir / "histogram.csv", [&](std::ostream& o) { write_histogram_csv(o, report.hist); });
    write_stream_atomic(out_dir / "roc.svg", [&](std::ostream& o) { write_roc_svg(o, report.roc); });
    write_stream_atomic(out_dir / "histogram.svg", [&](std::ostream& o) { write_histogram_svg(o, report.hist); });
    manifest["wall_time_seconds"] = clock.seconds();
    write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return {kExitSuccess, "AUC " + format_double(report.roc.auc) + " over " + std::to_string(n_path) +
                              " pathogenic and " + std::to_string(n_ben) + " benign"};
  } catch (const std::exception& e) {
    return {kExitInput, e.what()};
  }
}

/// Train a profile from an aligned corpus FASTA and write it as JSON.
inline CommandResult cmd_train_profile(const std::string& corpus_path, double alpha, const std::string& out_path,
                                       const std::string& id = "profile", bool allow_unknown = false) {
  try {
    const auto text = read_file(corpus_path);
    std::istringstream in(text);
    const auto corpus = parse_fasta(in, {allow_unknown});
    const auto profile = train_profile(corpus, alpha, id);
    write_stream_atomic(out_path, [&](std::ostream& o) { profile.save(o); });
    return {kExitSuccess, "profile of length " + std::to_string(profile.length()) + " from " +
                              std::to_string(corpus.size()) + " sequences"};
  } catch (const Error& e) {
    return {kExitInput, e.what()};
  } catch (const std::filesystem::filesystem_error& e) {
    return {kExitInput, e.what()};
  }
}

/// Write a synthetic fixture (corpus.fasta, wildtypes.fasta, labels.tsv,
/// profile.json) into `config.out_dir`.
inline CommandResult cmd_synth(const RunConfig& config, SyntheticConfig synth, double alpha = 1.0) {
  try {
    synth.seed = config.seed;
    const std::filesystem::path out_dir(config.out_dir);
    const auto corpus = synthetic_corpus(synth);
    const auto wildtypes = synthetic_wildtypes(corpus, synth);
    const auto profile = train_profile(corpus, alpha, "synthetic-profile");
    write_stream_atomic(out_dir / "corpus.fasta", [&](std::ostream& o) { write_fasta(o, corpus); });
    write_stream_atomic(out_dir / "wildtypes.fasta", [&](std::ostream& o) { write_fasta(o, wildtypes); });
    write_file_atomic(out_dir / "labels.tsv", synthetic_labels_tsv(profile, wildtypes, synth));
    write_stream_atomic(out_dir / "profile.json", [&](std::ostream& o) { profile.save(o); });
    return {kExitSuccess, "synthetic fixture written to " + out_dir.string()};
  } catch (const Error& e) {
    return {kExitInput, e.what()};
  }
}

}  // namespace velm
