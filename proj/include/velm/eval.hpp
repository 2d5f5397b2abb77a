#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "velm/error.hpp"
#include "velm/ingest.hpp"

namespace velm {

struct ScoredLabel {
  std::string gene_id;
  double score = 0.0;
  ClinicalLabel label = ClinicalLabel::Benign;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;

  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
  std::size_t n_path = 0;
  std::size_t n_ben = 0;
};

/// Trapezoidal area under a polyline of ROC points.
inline double trapezoid_area(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) / 2.0;
  }
  return area;
}

/// ROC over a descending threshold sweep, pathogenic as the positive class.
/// A run of tied scores moves as one diagonal step, which makes the area
/// equal the Mann-Whitney statistic P(path > ben) + 1/2 P(path == ben).
///
/// The area is accumulated in integer counts and divided once, so it is
/// exact up to the final rounding.
inline RocCurve roc_auc(std::span<const ScoredLabel> data) {
  RocCurve curve;
  std::vector<std::pair<double, bool>> sorted;
  sorted.reserve(data.size());
  for (const auto& d : data) {
    if (!std::isfinite(d.score)) throw Error(ErrorCode::InvalidArgument, "non-finite score for " + d.gene_id);
    const bool positive = d.label == ClinicalLabel::Pathogenic;
    (positive ? curve.n_path : curve.n_ben)++;
    sorted.emplace_back(d.score, positive);
  }
  if (curve.n_path == 0 || curve.n_ben == 0) {
    throw Error(ErrorCode::DegenerateClasses, std::to_string(curve.n_path) + " pathogenic, " +
                                                  std::to_string(curve.n_ben) + " benign");
  }
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  const auto P = static_cast<double>(curve.n_path);
  const auto N = static_cast<double>(curve.n_ben);
  std::uint64_t tp = 0, fp = 0;
  // Twice the area in units of (1/P)(1/N).
  unsigned __int128 doubled_area = 0;
  curve.points.push_back({0.0, 0.0});
  for (std::size_t i = 0; i < sorted.size();) {
    std::uint64_t dtp = 0, dfp = 0;
    const double threshold = sorted[i].first;
    for (; i < sorted.size() && sorted[i].first == threshold; ++i) (sorted[i].second ? dtp : dfp)++;
    doubled_area += static_cast<unsigned __int128>(dfp) * (2 * tp + dtp);
    tp += dtp;
    fp += dfp;
    curve.points.push_back({static_cast<double>(fp) / N, static_cast<double>(tp) / P});
  }
  curve.auc = static_cast<double>(doubled_area) / (2.0 * P * N);
  return curve;
}

struct GeneAuc {
  std::optional<double> auc;  // empty when the gene lacks one class
  std::size_t n_path = 0;
  std::size_t n_ben = 0;
};

inline std::map<std::string, GeneAuc> per_gene_auc(std::span<const ScoredLabel> data) {
  std::map<std::string, std::vector<ScoredLabel>> by_gene;
  for (const auto& d : data) by_gene[d.gene_id].push_back(d);
  std::map<std::string, GeneAuc> out;
  for (const auto& [gene, rows] : by_gene) {
    GeneAuc g;
    for (const auto& r : rows) (r.label == ClinicalLabel::Pathogenic ? g.n_path : g.n_ben)++;
    if (g.n_path > 0 && g.n_ben > 0) g.auc = roc_auc(rows).auc;
    out.emplace(gene, g);
  }
  return out;
}

/// How each gene's AUC is weighted in the mean.
enum class Weighting {
  Total,     // n_path + n_ben
  MinClass,  // min(n_path, n_ben)
  Uniform,   // 1
};

inline std::string_view to_string(Weighting w) {
  switch (w) {
    case Weighting::Total: return "total";
    case Weighting::MinClass: return "min_class";
    case Weighting::Uniform: return "uniform";
  }
  return "total";
}

inline Weighting parse_weighting(std::string_view name) {
  if (name == "total") return Weighting::Total;
  if (name == "min_class") return Weighting::MinClass;
  if (name == "uniform") return Weighting::Uniform;
  throw Error(ErrorCode::InvalidArgument, "unknown weighting '" + std::string(name) + "'");
}

struct MaucRow {
  std::size_t min_labels = 0;
  double mauc = 0.0;
  std::size_t genes_included = 0;
  std::size_t variants_included = 0;
};

/// Weighted mean of per-gene AUCs over genes with at least `min_labels`
/// pathogenic and `min_labels` benign labels.
inline MaucRow mean_auc(const std::map<std::string, GeneAuc>& per_gene, std::size_t min_labels,
                        Weighting weighting = Weighting::Total) {
  if (min_labels < 1) throw Error(ErrorCode::InvalidArgument, "min_labels must be >= 1");
  MaucRow row;
  row.min_labels = min_labels;
  double weighted = 0.0;
  double total_weight = 0.0;
  for (const auto& [gene, g] : per_gene) {
    if (!g.auc || g.n_path < min_labels || g.n_ben < min_labels) continue;
    double w = 1.0;
    if (weighting == Weighting::Total) w = static_cast<double>(g.n_path + g.n_ben);
    if (weighting == Weighting::MinClass) w = static_cast<double>(std::min(g.n_path, g.n_ben));
    weighted += w * *g.auc;
    total_weight += w;
    ++row.genes_included;
    row.variants_included += g.n_path + g.n_ben;
  }
  if (row.genes_included == 0) {
    throw Error(ErrorCode::NoQualifyingGenes, "no gene has " + std::to_string(min_labels) + " labels per class");
  }
  row.mauc = weighted / total_weight;
  return row;
}

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> edges;  // bin_count + 1 entries
  std::vector<std::size_t> pathogenic;
  std::vector<std::size_t> benign;
};

/// Equal-width bins over [min score, max score]; the top edge belongs to the
/// last bin. With all scores equal every record lands in the first bin.
inline Histogram histogram(std::span<const ScoredLabel> data, std::size_t bin_count) {
  if (bin_count < 1) throw Error(ErrorCode::InvalidArgument, "bin_count must be >= 1");
  Histogram h;
  h.pathogenic.assign(bin_count, 0);
  h.benign.assign(bin_count, 0);
  if (!data.empty()) {
    auto [mn, mx] = std::minmax_element(data.begin(), data.end(),
                                        [](const auto& a, const auto& b) { return a.score < b.score; });
    h.lo = mn->score;
    h.hi = mx->score;
  }
  const double width = (h.hi - h.lo) / static_cast<double>(bin_count);
  for (std::size_t b = 0; b <= bin_count; ++b) h.edges.push_back(h.lo + width * static_cast<double>(b));
  h.edges.back() = h.hi;
  for (const auto& d : data) {
    std::size_t bin = 0;
    if (width > 0.0) {
      bin = static_cast<std::size_t>(std::floor((d.score - h.lo) / width));
      bin = std::min(bin, bin_count - 1);
    }
    (d.label == ClinicalLabel::Pathogenic ? h.pathogenic : h.benign)[bin]++;
  }
  return h;
}

/// One evaluated row with optional scores from external methods.
struct ComparisonRow {
  std::string gene_id;
  ClinicalLabel label = ClinicalLabel::Benign;
  std::map<std::string, std::optional<double>> method_scores;
};

struct MethodMetrics {
  std::string method;
  std::size_t rows = 0;
  double auc = 0.0;
  std::size_t n_path = 0;
  std::size_t n_ben = 0;
  std::vector<std::optional<MaucRow>> mauc;  // one per requested N; empty when no gene qualifies
};

struct Comparison {
  std::vector<MethodMetrics> methods;
  std::vector<std::string> warnings;
};

/// Evaluate each method on exactly the rows where it has a score. Methods
/// with no scores, or scores on only one class, are skipped with a warning.
inline Comparison compare_methods(std::span<const ComparisonRow> rows, std::span<const std::size_t> mauc_levels,
                                  Weighting weighting = Weighting::Total) {
  std::vector<std::string> names;
  for (const auto& r : rows) {
    for (const auto& [name, _] : r.method_scores) {
      if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    }
  }
  std::sort(names.begin(), names.end());
  Comparison out;
  for (const auto& name : names) {
    std::vector<ScoredLabel> data;
    for (const auto& r : rows) {
      const auto it = r.method_scores.find(name);
      if (it != r.method_scores.end() && it->second) data.push_back({r.gene_id, *it->second, r.label});
    }
    if (data.empty()) {
      out.warnings.push_back("method '" + name + "' has no scores; omitted");
      continue;
    }
    MethodMetrics m;
    m.method = name;
    m.rows = data.size();
    try {
      const auto curve = roc_auc(data);
      m.auc = curve.auc;
      m.n_path = curve.n_path;
      m.n_ben = curve.n_ben;
    } catch (const Error& e) {
      out.warnings.push_back("method '" + name + "' omitted: " + e.what());
      continue;
    }
    const auto genes = per_gene_auc(data);
    for (auto n : mauc_levels) {
      try {
        m.mauc.push_back(mean_auc(genes, n, weighting));
      } catch (const Error&) {
        m.mauc.push_back(std::nullopt);
      }
    }
    out.methods.push_back(std::move(m));
  }
  return out;
}

}  // namespace velm
