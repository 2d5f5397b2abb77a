#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "velm/eval.hpp"
#include "velm/scorer.hpp"

namespace velm {

struct EvalReport {
  RocCurve roc;
  Histogram hist;
  double mean_pathogenic = 0.0;
  double mean_benign = 0.0;
  std::map<std::string, GeneAuc> per_gene;
  std::vector<std::size_t> mauc_levels;
  std::vector<std::optional<MaucRow>> mauc;
  Weighting weighting = Weighting::Total;
  Comparison methods;
};

inline EvalReport build_report(std::span<const ScoredLabel> data, std::span<const ComparisonRow> comparison,
                               std::span<const std::size_t> mauc_levels, Weighting weighting,
                               std::size_t histogram_bins) {
  EvalReport r;
  r.roc = roc_auc(data);
  r.hist = histogram(data, histogram_bins);
  double sum_p = 0.0, sum_b = 0.0;
  for (const auto& d : data) (d.label == ClinicalLabel::Pathogenic ? sum_p : sum_b) += d.score;
  r.mean_pathogenic = sum_p / static_cast<double>(r.roc.n_path);
  r.mean_benign = sum_b / static_cast<double>(r.roc.n_ben);
  r.per_gene = per_gene_auc(data);
  r.mauc_levels.assign(mauc_levels.begin(), mauc_levels.end());
  r.weighting = weighting;
  for (auto n : mauc_levels) {
    try {
      r.mauc.push_back(mean_auc(r.per_gene, n, weighting));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoQualifyingGenes) throw;
      r.mauc.push_back(std::nullopt);
    }
  }
  r.methods = compare_methods(comparison, mauc_levels, weighting);
  return r;
}

namespace detail {

inline nlohmann::json mauc_json(std::size_t n, const std::optional<MaucRow>& row) {
  if (!row) return {{"min_labels", n}, {"mauc", nullptr}, {"genes_included", 0}, {"variants_included", 0}};
  return {{"min_labels", n},
          {"mauc", row->mauc},
          {"genes_included", row->genes_included},
          {"variants_included", row->variants_included}};
}

}  // namespace detail

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  j["aggregate"] = {{"auc", r.roc.auc}, {"n_path", r.roc.n_path}, {"n_ben", r.roc.n_ben}};
  nlohmann::json roc = nlohmann::json::array();
  for (const auto& p : r.roc.points) roc.push_back({p.fpr, p.tpr});
  j["roc"] = std::move(roc);
  j["histogram"] = {{"edges", r.hist.edges},
                    {"pathogenic", r.hist.pathogenic},
                    {"benign", r.hist.benign},
                    {"mean_pathogenic", r.mean_pathogenic},
                    {"mean_benign", r.mean_benign}};
  nlohmann::json mauc = nlohmann::json::array();
  for (std::size_t i = 0; i < r.mauc_levels.size(); ++i) mauc.push_back(detail::mauc_json(r.mauc_levels[i], r.mauc[i]));
  j["mauc"] = std::move(mauc);
  j["weighting"] = to_string(r.weighting);
  nlohmann::json genes = nlohmann::json::object();
  for (const auto& [gene, g] : r.per_gene) {
    genes[gene] = {{"auc", g.auc ? nlohmann::json(*g.auc) : nlohmann::json(nullptr)},
                   {"n_path", g.n_path},
                   {"n_ben", g.n_ben}};
  }
  j["per_gene"] = std::move(genes);
  nlohmann::json methods = nlohmann::json::object();
  for (const auto& m : r.methods.methods) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < r.mauc_levels.size(); ++i) rows.push_back(detail::mauc_json(r.mauc_levels[i], m.mauc[i]));
    methods[m.method] = {{"auc", m.auc}, {"rows", m.rows}, {"n_path", m.n_path}, {"n_ben", m.n_ben}, {"mauc", rows}};
  }
  j["methods"] = std::move(methods);
  j["warnings"] = r.methods.warnings;
  return j;
}

inline void write_roc_csv(std::ostream& out, const RocCurve& roc) {
  out << "fpr,tpr\n";
  for (const auto& p : roc.points) out << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
}

inline void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin_lo,bin_hi,pathogenic,benign\n";
  for (std::size_t b = 0; b < h.pathogenic.size(); ++b) {
    out << format_double(h.edges[b]) << ',' << format_double(h.edges[b + 1]) << ',' << h.pathogenic[b] << ','
        << h.benign[b] << '\n';
  }
}

inline void write_roc_svg(std::ostream& out, const RocCurve& roc) {
  constexpr double size = 400.0, pad = 40.0;
  auto x = [&](double fpr) { return pad + fpr * size; };
  auto y = [&](double tpr) { return pad + (1.0 - tpr) * size; };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" viewBox=\"0 0 480 480\">\n"
      << "<rect x=\"40\" y=\"40\" width=\"400\" height=\"400\" fill=\"none\" stroke=\"#444\"/>\n"
      << "<line x1=\"40\" y1=\"440\" x2=\"440\" y2=\"40\" stroke=\"#bbb\" stroke-dasharray=\"4 4\"/>\n"
      << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" points=\"";
  for (const auto& p : roc.points) out << format_double(x(p.fpr)) << ',' << format_double(y(p.tpr)) << ' ';
  out << "\"/>\n"
      << "<text x=\"240\" y=\"470\" text-anchor=\"middle\" font-size=\"14\">False positive rate</text>\n"
      << "<text x=\"14\" y=\"240\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 14 240)\">"
         "True positive rate</text>\n"
      << "<text x=\"430\" y=\"430\" text-anchor=\"end\" font-size=\"14\">AUC = " << format_double(roc.auc)
      << "</text>\n</svg>\n";
}

inline void write_histogram_svg(std::ostream& out, const Histogram& h) {
  constexpr double width = 600.0, height = 300.0, pad = 40.0;
  std::size_t peak = 1;
  for (std::size_t b = 0; b < h.pathogenic.size(); ++b) peak = std::max({peak, h.pathogenic[b], h.benign[b]});
  const double bar = width / static_cast<double>(h.pathogenic.size());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"680\" height=\"380\" viewBox=\"0 0 680 380\">\n"
      << "<line x1=\"40\" y1=\"340\" x2=\"640\" y2=\"340\" stroke=\"#444\"/>\n";
  for (std::size_t b = 0; b < h.pathogenic.size(); ++b) {
    const double x0 = pad + bar * static_cast<double>(b);
    const double hb = height * static_cast<double>(h.benign[b]) / static_cast<double>(peak);
    const double hp = height * static_cast<double>(h.pathogenic[b]) / static_cast<double>(peak);
    out << "<rect x=\"" << format_double(x0) << "\" y=\"" << format_double(pad + height - hb) << "\" width=\""
        << format_double(bar) << "\" height=\"" << format_double(hb)
        << "\" fill=\"#2e86c1\" fill-opacity=\"0.5\"/>\n";
    out << "<rect x=\"" << format_double(x0) << "\" y=\"" << format_double(pad + height - hp) << "\" width=\""
        << format_double(bar) << "\" height=\"" << format_double(hp)
        << "\" fill=\"#c0392b\" fill-opacity=\"0.5\"/>\n";
  }
  out << "<text x=\"40\" y=\"365\" font-size=\"12\">" << format_double(h.lo) << "</text>\n"
      << "<text x=\"640\" y=\"365\" font-size=\"12\" text-anchor=\"end\">" << format_double(h.hi) << "</text>\n"
      << "<text x=\"340\" y=\"25\" font-size=\"14\" text-anchor=\"middle\">"
         "score (red: pathogenic, blue: benign)</text>\n</svg>\n";
}

}  // namespace velm
