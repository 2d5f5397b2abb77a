#pragma once

// Shared generators for randomized test inputs.

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "velm/eval.hpp"
#include "velm/ingest.hpp"

namespace fixture {

inline std::string random_protein(std::mt19937_64& rng, std::size_t length) {
  static constexpr std::string_view letters = "ACDEFGHIKLMNPQRSTVWY";
  std::uniform_int_distribution<std::size_t> pick(0, 19);
  std::string s;
  for (std::size_t i = 0; i < length; ++i) s.push_back(letters[pick(rng)]);
  return s;
}

/// Wildtypes for a randomized ingest fixture: short genes plus one of length
/// 512 and one of length 513 so the length filter boundary is always present.
inline velm::SequenceMap ingest_sequences(std::mt19937_64& rng) {
  std::vector<velm::ProteinSequence> seqs;
  seqs.push_back(velm::ProteinSequence::from_string("G1", random_protein(rng, 40)));
  seqs.push_back(velm::ProteinSequence::from_string("G2", random_protein(rng, 80)));
  seqs.push_back(velm::ProteinSequence::from_string("L512", random_protein(rng, 512)));
  seqs.push_back(velm::ProteinSequence::from_string("L513", random_protein(rng, 513)));
  return velm::make_sequence_map(std::move(seqs));
}

/// A TSV mixing valid rows with every flavor of bad row. Returns the text and
/// the number of data rows (non-comment, non-blank, after the header).
inline std::pair<std::string, std::size_t> random_labeled_tsv(std::mt19937_64& rng,
                                                              const velm::SequenceMap& seqs, std::size_t rows) {
  static const std::vector<std::string> labels = {"pathogenic", "benign",         "Pathogenic",
                                                  "likely_benign", "likely pathogenic", "uncertain_significance",
                                                  "benign"};
  std::vector<std::string> genes;
  for (const auto& [id, _] : seqs) genes.push_back(id);
  genes.push_back("NOPE");

  std::ostringstream out;
  out << "# randomized fixture\n";
  out << "gene_id\tvariant\tlabel\tstars\textra\n";
  std::uniform_int_distribution<int> kind(0, 11), star(0, 4), letter(0, 19);
  std::uniform_int_distribution<std::size_t> gene_pick(0, genes.size() - 1), label_pick(0, labels.size() - 1);
  std::size_t data_rows = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (kind(rng) == 0) out << "# interleaved comment\n";
    if (kind(rng) == 0) out << "\n";
    const auto& gene = genes[gene_pick(rng)];
    std::string variant;
    const auto it = seqs.find(gene);
    const std::size_t len = it == seqs.end() ? 50 : it->second.length();
    std::uniform_int_distribution<std::size_t> pos(1, len);
    const auto p = pos(rng);
    const char wt = it == seqs.end() ? 'A' : it->second.str()[p - 1];
    char mt = "ACDEFGHIKLMNPQRSTVWY"[letter(rng)];
    if (mt == wt) mt = wt == 'A' ? 'C' : 'A';
    switch (kind(rng)) {
      case 0: variant = "garbage"; break;
      case 1: variant = std::string(1, wt) + std::to_string(len + 5) + mt; break;  // out of range
      case 2: variant = std::string(1, wt == 'W' ? 'Y' : 'W') + std::to_string(p) + mt; break;  // maybe mismatch
      case 3: variant = std::string(1, wt) + std::to_string(p) + "*"; break;
      default: variant = std::string(1, wt) + std::to_string(p) + mt; break;
    }
    std::string stars = std::to_string(star(rng));
    if (kind(rng) == 0) stars = "x";
    out << gene << '\t' << variant << '\t' << labels[label_pick(rng)] << '\t' << stars;
    if (kind(rng) != 0) out << '\t' << "0.5";  // missing field otherwise
    out << '\n';
    ++data_rows;
  }
  return {out.str(), data_rows};
}

/// Random scored labels over `genes` genes. Scores are drawn from a small
/// integer grid when `coarse` is set so that ties are frequent.
inline std::vector<velm::ScoredLabel> random_scored(std::mt19937_64& rng, std::size_t n, std::size_t genes,
                                                   bool coarse) {
  std::uniform_int_distribution<std::size_t> gene(0, genes - 1);
  std::uniform_int_distribution<int> grid(-5, 5);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::bernoulli_distribution pathogenic(0.5);
  std::vector<velm::ScoredLabel> out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool path = pathogenic(rng);
    const double score = coarse ? static_cast<double>(grid(rng) + (path ? 1 : 0)) : noise(rng) + (path ? 0.7 : 0.0);
    out.push_back({"G" + std::to_string(gene(rng)), score,
                   path ? velm::ClinicalLabel::Pathogenic : velm::ClinicalLabel::Benign});
  }
  return out;
}

}  // namespace fixture
