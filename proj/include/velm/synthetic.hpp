#pragma once

// Synthetic evaluation fixtures.
//
// A hidden per-position residue distribution generates an aligned corpus. A
// profile trained on that corpus then defines which substitutions are
// "benign" (mutant among the `candidates` most probable residues other than
// the wildtype) and which are "pathogenic" (among the `candidates` least
// probable). Each labeled variant picks a gene uniformly by construction
// (equal count per gene), a position uniformly and a mutant uniformly from
// its candidate set. Probability ties are broken by residue order.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "velm/notation.hpp"
#include "velm/profile_backend.hpp"
#include "velm/sequence.hpp"

namespace velm {

struct SyntheticConfig {
  std::uint64_t seed = 1;
  std::size_t length = 60;
  std::size_t corpus_size = 200;
  std::size_t genes = 8;
  std::size_t variants_per_class = 150;  // per gene
  std::size_t candidates = 3;
  double dominant_mass = 0.7;
  double secondary_mass = 0.25;  // shared by three secondary residues
};

inline std::vector<ProteinSequence> synthetic_corpus(const SyntheticConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::vector<std::discrete_distribution<std::size_t>> columns;
  for (std::size_t i = 0; i < config.length; ++i) {
    std::vector<std::size_t> order(kNumCanonical);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<double> weights(kNumCanonical, (1.0 - config.dominant_mass - config.secondary_mass) / 16.0);
    weights[order[0]] = config.dominant_mass;
    for (std::size_t k = 1; k <= 3; ++k) weights[order[k]] = config.secondary_mass / 3.0;
    columns.emplace_back(weights.begin(), weights.end());
  }
  std::vector<ProteinSequence> corpus;
  corpus.reserve(config.corpus_size);
  for (std::size_t n = 0; n < config.corpus_size; ++n) {
    std::vector<AminoAcid> residues;
    residues.reserve(config.length);
    for (auto& column : columns) residues.push_back(canonical_at(column(rng)));
    corpus.emplace_back("seq" + std::to_string(n + 1), std::move(residues));
  }
  return corpus;
}

/// Gene wildtypes `GENE1..GENEn`, taken from the first corpus members.
inline std::vector<ProteinSequence> synthetic_wildtypes(std::span<const ProteinSequence> corpus,
                                                        const SyntheticConfig& config) {
  std::vector<ProteinSequence> out;
  for (std::size_t g = 0; g < config.genes && g < corpus.size(); ++g) {
    out.emplace_back("GENE" + std::to_string(g + 1),
                     std::vector<AminoAcid>(corpus[g].residues().begin(), corpus[g].residues().end()));
  }
  return out;
}

/// The `count` most (or least) probable residues at `position`, excluding
/// `wildtype`, ties broken by residue order.
inline std::vector<AminoAcid> candidate_residues(const ProfileBackend& profile, std::size_t position,
                                                 AminoAcid wildtype, bool most_probable, std::size_t count) {
  std::vector<AminoAcid> pool;
  for (std::size_t a = 0; a < kNumCanonical; ++a) {
    if (canonical_at(a) != wildtype) pool.push_back(canonical_at(a));
  }
  std::stable_sort(pool.begin(), pool.end(), [&](AminoAcid x, AminoAcid y) {
    const double px = profile.log_prob(position, x), py = profile.log_prob(position, y);
    return most_probable ? px > py : px < py;
  });
  pool.resize(std::min(count, pool.size()));
  return pool;
}

/// Labeled TSV with an extra `null_method` column of uniform noise, so the
/// comparison path always has an uninformative baseline.
inline std::string synthetic_labels_tsv(const ProfileBackend& profile, std::span<const ProteinSequence> wildtypes,
                                        const SyntheticConfig& config) {
  std::mt19937_64 rng(config.seed ^ 0x5eedULL);
  std::uniform_int_distribution<int> stars(1, 4);
  std::uniform_real_distribution<double> noise(0.0, 1.0);
  std::ostringstream out;
  out << "gene_id\tvariant\tlabel\tstars\tnull_method\n";
  for (const auto& wt : wildtypes) {
    std::uniform_int_distribution<std::size_t> pick_position(1, wt.length());
    for (const bool benign : {true, false}) {
      for (std::size_t n = 0; n < config.variants_per_class; ++n) {
        const auto pos = pick_position(rng);
        const auto wt_residue = wt.at(pos);
        const auto pool = candidate_residues(profile, pos, wt_residue, benign, config.candidates);
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        const Variant v(wt.gene_id(), {{pos, wt_residue, pool[pick(rng)]}});
        out << wt.gene_id() << '\t' << format_variant(v) << '\t' << (benign ? "benign" : "pathogenic") << '\t'
            << stars(rng) << '\t' << noise(rng) << '\n';
      }
    }
  }
  return out.str();
}

inline void write_fasta(std::ostream& out, std::span<const ProteinSequence> sequences) {
  for (const auto& s : sequences) {
    out << '>' << s.gene_id() << '\n';
    const auto text = s.str();
    for (std::size_t i = 0; i < text.size(); i += 60) out << text.substr(i, 60) << '\n';
  }
}

}  // namespace velm
