// Train a profile on a toy alignment, then score a few variants of one gene
// and rank them.

#include <iostream>
#include <sstream>

#include "velm/velm.hpp"

int main() {
  std::istringstream corpus_fasta(
      ">a\nMKTAYIAKQR\n>b\nMRTAYIAKQR\n>c\nMRTAYLAKQR\n>d\nMRTGYIAKQR\n>e\nMRTAYIAKER\n");
  const auto corpus = velm::parse_fasta(corpus_fasta);
  const auto profile = velm::train_profile(corpus, 1.0, "toy-profile");

  const auto wildtype = velm::ProteinSequence::from_string("TOY1", "MRTAYIAKQR");
  const auto sequences = velm::make_sequence_map({wildtype});

  std::vector<velm::Variant> variants;
  for (const auto* text : {"R2K", "R2W", "p.Ala4Gly", "I6L;Q9E", "K8P"}) {
    variants.push_back(velm::parse_variant(text, "TOY1"));
  }

  velm::MarginalCache cache;
  const auto outcomes = velm::score_batch(sequences, variants, profile, cache, 2);
  std::vector<velm::VariantScore> scores;
  for (const auto& o : outcomes) scores.push_back(std::get<velm::VariantScore>(o));
  std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) { return a.score > b.score; });

  std::cout << "most to least damaging under the toy profile:\n";
  velm::write_scores_tsv(std::cout, scores);
  return 0;
}
