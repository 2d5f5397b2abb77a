// velm: score protein variants with masked-marginal log-odds and evaluate
// them against clinical labels.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "velm/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Masked-marginal variant effect scoring and evaluation"};
  app.set_version_flag("--version", velm::kVersionString);
  app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  velm::RunConfig config;
  std::string weighting = "total";

  app.add_option("--backend", config.backend, "profile:<path> or remote:<url>")->envname("VELM_BACKEND");
  app.add_option("--min-stars", config.min_stars, "minimum review stars")->capture_default_str();
  app.add_option("--max-length", config.max_length, "maximum wildtype length")->capture_default_str();
  app.add_option("--focus", config.focus_path, "focus-position sidecar (gene_id<TAB>pos,pos,...)");
  app.add_flag("--include-likely", config.include_likely, "admit likely_pathogenic / likely_benign labels");
  app.add_flag("--allow-unknown", config.allow_unknown, "accept X (and map B/Z/U/O/J to X) in sequences");
  app.add_option("--parallelism", config.parallelism, "concurrent backend queries")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--cache-capacity", config.cache_capacity, "marginal cache entries")->capture_default_str();
  app.add_option("--out", config.out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", config.seed, "random seed for synthetic data")->capture_default_str();
  app.add_option("--weighting", weighting, "mAUC gene weight")
      ->check(CLI::IsMember({"total", "min_class", "uniform"}))
      ->capture_default_str();
  app.add_option("--mauc-levels", config.mauc_levels, "minimum labels per class for each mAUC row")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--histogram-bins", config.histogram_bins, "score histogram bins")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--timeout", config.timeout_seconds, "remote backend timeout in seconds")->capture_default_str();

  std::string fasta, variants, labels, corpus, profile_out, profile_id = "profile";
  double alpha = 1.0;
  velm::SyntheticConfig synth;

  auto* score = app.add_subcommand("score", "score variants against wildtype sequences");
  score->add_option("--fasta", fasta, "wildtype FASTA")->required();
  score->add_option("--variants", variants, "TSV with gene_id and variant columns")->required();

  auto* evaluate = app.add_subcommand("evaluate", "score a labeled variant set and write an evaluation report");
  evaluate->add_option("--fasta", fasta, "wildtype FASTA")->required();
  evaluate->add_option("--labels", labels, "labeled TSV (gene_id, variant, label, stars, ...)")->required();

  auto* train = app.add_subcommand("train-profile", "train a profile backend from an aligned corpus");
  train->add_option("--corpus", corpus, "equal-length corpus FASTA")->required();
  train->add_option("--alpha", alpha, "pseudocount")->capture_default_str();
  train->add_option("--output,-o", profile_out, "profile JSON to write")->required();
  train->add_option("--id", profile_id, "backend id recorded in the profile")->capture_default_str();

  auto* synthetic = app.add_subcommand("synth", "write a synthetic evaluation fixture into --out");
  synthetic->add_option("--length", synth.length, "sequence length")->capture_default_str();
  synthetic->add_option("--corpus-size", synth.corpus_size, "corpus sequences")->capture_default_str();
  synthetic->add_option("--genes", synth.genes, "genes")->capture_default_str();
  synthetic->add_option("--per-class", synth.variants_per_class, "variants per class per gene")
      ->capture_default_str();
  synthetic->add_option("--alpha", alpha, "profile pseudocount")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return velm::kExitInput;
  }

  velm::CommandResult result;
  try {
    config.weighting = velm::parse_weighting(weighting);
    if ((*score || *evaluate) && config.backend.empty()) {
      std::cerr << "error: no backend (use --backend or VELM_BACKEND)\n";
      return velm::kExitInput;
    }
    if (*score) result = velm::cmd_score(config, fasta, variants);
    if (*evaluate) result = velm::cmd_evaluate(config, fasta, labels);
    if (*train) result = velm::cmd_train_profile(corpus, alpha, profile_out, profile_id, config.allow_unknown);
    if (*synthetic) result = velm::cmd_synth(config, synth, alpha);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return velm::kExitInternal;
  }
  (result.exit_code == velm::kExitSuccess ? std::cout : std::cerr) << result.message << '\n';
  return result.exit_code;
}
