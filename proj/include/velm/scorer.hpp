#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <shared_mutex>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <variant>
#include <vector>

#include "velm/backend.hpp"
#include "velm/ingest.hpp"
#include "velm/notation.hpp"
#include "velm/sequence.hpp"

namespace velm {

using Marginals = std::vector<MarginalDistribution>;

struct PositionTerm {
  std::size_t position = 0;
  AminoAcid wildtype = AminoAcid::Unknown;
  AminoAcid mutant = AminoAcid::Unknown;
  double log_p_wildtype = 0.0;
  double log_p_mutant = 0.0;

  friend bool operator==(const PositionTerm&, const PositionTerm&) = default;
};

/// Log-odds score of a variant: the sum over mutated positions of
/// log P(wildtype residue) - log P(mutant residue), both read from the
/// marginals with every mutated position masked. Higher means the variant is
/// less likely under the model.
struct VariantScore {
  Variant variant;
  double score = 0.0;
  std::vector<PositionTerm> terms;
  std::string backend_id;
  bool cache_hit = false;
  /// At least one log-probability was raised to the configured floor.
  bool floored = false;

  friend bool operator==(const VariantScore&, const VariantScore&) = default;
};

struct ScorerOptions {
  /// Log-probabilities below this are clamped before subtraction.
  double floor_log_prob = std::log(1e-10);
};

/// Evaluate the score from marginals already fetched for the variant's
/// mutation set. `marginals` must hold one entry per mutated position.
inline VariantScore score_from_marginals(const Variant& variant, std::span<const MarginalDistribution> marginals,
                                         std::string backend_id, bool cache_hit, const ScorerOptions& options = {}) {
  VariantScore out{variant, 0.0, {}, std::move(backend_id), cache_hit, false};
  out.terms.reserve(variant.size());
  for (const auto& s : variant.substitutions()) {
    const auto m = std::find_if(marginals.begin(), marginals.end(),
                                [&](const MarginalDistribution& d) { return d.position == s.position; });
    if (m == marginals.end()) {
      throw Error(ErrorCode::ProtocolError, "no marginal for position " + std::to_string(s.position));
    }
    PositionTerm term{s.position, s.wildtype, s.mutant, m->log_prob(s.wildtype), m->log_prob(s.mutant)};
    for (double* lp : {&term.log_p_wildtype, &term.log_p_mutant}) {
      if (!(*lp >= options.floor_log_prob)) {
        *lp = options.floor_log_prob;
        out.floored = true;
      }
    }
    out.score += term.log_p_wildtype - term.log_p_mutant;
    out.terms.push_back(term);
  }
  return out;
}

struct CacheKey {
  std::string gene_id;
  std::vector<std::size_t> positions;

  friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

struct CacheKeyHash {
  std::size_t operator()(const CacheKey& key) const noexcept {
    std::size_t h = std::hash<std::string>{}(key.gene_id);
    for (auto p : key.positions) h ^= std::hash<std::size_t>{}(p) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

/// Marginals keyed by (gene, mutation set). All variants touching the same
/// positions of a gene see the same masked context, so they share an entry.
///
/// Lookups take a shared lock and stamp the entry's recency atomically;
/// inserts take an exclusive lock, keep the first value written for a key,
/// and evict the least recently used entry when full. A capacity of 0
/// disables caching.
class MarginalCache {
 public:
  explicit MarginalCache(std::size_t capacity = 4096) : capacity_(capacity) {}

  MarginalCache(const MarginalCache&) = delete;
  MarginalCache& operator=(const MarginalCache&) = delete;

  std::shared_ptr<const Marginals> find(const CacheKey& key) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      misses_.fetch_add(1, std::memory_order_relaxed);
      return nullptr;
    }
    hits_.fetch_add(1, std::memory_order_relaxed);
    it->second.stamp.store(clock_.fetch_add(1, std::memory_order_relaxed), std::memory_order_relaxed);
    return it->second.value;
  }

  /// Returns the stored value, which is the earlier one if `key` was present.
  std::shared_ptr<const Marginals> insert(const CacheKey& key, Marginals value) {
    auto fresh = std::make_shared<const Marginals>(std::move(value));
    if (capacity_ == 0) return fresh;
    std::unique_lock lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second.value;
    if (entries_.size() >= capacity_) evict_one();
    auto [it, inserted] = entries_.try_emplace(key);
    it->second.value = fresh;
    it->second.stamp.store(clock_.fetch_add(1, std::memory_order_relaxed), std::memory_order_relaxed);
    return fresh;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
  }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t hits() const noexcept { return hits_.load(); }
  std::size_t misses() const noexcept { return misses_.load(); }

 private:
  struct Entry {
    std::shared_ptr<const Marginals> value;
    mutable std::atomic<std::uint64_t> stamp{0};
  };

  void evict_one() {
    auto victim = std::min_element(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
      return a.second.stamp.load(std::memory_order_relaxed) < b.second.stamp.load(std::memory_order_relaxed);
    });
    if (victim != entries_.end()) entries_.erase(victim);
  }

  std::size_t capacity_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<CacheKey, Entry, CacheKeyHash> entries_;
  mutable std::atomic<std::uint64_t> clock_{1};
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
};

namespace detail {

inline Marginals fetch_marginals(const ProteinSequence& wildtype, const std::vector<std::size_t>& positions,
                                 const LikelihoodBackend& backend, std::mutex* gate) {
  MaskedQuery query(mask_at(wildtype, positions));
  if (gate) {
    std::lock_guard lock(*gate);
    return query_marginals(backend, query);
  }
  return query_marginals(backend, query);
}

}  // namespace detail

inline VariantScore score_variant(const ProteinSequence& wildtype, const Variant& variant,
                                  const LikelihoodBackend& backend, MarginalCache& cache,
                                  const ScorerOptions& options = {}) {
  bind_variant(wildtype, variant);
  CacheKey key{variant.gene_id(), variant.positions()};
  const auto backend_id = backend.descriptor().id;
  if (auto hit = cache.find(key)) return score_from_marginals(variant, *hit, backend_id, true, options);
  auto stored = cache.insert(key, detail::fetch_marginals(wildtype, key.positions, backend, nullptr));
  return score_from_marginals(variant, *stored, backend_id, false, options);
}

using ScoreOutcome = std::variant<VariantScore, Error>;

struct BatchStats {
  std::size_t distinct_keys = 0;
  std::size_t backend_queries = 0;
};

/// Score many variants. Variants sharing (gene, mutation set) are coalesced
/// into one backend query, and distinct queries run on up to `parallelism`
/// threads. Output order follows input order and does not depend on
/// `parallelism`. Failures are reported per item.
inline std::vector<ScoreOutcome> score_batch(const SequenceMap& wildtypes, std::span<const Variant> variants,
                                             const LikelihoodBackend& backend, MarginalCache& cache,
                                             std::size_t parallelism = 1, const ScorerOptions& options = {},
                                             BatchStats* stats = nullptr) {
  if (parallelism == 0) throw Error(ErrorCode::InvalidArgument, "parallelism must be positive");
  std::vector<std::optional<ScoreOutcome>> results(variants.size());
  std::vector<const ProteinSequence*> sequence_of(variants.size(), nullptr);

  struct Group {
    CacheKey key;
    const ProteinSequence* wildtype;
    std::vector<std::size_t> members;
  };
  std::vector<Group> groups;
  std::unordered_map<CacheKey, std::size_t, CacheKeyHash> group_index;

  for (std::size_t i = 0; i < variants.size(); ++i) {
    const auto& v = variants[i];
    const auto seq = wildtypes.find(v.gene_id());
    if (seq == wildtypes.end()) {
      results[i] = Error(ErrorCode::UnknownGene, "no wildtype sequence for '" + v.gene_id() + "'");
      continue;
    }
    try {
      bind_variant(seq->second, v);
    } catch (const Error& e) {
      results[i] = e;
      continue;
    }
    CacheKey key{v.gene_id(), v.positions()};
    auto [it, inserted] = group_index.try_emplace(key, groups.size());
    if (inserted) groups.push_back({std::move(key), &seq->second, {}});
    groups[it->second].members.push_back(i);
  }

  std::string backend_id;
  try {
    backend_id = backend.descriptor().id;
  } catch (const Error& e) {
    for (const auto& g : groups) {
      for (auto i : g.members) results[i] = e;
    }
    groups.clear();
  }

  std::mutex gate;
  std::mutex* gate_ptr = backend.single_flight() ? &gate : nullptr;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> queries{0};

  auto work = [&] {
    for (std::size_t g = next.fetch_add(1); g < groups.size(); g = next.fetch_add(1)) {
      const auto& group = groups[g];
      std::shared_ptr<const Marginals> marginals = cache.find(group.key);
      bool first_from_backend = false;
      if (!marginals) {
        try {
          marginals = cache.insert(group.key,
                                   detail::fetch_marginals(*group.wildtype, group.key.positions, backend, gate_ptr));
          queries.fetch_add(1);
          first_from_backend = true;
        } catch (const Error& e) {
          for (auto i : group.members) results[i] = e;
          continue;
        }
      }
      for (std::size_t k = 0; k < group.members.size(); ++k) {
        const auto i = group.members[k];
        try {
          results[i] = score_from_marginals(variants[i], *marginals, backend_id, !(first_from_backend && k == 0),
                                            options);
        } catch (const Error& e) {
          results[i] = e;
        }
      }
    }
  };

  const auto threads = std::min(parallelism, groups.size());
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  if (stats) {
    stats->distinct_keys = groups.size();
    stats->backend_queries = queries.load();
  }
  std::vector<ScoreOutcome> out;
  out.reserve(results.size());
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

/// Shortest decimal text that parses back to exactly `value`.
inline std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

/// Score TSV: `gene_id<TAB>variant<TAB>score<TAB>backend_id<TAB>cache_hit`,
/// variant in canonical short notation, score unrounded.
inline void write_scores_tsv(std::ostream& out, std::span<const VariantScore> scores) {
  out << "gene_id\tvariant\tscore\tbackend_id\tcache_hit\n";
  for (const auto& s : scores) {
    out << s.variant.gene_id() << '\t' << format_variant(s.variant) << '\t' << format_double(s.score) << '\t'
        << s.backend_id << '\t' << (s.cache_hit ? "true" : "false") << '\n';
  }
}

}  // namespace velm
