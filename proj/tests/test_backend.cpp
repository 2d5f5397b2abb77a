#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "velm/profile_backend.hpp"

using namespace velm;

namespace {

std::vector<ProteinSequence> corpus_of(const std::vector<std::string>& strings) {
  std::vector<ProteinSequence> out;
  for (std::size_t i = 0; i < strings.size(); ++i) {
    out.push_back(ProteinSequence::from_string("s" + std::to_string(i), strings[i]));
  }
  return out;
}

MaskedQuery query_at(const std::string& seq, std::vector<std::size_t> positions) {
  return MaskedQuery(mask_at(ProteinSequence::from_string("G", seq), positions));
}

/// Returns a fixed distribution for every queried position.
class FixedBackend final : public LikelihoodBackend {
 public:
  explicit FixedBackend(std::array<double, kNumCanonical> lp, std::optional<std::size_t> max_length = {})
      : lp_(lp), max_length_(max_length) {}
  BackendDescriptor descriptor() const override { return {"fixed", BackendKind::Remote, max_length_, "0"}; }
  std::vector<MarginalDistribution> marginals(const MaskedQuery& q) const override {
    std::vector<MarginalDistribution> out;
    for (auto p : q.query_positions()) out.push_back({p, lp_});
    return out;
  }

 private:
  std::array<double, kNumCanonical> lp_;
  std::optional<std::size_t> max_length_;
};

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(ProfileBackend, UniformProfileGivesMinusLog20) {
  const ProfileBackend uniform(std::vector<ProfileBackend::Column>(5, ProfileBackend::Column{}), 1.0);
  const auto out = query_marginals(uniform, query_at("MKTAY", {1, 3, 5}));
  ASSERT_EQ(out.size(), 3u);
  for (const auto& m : out) {
    for (double lp : m.log_probs) EXPECT_NEAR(lp, -2.9957322735539909, 1e-15);
  }
}

TEST(ProfileBackend, CountingOracle) {
  const std::vector<std::string> corpus = {"MKT", "MRT", "MRT", "MRT"};
  const auto backend = train_profile(corpus_of(corpus), 1.0);
  const auto out = query_marginals(backend, query_at("MKT", {2}));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].position, 2u);
  EXPECT_DOUBLE_EQ(std::exp(out[0].log_prob(AminoAcid::R)), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(std::exp(out[0].log_prob(AminoAcid::K)), 1.0 / 12.0);
  EXPECT_DOUBLE_EQ(std::exp(out[0].log_prob(AminoAcid::A)), 1.0 / 24.0);
  for (std::size_t pos = 1; pos <= 3; ++pos) {
    for (char c : std::string(kCanonicalLetters)) {
      EXPECT_EQ(backend.log_prob(pos, *from_char(c)), std::log(oracle::counted_probability(corpus, pos, c, 1.0)));
    }
  }
}

TEST(ProfileBackend, TinyPseudocountConcentratesOnWildtype) {
  const auto backend = train_profile(corpus_of({"MKTW", "MKTW", "MKTW"}), 1e-9);
  for (std::size_t pos = 1; pos <= 4; ++pos) {
    EXPECT_NEAR(std::exp(backend.log_prob(pos, *from_char("MKTW"[pos - 1]))), 1.0, 1e-7);
  }
}

TEST(ProfileBackend, TrainingErrors) {
  EXPECT_EQ(code_of([] { train_profile(corpus_of({"MK", "MKT"})); }), ErrorCode::RaggedCorpus);
  EXPECT_EQ(code_of([] { train_profile({}); }), ErrorCode::EmptyCorpus);
  EXPECT_EQ(code_of([] { train_profile(corpus_of({"MK"}), 0.0); }), ErrorCode::NonPositivePseudocount);
  EXPECT_EQ(code_of([] { train_profile(corpus_of({"MK"}), -1.0); }), ErrorCode::NonPositivePseudocount);
  EXPECT_EQ(code_of([] { train_profile(corpus_of({"MK"}), std::nan("")); }), ErrorCode::NonPositivePseudocount);
}

TEST(ProfileBackend, UnknownResiduesAreNotCounted) {
  std::vector<ProteinSequence> corpus = corpus_of({"MK"});
  corpus.push_back(ProteinSequence::from_string("x", "MX", {.allow_unknown = true}));
  const auto backend = train_profile(corpus, 1.0);
  EXPECT_DOUBLE_EQ(std::exp(backend.log_prob(2, AminoAcid::K)), 2.0 / 21.0);
  EXPECT_DOUBLE_EQ(std::exp(backend.log_prob(1, AminoAcid::M)), 3.0 / 22.0);
}

TEST(ProfileBackend, DescriptorAndLengthBound) {
  const auto backend = train_profile(corpus_of({"MKT"}), 1.0, "p1");
  const auto d = backend.descriptor();
  EXPECT_EQ(d.id, "p1");
  EXPECT_EQ(d.kind, BackendKind::Profile);
  EXPECT_EQ(d.max_length, std::optional<std::size_t>(3));
  EXPECT_EQ(code_of([&] { query_marginals(backend, query_at("MKTA", {1})); }), ErrorCode::SequenceTooLong);
  EXPECT_EQ(code_of([&] { backend.marginals(query_at("MKTA", {1})); }), ErrorCode::SequenceTooLong);
}

TEST(ProfileBackend, DeterministicAndContextFree) {
  std::mt19937_64 rng(8);
  std::vector<std::string> strings;
  for (int i = 0; i < 30; ++i) strings.push_back(fixture::random_protein(rng, 25));
  const auto backend = train_profile(corpus_of(strings), 0.5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = fixture::random_protein(rng, 25);
    auto b = fixture::random_protein(rng, 25);
    std::uniform_int_distribution<std::size_t> pos(1, 25);
    std::vector<std::size_t> m = {pos(rng), pos(rng)};
    const auto first = query_marginals(backend, query_at(a, m));
    const auto repeat = query_marginals(backend, query_at(a, m));
    const auto other_context = query_marginals(backend, query_at(b, m));
    ASSERT_EQ(first.size(), repeat.size());
    for (std::size_t k = 0; k < first.size(); ++k) {
      EXPECT_EQ(first[k].log_probs, repeat[k].log_probs);
      EXPECT_EQ(first[k].log_probs, other_context[k].log_probs);
      EXPECT_TRUE(first[k].is_normalized());
    }
  }
}

TEST(ProfileBackend, SaveLoadIsBitIdentical) {
  std::mt19937_64 rng(9);
  std::vector<std::string> strings;
  for (int i = 0; i < 17; ++i) strings.push_back(fixture::random_protein(rng, 40));
  const auto backend = train_profile(corpus_of(strings), 0.37, "saved");
  std::stringstream buf;
  backend.save(buf);
  const auto loaded = ProfileBackend::load(buf);
  EXPECT_EQ(loaded.descriptor().id, "saved");
  EXPECT_EQ(loaded.alpha(), backend.alpha());
  for (std::size_t p = 1; p <= 40; ++p) {
    for (std::size_t a = 0; a < kNumCanonical; ++a) {
      EXPECT_EQ(loaded.log_prob(p, canonical_at(a)), backend.log_prob(p, canonical_at(a)));
    }
  }
}

TEST(ProfileBackend, LoadRejectsMalformed) {
  for (const std::string text : {"not json", R"({"format":"other"})",
                                 R"({"format":"velm-profile","version":2,"id":"x","alpha":1,"alphabet":"ACDEFGHIKLMNPQRSTVWY","length":0,"counts":[]})",
                                 R"({"format":"velm-profile","version":1,"id":"x","alpha":1,"alphabet":"ACDEFGHIKLMNPQRSTVWY","length":2,"counts":[]})"}) {
    std::istringstream in(text);
    EXPECT_EQ(code_of([&] { ProfileBackend::load(in); }), ErrorCode::MalformedProfile) << text;
  }
}

TEST(QueryMarginals, BoundaryChecks) {
  std::array<double, kNumCanonical> lp;
  lp.fill(std::log(0.8 / 20.0));
  const FixedBackend short_sum(lp);
  EXPECT_EQ(code_of([&] { query_marginals(short_sum, query_at("MKT", {2})); }), ErrorCode::NonNormalizedReply);

  lp.fill(-std::log(20.0));
  const FixedBackend bounded(lp, 3);
  EXPECT_EQ(code_of([&] { query_marginals(bounded, query_at("MKTA", {2})); }), ErrorCode::SequenceTooLong);
  EXPECT_EQ(query_marginals(bounded, query_at("MKT", {2})).size(), 1u);

  lp[0] = std::nan("");
  const FixedBackend nan_backend(lp);
  EXPECT_EQ(code_of([&] { query_marginals(nan_backend, query_at("MKT", {2})); }), ErrorCode::NonNormalizedReply);
}

TEST(MaskedQuery, Invariants) {
  const auto masked = mask_at(ProteinSequence::from_string("G", "MKTA"), {2, 3});
  EXPECT_EQ(code_of([&] { MaskedQuery(masked, {}); }), ErrorCode::EmptyMaskSet);
  EXPECT_EQ(code_of([&] { MaskedQuery(masked, {1}); }), ErrorCode::InvalidArgument);
  const MaskedQuery q(masked, {3, 2, 3});
  EXPECT_EQ(std::vector<std::size_t>(q.query_positions().begin(), q.query_positions().end()),
            (std::vector<std::size_t>{2, 3}));
}
