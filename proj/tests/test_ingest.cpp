#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "velm/ingest.hpp"

using namespace velm;

namespace {

SequenceMap small_map() {
  // G1 has R at 123 and K at 7.
  std::string g1(130, 'A');
  g1[122] = 'R';
  g1[6] = 'K';
  return make_sequence_map({ProteinSequence::from_string("G1", g1),
                            ProteinSequence::from_string("LONG", std::string(600, 'M'))});
}

FilterResult load(const std::string& text, const EvalFilterConfig& config = {}) {
  std::istringstream in(text);
  return load_evaluation_set(in, small_map(), config);
}

const std::string kHeader = "gene_id\tvariant\tlabel\tstars\n";

}  // namespace

TEST(LoadLabeledTsv, Examples) {
  std::istringstream in(kHeader + "G1\tR123C\tpathogenic\t2\n");
  const auto loaded = load_labeled_tsv(in, small_map());
  ASSERT_EQ(loaded.records.size(), 1u);
  const auto& r = loaded.records[0];
  EXPECT_EQ(r.variant, Variant("G1", {{123, AminoAcid::R, AminoAcid::C}}));
  EXPECT_EQ(r.label, ClinicalLabel::Pathogenic);
  EXPECT_EQ(r.stars, 2);
  EXPECT_EQ(r.raw_label, "pathogenic");
  EXPECT_EQ(r.row_number, 2u);

  const auto likely = load(kHeader + "G1\tR123C\tlikely_benign\t2\n");
  ASSERT_EQ(likely.rejections.size(), 1u);
  EXPECT_EQ(likely.rejections[0].reason, RejectionReason::LabelExcluded);

  const auto zero = load(kHeader + "G1\tR123C\tpathogenic\t0\n");
  ASSERT_EQ(zero.rejections.size(), 1u);
  EXPECT_EQ(zero.rejections[0].reason, RejectionReason::StarFilter);
}

TEST(LoadLabeledTsv, IncludeLikelyMapsLabels) {
  const auto res = load(kHeader + "G1\tR123C\tlikely_benign\t2\nG1\tK7A\tLikely pathogenic\t1\n",
                        {.include_likely = true});
  ASSERT_EQ(res.records.size(), 2u);
  EXPECT_EQ(res.records[0].label, ClinicalLabel::Benign);
  EXPECT_EQ(res.records[1].label, ClinicalLabel::Pathogenic);
  EXPECT_EQ(res.summary, (EvalSetSummary{1, 2, 1, 1}));
}

TEST(LoadLabeledTsv, MissingColumnThrows) {
  std::istringstream in("gene_id\tvariant\tlabel\nG1\tR123C\tpathogenic\n");
  try {
    load_labeled_tsv(in, small_map());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingColumn);
  }
  std::istringstream empty("");
  EXPECT_THROW(load_labeled_tsv(empty, small_map()), Error);
}

TEST(LoadLabeledTsv, PerRowFailuresAreLogged) {
  const std::string text = kHeader +
                           "G1\tR123C\tpathogenic\n"             // 2: too few fields
                           "G1\tR123C\tpathogenic\tmany\n"       // 3: bad stars
                           "G1\tR123*\tpathogenic\t1\n"          // 4: stop gain
                           "G9\tR123C\tpathogenic\t1\n"          // 5: unknown gene
                           "G1\tQ123C\tpathogenic\t1\n"          // 6: wildtype mismatch
                           "G1\tR999C\tpathogenic\t1\n"          // 7: out of range
                           "G1\tR123C\tuncertain\t1\n"           // 8: excluded label
                           "G1\tK7A\tbenign\t1\n";               // 9: ok
  const auto res = load(text);
  ASSERT_EQ(res.records.size(), 1u);
  std::vector<std::pair<std::size_t, RejectionReason>> got;
  for (const auto& r : res.rejections) got.emplace_back(r.row_number, r.reason);
  const std::vector<std::pair<std::size_t, RejectionReason>> expected = {
      {2, RejectionReason::MalformedRow}, {3, RejectionReason::MalformedRow}, {4, RejectionReason::ParseError},
      {5, RejectionReason::UnknownGene},  {6, RejectionReason::BindError},    {7, RejectionReason::BindError},
      {8, RejectionReason::LabelExcluded}};
  EXPECT_EQ(got, expected);
}

TEST(LoadLabeledTsv, ConflictingDuplicatesAreBothRejected) {
  const auto res = load(kHeader +
                        "G1\tR123C\tpathogenic\t2\n"
                        "G1\tp.Arg123Cys\tbenign\t2\n"
                        "G1\tK7A\tbenign\t1\n"
                        "G1\tK7A\tbenign\t3\n");
  ASSERT_EQ(res.rejections.size(), 2u);
  EXPECT_EQ(res.rejections[0].reason, RejectionReason::ConflictingLabel);
  EXPECT_EQ(res.rejections[1].reason, RejectionReason::ConflictingLabel);
  // Agreeing duplicates are kept.
  EXPECT_EQ(res.records.size(), 2u);
}

TEST(LoadLabeledTsv, AnnotationsCommentsAndCrlf) {
  std::istringstream in("# comment\r\ngene_id\tvariant\tlabel\tstars\tREVEL\r\n\r\n# more\r\nG1\tR123C\tbenign\t1\t0.42\r\n");
  const auto loaded = load_labeled_tsv(in, small_map());
  EXPECT_EQ(loaded.annotation_columns, std::vector<std::string>{"REVEL"});
  ASSERT_EQ(loaded.records.size(), 1u);
  EXPECT_EQ(loaded.records[0].annotations.at("REVEL"), "0.42");
  EXPECT_EQ(loaded.records[0].row_number, 5u);
  EXPECT_EQ(loaded.rows_read, 1u);
}

TEST(ApplyFilters, Examples) {
  auto res = load(kHeader + "LONG\tM5A\tpathogenic\t3\nLONG\tM9A\tbenign\t3\n");
  EXPECT_TRUE(res.records.empty());
  ASSERT_EQ(res.rejections.size(), 2u);
  EXPECT_EQ(res.rejections[0].reason, RejectionReason::LengthFilter);

  FocusPositions focus;
  for (std::size_t p = 1; p <= 100; ++p) focus["G1"].insert(p);
  res = load(kHeader + "G1\tR123C\tpathogenic\t3\nG1\tK7A\tbenign\t3\n", {.focus_positions = focus});
  ASSERT_EQ(res.records.size(), 1u);
  EXPECT_EQ(res.records[0].variant.positions(), std::vector<std::size_t>{7});
  ASSERT_EQ(res.rejections.size(), 1u);
  EXPECT_EQ(res.rejections[0].reason, RejectionReason::FocusFilter);
}

TEST(ApplyFilters, MultiSubstitutionNeedsEveryPositionInFocus) {
  FocusPositions focus{{"G1", {7}}};
  const auto res = load(kHeader + "G1\tK7A;R123C\tpathogenic\t3\n", {.focus_positions = focus});
  EXPECT_TRUE(res.records.empty());
}

TEST(ApplyFilters, StarAndLengthBoundaries) {
  std::mt19937_64 rng(3);
  const auto seqs = fixture::ingest_sequences(rng);
  const char w512 = seqs.at("L512").str()[0];
  const char w513 = seqs.at("L513").str()[0];
  const char m512 = w512 == 'A' ? 'C' : 'A';
  const char m513 = w513 == 'A' ? 'C' : 'A';
  const std::string text = kHeader + "L512\t" + w512 + "1" + m512 + "\tpathogenic\t0\n" + "L512\t" + w512 + "1" +
                           m512 + "\tpathogenic\t1\n" + "L513\t" + w513 + "1" + m513 + "\tbenign\t4\n";
  std::istringstream in(text);
  const auto res = load_evaluation_set(in, seqs, {});
  ASSERT_EQ(res.records.size(), 1u);
  EXPECT_EQ(res.records[0].row_number, 3u);
  ASSERT_EQ(res.rejections.size(), 2u);
  EXPECT_EQ(res.rejections[0].reason, RejectionReason::StarFilter);
  EXPECT_EQ(res.rejections[1].reason, RejectionReason::LengthFilter);
}

TEST(ApplyFilters, ConfigValidation) {
  EXPECT_THROW(EvalFilterConfig{.min_stars = -1}.validate(), Error);
  EXPECT_THROW(EvalFilterConfig{.max_length = 0}.validate(), Error);
}

TEST(IngestProperties, ConservationAndIdempotence) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const auto seqs = fixture::ingest_sequences(rng);
    const auto [text, rows] = fixture::random_labeled_tsv(rng, seqs, 200);
    std::istringstream in(text);
    const EvalFilterConfig config{.include_likely = trial % 2 == 0};
    const auto res = load_evaluation_set(in, seqs, config);
    EXPECT_EQ(res.records.size() + res.rejections.size(), rows);
    for (const auto& r : res.records) EXPECT_GE(r.stars, 1);
    const auto again = apply_filters(res.records, config, seqs);
    EXPECT_EQ(again.records, res.records);
    EXPECT_TRUE(again.rejections.empty());
    EXPECT_EQ(again.summary, res.summary);
  }
}

TEST(FocusFile, Parse) {
  std::istringstream in("# c\nG1\t1,2, 3\nG2\t10\n");
  const auto focus = parse_focus_file(in);
  EXPECT_EQ(focus.at("G1"), (std::set<std::size_t>{1, 2, 3}));
  EXPECT_EQ(focus.at("G2"), (std::set<std::size_t>{10}));
  std::istringstream bad("G1 1,2\n");
  EXPECT_THROW(parse_focus_file(bad), Error);
  std::istringstream zero("G1\t0\n");
  EXPECT_THROW(parse_focus_file(zero), Error);
}

TEST(RejectionLog, Format) {
  const std::vector<Rejection> rejections = {{4, RejectionReason::StarFilter, "detail", "G1\tR1C\tbenign\t0"}};
  std::ostringstream out;
  write_rejection_log(out, rejections);
  EXPECT_EQ(out.str(), "4\tStarFilter\tG1\tR1C\tbenign\t0\n");
}
