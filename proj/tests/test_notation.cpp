#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "velm/notation.hpp"

using namespace velm;

namespace {

std::vector<ProteinSequence> fasta(const std::string& text, SequenceOptions options = {}) {
  std::istringstream in(text);
  return parse_fasta(in, options);
}

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

TEST(ParseFasta, Examples) {
  auto one = fasta(">G1\nMKT\n");
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].gene_id(), "G1");
  EXPECT_EQ(one[0].str(), "MKT");

  auto multi = fasta(">G1\nMK\nT\n");
  ASSERT_EQ(multi.size(), 1u);
  EXPECT_EQ(multi[0].str(), "MKT");

  try {
    fasta(">G1\nMK1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidResidue);
    EXPECT_NE(std::string(e.what()).find("line 2, column 3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("'1'"), std::string::npos);
  }
}

TEST(ParseFasta, HeadersLineEndingsAndDuplicates) {
  auto recs = fasta(">G1 some description\r\nMK\r\n\r\nT\r\n>G2\tdesc\nAC\n");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].gene_id(), "G1");
  EXPECT_EQ(recs[0].str(), "MKT");
  EXPECT_EQ(recs[1].gene_id(), "G2");
  EXPECT_EQ(code_of([] { fasta(">G1\nMK\n>G1\nAA\n"); }), ErrorCode::DuplicateGeneId);
  EXPECT_EQ(code_of([] { fasta(">\nMK\n"); }), ErrorCode::MalformedHeader);
  EXPECT_EQ(code_of([] { fasta("MK\n>G1\nAA\n"); }), ErrorCode::MalformedHeader);
  EXPECT_EQ(code_of([] { fasta(">G1\n>G2\nAA\n"); }), ErrorCode::EmptySequence);
}

TEST(ParseFasta, LongLinesAndLowercase) {
  const std::string body(100000, 'a');
  auto recs = fasta(">G\n" + body + "\n");
  EXPECT_EQ(recs[0].length(), 100000u);
  EXPECT_EQ(recs[0].str()[0], 'A');
}

TEST(ParseFasta, NonCanonicalResidues) {
  EXPECT_EQ(code_of([] { fasta(">G\nMBZ\n"); }), ErrorCode::InvalidResidue);
  EXPECT_EQ(code_of([] { fasta(">G\nMXK\n"); }), ErrorCode::InvalidResidue);
  EXPECT_EQ(fasta(">G\nMBZUOJX\n", {.allow_unknown = true})[0].str(), "MXXXXXX");
}

TEST(ParseVariant, Examples) {
  const Variant expected("G1", {{123, AminoAcid::R, AminoAcid::C}});
  EXPECT_EQ(parse_variant("R123C", "G1"), expected);
  EXPECT_EQ(parse_variant("p.Arg123Cys", "G1"), expected);
  const auto two = parse_variant("R123C;K7A", "G1");
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two.substitutions()[0], (Substitution{7, AminoAcid::K, AminoAcid::A}));
  EXPECT_EQ(two.substitutions()[1], (Substitution{123, AminoAcid::R, AminoAcid::C}));
}

TEST(ParseVariant, CaseAndSpacingAreNormalized) {
  const Variant expected("G1", {{123, AminoAcid::R, AminoAcid::C}});
  EXPECT_EQ(parse_variant(" r123c ", "G1"), expected);
  EXPECT_EQ(parse_variant("p.ARG123CYS", "G1"), expected);
  EXPECT_EQ(parse_variant("p.(Arg123Cys)", "G1"), expected);
  EXPECT_EQ(parse_variant("R0123C", "G1"), expected);
  EXPECT_EQ(format_variant(parse_variant("p.arg123cys", "G1"), NotationStyle::Hgvs), "p.Arg123Cys");
  EXPECT_EQ(parse_variant("p.Arg123Cys; K7A", "G1").size(), 2u);
}

TEST(ParseVariant, TypedErrors) {
  EXPECT_EQ(code_of([] { parse_variant("R123R", "G"); }), ErrorCode::SynonymousVariant);
  EXPECT_EQ(code_of([] { parse_variant("p.Arg123Arg", "G"); }), ErrorCode::SynonymousVariant);
  EXPECT_EQ(code_of([] { parse_variant("R123*", "G"); }), ErrorCode::StopGainNotation);
  EXPECT_EQ(code_of([] { parse_variant("p.Arg123Ter", "G"); }), ErrorCode::StopGainNotation);
  EXPECT_EQ(code_of([] { parse_variant("p.Arg123*", "G"); }), ErrorCode::StopGainNotation);
  EXPECT_EQ(code_of([] { parse_variant("p.Arg123fs", "G"); }), ErrorCode::FrameshiftNotation);
  EXPECT_EQ(code_of([] { parse_variant("p.Arg123GlyfsTer5", "G"); }), ErrorCode::FrameshiftNotation);
  EXPECT_EQ(code_of([] { parse_variant("p.Arg123del", "G"); }), ErrorCode::IndelNotation);
  EXPECT_EQ(code_of([] { parse_variant("p.Arg123_Lys124insGly", "G"); }), ErrorCode::IndelNotation);
  EXPECT_EQ(code_of([] { parse_variant("p.Xyz123Cys", "G"); }), ErrorCode::UnknownResidueName);
  EXPECT_EQ(code_of([] { parse_variant("B123C", "G"); }), ErrorCode::UnknownResidueName);
  EXPECT_EQ(code_of([] { parse_variant("", "G"); }), ErrorCode::UnrecognizedNotation);
  EXPECT_EQ(code_of([] { parse_variant("R0C", "G"); }), ErrorCode::UnrecognizedNotation);
  EXPECT_EQ(code_of([] { parse_variant("RC", "G"); }), ErrorCode::UnrecognizedNotation);
  EXPECT_EQ(code_of([] { parse_variant("R12x3C", "G"); }), ErrorCode::UnrecognizedNotation);
  EXPECT_EQ(code_of([] { parse_variant("c.123A>G", "G"); }), ErrorCode::UnrecognizedNotation);
  EXPECT_EQ(code_of([] { parse_variant("R123C;", "G"); }), ErrorCode::UnrecognizedNotation);
  EXPECT_EQ(code_of([] { parse_variant("R123C;K123A", "G"); }), ErrorCode::DuplicatePosition);
  EXPECT_EQ(code_of([] { parse_variant("R99999999999999999999999C", "G"); }), ErrorCode::UnrecognizedNotation);
}

TEST(ParseVariant, IsTotalOnRandomStrings) {
  // Every input either parses or throws a typed Error; nothing else escapes.
  std::mt19937_64 rng(5);
  const std::string alphabet = "ACDEFGHIKLMNPQRSTVWYacgtp.;*()_0123456789 XBfsdelinsTerArgCys";
  std::uniform_int_distribution<std::size_t> len(0, 14), pick(0, alphabet.size() - 1);
  for (int i = 0; i < 20000; ++i) {
    std::string s;
    for (auto n = len(rng); n > 0; --n) s.push_back(alphabet[pick(rng)]);
    try {
      const auto v = parse_variant(s, "G");
      EXPECT_EQ(parse_variant(format_variant(v), "G"), v);
    } catch (const Error&) {
    }
  }
}

TEST(FormatVariant, RoundTripProperty) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> pos(1, 5000), letter(0, 19), count(1, 4);
  for (int i = 0; i < 2000; ++i) {
    std::vector<Substitution> subs;
    std::set<std::size_t> used;
    for (auto n = count(rng); n > 0; --n) {
      auto p = pos(rng);
      if (!used.insert(p).second) continue;
      auto wt = letter(rng), mt = letter(rng);
      if (wt == mt) mt = (mt + 1) % 20;
      subs.push_back({p, canonical_at(wt), canonical_at(mt)});
    }
    const Variant v("G", subs);
    for (auto style : {NotationStyle::Short, NotationStyle::Hgvs}) {
      EXPECT_EQ(parse_variant(format_variant(v, style), "G"), v);
    }
  }
}
