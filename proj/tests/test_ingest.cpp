#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "teamportrait/ingest.hpp"

using namespace teamportrait;

namespace {

PublicationRecord paper(std::string id, std::vector<std::string> names, RecordKind kind = RecordKind::journal_paper) {
  PublicationRecord r;
  r.id = std::move(id);
  r.kind = kind;
  r.title = "Title of " + r.id;
  for (auto& n : names) r.authors.push_back({n, std::nullopt, std::nullopt});
  return r;
}

}  // namespace

TEST(ParseJsonLines, ReadsStringAndObjectAuthors) {
  const char* in =
      R"({"id":"a","kind":"journal_paper","title":"T","authors":["X Y",{"name":"Z","affiliation":"U"}],"year":2020})"
      "\n\n"
      R"({"id":"b","kind":"thesis","title":"T2","authors":["S"],"supervisor":"Prof P","gold_keywords":["k1","k2"]})";
  auto rs = parse_records(in, InputFormat::json_lines);
  ASSERT_EQ(rs.size(), 2u);
  EXPECT_EQ(rs[0].authors[1].affiliation, "U");
  EXPECT_EQ(rs[0].year, 2020);
  EXPECT_EQ(rs[1].supervisor->raw_name, "Prof P");
  EXPECT_EQ(rs[1].gold_keywords->size(), 2u);
}

TEST(ParseJsonLines, ReportsLineOfBadRecord) {
  const char* in =
      R"({"id":"a","kind":"journal_paper","title":"T","authors":["A","B"]})"
      "\n"
      R"({"id":"b","kind":"novel","title":"T","authors":["A","B"]})";
  try {
    parse_records(in, InputFormat::json_lines);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("novel"), std::string::npos);
  }
}

TEST(ParseJsonLines, RejectsMalformedInput) {
  EXPECT_THROW(parse_records("{not json}", InputFormat::json_lines), ParseError);
  EXPECT_THROW(parse_records(R"({"id":"a","kind":"journal_paper","authors":[]})", InputFormat::json_lines), ParseError);
  EXPECT_THROW(parse_records(R"({"id":"a","kind":"journal_paper","title":"t","authors":[],"citation_count":-1})",
                             InputFormat::json_lines),
               ParseError);
  EXPECT_THROW(parse_records(R"({"id":"a","kind":"thesis","title":"t","authors":["a","b"]})", InputFormat::json_lines),
               ParseError);
  EXPECT_THROW(parse_records(R"({"id":"a","kind":"patent","title":"t","authors":["a","b"],"supervisor":"c"})",
                             InputFormat::json_lines),
               ParseError);
  EXPECT_THROW(parse_records(R"({"id":"a","kind":"patent","title":"t","authors":["a"],"year":"x"})",
                             InputFormat::json_lines),
               ParseError);
}

TEST(ParseJsonLines, RejectsDuplicateIds) {
  const char* in =
      R"({"id":"a","kind":"patent","title":"t","authors":["a","b"]})"
      "\n"
      R"({"id":"a","kind":"patent","title":"u","authors":["a","b"]})";
  EXPECT_THROW(parse_records(in, InputFormat::json_lines), ParseError);
}

TEST(ParseCsv, QuotedCellsAndAuthorDelimiter) {
  const char* in =
      "id,kind,title,authors,affiliations,citation_count,abstract,gold_keywords\n"
      "p1,conference_paper,\"Graphs, again\",Alice A; Bob B,U1;U2,4,\"multi\nline\",graph;network\n"
      "p2,patent,Widget,Carol;Dan,,,,\n";
  auto rs = parse_records(in, InputFormat::csv);
  ASSERT_EQ(rs.size(), 2u);
  EXPECT_EQ(rs[0].title, "Graphs, again");
  ASSERT_EQ(rs[0].authors.size(), 2u);
  EXPECT_EQ(rs[0].authors[1].raw_name, "Bob B");
  EXPECT_EQ(rs[0].authors[1].affiliation, "U2");
  EXPECT_EQ(rs[0].citation_count, 4);
  EXPECT_EQ(rs[0].abstract, "multi\nline");
  EXPECT_EQ(*rs[0].gold_keywords, (std::vector<std::string>{"graph", "network"}));
  EXPECT_FALSE(rs[1].citation_count.has_value());
}

TEST(ParseCsv, CustomDelimiter) {
  auto rs = parse_records("id,kind,title,authors\np,patent,T,A|B|C\n", InputFormat::csv, {"|"});
  EXPECT_EQ(rs[0].authors.size(), 3u);
}

TEST(ParseCsv, ErrorsCarryLineNumbers) {
  try {
    parse_records("id,kind,title,authors\np,patent,T,A;B\nq,patent,T\n", InputFormat::csv);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_records("id,title,authors\np,T,A\n", InputFormat::csv), ParseError);
  EXPECT_THROW(parse_records("id,kind,title,authors,year\np,patent,T,A;B,20x0\n", InputFormat::csv), ParseError);
  EXPECT_THROW(parse_records("id,kind,title,authors\n\"p,patent,T,A\n", InputFormat::csv), ParseError);
}

TEST(Clean, DropsSingleAndNoAuthorRecordsButKeepsTheses) {
  std::vector<PublicationRecord> in{paper("a", {"x", "y"}), paper("b", {"x"}), paper("c", {}),
                                    paper("d", {"x"}, RecordKind::thesis), paper("e", {"x"}, RecordKind::monograph)};
  auto r = clean_records(in);
  ASSERT_EQ(r.kept.size(), 2u);
  EXPECT_EQ(r.kept[0].id, "a");
  EXPECT_EQ(r.kept[1].id, "d");
  ASSERT_EQ(r.dropped.size(), 3u);
  EXPECT_EQ(r.dropped[0].reason, "single-author");
  EXPECT_EQ(r.dropped[1].reason, "no-author");
  auto report = drop_report(r.dropped);
  EXPECT_EQ(report[2]["record_id"], "e");
}

TEST(Clean, PropertyKeptRecordsHaveAtLeastTwoAuthorsUnlessThesis) {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PublicationRecord> in;
    const std::size_t n = rng.below(12);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> names;
      const std::size_t k = rng.below(4);
      for (std::size_t j = 0; j < k; ++j) names.push_back("a" + std::to_string(rng.below(5)));
      auto kind = static_cast<RecordKind>(rng.below(5));
      if (kind == RecordKind::thesis) names.resize(1, "solo");
      in.push_back(paper("r" + std::to_string(i), names, kind));
    }
    auto r = clean_records(in);
    EXPECT_EQ(r.kept.size() + r.dropped.size(), in.size());
    for (const auto& k : r.kept) {
      EXPECT_TRUE(k.kind == RecordKind::thesis || k.authors.size() >= 2) << k.id;
    }
  }
}

TEST(Canonicalize, NormalizesAndAppliesAliases) {
  std::vector<PublicationRecord> in{paper("a", {"  Zhang   WEI ", "Li Na"}), paper("b", {"W. Zhang", "li  na"})};
  auto out = canonicalize_authors(in, {{"W. Zhang", "zhang wei"}});
  EXPECT_EQ(out[0].authors[0].id->canonical, "zhang wei");
  EXPECT_EQ(out[1].authors[0].id->canonical, "zhang wei");
  EXPECT_EQ(out[1].authors[1].id->canonical, "li na");
}

TEST(Canonicalize, ResolvesChainsAndRejectsBadMaps) {
  auto r = resolve_aliases({{"a", "b"}, {"b", "c"}, {"C", "d"}});
  EXPECT_EQ(r.at("a"), "d");
  EXPECT_EQ(r.at("b"), "d");
  EXPECT_THROW(resolve_aliases({{"a", "b"}, {"b", "a"}}), ConfigError);
  EXPECT_THROW(resolve_aliases({{"a", " "}}), ConfigError);
  EXPECT_THROW(resolve_aliases({{"A", "b"}, {"a", "c"}}), ConfigError);
  EXPECT_THROW(alias_map_from_json(json::array()), ConfigError);
}

TEST(Canonicalize, AffiliationDiscriminatorSplitsNamesakes) {
  auto r = paper("a", {"Wang Lei", "Wang Lei"});
  r.authors[0].affiliation = "Univ A";
  r.authors[1].affiliation = "Univ B";
  auto merged = canonicalize_authors({r}, {});
  EXPECT_EQ(merged[0].author_ids().size(), 1u);
  auto split = canonicalize_authors({r}, {}, {true});
  EXPECT_EQ(split[0].author_ids().size(), 2u);
  EXPECT_EQ(split[0].authors[0].id->canonical, "wang lei @ univ a");
}

TEST(Canonicalize, PropertyIdempotent) {
  oracle::Rng rng(5);
  const char* pool[] = {"Ann  Lee", "ann lee", "BOB", " bob ", "Cy D", "cy d", "Eve"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<PublicationRecord> in;
    for (int i = 0; i < 5; ++i) in.push_back(paper(std::to_string(i), {pool[rng.below(7)], pool[rng.below(7)]}));
    AliasMap aliases{{"bob", "robert"}, {"eve", "eva"}};
    auto once = canonicalize_authors(in, aliases);
    std::vector<PublicationRecord> again_in = once;
    for (auto& r : again_in) {
      for (auto& a : r.authors) a.raw_name = a.id->canonical;
    }
    auto twice = canonicalize_authors(again_in, aliases);
    for (std::size_t i = 0; i < once.size(); ++i) EXPECT_EQ(once[i].author_ids(), twice[i].author_ids());
  }
}

TEST(RoundTrip, JsonLinesPreservesRecords) {
  auto r = paper("x", {"A", "B"});
  r.abstract = "abs";
  r.year = 2001;
  r.venue = "V";
  r.citation_count = 3;
  r.project_id = "P";
  r.gold_keywords = std::vector<std::string>{"k"};
  r.discipline = "D";
  auto canon = canonicalize_authors({r}, {});
  auto back = parse_records(write_records_jsonl(canon), InputFormat::json_lines);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], canon[0]);
}

TEST(Records, AuthorIdsRequireCanonicalization) {
  auto r = paper("x", {"A", "B"});
  EXPECT_THROW(r.author_ids(), InputError);
}
