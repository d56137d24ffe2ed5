#include <gtest/gtest.h>

#include <numeric>

#include "support/oracles.hpp"
#include "teamportrait/topics.hpp"

using namespace teamportrait;

namespace {

Document doc_of(std::initializer_list<const char*> words, std::string id = "d") {
  Document d{std::move(id), {}};
  for (const char* w : words) d.tokens.push_back({w, std::nullopt, d.tokens.size()});
  return d;
}

Document doc_of(const std::vector<std::string>& words, std::string id = "d") {
  Document d{std::move(id), {}};
  for (const auto& w : words) d.tokens.push_back({w, std::nullopt, d.tokens.size()});
  return d;
}

std::vector<std::vector<std::string>> random_corpus(oracle::Rng& rng) {
  std::vector<std::vector<std::string>> corpus(1 + rng.below(20));
  const std::size_t vocab = 2 + rng.below(30);
  for (auto& d : corpus) {
    const std::size_t len = 1 + rng.below(50);
    for (std::size_t i = 0; i < len; ++i) d.push_back("w" + std::to_string(rng.below(vocab)));
  }
  return corpus;
}

PublicationRecord rec(std::string id, std::string title, std::vector<std::string> authors) {
  PublicationRecord r;
  r.id = std::move(id);
  r.title = std::move(title);
  for (auto& a : authors) r.authors.push_back({a, std::nullopt, AuthorId{a}});
  return r;
}

}  // namespace

TEST(Preprocess, SegmentsLowercasesAndFiltersStopwords) {
  auto d = preprocess("x", "Energy-aware Routing, for WSN; 2 routing!", parse_stopwords("# comment\nfor\n\n"));
  std::vector<std::string> got;
  for (const auto& t : d.tokens) got.push_back(t.surface);
  EXPECT_EQ(got, (std::vector<std::string>{"energy", "aware", "routing", "wsn", "2", "routing"}));
  EXPECT_EQ(d.tokens.back().position, 5u);
}

TEST(Preprocess, KeepsUtf8WordsIntact) {
  auto d = preprocess("x", "森林 火灾, forest", {});
  ASSERT_EQ(d.tokens.size(), 3u);
  EXPECT_EQ(d.tokens[0].surface, "森林");
}

TEST(Preprocess, PosFilterAndEmptyDocument) {
  std::vector<Token> toks{{"forest", PosTag::noun, 0}, {"the", PosTag::other, 1}, {"burning", PosTag::gerund, 2}};
  auto d = preprocess("x", toks, {});
  ASSERT_EQ(d.tokens.size(), 2u);
  EXPECT_EQ(d.tokens[1].surface, "burning");
  EXPECT_EQ(d.tokens[1].position, 1u);
  EXPECT_THROW(preprocess("x", "the of", parse_stopwords("the\nof")), InputError);
  EXPECT_THROW(preprocess("x", "...", {}), InputError);
}

TEST(Preprocess, ParsesTokenizedDocuments) {
  auto m = parse_tokenized(R"({"id":"r1","tokens":[{"surface":"森林","pos":"n"},{"surface":"的","pos":"other"}]})");
  ASSERT_EQ(m.at("r1").size(), 2u);
  EXPECT_EQ(m.at("r1")[0].pos, PosTag::noun);
  EXPECT_THROW(parse_tokenized(R"({"id":"r1","tokens":[{"surface":"a","pos":"zz"}]})"), ParseError);
  EXPECT_THROW(parse_tokenized(R"({"id":"r1","tokens":[{"surface":"a","pos":3}]})"), ParseError);
  EXPECT_THROW(parse_tokenized("{\"id\":\"a\",\"tokens\":[]}\n{\"id\":\"a\",\"tokens\":[]}"), ParseError);
}

TEST(TfIdf, HandComputedValues) {
  CorpusStats stats;
  auto d1 = doc_of({"a", "a", "b", "c"});
  auto d2 = doc_of({"b", "d"});
  auto d3 = doc_of({"e"});
  for (const auto* d : {&d1, &d2, &d3}) stats.add(*d);
  auto s = tfidf_scores(d1, stats);
  EXPECT_DOUBLE_EQ(s.at("a"), 0.5 * std::log(3.0 / 2.0));
  EXPECT_DOUBLE_EQ(s.at("b"), 0.25 * std::log(1.0));
  EXPECT_DOUBLE_EQ(s.at("c"), 0.25 * std::log(3.0 / 2.0));
}

TEST(TfIdf, TermInEveryDocumentHasNegativeIdf) {
  CorpusStats stats;
  stats.add(doc_of({"a"}));
  stats.add(doc_of({"a", "b"}));
  EXPECT_LT(idf(2, 2), 0.0);
  EXPECT_DOUBLE_EQ(idf(2, 2), std::log(2.0 / 3.0));
}

TEST(TfIdf, PropertyMatchesNaiveRecountAndTfSumsToOne) {
  oracle::Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    auto corpus = random_corpus(rng);
    CorpusStats stats;
    for (const auto& d : corpus) stats.add(doc_of(d));
    for (const auto& d : corpus) {
      auto expected = oracle::naive_tfidf(d, corpus);
      EXPECT_EQ(tfidf_scores(doc_of(d), stats), expected);
      double sum = 0.0;
      for (const auto& [t, tf] : term_frequencies(doc_of(d))) sum += tf;
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(TextRank, WindowCountsPositionPairs) {
  auto w2 = cooccurrence_weights(doc_of({"a", "b", "c"}), 2);
  EXPECT_EQ(w2.size(), 2u);
  auto w3 = cooccurrence_weights(doc_of({"a", "b", "c"}), 3);
  EXPECT_EQ(w3.size(), 3u);
  auto rep = cooccurrence_weights(doc_of({"a", "b", "a", "b"}), 4);
  EXPECT_DOUBLE_EQ((rep.at({"a", "b"})), 4.0);
  EXPECT_TRUE(cooccurrence_weights(doc_of({"a", "b"}), 1).empty());
}

TEST(TextRank, FixedPoints) {
  auto two = textrank(doc_of({"a", "b"}));
  EXPECT_TRUE(two.converged);
  EXPECT_NEAR(two.scores.at("a"), 1.0, 1e-6);
  EXPECT_NEAR(two.scores.at("b"), 1.0, 1e-6);

  auto single = textrank(doc_of({"a"}));
  EXPECT_TRUE(single.converged);
  EXPECT_NEAR(single.scores.at("a"), 0.15, 1e-12);

  // a - b - c path with window 2: a = c = 57/74, b = 54/37
  auto path = textrank(doc_of({"a", "b", "c"}), {0.85, 2, 1000, 1e-13});
  EXPECT_NEAR(path.scores.at("a"), 57.0 / 74.0, 1e-9);
  EXPECT_NEAR(path.scores.at("b"), 54.0 / 37.0, 1e-9);
  EXPECT_NEAR(path.scores.at("c"), 57.0 / 74.0, 1e-9);
}

TEST(TextRank, RingScoresAreEqual) {
  for (std::size_t k : {3u, 4u, 7u, 12u}) {
    std::vector<std::string> words;
    for (std::size_t i = 0; i <= k; ++i) words.push_back("t" + std::to_string(i % k));
    auto r = textrank(doc_of(words), {0.85, 2, 100, 1e-6});
    EXPECT_TRUE(r.converged);
    for (const auto& [t, s] : r.scores) EXPECT_NEAR(s, r.scores.begin()->second, 1e-9) << k;
  }
}

TEST(TextRank, PropertyConvergesAndDeltasShrink) {
  oracle::Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    auto corpus = random_corpus(rng);
    for (const auto& d : corpus) {
      auto r = textrank(doc_of(d));
      EXPECT_TRUE(r.converged);
      EXPECT_LE(r.iterations, 100u);
      EXPECT_LT(r.max_deltas.back(), 1e-6);
      ASSERT_EQ(r.max_deltas.size(), r.iterations);
      for (const auto& [t, s] : r.scores) EXPECT_GE(s, 0.15 - 1e-12);
    }
  }
}

TEST(TextRank, IterationCapIsReported) {
  auto r = textrank(doc_of({"a", "b", "c", "d", "a", "c"}), {0.85, 2, 1, 1e-6});
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_FALSE(r.converged);
}

TEST(TextRank, RejectsInvalidConfig) {
  EXPECT_THROW(textrank(doc_of({"a"}), {1.0, 4, 100, 1e-6}), ConfigError);
  EXPECT_THROW(textrank(doc_of({"a"}), {0.85, 0, 100, 1e-6}), ConfigError);
  EXPECT_THROW(textrank(doc_of({"a"}), {0.85, 4, 0, 1e-6}), ConfigError);
  EXPECT_THROW(textrank(doc_of({"a"}), {0.85, 4, 100, 0.0}), ConfigError);
}

TEST(Fusion, HandDerivedDisagreement) {
  std::vector<RankedTerm> tfidf{{"x", 0.9}, {"y", 0.5}, {"z", 0.1}};
  std::vector<RankedTerm> tr{{"z", 2.0}, {"y", 1.0}, {"x", 0.5}};
  auto k2 = fuse(tfidf, tr, 2);
  ASSERT_EQ(k2.size(), 3u);
  EXPECT_EQ(k2[0].term, "z");
  EXPECT_DOUBLE_EQ(k2[0].fused, 2.0);
  EXPECT_EQ(k2[1].term, "x");
  EXPECT_DOUBLE_EQ(k2[1].fused, 0.9);
  EXPECT_FALSE(k2[1].rank_tr.has_value());
  EXPECT_EQ(k2[2].term, "y");
  EXPECT_DOUBLE_EQ(k2[2].fused, 0.75);

  auto k3 = fuse(tfidf, tr, 3);
  EXPECT_DOUBLE_EQ(k3[0].fused, 2.0 + 0.1 / 3.0);
  EXPECT_DOUBLE_EQ(k3[1].fused, 0.9 + 0.5 / 3.0);

  auto k1 = fuse(tfidf, tr, 1);
  ASSERT_EQ(k1.size(), 2u);
  EXPECT_THROW(fuse(tfidf, tr, 0), ConfigError);
}

TEST(Fusion, PropertyMatchesBruteForce) {
  oracle::Rng rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    auto corpus = random_corpus(rng);
    CorpusStats stats;
    for (const auto& d : corpus) stats.add(doc_of(d));
    const auto& d = corpus[rng.below(corpus.size())];
    const std::size_t k = 1 + rng.below(12);
    auto a = rank_scores(tfidf_scores(doc_of(d), stats));
    auto b = rank_scores(textrank_scores(doc_of(d)));
    auto got = fuse(a, b, k);
    auto expected = oracle::brute_force_fuse(a, b, k);
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].term, expected[i].first);
      EXPECT_EQ(got[i].fused, expected[i].second);
      EXPECT_EQ(got[i].fused, oracle::recompute_fused(got[i]));
      if (i > 0) { EXPECT_GE(got[i - 1].fused, got[i].fused); }
    }
  }
}

TEST(TopicModel, TeamTopicsSumFusedScoresOverTeamDocuments) {
  std::vector<PublicationRecord> rs{rec("1", "forest fire detection forest", {"a", "b"}),
                                    rec("2", "forest canopy lidar", {"b", "c"}),
                                    rec("3", "wireless sensor routing", {"x", "y"})};
  TopicModel model(rs, {});
  Team t;
  t.leader = AuthorId{"a"};
  t.core = {AuthorId{"b"}};
  auto topics = model.team_topics(t, rs, 3);
  ASSERT_EQ(topics.size(), 3u);
  double forest = 0.0;
  for (const auto& id : {"1", "2"}) {
    for (const auto& s : model.score(id, 3).fused) {
      if (s.term == "forest") forest += s.fused;
    }
  }
  auto it = std::find_if(topics.begin(), topics.end(), [](const TeamTopic& x) { return x.term == "forest"; });
  ASSERT_NE(it, topics.end());
  EXPECT_DOUBLE_EQ(it->score, forest);
  EXPECT_EQ(it->documents, 2u);
  for (std::size_t i = 1; i < topics.size(); ++i) EXPECT_GE(topics[i - 1].score, topics[i].score);

  Team lonely;
  lonely.leader = AuthorId{"nobody"};
  EXPECT_THROW(model.team_topics(lonely, rs, 3), InputError);
  EXPECT_THROW(model.team_topics(t, rs, 0), ConfigError);
  EXPECT_EQ(model.fusion_k(5), 10u);
}

TEST(TopicModel, TokenizedInputOverridesRawText) {
  std::vector<PublicationRecord> rs{rec("1", "ignored words", {"a", "b"})};
  TopicOptions opts;
  opts.tokenized["1"] = {{"森林", PosTag::noun, 0}, {"火灾", PosTag::noun, 1}};
  TopicModel model(rs, opts);
  EXPECT_EQ(model.document("1").tokens[0].surface, "森林");
}

TEST(Json, ScoredTopicRoundTrip) {
  ScoredTopic t{"x", 0.5, 1.25, 2, std::nullopt, 0.25};
  EXPECT_EQ(scored_topic_from_json(scored_topic_to_json(t)), t);
  TeamTopic tt{"y", 3.5, 4};
  auto back = team_topic_from_json(team_topic_to_json(tt));
  EXPECT_EQ(back.term, "y");
  EXPECT_EQ(back.documents, 4u);
}

TEST(TfIdf, IdfDecreasesWithDocumentFrequency) {
  for (std::size_t d : {1u, 2u, 10u, 1000u}) {
    for (std::size_t df = 0; df < d; ++df) {
      EXPECT_GT(idf(d, df), idf(d, df + 1));
      EXPECT_LE(idf(d, df), std::log(static_cast<double>(d)));
    }
    EXPECT_EQ(idf(d, d - 1), 0.0);
  }
}
