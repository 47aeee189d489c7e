#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cadict/io.hpp"
#include "cadict/rater.hpp"
#include "test_util.hpp"

namespace cadict {
namespace {

using testing::TempDir;

// e1, e2 and their bisector.
VectorStore plane() {
  return testing::store_from({"e1", "e2", "diag", "anti"}, {{1, 0}, {0, 1}, {1, 1}, {-1, -1}});
}

TEST(SemanticCore, Invariants) {
  EXPECT_NO_THROW(SemanticCore({"a"}, {"b"}));
  EXPECT_THROW(SemanticCore({}, {}), UsageError);
  EXPECT_THROW(SemanticCore({"a", "b"}, {"c"}), UsageError);
  EXPECT_THROW(SemanticCore({"a", "a"}, {"b", "c"}), UsageError);
  EXPECT_THROW(SemanticCore({"a", "b"}, {"b", "c"}), UsageError);
  const auto store = plane();
  EXPECT_THROW(SemanticCore({"e1"}, {"zzz"}).require_in(store), DataError);
}

TEST(MeanSimilarity, Examples) {
  const auto store = plane();
  const std::vector<std::string> self{"e1"}, both{"e1", "e2"}, other{"e1"};
  EXPECT_DOUBLE_EQ(mean_similarity("e1", self, store), 1.0);
  EXPECT_DOUBLE_EQ(mean_similarity("e1", both, store), 0.5);
  EXPECT_DOUBLE_EQ(mean_similarity("e2", other, store), 0.0);
  EXPECT_THROW(mean_similarity("nope", self, store), DataError);
  EXPECT_THROW(mean_similarity("e1", std::vector<std::string>{"nope"}, store), DataError);
}

TEST(RateWord, RatioOfMeans) {
  const auto store = plane();
  const auto r = rate_word("e1", SemanticCore({"diag"}, {"e1"}), store);
  // 1 / (sqrt(2)/2)
  EXPECT_NEAR(r.raw_rating, std::numbers::sqrt2, 1e-8);
  EXPECT_FALSE(r.denominator_floored);
}

TEST(RateWord, EquidistantIsOne) {
  const auto store = plane();
  EXPECT_DOUBLE_EQ(rate_word("diag", SemanticCore({"e2"}, {"e1"}), store).raw_rating, 1.0);
}

TEST(RateWord, FlooredDenominator) {
  const auto store = plane();
  const auto r = rate_word("e1", SemanticCore({"e2"}, {"e1"}), store);
  EXPECT_DOUBLE_EQ(r.raw_rating, 1.0 / kSimilarityFloor);
  EXPECT_TRUE(r.denominator_floored);

  const auto neg = rate_word("e1", SemanticCore({"anti"}, {"e1"}), store);
  EXPECT_DOUBLE_EQ(neg.raw_rating, 1e6);
  EXPECT_TRUE(neg.denominator_floored);
  EXPECT_GT(rate_word("anti", SemanticCore({"e2"}, {"e1"}), store).raw_rating, 0.0);
}

TEST(RateWord, OutOfVocabulary) {
  const auto store = plane();
  EXPECT_THROW(rate_word("missing", SemanticCore({"e2"}, {"e1"}), store), DataError);
}

TEST(RateAll, RescaleEndpoints) {
  std::vector<RatedWord> words{{"a", 0.5}, {"b", 1.0}, {"c", 1.5}};
  rescale_batch(words);
  EXPECT_DOUBLE_EQ(words[0].scaled_rating, 1.0);
  EXPECT_DOUBLE_EQ(words[1].scaled_rating, 3.0);
  EXPECT_DOUBLE_EQ(words[2].scaled_rating, 5.0);

  std::vector<RatedWord> one{{"a", 42.0}};
  rescale_batch(one);
  EXPECT_DOUBLE_EQ(one[0].scaled_rating, 3.0);
}

TEST(RateAll, SkipsOutOfVocabulary) {
  const auto store = plane();
  const std::vector<std::string> words{"diag", "ghost", "e1"};
  const auto batch = rate_all(words, SemanticCore({"e2"}, {"e1"}), store);
  ASSERT_EQ(batch.words.size(), 2u);
  EXPECT_EQ(batch.words[0].token, "diag");
  EXPECT_EQ(batch.words[1].token, "e1");
  EXPECT_EQ(batch.skipped, (std::vector<std::string>{"ghost"}));
}

TEST(RateAll, EmptyResolvableSet) {
  const auto store = plane();
  const std::vector<std::string> words{"ghost"};
  EXPECT_THROW(rate_all(words, SemanticCore({"e2"}, {"e1"}), store), DataError);
}

TEST(RateAll, ThreadCountDoesNotChangeResults) {
  const auto data = testing::clustered_data(2000, 16, 0.3, 4);
  const SemanticCore core({data.tokens[0], data.tokens[1], data.tokens[2]},
                          {data.tokens[1999], data.tokens[1998], data.tokens[1997]});
  const auto one = rate_all(data.tokens, core, data.store, 1);
  const auto four = rate_all(data.tokens, core, data.store, 4);
  ASSERT_EQ(one.words.size(), four.words.size());
  for (std::size_t i = 0; i < one.words.size(); ++i) {
    EXPECT_EQ(one.words[i].token, four.words[i].token);
    EXPECT_EQ(one.words[i].raw_rating, four.words[i].raw_rating);
    EXPECT_EQ(one.words[i].scaled_rating, four.words[i].scaled_rating);
  }
}

TEST(RateAll, ScaledOrderFollowsRawOrder) {
  const auto data = testing::clustered_data(300, 10, 0.2, 8);
  const SemanticCore core({data.tokens[3], data.tokens[10]}, {data.tokens[290], data.tokens[295]});
  const auto batch = rate_all(data.tokens, core, data.store);
  for (const auto& a : batch.words) {
    EXPECT_GE(a.scaled_rating, 1.0);
    EXPECT_LE(a.scaled_rating, 5.0);
    EXPECT_GT(a.raw_rating, 0.0);
  }
  for (std::size_t i = 0; i + 1 < batch.words.size(); ++i) {
    for (std::size_t j = i + 1; j < batch.words.size(); ++j) {
      const auto& a = batch.words[i];
      const auto& b = batch.words[j];
      if (a.raw_rating < b.raw_rating) {
        EXPECT_LE(a.scaled_rating, b.scaled_rating);
      } else if (a.raw_rating > b.raw_rating) {
        EXPECT_GE(a.scaled_rating, b.scaled_rating);
      }
    }
  }
}

TEST(RaterProperties, SeedOrderAndSwap) {
  std::mt19937_64 rng(21);
  const auto data = testing::clustered_data(60, 12, 0.4, 2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> shuffled = data.tokens;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::vector<std::string> a(shuffled.begin(), shuffled.begin() + 4);
    std::vector<std::string> c(shuffled.begin() + 4, shuffled.begin() + 8);
    const SemanticCore core(a, c);
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(c.begin(), c.end(), rng);
    const SemanticCore permuted(a, c);
    const CoreRater<VectorStore> r1(core, data.store), r2(permuted, data.store), swapped(core.swapped(), data.store);
    for (const auto& t : data.tokens) {
      const auto x = r1.rate(t);
      EXPECT_EQ(x.raw, r2.rate(t).raw);
      const double sim_c = mean_similarity(t, core.seed_concrete(), data.store);
      const double sim_a = mean_similarity(t, core.seed_abstract(), data.store);
      if (sim_c > kSimilarityFloor && sim_a > kSimilarityFloor) {
        EXPECT_NEAR(swapped.rate(t).raw, 1.0 / x.raw, 1e-9 * (1.0 / x.raw));
      }
    }
  }
}

TEST(RaterProperties, MonotoneInAngle) {
  std::vector<std::string> tokens{"c", "a"};
  std::vector<std::vector<double>> raw{{1, 0}, {0, 1}};
  for (int deg = 1; deg < 90; ++deg) {
    const double th = deg * std::numbers::pi / 180.0;
    tokens.push_back("w" + std::to_string(deg));
    raw.push_back({std::cos(th), std::sin(th)});
  }
  const auto store = testing::store_from(tokens, raw);
  const CoreRater<VectorStore> rater(SemanticCore({"a"}, {"c"}), store);
  double previous = std::numeric_limits<double>::infinity();
  for (int deg = 1; deg < 90; ++deg) {
    const double r = rater.rate("w" + std::to_string(deg)).raw;
    EXPECT_LT(r, previous) << deg;
    previous = r;
  }
}

TEST(BuildDictionary, WritesOneRowPerStoreWord) {
  TempDir dir;
  const auto store = plane();
  const auto out = dir.file("dict.tsv");
  const auto summary = build_dictionary(SemanticCore({"e2"}, {"e1"}), store.tokens(), store, out);
  EXPECT_EQ(summary.rated, store.size());
  EXPECT_EQ(summary.skipped, 0u);
  EXPECT_EQ(testing::count_lines(out), store.size());
  const auto content = testing::read_file(out);
  EXPECT_NE(content.find("e1\t1000000\t5.000\tdenominator_floored\n"), std::string::npos) << content;
  EXPECT_NE(content.find("diag\t1\t"), std::string::npos) << content;
  EXPECT_EQ(summary.floored, 2u);  // e1 and anti have non-positive abstract means
}

TEST(BuildDictionary, OnlyOutOfVocabulary) {
  TempDir dir;
  const auto store = plane();
  const std::vector<std::string> vocab{"ghost", "spirit"};
  EXPECT_THROW(build_dictionary(SemanticCore({"e2"}, {"e1"}), vocab, store, dir.file("d.tsv")), DataError);
}

TEST(BuildDictionary, UnwritablePath) {
  const auto store = plane();
  EXPECT_THROW(build_dictionary(SemanticCore({"e2"}, {"e1"}), store.tokens(), store, "/nonexistent/dir/d.tsv"),
               DataError);
}

TEST(CoreFile, RoundTripAndValidation) {
  TempDir dir;
  const SemanticCore core({"idea", "truth"}, {"dog", "chair"});
  const auto path = dir.file("core.json");
  write_core(core, path, {{"rng_seed", 7}});
  EXPECT_EQ(read_core(path), core);
  const auto doc = read_json(path);
  EXPECT_EQ(doc["z"], 2);
  EXPECT_EQ(doc["provenance"]["rng_seed"], 7);

  const auto bad = dir.write("bad.json", R"({"format":"cadict-core","version":1,"z":3,"seed_abstract":["a"],"seed_concrete":["b"]})");
  EXPECT_THROW(read_core(bad), DataError);
  EXPECT_THROW(read_core(dir.write("junk.json", "{")), DataError);
}

}  // namespace
}  // namespace cadict
