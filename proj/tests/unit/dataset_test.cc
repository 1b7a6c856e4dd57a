#include "mindchat/dataset.hpp"

#include <sstream>

#include <gtest/gtest.h>

#include "mindchat/keyboard.hpp"

namespace mindchat {
namespace {

const std::string kSample = std::string(MINDCHAT_DATA_DIR) + "/sample_dialogues.jsonl";

TEST(NormalizeTest, Examples) {
  EXPECT_EQ(NormalizeUtterance("What's  up?"), "What's up?");
  EXPECT_EQ(NormalizeUtterance("Tell a joke."), "Tell a joke");
  EXPECT_EQ(NormalizeUtterance("Wow!! "), "Wow");
  EXPECT_EQ(NormalizeUtterance("Really?!"), "Really?");
  EXPECT_EQ(NormalizeUtterance("It\xE2\x80\x99s fine"), "It's fine");
  EXPECT_EQ(NormalizeUtterance("\tso,\n  then"), "so, then");
}

TEST(NormalizeTest, RejectsUntypeable) {
  for (std::string bad : {"I have 3 cats", "Mr. Smith is here", "a; b", "caf\xC3\xA9", "...", ""}) {
    try {
      NormalizeUtterance(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kUnsupportedUtterance) << bad;
    }
  }
}

TEST(DatasetTest, BundledSampleIsBalancedAndTypeable) {
  const LoadedDataset ds = LoadDataset(kSample);
  EXPECT_TRUE(ds.rejected.empty());
  ASSERT_EQ(ds.items.size(), 16u);
  const DatasetStats stats = ComputeStats(ds.items);
  for (Category c : kAllCategories) EXPECT_EQ(stats.per_category.at(c).utterances, 4u);
  for (const auto& item : ds.items) {
    for (char ch : item.target()) EXPECT_NO_THROW(KeyForChar(ch)) << item.id;
  }
}

TEST(DatasetTest, RoundTrip) {
  const auto items = LoadDataset(kSample).items;
  std::stringstream ss;
  WriteDataset(ss, items);
  const auto again = ParseDataset(ss);
  EXPECT_TRUE(again.rejected.empty());
  EXPECT_EQ(again.items, items);
}

TEST(DatasetTest, MissingTargetIndexNamesRecord) {
  std::istringstream in(
      R"({"id":"x1","category":"ST-daily","turns":[{"speaker":"A","utterance":"hi"}]})");
  try {
    ParseDataset(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaError);
    EXPECT_NE(std::string(e.what()).find("x1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("target_index"), std::string::npos);
  }
}

TEST(DatasetTest, StructuralRules) {
  auto parse = [](const std::string& line) {
    std::istringstream in(line);
    return ParseDataset(in);
  };
  EXPECT_THROW(parse(R"({"id":"m","category":"MT-daily","turns":[{"speaker":"A","utterance":"hi"}],"target_index":0})"),
               Error);
  EXPECT_THROW(parse(R"({"id":"o","category":"ST-daily","turns":[{"speaker":"A","utterance":"hi"}],"target_index":3})"),
               Error);
  EXPECT_THROW(parse(R"({"id":"c","category":"LT-daily","turns":[{"speaker":"A","utterance":"hi"}],"target_index":0})"),
               Error);
  EXPECT_THROW(parse("not json"), Error);
}

TEST(DatasetTest, UntypeableTargetsAreCollected) {
  std::istringstream in(
      R"({"id":"ok","category":"ST-daily","turns":[{"speaker":"A","utterance":"hello there."}],"target_index":0})"
      "\n"
      R"({"id":"bad","category":"ST-daily","turns":[{"speaker":"A","utterance":"call 911"}],"target_index":0})"
      "\n");
  const auto ds = ParseDataset(in);
  ASSERT_EQ(ds.items.size(), 1u);
  EXPECT_EQ(ds.items[0].target(), "hello there");
  ASSERT_EQ(ds.rejected.size(), 1u);
  EXPECT_EQ(ds.rejected[0].id, "bad");
  EXPECT_EQ(ds.rejected[0].line, 2u);
}

TEST(StatsTest, HandCount) {
  DialogueItem item{"h", Category::kStDaily, {{"A", "hi there"}}, 0};
  const auto s = ComputeStats({item}).per_category.at(Category::kStDaily);
  EXPECT_EQ(s, (CategoryStats{1, 2, 8}));
  EXPECT_THROW(ComputeStats({}), Error);
}

TEST(StatsTest, Additive) {
  const auto items = LoadDataset(kSample).items;
  const std::vector<DialogueItem> a(items.begin(), items.begin() + 7);
  const std::vector<DialogueItem> b(items.begin() + 7, items.end());
  DatasetStats sum = ComputeStats(a);
  sum += ComputeStats(b);
  EXPECT_EQ(sum, ComputeStats(items));
}

TEST(StatsTest, CsvHasFourCategoryRows) {
  std::ostringstream out;
  WriteStatsCsv(out, ComputeStats(LoadDataset(kSample).items));
  const std::string csv = out.str();
  EXPECT_EQ(csv.rfind("category,utterances,words,characters\n", 0), 0u);
  EXPECT_NE(csv.find("\nST-daily,4,"), std::string::npos);
  EXPECT_NE(csv.find("\nMT-healthcare,4,"), std::string::npos);
  EXPECT_NE(csv.find("\ntotal,16,"), std::string::npos);
}

}  // namespace
}  // namespace mindchat
