#include "mindchat/keyboard.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "mindchat/error.hpp"

namespace mindchat {
namespace {

TEST(KeyboardTest, RolesFollowBoardInventory) {
  const KeyboardLayout layout = BuildLayout();
  EXPECT_EQ(layout.key(KeyId(1)).role, KeyRole::kLetter);
  EXPECT_EQ(layout.key(KeyId(1)).character, 'a');
  EXPECT_EQ(layout.key(KeyId(26)).character, 'z');
  EXPECT_EQ(layout.key(KeyId(27)).character, ',');
  EXPECT_EQ(layout.key(KeyId(28)).character, '?');
  EXPECT_EQ(layout.key(KeyId(29)).character, '\'');
  EXPECT_EQ(layout.key(KeyId(30)).role, KeyRole::kSpace);
  EXPECT_EQ(layout.key(KeyId(31)).role, KeyRole::kUndo);
  EXPECT_EQ(layout.key(KeyId(32)).role, KeyRole::kDelete);
  for (int i = 33; i <= 37; ++i) {
    EXPECT_EQ(layout.key(KeyId(i)).role, KeyRole::kWordSlot);
    EXPECT_EQ(layout.key(KeyId(i)).slot, i - 33);
  }
  EXPECT_EQ(layout.key(KeyId(38)).role, KeyRole::kSentenceSlot);
  EXPECT_EQ(layout.key(KeyId(39)).slot, 1);
  EXPECT_EQ(layout.key(KeyId(40)).role, KeyRole::kEnter);
}

TEST(KeyboardTest, FirstKeyStimulus) {
  const StimulusSpec s = BuildLayout().key(KeyId(1)).stimulus;
  EXPECT_DOUBLE_EQ(s.frequency_hz, 8.0);
  EXPECT_DOUBLE_EQ(s.phase_rad, 0.0);
}

TEST(KeyboardTest, FrequenciesDistinctOnTwoTenthsGrid) {
  const KeyboardLayout layout = BuildLayout();
  std::set<long> tenths;
  for (const KeyInfo& k : layout.keys()) {
    const double f = k.stimulus.frequency_hz;
    EXPECT_GE(f, 8.0 - 1e-12);
    EXPECT_LE(f, 15.8 + 1e-12);
    const long t = std::lround(f * 10.0);
    EXPECT_NEAR(f * 10.0, t, 1e-9);
    EXPECT_EQ(t % 2, 0);
    tenths.insert(t);
  }
  EXPECT_EQ(tenths.size(), 40u);
}

TEST(KeyboardTest, PhasesCycleThroughThreeValues) {
  constexpr double kPi = std::numbers::pi;
  const KeyboardLayout layout = BuildLayout();
  EXPECT_DOUBLE_EQ(layout.key(KeyId(2)).stimulus.phase_rad, 0.5 * kPi);
  EXPECT_DOUBLE_EQ(layout.key(KeyId(3)).stimulus.phase_rad, 1.5 * kPi);
  EXPECT_DOUBLE_EQ(layout.key(KeyId(4)).stimulus.phase_rad, 0.0);
  for (const KeyInfo& k : layout.keys()) {
    const double p = k.stimulus.phase_rad;
    EXPECT_TRUE(p == 0.0 || p == 0.5 * kPi || p == 1.5 * kPi);
  }
}

TEST(KeyboardTest, Deterministic) { EXPECT_EQ(BuildLayout(), BuildLayout()); }

TEST(KeyboardTest, KeyForChar) {
  EXPECT_EQ(KeyForChar('a'), KeyId(1));
  EXPECT_EQ(KeyForChar('A'), KeyId(1));
  EXPECT_EQ(KeyForChar('?'), KeyId(28));
  EXPECT_EQ(KeyForChar(' '), KeyId(30));
  try {
    KeyForChar('5');
    FAIL() << "digit accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedCharacter);
  }
  EXPECT_THROW(KeyForChar('.'), Error);
}

TEST(KeyboardTest, CharRoundTripForEveryLiteralKey) {
  for (const KeyInfo& k : BuildLayout().keys()) {
    if (!k.character) continue;
    EXPECT_EQ(KeyForChar(*k.character), k.id);
  }
}

TEST(KeyboardTest, InvalidKeyIndex) {
  EXPECT_THROW(KeyId(0), Error);
  EXPECT_THROW(KeyId(41), Error);
}

TEST(KeyboardTest, JsonExport) {
  const auto doc = LayoutToJson(BuildLayout());
  ASSERT_EQ(doc.size(), 40u);
  EXPECT_EQ(doc[0]["character"], "a");
  EXPECT_EQ(doc[39]["role"], "enter");
  EXPECT_TRUE(doc[39]["character"].is_null());
  EXPECT_DOUBLE_EQ(doc[39]["frequency_hz"].get<double>(), 15.8);
}

}  // namespace
}  // namespace mindchat
