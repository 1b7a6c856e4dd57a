#include "mindchat/text.hpp"

#include <gtest/gtest.h>

namespace mindchat {
namespace {

TEST(TextTest, CollapseWhitespace) {
  EXPECT_EQ(CollapseWhitespace("  What's \t up?  "), "What's up?");
  EXPECT_EQ(CollapseWhitespace(""), "");
  EXPECT_EQ(CollapseWhitespace("   "), "");
}

TEST(TextTest, TrailingWordFragment) {
  EXPECT_EQ(TrailingWordFragment("tell a j"), "j");
  EXPECT_EQ(TrailingWordFragment("hello,"), "");
  EXPECT_EQ(TrailingWordFragment("yes,no"), "no");
  EXPECT_EQ(TrailingWordFragment("what'"), "what'");
  EXPECT_EQ(TrailingWordFragment(""), "");
}

TEST(TextTest, DropLastTokenKeepsSeparator) {
  EXPECT_EQ(DropLastToken("What's the best way to proceed?"), "What's the best way to ");
  EXPECT_EQ(DropLastToken("hello   "), "");
  EXPECT_EQ(DropLastToken("a b "), "a ");
  EXPECT_EQ(DropLastToken(""), "");
}

TEST(TextTest, ConsistentLength) {
  const std::string ref = "What's the best way to gain muscle?";
  EXPECT_EQ(ConsistentLength("", ref), 0u);
  EXPECT_EQ(ConsistentLength("what", ref), 4u);
  EXPECT_EQ(ConsistentLength("What's ", ref), 7u);
  EXPECT_FALSE(ConsistentLength("what ", ref));
  EXPECT_FALSE(ConsistentLength("What's the best way to proceed?", ref));
  // A space typed after a word may precede an attaching '?' or ','.
  EXPECT_EQ(ConsistentLength("What's the best way to gain muscle ", ref), 34u);
  EXPECT_EQ(ConsistentLength("yes ", "yes, I do"), 3u);
  EXPECT_FALSE(ConsistentLength("yes  ", "yes, I do"));
  EXPECT_EQ(ConsistentLength("done ", "done"), 4u);
}

TEST(TextTest, MatchesReference) {
  EXPECT_TRUE(MatchesReference("what's up? ", "What's up?"));
  EXPECT_FALSE(MatchesReference("what's up", "What's up?"));
}

TEST(TextTest, Fnv1aKnownVectors) {
  EXPECT_EQ(Fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Fnv1a("foobar"), 0x85944171f73967e8ULL);
}

}  // namespace
}  // namespace mindchat
