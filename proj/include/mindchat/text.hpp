#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mindchat {

std::string CaseFold(std::string_view s);

// ',', '?', '.', '!': characters that end a word for completion purposes.
bool IsSentencePunct(char c) noexcept;

// Collapses whitespace runs to one space and trims both ends.
std::string CollapseWhitespace(std::string_view s);

bool EqualsIgnoreCase(std::string_view a, std::string_view b);
bool StartsWithIgnoreCase(std::string_view s, std::string_view prefix);

// Trailing run of characters that are neither space nor sentence punctuation
// ("tell a j" -> "j", "hello," -> "").
std::string_view TrailingWordFragment(std::string_view text);

// Trailing run of non-space characters after trailing spaces are dropped
// ("to proceed? " -> "proceed?").
std::string_view LastToken(std::string_view text);

// Removes trailing spaces, then the last non-space token; keeps the space
// that separated it from the previous token.
std::string DropLastToken(std::string_view text);

// Length of the reference prefix that `buffer` spells, or nullopt when the
// buffer has left the reference. Comparison ignores case. A single trailing
// space is tolerated right before a ',' or '?' in the reference (or at its
// end) because that punctuation attaches to the preceding word.
std::optional<std::size_t> ConsistentLength(std::string_view buffer,
                                            std::string_view reference);

// Whitespace-normalized, case-insensitive equality.
bool MatchesReference(std::string_view buffer, std::string_view reference);

// 64-bit FNV-1a; stable across platforms and runs.
std::uint64_t Fnv1a(std::string_view bytes);

}  // namespace mindchat
