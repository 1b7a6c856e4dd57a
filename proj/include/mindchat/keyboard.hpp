#pragma once

#include <array>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace mindchat {

inline constexpr int kNumKeys = 40;

// Key indices as shown on the speller board (1-based).
namespace keys {
inline constexpr int kFirstLetter = 1;   // 'a'
inline constexpr int kLastLetter = 26;   // 'z'
inline constexpr int kComma = 27;
inline constexpr int kQuestion = 28;
inline constexpr int kApostrophe = 29;
inline constexpr int kSpace = 30;
inline constexpr int kUndo = 31;
inline constexpr int kDelete = 32;
inline constexpr int kFirstWordSlot = 33;
inline constexpr int kLastWordSlot = 37;
inline constexpr int kFirstSentenceSlot = 38;
inline constexpr int kLastSentenceSlot = 39;
inline constexpr int kEnter = 40;
}  // namespace keys

class KeyId {
 public:
  // Throws Error(kInvalidConfig) outside 1..40.
  explicit KeyId(int index);

  int index() const noexcept { return index_; }
  auto operator<=>(const KeyId&) const = default;

 private:
  int index_;
};

enum class KeyRole {
  kLetter,
  kPunctuation,
  kSpace,
  kUndo,
  kDelete,
  kWordSlot,
  kSentenceSlot,
  kEnter,
};

std::string_view KeyRoleName(KeyRole role);

struct StimulusSpec {
  double frequency_hz = 0.0;
  double phase_rad = 0.0;

  bool operator==(const StimulusSpec&) const = default;
};

struct KeyInfo {
  KeyId id{1};
  KeyRole role = KeyRole::kLetter;
  std::optional<char> character;  // literal keys only
  int slot = -1;                  // 0-based slot for word/sentence keys
  StimulusSpec stimulus;

  bool operator==(const KeyInfo&) const = default;
};

// The 40-key board. Immutable after construction.
class KeyboardLayout {
 public:
  const KeyInfo& key(KeyId id) const { return keys_[id.index() - 1]; }
  const std::array<KeyInfo, kNumKeys>& keys() const { return keys_; }

  bool operator==(const KeyboardLayout&) const = default;

 private:
  friend KeyboardLayout BuildLayout();
  std::array<KeyInfo, kNumKeys> keys_{};
};

// Frequencies ascend 8.0 + 0.2*(i-1) Hz; phases cycle {0, 0.5pi, 1.5pi}.
KeyboardLayout BuildLayout();

// Shared instance of the canonical layout.
const KeyboardLayout& CanonicalLayout();

// Literal key producing `c` (letters case-insensitive).
// Throws Error(kUnsupportedCharacter).
KeyId KeyForChar(char c);

bool IsSupportedChar(char c) noexcept;

// Character produced by a literal key, nullopt for function/slot keys.
std::optional<char> CharOf(KeyId id);

nlohmann::json LayoutToJson(const KeyboardLayout& layout);

}  // namespace mindchat
