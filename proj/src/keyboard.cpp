#include "mindchat/keyboard.hpp"

#include <cctype>
#include <numbers>

#include "mindchat/error.hpp"

namespace mindchat {

KeyId::KeyId(int index) : index_(index) {
  if (index < 1 || index > kNumKeys) {
    throw Error(ErrorCode::kInvalidConfig,
                "key index " + std::to_string(index) + " outside 1..40");
  }
}

std::string_view KeyRoleName(KeyRole role) {
  switch (role) {
    case KeyRole::kLetter: return "letter";
    case KeyRole::kPunctuation: return "punctuation";
    case KeyRole::kSpace: return "space";
    case KeyRole::kUndo: return "undo";
    case KeyRole::kDelete: return "delete";
    case KeyRole::kWordSlot: return "word";
    case KeyRole::kSentenceSlot: return "sentence";
    case KeyRole::kEnter: return "enter";
  }
  return "unknown";
}

KeyboardLayout BuildLayout() {
  constexpr double kPi = std::numbers::pi;
  constexpr std::array<double, 3> kPhases = {0.0, 0.5 * kPi, 1.5 * kPi};

  KeyboardLayout layout;
  for (int i = 1; i <= kNumKeys; ++i) {
    KeyInfo info;
    info.id = KeyId(i);
    info.stimulus.frequency_hz = 8.0 + 0.2 * (i - 1);
    info.stimulus.phase_rad = kPhases[(i - 1) % 3];
    if (i <= keys::kLastLetter) {
      info.role = KeyRole::kLetter;
      info.character = static_cast<char>('a' + (i - 1));
    } else if (i == keys::kComma) {
      info.role = KeyRole::kPunctuation;
      info.character = ',';
    } else if (i == keys::kQuestion) {
      info.role = KeyRole::kPunctuation;
      info.character = '?';
    } else if (i == keys::kApostrophe) {
      info.role = KeyRole::kPunctuation;
      info.character = '\'';
    } else if (i == keys::kSpace) {
      info.role = KeyRole::kSpace;
      info.character = ' ';
    } else if (i == keys::kUndo) {
      info.role = KeyRole::kUndo;
    } else if (i == keys::kDelete) {
      info.role = KeyRole::kDelete;
    } else if (i <= keys::kLastWordSlot) {
      info.role = KeyRole::kWordSlot;
      info.slot = i - keys::kFirstWordSlot;
    } else if (i <= keys::kLastSentenceSlot) {
      info.role = KeyRole::kSentenceSlot;
      info.slot = i - keys::kFirstSentenceSlot;
    } else {
      info.role = KeyRole::kEnter;
    }
    layout.keys_[i - 1] = info;
  }
  return layout;
}

const KeyboardLayout& CanonicalLayout() {
  static const KeyboardLayout layout = BuildLayout();
  return layout;
}

bool IsSupportedChar(char c) noexcept {
  const auto u = static_cast<unsigned char>(c);
  if (u < 128 && std::isalpha(u)) return true;
  return c == ',' || c == '?' || c == '\'' || c == ' ';
}

KeyId KeyForChar(char c) {
  const auto u = static_cast<unsigned char>(c);
  if (u < 128 && std::isalpha(u)) {
    return KeyId(keys::kFirstLetter + (std::tolower(u) - 'a'));
  }
  switch (c) {
    case ',': return KeyId(keys::kComma);
    case '?': return KeyId(keys::kQuestion);
    case '\'': return KeyId(keys::kApostrophe);
    case ' ': return KeyId(keys::kSpace);
    default: break;
  }
  throw Error(ErrorCode::kUnsupportedCharacter,
              std::string("no key produces '") + c + "'");
}

std::optional<char> CharOf(KeyId id) {
  return CanonicalLayout().key(id).character;
}

nlohmann::json LayoutToJson(const KeyboardLayout& layout) {
  auto out = nlohmann::json::array();
  for (const KeyInfo& k : layout.keys()) {
    nlohmann::json entry = {
        {"index", k.id.index()},
        {"role", KeyRoleName(k.role)},
        {"frequency_hz", k.stimulus.frequency_hz},
        {"phase_rad", k.stimulus.phase_rad},
    };
    entry["character"] =
        k.character ? nlohmann::json(std::string(1, *k.character)) : nlohmann::json(nullptr);
    if (k.slot >= 0) entry["slot"] = k.slot;
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace mindchat
