#include "mindchat/text.hpp"

#include <cctype>

namespace mindchat {

std::string CaseFold(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool IsSentencePunct(char c) noexcept {
  return c == ',' || c == '?' || c == '.' || c == '!';
}

std::string CollapseWhitespace(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

bool EqualsIgnoreCase(std::string_view a, std::string_view b) {
  return a.size() == b.size() && CaseFold(a) == CaseFold(b);
}

bool StartsWithIgnoreCase(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && EqualsIgnoreCase(s.substr(0, prefix.size()), prefix);
}

std::string_view TrailingWordFragment(std::string_view text) {
  std::size_t start = text.size();
  while (start > 0 && text[start - 1] != ' ' && !IsSentencePunct(text[start - 1])) --start;
  return text.substr(start);
}

std::string_view LastToken(std::string_view text) {
  std::size_t end = text.size();
  while (end > 0 && text[end - 1] == ' ') --end;
  std::size_t start = end;
  while (start > 0 && text[start - 1] != ' ') --start;
  return text.substr(start, end - start);
}

std::string DropLastToken(std::string_view text) {
  std::size_t end = text.size();
  while (end > 0 && text[end - 1] == ' ') --end;
  std::size_t start = end;
  while (start > 0 && text[start - 1] != ' ') --start;
  return std::string(text.substr(0, start));
}

std::optional<std::size_t> ConsistentLength(std::string_view buffer,
                                            std::string_view reference) {
  const std::string b = CaseFold(buffer);
  const std::string r = CaseFold(reference);
  if (r.starts_with(b)) return b.size();
  if (b.size() >= 2 && b.back() == ' ' && b[b.size() - 2] != ' ') {
    const std::string_view head(b.data(), b.size() - 1);
    if (r.starts_with(head) &&
        (head.size() == r.size() || r[head.size()] == ',' || r[head.size()] == '?')) {
      return head.size();
    }
  }
  return std::nullopt;
}

bool MatchesReference(std::string_view buffer, std::string_view reference) {
  return CaseFold(CollapseWhitespace(buffer)) == CaseFold(CollapseWhitespace(reference));
}

std::uint64_t Fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace mindchat
