#include "mindchat/dataset.hpp"

#include <fstream>
#include <sstream>

#include "mindchat/keyboard.hpp"
#include "mindchat/text.hpp"

namespace mindchat {

std::string_view CategoryName(Category c) {
  switch (c) {
    case Category::kStDaily: return "ST-daily";
    case Category::kStHealthcare: return "ST-healthcare";
    case Category::kMtDaily: return "MT-daily";
    case Category::kMtHealthcare: return "MT-healthcare";
  }
  return "unknown";
}

Category ParseCategory(std::string_view name) {
  for (Category c : kAllCategories) {
    if (EqualsIgnoreCase(CategoryName(c), name)) return c;
  }
  throw Error(ErrorCode::kSchemaError, "unknown category '" + std::string(name) + "'");
}

bool IsMultiTurn(Category c) noexcept {
  return c == Category::kMtDaily || c == Category::kMtHealthcare;
}

std::string NormalizeUtterance(std::string_view text) {
  std::string mapped;
  mapped.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    // U+2018 / U+2019 in UTF-8.
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
        static_cast<unsigned char>(text[i + 1]) == 0x80 &&
        (static_cast<unsigned char>(text[i + 2]) == 0x98 ||
         static_cast<unsigned char>(text[i + 2]) == 0x99)) {
      mapped.push_back('\'');
      i += 2;
    } else if (text[i] == '`') {
      mapped.push_back('\'');
    } else {
      mapped.push_back(text[i]);
    }
  }
  std::string out = CollapseWhitespace(mapped);
  while (!out.empty() && (out.back() == '.' || out.back() == '!' || out.back() == ' ')) {
    out.pop_back();
  }
  if (out.empty()) throw Error(ErrorCode::kUnsupportedUtterance, "utterance is empty");
  for (char c : out) {
    if (!IsSupportedChar(c)) {
      std::ostringstream shown;
      if (static_cast<unsigned char>(c) < 0x80) {
        shown << c;
      } else {
        shown << "byte 0x" << std::hex << static_cast<int>(static_cast<unsigned char>(c));
      }
      throw Error(ErrorCode::kUnsupportedUtterance,
                  "no key for '" + shown.str() + "' in \"" + std::string(text) + "\"");
    }
  }
  return out;
}

void ValidateItem(const DialogueItem& item) {
  const std::string who = "record '" + item.id + "'";
  if (item.id.empty()) throw Error(ErrorCode::kSchemaError, "record without id");
  if (item.turns.empty()) throw Error(ErrorCode::kSchemaError, who + ": no turns");
  if (item.target_index >= item.turns.size()) {
    throw Error(ErrorCode::kSchemaError, who + ": target_index out of range");
  }
  if (IsMultiTurn(item.category)) {
    if (item.turns.size() < 2 || item.target_index < 1) {
      throw Error(ErrorCode::kSchemaError, who + ": multi-turn item needs prior turns");
    }
  } else if (item.target_index > 1) {
    throw Error(ErrorCode::kSchemaError, who + ": single-turn item has more than one prior turn");
  }
}

nlohmann::json ItemToJson(const DialogueItem& item) {
  auto turns = nlohmann::json::array();
  for (const Turn& t : item.turns) turns.push_back({{"speaker", t.speaker}, {"utterance", t.utterance}});
  return {{"id", item.id},
          {"category", CategoryName(item.category)},
          {"turns", std::move(turns)},
          {"target_index", item.target_index}};
}

DialogueItem ItemFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kSchemaError, "record is not an object");
  const std::string id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : "";
  const std::string who = id.empty() ? std::string("record") : "record '" + id + "'";
  auto require = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw Error(ErrorCode::kSchemaError, who + ": missing " + key);
    return j[key];
  };
  DialogueItem item;
  if (!require("id").is_string()) throw Error(ErrorCode::kSchemaError, who + ": id must be a string");
  item.id = id;
  const auto& cat = require("category");
  if (!cat.is_string()) throw Error(ErrorCode::kSchemaError, who + ": category must be a string");
  item.category = ParseCategory(cat.get<std::string>());
  const auto& turns = require("turns");
  if (!turns.is_array()) throw Error(ErrorCode::kSchemaError, who + ": turns must be a list");
  for (const auto& t : turns) {
    if (!t.is_object() || !t.contains("speaker") || !t.contains("utterance") ||
        !t["speaker"].is_string() || !t["utterance"].is_string()) {
      throw Error(ErrorCode::kSchemaError, who + ": each turn needs speaker and utterance");
    }
    item.turns.push_back({t["speaker"].get<std::string>(), t["utterance"].get<std::string>()});
  }
  const auto& target = require("target_index");
  if (!target.is_number_unsigned()) {
    throw Error(ErrorCode::kSchemaError, who + ": target_index must be a non-negative integer");
  }
  item.target_index = target.get<std::size_t>();
  ValidateItem(item);
  return item;
}

LoadedDataset ParseDataset(std::istream& in, std::string_view source) {
  LoadedDataset out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (CollapseWhitespace(line).empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorCode::kSchemaError,
                  std::string(source) + ":" + std::to_string(line_no) + ": not valid JSON");
    }
    DialogueItem item;
    try {
      item = ItemFromJson(j);
    } catch (const Error& e) {
      throw Error(ErrorCode::kSchemaError,
                  std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
    try {
      item.turns[item.target_index].utterance = NormalizeUtterance(item.target());
    } catch (const Error& e) {
      out.rejected.push_back({line_no, item.id, e.code(), e.what()});
      continue;
    }
    out.items.push_back(std::move(item));
  }
  return out;
}

LoadedDataset LoadDataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return ParseDataset(in, path.string());
}

void WriteDataset(std::ostream& out, const std::vector<DialogueItem>& items) {
  for (const auto& item : items) out << ItemToJson(item).dump() << "\n";
}

void SaveDataset(const std::filesystem::path& path, const std::vector<DialogueItem>& items) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  WriteDataset(out, items);
}

CategoryStats& CategoryStats::operator+=(const CategoryStats& o) {
  utterances += o.utterances;
  words += o.words;
  characters += o.characters;
  return *this;
}

CategoryStats DatasetStats::total() const {
  CategoryStats t;
  for (const auto& [c, s] : per_category) t += s;
  return t;
}

DatasetStats& DatasetStats::operator+=(const DatasetStats& o) {
  for (const auto& [c, s] : o.per_category) per_category[c] += s;
  return *this;
}

DatasetStats ComputeStats(const std::vector<DialogueItem>& items) {
  if (items.empty()) throw Error(ErrorCode::kEmptySet, "no items to summarize");
  DatasetStats stats;
  for (const auto& item : items) {
    const std::string target = CollapseWhitespace(item.target());
    CategoryStats& s = stats.per_category[item.category];
    s.utterances += 1;
    s.characters += target.size();
    std::istringstream words(target);
    for (std::string w; words >> w;) ++s.words;
  }
  return stats;
}

void WriteStatsCsv(std::ostream& out, const DatasetStats& stats) {
  out << "category,utterances,words,characters\n";
  for (Category c : kAllCategories) {
    CategoryStats s;
    if (auto it = stats.per_category.find(c); it != stats.per_category.end()) s = it->second;
    out << CategoryName(c) << "," << s.utterances << "," << s.words << "," << s.characters << "\n";
  }
  const CategoryStats t = stats.total();
  out << "total," << t.utterances << "," << t.words << "," << t.characters << "\n";
}

}  // namespace mindchat
