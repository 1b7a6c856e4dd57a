#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mindchat/error.hpp"
#include "mindchat/suggest.hpp"

namespace mindchat {

enum class Category { kStDaily, kStHealthcare, kMtDaily, kMtHealthcare };

inline constexpr std::array<Category, 4> kAllCategories = {
    Category::kStDaily, Category::kStHealthcare, Category::kMtDaily, Category::kMtHealthcare};

std::string_view CategoryName(Category c);  // "ST-daily", ...
Category ParseCategory(std::string_view name);
bool IsMultiTurn(Category c) noexcept;

struct DialogueItem {
  std::string id;
  Category category = Category::kStDaily;
  std::vector<Turn> turns;
  std::size_t target_index = 0;

  const std::string& target() const { return turns.at(target_index).utterance; }
  std::vector<Turn> context() const {
    return {turns.begin(), turns.begin() + static_cast<std::ptrdiff_t>(target_index)};
  }
  bool operator==(const DialogueItem&) const = default;
};

// Curly apostrophes -> '\'', whitespace collapsed, terminal '.'/'!' removed.
// Throws Error(kUnsupportedUtterance) if anything else falls outside the
// keyboard's character set.
std::string NormalizeUtterance(std::string_view text);

// Throws Error(kSchemaError) when the structure is invalid.
void ValidateItem(const DialogueItem& item);

nlohmann::json ItemToJson(const DialogueItem& item);
DialogueItem ItemFromJson(const nlohmann::json& j);  // no normalization

struct Rejection {
  std::size_t line = 0;
  std::string id;
  ErrorCode code = ErrorCode::kUnsupportedUtterance;
  std::string message;
};

struct LoadedDataset {
  std::vector<DialogueItem> items;
  std::vector<Rejection> rejected;
};

// JSON-lines, one item per line. Schema violations throw Error(kSchemaError)
// naming the record; untypeable targets are collected in `rejected`.
LoadedDataset LoadDataset(const std::filesystem::path& path);
LoadedDataset ParseDataset(std::istream& in, std::string_view source = "<stream>");

void SaveDataset(const std::filesystem::path& path, const std::vector<DialogueItem>& items);
void WriteDataset(std::ostream& out, const std::vector<DialogueItem>& items);

struct CategoryStats {
  std::size_t utterances = 0;
  std::size_t words = 0;
  std::size_t characters = 0;

  CategoryStats& operator+=(const CategoryStats& o);
  bool operator==(const CategoryStats&) const = default;
};

struct DatasetStats {
  std::map<Category, CategoryStats> per_category;

  CategoryStats total() const;
  DatasetStats& operator+=(const DatasetStats& o);
  bool operator==(const DatasetStats&) const = default;
};

// Throws Error(kEmptySet) on no items.
DatasetStats ComputeStats(const std::vector<DialogueItem>& items);

// Four category rows plus a total row: category,utterances,words,characters
void WriteStatsCsv(std::ostream& out, const DatasetStats& stats);

}  // namespace mindchat
