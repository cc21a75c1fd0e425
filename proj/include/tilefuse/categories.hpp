#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>

namespace tilefuse {

inline constexpr int kNumCategories = 60;

enum class SizeGroup { Small, Medium, Large };
enum class Rarity { Common, Rare };

struct CategoryInfo {
  int id;                 // dense id in [1, kNumCategories]
  int xview_type_id;      // raw `type_id` used by the xView label files
  std::string_view name;  // e.g. "small-car"
  SizeGroup size;
  Rarity rarity;
};

// All categories ordered by dense id. The table is built from the published
// size and rarity lists and checked to be a partition on first use.
std::span<const CategoryInfo> all_categories();

// Throws DataError naming the id when it is outside [1, kNumCategories].
const CategoryInfo& category_info(int id);
std::optional<int> category_by_name(std::string_view name);
std::optional<int> category_from_xview_type(int type_id);

SizeGroup size_group_of(int id);
Rarity rarity_of(int id);

// "small" / "medium" / "large", case-insensitive.
std::optional<SizeGroup> parse_size_group(std::string_view text);
std::string_view to_string(SizeGroup g);
std::string_view to_string(Rarity r);

using SizeGroupSet = std::set<SizeGroup>;
inline const SizeGroupSet kAllSizeGroups{SizeGroup::Small, SizeGroup::Medium,
                                         SizeGroup::Large};

// Re-runs the partition check (each category in exactly one size list and
// exactly one rarity list). Throws DataError on failure.
void validate_category_tables();

}  // namespace tilefuse
