#include "tilefuse/categories.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "tilefuse/error.hpp"

namespace tilefuse {
namespace {

struct NamedType {
  std::string_view name;
  int xview_type_id;
};

// xView label order; dense ids follow this order.
constexpr std::array<NamedType, kNumCategories> kCatalogue{{
    {"fixed-wing-aircraft", 11},
    {"small-aircraft", 12},
    {"passenger-cargo-plane", 13},
    {"helicopter", 15},
    {"passenger-vehicle", 17},
    {"small-car", 18},
    {"bus", 19},
    {"pickup-truck", 20},
    {"utility-truck", 21},
    {"truck", 23},
    {"cargo-truck", 24},
    {"truck-tractor-w-box-trailer", 25},
    {"truck-tractor", 26},
    {"trailer", 27},
    {"truck-tractor-w-flatbed-trailer", 28},
    {"truck-tractor-w-liquid-tank", 29},
    {"crane-truck", 32},
    {"railway-vehicle", 33},
    {"passenger-car", 34},
    {"cargo-container-car", 35},
    {"flat-car", 36},
    {"tank-car", 37},
    {"locomotive", 38},
    {"maritime-vessel", 40},
    {"motorboat", 41},
    {"sailboat", 42},
    {"tugboat", 44},
    {"barge", 45},
    {"fishing-vessel", 47},
    {"ferry", 49},
    {"yacht", 50},
    {"container-ship", 51},
    {"oil-tanker", 52},
    {"engineering-vehicle", 53},
    {"tower-crane", 54},
    {"container-crane", 55},
    {"reach-stacker", 56},
    {"straddle-carrier", 57},
    {"mobile-crane", 59},
    {"dump-truck", 60},
    {"haul-truck", 61},
    {"scraper-tractor", 62},
    {"front-loader-bulldozer", 63},
    {"excavator", 64},
    {"cement-mixer", 65},
    {"ground-grader", 66},
    {"hut-tent", 71},
    {"shed", 72},
    {"building", 73},
    {"aircraft-hangar", 74},
    {"damaged-building", 76},
    {"facility", 77},
    {"construction-site", 79},
    {"vehicle-lot", 83},
    {"helipad", 84},
    {"storage-tank", 86},
    {"shipping-container-lot", 89},
    {"shipping-container", 91},
    {"pylon", 93},
    {"tower", 94},
}};

constexpr std::array<std::string_view, 19> kSmall{
    "passenger-vehicle", "small-car", "bus", "pickup-truck", "utility-truck",
    "truck", "cargo-truck", "truck-tractor", "trailer",
    "truck-tractor-w-flatbed-trailer", "crane-truck", "motorboat",
    "dump-truck", "scraper-tractor", "front-loader-bulldozer", "excavator",
    "cement-mixer", "ground-grader", "shipping-container"};

constexpr std::array<std::string_view, 27> kMedium{
    "fixed-wing-aircraft", "small-aircraft", "helicopter",
    "truck-tractor-w-box-trailer", "truck-tractor-w-liquid-tank",
    "railway-vehicle", "passenger-car", "cargo-container-car", "flat-car",
    "tank-car", "locomotive", "sailboat", "tugboat", "fishing-vessel",
    "yacht", "engineering-vehicle", "reach-stacker", "mobile-crane",
    "haul-truck", "hut-tent", "shed", "building", "damaged-building",
    "helipad", "storage-tank", "pylon", "tower"};

constexpr std::array<std::string_view, 14> kLarge{
    "passenger-cargo-plane", "maritime-vessel", "barge", "ferry",
    "container-ship", "oil-tanker", "tower-crane", "container-crane",
    "straddle-carrier", "aircraft-hangar", "facility", "construction-site",
    "vehicle-lot", "shipping-container-lot"};

constexpr std::array<std::string_view, 31> kRare{
    "fixed-wing-aircraft", "small-aircraft", "helicopter",
    "truck-tractor-w-liquid-tank", "crane-truck", "railway-vehicle",
    "flat-car", "tank-car", "locomotive", "maritime-vessel", "sailboat",
    "tugboat", "barge", "ferry", "yacht", "container-ship", "oil-tanker",
    "engineering-vehicle", "tower-crane", "container-crane", "reach-stacker",
    "straddle-carrier", "mobile-crane", "haul-truck", "scraper-tractor",
    "cement-mixer", "ground-grader", "aircraft-hangar", "helipad", "pylon",
    "tower"};

constexpr std::array<std::string_view, 29> kCommon{
    "passenger-cargo-plane", "passenger-vehicle", "small-car", "bus",
    "pickup-truck", "utility-truck", "truck", "cargo-truck",
    "truck-tractor-w-box-trailer", "truck-tractor", "trailer",
    "truck-tractor-w-flatbed-trailer", "passenger-car", "cargo-container-car",
    "motorboat", "fishing-vessel", "dump-truck", "front-loader-bulldozer",
    "excavator", "hut-tent", "shed", "building", "damaged-building",
    "facility", "construction-site", "vehicle-lot", "storage-tank",
    "shipping-container-lot", "shipping-container"};

template <std::size_t N>
int count_in(const std::array<std::string_view, N>& list,
             std::string_view name) {
  return static_cast<int>(std::count(list.begin(), list.end(), name));
}

std::vector<CategoryInfo> build_table() {
  std::vector<CategoryInfo> table;
  table.reserve(kNumCategories);
  for (std::size_t i = 0; i < kCatalogue.size(); ++i) {
    auto name = kCatalogue[i].name;
    int sizes[3] = {count_in(kSmall, name), count_in(kMedium, name),
                    count_in(kLarge, name)};
    int rare = count_in(kRare, name);
    int common = count_in(kCommon, name);
    if (sizes[0] + sizes[1] + sizes[2] != 1) {
      throw DataError("category '" + std::string(name) +
                      "' must appear in exactly one size list");
    }
    if (rare + common != 1) {
      throw DataError("category '" + std::string(name) +
                      "' must appear in exactly one rarity list");
    }
    SizeGroup g = sizes[0] ? SizeGroup::Small
                           : (sizes[1] ? SizeGroup::Medium : SizeGroup::Large);
    table.push_back({static_cast<int>(i) + 1, kCatalogue[i].xview_type_id,
                     name, g, rare ? Rarity::Rare : Rarity::Common});
  }
  // Lists must not name anything outside the catalogue.
  std::size_t listed = kSmall.size() + kMedium.size() + kLarge.size();
  std::size_t rarity_listed = kRare.size() + kCommon.size();
  if (listed != table.size() || rarity_listed != table.size()) {
    throw DataError("size/rarity lists do not partition the catalogue");
  }
  return table;
}

const std::vector<CategoryInfo>& table() {
  static const std::vector<CategoryInfo> t = build_table();
  return t;
}

}  // namespace

std::span<const CategoryInfo> all_categories() { return table(); }

const CategoryInfo& category_info(int id) {
  if (id < 1 || id > kNumCategories) {
    throw DataError("unknown category id " + std::to_string(id));
  }
  return table()[static_cast<std::size_t>(id - 1)];
}

std::optional<int> category_by_name(std::string_view name) {
  for (const auto& c : table()) {
    if (c.name == name) return c.id;
  }
  return std::nullopt;
}

std::optional<int> category_from_xview_type(int type_id) {
  for (const auto& c : table()) {
    if (c.xview_type_id == type_id) return c.id;
  }
  return std::nullopt;
}

SizeGroup size_group_of(int id) { return category_info(id).size; }
Rarity rarity_of(int id) { return category_info(id).rarity; }

std::optional<SizeGroup> parse_size_group(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "small") return SizeGroup::Small;
  if (lower == "medium") return SizeGroup::Medium;
  if (lower == "large") return SizeGroup::Large;
  return std::nullopt;
}

std::string_view to_string(SizeGroup g) {
  switch (g) {
    case SizeGroup::Small: return "small";
    case SizeGroup::Medium: return "medium";
    case SizeGroup::Large: return "large";
  }
  return "?";
}

std::string_view to_string(Rarity r) {
  return r == Rarity::Common ? "common" : "rare";
}

void validate_category_tables() { (void)build_table(); }

}  // namespace tilefuse
