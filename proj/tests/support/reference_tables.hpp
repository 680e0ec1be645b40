#pragma once

// Published per-program results for three models on seven coreutils
// programs, transcribed once and shared by the metrics golden tests and the
// acceptance runner.

#include <array>
#include <cstddef>
#include <string_view>

namespace saferust::testdata {

inline constexpr std::array<std::string_view, 3> kModels = {"gpt-4o", "gpt-4-turbo", "o3-mini"};
inline constexpr std::array<std::string_view, 7> kPrograms = {"uniq", "cat",   "pwd", "truncate",
                                                              "head", "split", "tail"};

// Compiler-verified counts, original then final.
struct VerifiedCounts {
  std::size_t rpd_o, rpd_f, utc_o, utc_f, ub_o, ub_f, uloc_o, uloc_f;
};

// kVerified[model][program]
inline constexpr VerifiedCounts kVerified[3][7] = {
    // gpt-4o
    {{0, 0, 1, 0, 3, 0, 3, 0},
     {29, 0, 1, 1, 34, 2, 97, 2},
     {0, 0, 0, 0, 0, 0, 0, 0},
     {0, 0, 0, 1, 2, 2, 2, 2},
     {0, 0, 0, 0, 2, 0, 11, 0},
     {12, 0, 4, 0, 5, 7, 99, 19},
     {34, 1, 6, 3, 25, 11, 72, 19}},
    // gpt-4-turbo
    {{0, 0, 0, 0, 1, 0, 3, 0},
     {5, 0, 0, 0, 10, 1, 35, 1},
     {0, 0, 1, 0, 1, 2, 7, 5},
     {0, 0, 0, 0, 0, 0, 0, 0},
     {0, 0, 1, 0, 11, 1, 19, 1},
     {0, 0, 3, 0, 15, 1, 114, 1},
     {0, 0, 1, 1, 17, 14, 45, 24}},
    // o3-mini
    {{1, 4, 0, 0, 7, 5, 120, 10},
     {7, 8, 9, 11, 39, 20, 52, 66},
     {0, 3, 0, 0, 0, 4, 0, 12},
     {0, 0, 0, 0, 4, 5, 4, 5},
     {0, 7, 11, 4, 24, 14, 51, 38},
     {4, 0, 13, 14, 37, 27, 307, 132},
     {3, 14, 7, 13, 39, 51, 92, 94}},
};

// Model self-reported counts: rpd original, rpd final, utc original, utc final.
struct SelfReported {
  std::size_t rpd_o, rpd_f, utc_o, utc_f;
};

inline constexpr SelfReported kSelfReported[3][7] = {
    {{0, 0, 3, 0}, {27, 2, 2, 2}, {0, 0, 0, 0}, {0, 0, 0, 2}, {0, 0, 0, 0}, {18, 2, 5, 1},
     {25, 3, 3, 4}},
    {{0, 0, 0, 0}, {8, 0, 8, 1}, {1, 2, 1, 0}, {0, 0, 0, 0}, {1, 0, 7, 1}, {8, 1, 9, 0},
     {3, 2, 9, 5}},
    {{9, 4, 11, 0}, {7, 9, 9, 9}, {3, 3, 1, 0}, {3, 1, 9, 0}, {16, 5, 19, 4}, {18, 2, 5, 1},
     {29, 14, 36, 15}},
};

// Published change cells, [program][model], as displayed.
inline constexpr std::string_view kRpdChange[7][3] = {
    {"--", "--", "-300%"}, {"100%", "100%", "-14%"}, {"--", "--", "!--"}, {"--", "--", "--"},
    {"--", "!--", "!--"},  {"100%", "--", "--"},     {"97%", "--", "-367%"}};

inline constexpr std::string_view kUtcChange[7][3] = {
    {"--", "--", "--"},   {"0%", "--", "-22%"},    {"--", "100%", "--"}, {"!--", "--", "--"},
    {"--", "100%", "64%"}, {"100%", "100%", "-8%"}, {"50%", "0%", "-86%"}};

inline constexpr std::string_view kUlocChange[7][3] = {
    {"100%", "100%", "92%"}, {"98%", "97%", "-27%"}, {"--", "29%", "!--"}, {"0%", "--", "-25%"},
    {"100%", "95%", "25%"},  {"81%", "99%", "57%"},  {"74%", "47%", "-2%"}};

enum class Table { Rpd, Utc, Uloc };

struct ExcludedCell {
  Table table;
  std::size_t model;
  std::size_t program;
  std::string_view reason;
};

// Cells whose published value cannot be derived from the verified counts.
inline constexpr ExcludedCell kExcluded[] = {
    {Table::Rpd, 1, 4, "verified 0 -> 0 is \"--\" but the cell reads \"!--\""},
    {Table::Rpd, 2, 5, "matches neither verified (4 -> 0) nor self-reported (18 -> 2) counts"},
    {Table::Utc, 0, 0, "matches neither verified (1 -> 0) nor self-reported (3 -> 0) counts"},
};

inline bool is_excluded(Table t, std::size_t model, std::size_t program) {
  for (const auto& e : kExcluded) {
    if (e.table == t && e.model == model && e.program == program) return true;
  }
  return false;
}

}  // namespace saferust::testdata
