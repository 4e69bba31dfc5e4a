#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hdclust/matrix_core.hpp"

namespace hdclust {

// A numeric table with optional column names (empty when the file had no header).
struct Table {
  std::vector<std::string> names;
  Matrix values;
};

// Lines starting with '#' are comments. A first data line with any
// non-numeric field is taken as the header. Throws ParseError (with row and
// column) or RaggedRows.
Table parse_csv(std::string_view text);
Table read_csv(const std::filesystem::path& path);

// 17 significant digits, so doubles round-trip exactly.
std::string format_number(double x);
std::string format_csv(const Table& table, const std::vector<std::string>& comments = {});
void write_csv(const std::filesystem::path& path, const Table& table,
               const std::vector<std::string>& comments = {});

// Throws Io on failure.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace hdclust
