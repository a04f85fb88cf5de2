#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace monge {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Writes `content` to a sibling temporary file, then renames it over `path`.
/// Creates missing parent directories.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_text(const std::filesystem::path& path);

/// CSV with a header row; every cell formatted by format_double.
std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns);

/// Parses a numeric CSV with a header; returns the columns in header order.
std::vector<std::vector<double>> parse_csv(const std::string& text, std::vector<std::string>* header = nullptr);

}  // namespace monge
