#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace bsindy {

/// Header plus a dense numeric body.
struct Table {
  std::vector<std::string> header;
  Eigen::MatrixXd data;

  Eigen::Index column_index(const std::string& name) const;  ///< throws ConfigError if absent
};

/// Shortest decimal representation that parses back to exactly `value`.
std::string format_double(double value);
double parse_double(std::string_view text);

std::string to_csv(const Table& table);
Table parse_csv(const std::string& text);

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

void write_csv(const std::filesystem::path& path, const Table& table);
Table read_csv(const std::filesystem::path& path);

}  // namespace bsindy
