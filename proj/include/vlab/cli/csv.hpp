#pragma once

#include <string>
#include <vector>

namespace vlab::cli {

inline constexpr int kCsvSchemaVersion = 1;

// First line "# vlab-csv v<version> table=<name>", then the column header.
struct CsvTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
};

std::string format_csv(const CsvTable& t);
void write_csv(const std::string& path, const CsvTable& t);

// Validates the version line, the table name and the column header.
CsvTable read_csv(const std::string& path, const std::string& name, const std::vector<std::string>& columns);

}  // namespace vlab::cli
