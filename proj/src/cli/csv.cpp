#include "vlab/cli/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "vlab/errors.hpp"

namespace vlab::cli {

namespace {

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void CsvTable::add(std::vector<double> row) {
  if (row.size() != columns.size()) throw ConfigError("csv row width does not match table '" + name + "'");
  rows.push_back(std::move(row));
}

std::string format_csv(const CsvTable& t) {
  std::string out = "# vlab-csv v" + std::to_string(kCsvSchemaVersion) + " table=" + t.name + "\n";
  for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : "") + t.columns[c];
  out += "\n";
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out += (c ? "," : "") + fmt(r[c]);
    out += "\n";
  }
  return out;
}

void write_csv(const std::string& path, const CsvTable& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << format_csv(t);
}

CsvTable read_csv(const std::string& path, const std::string& name, const std::vector<std::string>& columns) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open '" + path + "'");
  std::string line;
  const std::string want = "# vlab-csv v" + std::to_string(kCsvSchemaVersion) + " table=" + name;
  if (!std::getline(in, line) || line != want)
    throw ConfigError("'" + path + "': expected header '" + want + "'");
  if (!std::getline(in, line) || split(line) != columns)
    throw ConfigError("'" + path + "': column header does not match table '" + name + "'");
  CsvTable t{name, columns, {}};
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != columns.size())
      throw ConfigError("'" + path + "' line " + std::to_string(lineno) + ": wrong number of cells");
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& s = cells[c];
      const auto r = std::from_chars(s.data(), s.data() + s.size(), row[c]);
      if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ConfigError("'" + path + "' line " + std::to_string(lineno) + ": bad number '" + s + "'");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace vlab::cli
