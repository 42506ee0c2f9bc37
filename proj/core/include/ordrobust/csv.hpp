#pragma once

#include <string>
#include <vector>

namespace ordrobust {

/// RFC-4180 table: one header row then data rows, all cells as strings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
  int require_column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);
void write_csv(const std::string& path, const CsvTable& table);
std::string format_csv(const CsvTable& table);

/// Missing cell: empty string or the literal NA.
bool cell_missing(const std::string& cell);

/// strtod-based parse; throws ValidationError with context on failure.
double parse_double(const std::string& cell, const std::string& context);

/// Shortest exact decimal form that round-trips a finite double.
std::string format_double(double value);

}  // namespace ordrobust
