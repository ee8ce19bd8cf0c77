#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nondivfem {

/// Numeric CSV table; empty fields are std::nullopt.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<double>>> rows;

  /// Column index by name; throws ConfigError when absent.
  std::size_t column(const std::string& name) const;
};

/// Shortest text that reads back to the same double.
std::string format_number(double v);

void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);

void write_csv_file(const std::string& path, const CsvTable& table);
CsvTable read_csv_file(const std::string& path);

}  // namespace nondivfem
