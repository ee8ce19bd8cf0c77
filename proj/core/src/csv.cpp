#include "nondivfem/csv.hpp"

#include "nondivfem/types.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nondivfem {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ConfigError("csv: no column named '" + name + "'");
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (row[i]) out << format_number(*row[i]);
    }
    out << '\n';
  }
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("csv: missing header");
  t.header = split(line);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line);
    if (fields.size() != t.header.size()) {
      throw ConfigError("csv: line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                        " fields, expected " + std::to_string(t.header.size()));
    }
    std::vector<std::optional<double>> row;
    for (const std::string& f : fields) {
      if (f.empty()) {
        row.emplace_back();
        continue;
      }
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw ConfigError("csv: line " + std::to_string(line_no) + ": not a number: '" + f + "'");
      }
      row.emplace_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_csv_file(const std::string& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_csv(out, table);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_csv(in);
}

}  // namespace nondivfem
