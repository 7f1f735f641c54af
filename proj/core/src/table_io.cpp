#include "naqbc/table_io.hpp"

#include <cstdio>
#include <sstream>

#include "naqbc/errors.hpp"

namespace naqbc {

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt_fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

TsvTable read_tsv(std::istream& in) {
  TsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("tsv: missing header row");
  table.header = split_tabs(strip_cr(line));
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> cells = split_tabs(line);
    if (cells.size() != table.header.size())
      throw ConfigError("tsv: row " + std::to_string(row) + " has " +
                        std::to_string(cells.size()) + " fields, header has " +
                        std::to_string(table.header.size()));
    table.rows.push_back(std::move(cells));
  }
  return table;
}

void write_tsv(std::ostream& out, const TsvTable& table) {
  auto write_row = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << '\t';
      out << cells[i];
    }
    out << '\n';
  };
  write_row(table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw UsageError("tsv: row width does not match header");
    write_row(row);
  }
}

long tsv_column(const TsvTable& table, const std::string& name) {
  for (std::size_t i = 0; i < table.header.size(); ++i)
    if (table.header[i] == name) return static_cast<long>(i);
  throw ConfigError("tsv: column '" + name + "' not found");
}

double parse_double_field(const std::string& cell, const std::string& context) {
  std::size_t consumed = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &consumed);
  } catch (const std::exception&) {
    throw ConfigError(context + ": expected a number, got '" + cell + "'");
  }
  if (consumed != cell.size())
    throw ConfigError(context + ": expected a number, got '" + cell + "'");
  return v;
}

long parse_long_field(const std::string& cell, const std::string& context) {
  std::size_t consumed = 0;
  long v = 0;
  try {
    v = std::stol(cell, &consumed);
  } catch (const std::exception&) {
    throw ConfigError(context + ": expected an integer, got '" + cell + "'");
  }
  if (consumed != cell.size())
    throw ConfigError(context + ": expected an integer, got '" + cell + "'");
  return v;
}

unsigned long long parse_u64_field(const std::string& cell, const std::string& context) {
  std::size_t consumed = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(cell, &consumed);
  } catch (const std::exception&) {
    throw ConfigError(context + ": expected an unsigned integer, got '" + cell + "'");
  }
  if (consumed != cell.size())
    throw ConfigError(context + ": expected an unsigned integer, got '" + cell + "'");
  return v;
}

}  // namespace naqbc
