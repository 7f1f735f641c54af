#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace naqbc {

// Shortest-ish deterministic float formatting (%.12g, C locale, '.' decimal).
std::string fmt_g(double v);
std::string fmt_fixed(double v, int precision);

struct TsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Tab-separated, first row is the header; every row must match its width.
TsvTable read_tsv(std::istream& in);
void write_tsv(std::ostream& out, const TsvTable& table);

// Index of a named column; throws ConfigError when missing.
long tsv_column(const TsvTable& table, const std::string& name);

double parse_double_field(const std::string& cell, const std::string& context);
long parse_long_field(const std::string& cell, const std::string& context);
unsigned long long parse_u64_field(const std::string& cell, const std::string& context);

}  // namespace naqbc
