// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#include "sureid/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace sureid {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> read_value_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::invalid_argument("value csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "value")
    throw std::invalid_argument("value csv: expected header 'value', got '" +
                                line + "'");
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(line, &used));
      if (used != line.size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw std::invalid_argument("value csv: bad number at line " +
                                  std::to_string(line_no) + ": '" + line + "'");
    }
  }
  return values;
}

std::vector<double> read_value_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  return read_value_csv(in);
}

void write_value_csv(std::ostream& os, std::span<const double> values) {
  os << "value\n";
  for (double v : values) os << format_g17(v) << '\n';
}

}  // namespace sureid
