// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sureid {

/// 17-significant-digit decimal rendering; parses back to the same double.
std::string format_g17(double v);

/// Single-column CSV with header `value`.
std::vector<double> read_value_csv(std::istream& is);
std::vector<double> read_value_csv_file(const std::string& path);
void write_value_csv(std::ostream& os, std::span<const double> values);

}  // namespace sureid
