#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace rrcrt::cli {

// 6 significant digits, half-up on the decimal expansion, %g-style layout.
std::string fmt_num(double v);

// Plain decimal parse: accepts "12", "-3.25", "1e3". Throws on junk.
double parse_decimal(const std::string& s);
std::int64_t parse_int(const std::string& s);
bool looks_real(const std::string& s);

std::vector<std::string> split(const std::string& s, char sep);

void write_csv_row(std::ostream& os, const std::vector<std::string>& cells);

// Column-aligned text table. Bold header unless NO_COLOR is set or color is off.
void write_table(std::ostream& os, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows, bool color);

bool color_wanted();

}  // namespace rrcrt::cli
