#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace valuegap::csv {

// Shortest "%.<digits>g"-style rendering, independent of the C locale.
std::string format_number(double value, int significant_digits = 6);

// Shortest rendering that parses back to the same double.
std::string format_exact(double value);

// Splits one line on commas; no quoting (the project's files never need it).
std::vector<std::string> split(std::string_view line);

// Throws std::invalid_argument when the field is not a complete number.
double parse_double(std::string_view field);
long parse_long(std::string_view field);

}  // namespace valuegap::csv
