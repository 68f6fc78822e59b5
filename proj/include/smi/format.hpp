#pragma once

#include <string>
#include <string_view>

namespace smi {

// Shortest decimal that parses back to the same double.
std::string format_double(double v);

// Strict full-string parse; throws InvalidArgument.
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

std::string_view trim(std::string_view s);

}  // namespace smi
