#pragma once

#include <string>
#include <string_view>

namespace ngsim {

/// Shortest decimal that parses back to exactly `value`.
std::string format_double(double value);

/// Parses a full token as a double; throws ParameterError on junk.
double parse_double(std::string_view text);

}  // namespace ngsim
