#pragma once

#include <string>
#include <string_view>

namespace contagion {

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

/// Parses the whole of `text` as a double; throws std::invalid_argument.
double parse_double(std::string_view text);

}  // namespace contagion
