#pragma once

#include <string>

namespace quakestat {

/// Shortest decimal string that reads back to the same double; "inf",
/// "-inf" and "nan" for non-finite values.
std::string format_double(double x);

}  // namespace quakestat
