#pragma once

#include <string>
#include <string_view>

namespace rffkim {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);
/// Strict parse of a full string; throws SchemaError on trailing junk.
double parse_double(std::string_view s);

/// FNV-1a 64-bit hash rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace rffkim
