#pragma once

#include <string>
#include <string_view>

namespace dualdiv {

// Shortest form with at most 12 significant digits, '.' separator, no
// locale. Non-finite values print as nan / inf / -inf.
std::string format_number(double v);

// As format_number, but non-finite values become JSON null.
std::string json_number(double v);

// JSON string literal with the mandatory escapes.
std::string json_string(std::string_view s);

}  // namespace dualdiv
