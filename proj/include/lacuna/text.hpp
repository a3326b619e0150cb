#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lacuna {

/// Shortest round-trip-safe rendering used in every CSV: 17 significant digits.
std::string format_real(double v);

/// Splits one CSV record. Double-quoted fields may contain commas and ""
/// escapes; a trailing CR is stripped.
std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a field when it contains a comma, quote or newline.
std::string csv_field(std::string_view s);

} // namespace lacuna
