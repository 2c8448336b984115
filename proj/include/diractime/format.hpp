#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace diractime {

/// Shortest round-trip-safe text for `x` at 17 significant digits,
/// independent of the global locale. Non-finite values print as nan/inf/-inf.
std::string format_double(double x);

/// Comma-separated cells, one line. Cells containing a comma, quote or newline
/// are quoted with doubled inner quotes.
void write_csv_row(std::ostream& out, const std::vector<std::string>& cells);

/// key=value line.
void write_key_value(std::ostream& out, std::string_view key, std::string_view value);
void write_key_value(std::ostream& out, std::string_view key, double value);

}  // namespace diractime
