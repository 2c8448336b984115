#include "diractime/format.hpp"

#include <charconv>
#include <cmath>

namespace diractime {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, result.ptr);
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        const std::string& cell = cells[i];
        if (cell.find_first_of(",\"\n") == std::string::npos) {
            out << cell;
            continue;
        }
        out << '"';
        for (char ch : cell) {
            if (ch == '"') out << '"';
            out << ch;
        }
        out << '"';
    }
    out << '\n';
}

void write_key_value(std::ostream& out, std::string_view key, std::string_view value) {
    out << key << '=' << value << '\n';
}

void write_key_value(std::ostream& out, std::string_view key, double value) {
    write_key_value(out, key, format_double(value));
}

}  // namespace diractime
