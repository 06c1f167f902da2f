#include "hfm/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace hfm {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

void csv_writer::comment(const std::string& key, const std::string& value) {
    os_ << "# " << key << '=' << value << '\n';
}

void csv_writer::header(const std::vector<std::string>& columns) { row(columns); }

void csv_writer::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << format_double(values[i]);
    os_ << '\n';
}

void csv_writer::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << '\n';
}

}  // namespace hfm
