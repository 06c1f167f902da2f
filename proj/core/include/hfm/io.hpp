#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace hfm {

// scientific notation, 17 significant digits, '.' separator
std::string format_double(double x);

// CSV writer with a commented header block ("# key=value")
class csv_writer {
public:
    explicit csv_writer(std::ostream& os) : os_(os) {}
    void comment(const std::string& key, const std::string& value);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    void row(const std::vector<std::string>& cells);

private:
    std::ostream& os_;
};

}  // namespace hfm
