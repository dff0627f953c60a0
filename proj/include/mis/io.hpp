#pragma once

#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace mis {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Parses a full token as a double ("nan", "inf" accepted). Empty on any
/// trailing garbage.
std::optional<double> parse_double(std::string_view text);

std::string_view trim(std::string_view s);

/// Comma-separated writer with a mandatory header row.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header);
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);

    void row(std::initializer_list<double> values);
    void row(const std::vector<double>& values);
    std::size_t columns() const { return columns_; }

private:
    std::ostream& out_;
    std::size_t columns_;
};

}  // namespace mis
