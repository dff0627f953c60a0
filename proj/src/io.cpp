#include "mis/io.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace mis {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

CsvWriter::CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header)
    : out_(out), columns_(header.size()) {
    bool first = true;
    for (auto h : header) {
        out_ << (first ? "" : ",") << h;
        first = false;
    }
    out_ << '\n';
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw std::logic_error("csv row width does not match header");
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
    out_ << '\n';
}

}  // namespace mis
