#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace offbeat {

struct ParseError : std::runtime_error {
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
          line_number(line) {}
    std::size_t line_number;
};

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find('\t', start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

inline double parse_double(std::string_view s, const std::string& path, std::size_t line) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError(path, line, "expected a number, got '" + std::string(s) + "'");
    return value;
}

inline long long parse_int(std::string_view s, const std::string& path, std::size_t line) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError(path, line, "expected an integer, got '" + std::string(s) + "'");
    return value;
}

// Calls fn(line_number, fields) for every non-empty line. Lines are 1-based.
inline void for_each_tsv_line(
    const std::string& path, bool skip_header,
    const std::function<void(std::size_t, const std::vector<std::string_view>&)>& fn) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (skip_header && line_number == 1) continue;
        fn(line_number, split_tabs(line));
    }
}

// Shortest round-trippable decimal form; keeps emitted artifacts stable.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace offbeat
