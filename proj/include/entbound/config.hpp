// config.hpp
//
// Flat `key=value` config files shared by the sweep and scenario commands.
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "core.hpp"

namespace entbound {

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

/// One `key=value` per line; blank lines and `#` comments are skipped.
/// Duplicate keys are an error.
inline std::map<std::string, std::string> parse_key_values(std::string_view text) {
    std::map<std::string, std::string> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = detail::trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::BadConfig, "line " + std::to_string(line_no) + ": expected key=value");
        }
        std::string key = detail::trim(std::string_view(body).substr(0, eq));
        std::string value = detail::trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw Error(ErrorKind::BadConfig, "line " + std::to_string(line_no) + ": empty key");
        if (!out.emplace(key, value).second) throw Error(ErrorKind::BadConfig, "duplicate key '" + key + "'");
    }
    return out;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::BadConfig, "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::uint64_t parse_unsigned(std::string_view text, const std::string& key) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != end) {
        throw Error(ErrorKind::BadConfig, key + " must be a non-negative integer, got '" + std::string(text) + "'");
    }
    return v;
}

inline double parse_real(std::string_view text, const std::string& key) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) {
        throw Error(ErrorKind::BadConfig, key + " must be a finite number, got '" + std::string(text) + "'");
    }
    return v;
}

/// Splits on commas, trimming each piece; empty pieces are dropped.
inline std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece = detail::trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
        if (!piece.empty()) out.push_back(piece);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace entbound
