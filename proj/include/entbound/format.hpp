// format.hpp
#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace entbound {

/// Locale-independent decimal text with 12 significant digits.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return res.ec == std::errc{} ? std::string(buf, res.ptr) : std::string("nan");
}

}  // namespace entbound
