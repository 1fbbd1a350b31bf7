#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <system_error>

namespace imbalforest {

// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

// Parses the full string as a double; returns false on trailing garbage or
// parse failure. Accepts "inf"/"-inf"/"nan" (std::from_chars does).
inline bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

inline bool parse_finite(std::string_view s, double& out) {
    return parse_double(s, out) && std::isfinite(out);
}

} // namespace imbalforest
