#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace qnclab {

// Doubles are serialized with 17 significant digits everywhere, which
// round-trips IEEE-754 binary64 exactly.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s) {
    return std::strtod(s.c_str(), nullptr);
}

} // namespace qnclab
