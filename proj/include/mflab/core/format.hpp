#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace mflab {

/// 17 significant digits: enough to round-trip any double.
inline std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

/// Shortest of %.15g / %.17g that parses back to the same double.
inline std::string format_shortest(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", value);
    if (std::strtod(buf, nullptr) != value) std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

}  // namespace mflab
