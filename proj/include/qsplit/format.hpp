#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace qsplit {

/// Round-trip decimal form with 17 significant digits; "inf"/"-inf"/"nan" otherwise.
inline std::string fmt17(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace qsplit
