#pragma once

#include <cstdio>
#include <string>

namespace mixfb::detail {

/// Fixed CSV number format: 9 significant digits, byte-stable across runs.
inline std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return {buf};
}

}  // namespace mixfb::detail
