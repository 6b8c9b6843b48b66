#pragma once

#include <cstdio>
#include <string>

namespace vaidman {

/// "%.12g" rendering used by every CSV and report. Nothing in the project
/// calls setlocale, so the decimal separator stays '.'.
inline std::string format_g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace vaidman
