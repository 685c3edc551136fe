#pragma once

#include <cstdio>
#include <string>

namespace snwave {

/// Full-precision scientific notation; round-trips every double.
inline std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", v);
    return buf;
}

}  // namespace snwave
