#pragma once

#include <cstdio>
#include <string>

#include "rwa/types.hpp"

namespace rwa {

// %.17g: round-trips every double
inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x); // no "-0"
    return buf;
}

inline std::string fmt(cplx z) { return fmt(z.real()) + "," + fmt(z.imag()); }

} // namespace rwa
