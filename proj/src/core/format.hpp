#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace skewnow {

/// Fixed numeric formatting used by every emitted artifact (9 significant
/// digits), so identical runs give byte-identical files.
inline std::string format_number(double v, int digits = 9)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;  // drop the sign of negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

}  // namespace skewnow
