#pragma once

#include <algorithm>
#include <cmath>

inline double rel_err(double a, double b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}
