#pragma once

#include <cmath>

namespace syncnet {

/// Mixed absolute/relative tolerance: a quantity q is accepted against a reference
/// magnitude s when q <= abs + rel * (1 + |s|).
struct Tolerance {
    double abs = 1e-9;
    double rel = 1e-7;

    double band(double magnitude) const { return abs + rel * (1.0 + std::fabs(magnitude)); }
};

}  // namespace syncnet
