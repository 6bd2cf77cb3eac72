#pragma once

#include "oamao/field.hpp"

namespace oamao {

/// Fixed linear map between a phase range [lo, hi] (radians) and grayscale [0, 1].
/// Phases outside the range clip to the ends.
struct ScreenEncoding {
    double lo = 0.0;
    double hi = 0.0;

    bool valid() const noexcept { return hi > lo; }
    /// Throws ConfigError if the range is empty or unset.
    void require_valid() const;

    Image encode(const PhaseScreen& screen) const;
    PhaseScreen decode(const Image& img, const GridSpec& grid) const;
};

/// Symmetric range of +/- `sigmas` standard deviations.
ScreenEncoding symmetric_encoding(double stddev, double sigmas = 4.0);

}  // namespace oamao
