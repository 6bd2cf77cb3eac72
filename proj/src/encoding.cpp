#include "oamao/encoding.hpp"

#include <algorithm>
#include <cmath>

namespace oamao {

void ScreenEncoding::require_valid() const {
    if (!valid() || !std::isfinite(lo) || !std::isfinite(hi))
        throw ConfigError("screen encoding range (lo, hi) is missing or empty");
}

Image ScreenEncoding::encode(const PhaseScreen& screen) const {
    require_valid();
    Image img(screen.grid().n);
    const auto& phase = screen.phase();
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = std::clamp((phase[i] - lo) / (hi - lo), 0.0, 1.0);
    return img;
}

PhaseScreen ScreenEncoding::decode(const Image& img, const GridSpec& grid) const {
    require_valid();
    if (img.n() != grid.n) throw DimensionError("decode: image size differs from grid");
    PhaseScreen screen(grid);
    auto& phase = screen.phase();
    for (std::size_t i = 0; i < img.size(); ++i) phase[i] = lo + img[i] * (hi - lo);
    return screen;
}

ScreenEncoding symmetric_encoding(double stddev, double sigmas) {
    if (!(stddev > 0.0)) return {-1.0, 1.0};  // zero-strength screens still need a decodable range
    return {-sigmas * stddev, sigmas * stddev};
}

}  // namespace oamao
