#include "oamao/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace oamao {

GridSpec GridSpec::from_side(int n, double side, double wavelength) {
    GridSpec g{n, n > 0 ? side / n : 0.0, wavelength};
    g.validate();
    return g;
}

double GridSpec::wavenumber() const noexcept { return 2.0 * std::numbers::pi / wavelength; }

void GridSpec::validate() const {
    if (n < 8 || (n & (n - 1)) != 0)
        throw ConfigError("grid size must be a power of two >= 8, got " + std::to_string(n));
    if (!(dx > 0.0) || !std::isfinite(dx)) throw ConfigError("grid spacing must be positive");
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
        throw ConfigError("wavelength must be positive");
}

ComplexField::ComplexField(const GridSpec& grid) : grid_(grid), values_(grid.n) {}

ComplexField::ComplexField(const GridSpec& grid, Array2D<Complex> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.n() != grid_.n) throw DimensionError("field samples do not match grid size");
}

double ComplexField::power() const noexcept {
    double sum = 0.0;
    for (const auto& v : values_) sum += std::norm(v);
    return sum * grid_.dx * grid_.dx;
}

PhaseScreen::PhaseScreen(const GridSpec& grid) : grid_(grid), phase_(grid.n) {}

PhaseScreen::PhaseScreen(const GridSpec& grid, Array2D<double> phase)
    : grid_(grid), phase_(std::move(phase)) {
    if (phase_.n() != grid_.n) throw DimensionError("screen samples do not match grid size");
}

ComplexField make_vortex_beam(const GridSpec& grid, int ell, double waist) {
    grid.validate();
    if (!(waist > 0.0)) throw ConfigError("beam waist must be positive");
    if (waist > grid.side() / 2) throw ConfigError("beam waist exceeds half the grid side; beam would be clipped");
    if (std::abs(ell) > grid.n / 4) throw ConfigError("topological charge not resolvable on this grid");

    ComplexField field(grid);
    const int order = std::abs(ell);
    for (int row = 0; row < grid.n; ++row) {
        const double y = grid.coord(row);
        for (int col = 0; col < grid.n; ++col) {
            const double x = grid.coord(col);
            const double r = std::hypot(x, y);
            const double radial = std::pow(std::numbers::sqrt2 * r / waist, order) * std::exp(-r * r / (waist * waist));
            field(row, col) = std::polar(radial, ell * std::atan2(y, x));
        }
    }
    const double scale = 1.0 / std::sqrt(field.power());
    for (auto& v : field.values()) v *= scale;
    return field;
}

ComplexField apply_phase(const ComplexField& field, const PhaseScreen& screen) {
    if (!(field.grid() == screen.grid())) throw DimensionError("apply_phase: field and screen grids differ");
    ComplexField out = field;
    const auto& phase = screen.phase();
    auto& values = out.values();
    for (std::size_t i = 0; i < values.size(); ++i) values[i] *= std::polar(1.0, phase[i]);
    return out;
}

Image intensity(const ComplexField& field) {
    Image img(field.grid().n);
    const auto& values = field.values();
    for (std::size_t i = 0; i < values.size(); ++i) img[i] = std::norm(values[i]);
    return img;
}

Image normalize_image(const Image& img) {
    const auto [lo, hi] = std::minmax_element(img.begin(), img.end());
    if (lo == img.end() || !(*hi > *lo)) throw DegenerateInputError("cannot normalize a constant image");
    const double min = *lo;
    const double span = *hi - *lo;
    Image out(img.n());
    for (std::size_t i = 0; i < img.size(); ++i) out[i] = (img[i] - min) / span;
    return out;
}

PhaseScreen negate(const PhaseScreen& screen) {
    PhaseScreen out = screen;
    for (auto& v : out.phase()) v = -v;
    return out;
}

}  // namespace oamao
