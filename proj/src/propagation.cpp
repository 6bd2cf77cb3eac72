#include "oamao/propagation.hpp"

#include <cmath>
#include <numbers>

#include "oamao/fft.hpp"

namespace oamao {
namespace {

int signed_index(int i, int n) { return i < n / 2 ? i : i - n; }

ComplexField apply_transfer(const ComplexField& field, const PropagationKernel& kernel, bool conjugate) {
    if (!(field.grid() == kernel.grid())) throw DimensionError("propagate: field and kernel grids differ");
    const int n = field.grid().n;
    const auto& h = kernel.transfer();
    const int m = h.n();
    const int offset = (m - n) / 2;

    Array2D<Complex> work(m);
    for (int row = 0; row < n; ++row)
        for (int col = 0; col < n; ++col) work(row + offset, col + offset) = field(row, col);

    fft::forward(work);
    if (conjugate) {
        for (std::size_t i = 0; i < work.size(); ++i) work[i] *= std::conj(h[i]);
    } else {
        for (std::size_t i = 0; i < work.size(); ++i) work[i] *= h[i];
    }
    fft::inverse(work);

    ComplexField out(field.grid());
    for (int row = 0; row < n; ++row)
        for (int col = 0; col < n; ++col) out(row, col) = work(row + offset, col + offset);
    return out;
}

}  // namespace

PropagationKernel::PropagationKernel(const GridSpec& grid, double distance, bool padded)
    : grid_(grid), distance_(distance), padded_(padded) {
    grid.validate();
    const int m = padded ? 2 * grid.n : grid.n;
    const double df = 1.0 / (m * grid.dx);
    const double lambda = grid.wavelength;
    // k d is ~1e5-1e6 rad at layer distances; splitting off the exact rounding
    // residual of the product keeps the carrier accurate to the last bit.
    const double kd = grid.wavenumber() * distance;
    const double kd_residual = std::fma(grid.wavenumber(), distance, -kd);
    const Complex carrier = std::polar(1.0, kd) * std::polar(1.0, kd_residual);
    h_ = Array2D<Complex>(m);
    for (int row = 0; row < m; ++row) {
        const double fy = df * signed_index(row, m);
        for (int col = 0; col < m; ++col) {
            const double fx = df * signed_index(col, m);
            h_(row, col) = carrier * std::polar(1.0, -std::numbers::pi * lambda * distance * (fx * fx + fy * fy));
        }
    }
}

ComplexField propagate(const ComplexField& field, const PropagationKernel& kernel) {
    return apply_transfer(field, kernel, false);
}

ComplexField propagate_adjoint(const ComplexField& field, const PropagationKernel& kernel) {
    return apply_transfer(field, kernel, true);
}

ComplexField layer_transmit(const ComplexField& field, const Array2D<Complex>& transmission) {
    if (transmission.n() != field.grid().n) throw DimensionError("layer_transmit: transmission size differs from grid");
    ComplexField out = field;
    auto& values = out.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::abs(transmission[i]) > 1.0 + 1e-12)
            throw DomainError("layer_transmit: transmission modulus exceeds 1 (active layer)");
        values[i] *= transmission[i];
    }
    return out;
}

Complex inner_product(const ComplexField& a, const ComplexField& b) {
    if (!(a.grid() == b.grid())) throw DimensionError("inner_product: grids differ");
    Complex sum{};
    const auto& va = a.values();
    const auto& vb = b.values();
    for (std::size_t i = 0; i < va.size(); ++i) sum += std::conj(va[i]) * vb[i];
    return sum * (a.grid().dx * a.grid().dx);
}

}  // namespace oamao
