#pragma once

#include "oamao/field.hpp"

namespace oamao {

/// Fresnel transfer function H(fx, fy) = exp(i k d) exp(-i pi lambda d (fx^2 + fy^2))
/// sampled on DFT frequencies index / (n dx). With `padded` set the kernel
/// lives on a 2n grid and propagation embeds/crops the field to suppress
/// wraparound; the unpadded form is exactly unitary.
class PropagationKernel {
public:
    PropagationKernel() = default;
    PropagationKernel(const GridSpec& grid, double distance, bool padded = false);

    const GridSpec& grid() const noexcept { return grid_; }
    double distance() const noexcept { return distance_; }
    bool padded() const noexcept { return padded_; }
    const Array2D<Complex>& transfer() const noexcept { return h_; }

private:
    GridSpec grid_;
    double distance_ = 0.0;
    bool padded_ = false;
    Array2D<Complex> h_;
};

inline PropagationKernel make_kernel(const GridSpec& grid, double distance, bool padded = false) {
    return PropagationKernel(grid, distance, padded);
}

/// IDFT[ DFT(u) H ].
ComplexField propagate(const ComplexField& field, const PropagationKernel& kernel);

/// Conjugate-transpose of propagate: IDFT[ DFT(v) conj(H) ].
ComplexField propagate_adjoint(const ComplexField& field, const PropagationKernel& kernel);

/// Pointwise u * t. Throws DomainError if |t| exceeds 1 anywhere (passive layer).
ComplexField layer_transmit(const ComplexField& field, const Array2D<Complex>& transmission);

/// <a, b> = sum conj(a) b dx^2.
Complex inner_product(const ComplexField& a, const ComplexField& b);

}  // namespace oamao
