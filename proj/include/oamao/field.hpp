#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "oamao/error.hpp"

namespace oamao {

using Complex = std::complex<double>;

/// Square sampling grid shared by fields, screens and network layers.
///
/// Pixel centres sit at (i - n/2 + 0.5) * dx along each axis, so no sample
/// lands on the optical axis. The physical side length is always n * dx.
struct GridSpec {
    int n = 0;
    double dx = 0.0;
    double wavelength = 0.0;

    static GridSpec from_side(int n, double side, double wavelength);

    double side() const noexcept { return n * dx; }
    double wavenumber() const noexcept;
    /// Physical coordinate of pixel centre `i` along either axis.
    double coord(int i) const noexcept { return (i - n / 2 + 0.5) * dx; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(n) * n; }

    /// Throws ConfigError unless n >= 8 is a power of two and dx, wavelength > 0.
    void validate() const;

    bool operator==(const GridSpec&) const = default;
};

/// Dense row-major n x n array. Row index is y, column index is x.
template <class T>
class Array2D {
public:
    Array2D() = default;
    explicit Array2D(int n, T fill = T{}) : n_(n), data_(static_cast<std::size_t>(n) * n, fill) {}
    Array2D(int n, std::vector<T> data) : n_(n), data_(std::move(data)) {
        if (data_.size() != static_cast<std::size_t>(n) * n)
            throw DimensionError("array data does not hold n*n samples");
    }

    int n() const noexcept { return n_; }
    std::size_t size() const noexcept { return data_.size(); }

    T& operator()(int row, int col) noexcept { return data_[static_cast<std::size_t>(row) * n_ + col]; }
    const T& operator()(int row, int col) const noexcept {
        return data_[static_cast<std::size_t>(row) * n_ + col];
    }
    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<T> span() noexcept { return data_; }
    std::span<const T> span() const noexcept { return data_; }
    T* data() noexcept { return data_.data(); }
    const T* data() const noexcept { return data_.data(); }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    bool operator==(const Array2D&) const = default;

private:
    int n_ = 0;
    std::vector<T> data_;
};

using Image = Array2D<double>;

/// Sampled complex scalar field on a GridSpec.
class ComplexField {
public:
    ComplexField() = default;
    explicit ComplexField(const GridSpec& grid);
    ComplexField(const GridSpec& grid, Array2D<Complex> values);

    const GridSpec& grid() const noexcept { return grid_; }
    Array2D<Complex>& values() noexcept { return values_; }
    const Array2D<Complex>& values() const noexcept { return values_; }

    Complex& operator()(int row, int col) noexcept { return values_(row, col); }
    const Complex& operator()(int row, int col) const noexcept { return values_(row, col); }

    /// Sum |u|^2 dx^2.
    double power() const noexcept;

private:
    GridSpec grid_;
    Array2D<Complex> values_;
};

/// Real phase map in radians.
class PhaseScreen {
public:
    PhaseScreen() = default;
    explicit PhaseScreen(const GridSpec& grid);
    PhaseScreen(const GridSpec& grid, Array2D<double> phase);

    const GridSpec& grid() const noexcept { return grid_; }
    Array2D<double>& phase() noexcept { return phase_; }
    const Array2D<double>& phase() const noexcept { return phase_; }

    double operator()(int row, int col) const noexcept { return phase_(row, col); }

private:
    GridSpec grid_;
    Array2D<double> phase_;
};

/// p = 0 Laguerre-Gaussian vortex (sqrt(2) r / w)^|l| exp(-r^2/w^2) exp(i l theta),
/// centred on the grid and scaled to unit power.
ComplexField make_vortex_beam(const GridSpec& grid, int ell, double waist);

/// u * exp(i phi), pointwise.
ComplexField apply_phase(const ComplexField& field, const PhaseScreen& screen);

/// |u|^2 per pixel.
Image intensity(const ComplexField& field);

/// Linear min-max rescale to [0, 1]. Throws DegenerateInputError on a constant image.
Image normalize_image(const Image& img);

PhaseScreen negate(const PhaseScreen& screen);

}  // namespace oamao
