#pragma once

// Independent reference implementations used only by the tests. None of these
// call into the library's FFT, spectrum or decomposition code.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "oamao/field.hpp"
#include "oamao/turbulence.hpp"

namespace oracle {

using oamao::Complex;

/// Oceanic refractive-index spectrum evaluated term by term in long double.
inline long double index_spectrum(long double cn2, long double tau, long double eta, long double kappa) {
    const long double a_t = 1.863e-2L, a_s = 1.9e-4L, a_ts = 9.41e-3L;
    const long double ke = kappa * eta;
    const long double delta = 8.284L * std::pow(ke, 4.0L / 3.0L) + 12.978L * ke * ke;
    const long double bracket =
        std::exp(-a_t * delta) - 2.0L / tau * std::exp(-a_ts * delta) + std::exp(-a_s * delta) / (tau * tau);
    return 0.388L * cn2 * std::pow(kappa, -11.0L / 3.0L) * (1.0L + 2.35L * std::pow(ke, 2.0L / 3.0L)) * bracket;
}

/// Screen variance as the spectral sum (2 pi / L)^2 * 2 pi k0^2 Z Phi over the
/// nonzero bins of the periodic grid.
inline double screen_variance(const oamao::TurbulenceParams& p, const oamao::GridSpec& g) {
    const long double dk = 2.0L * std::numbers::pi_v<long double> / (g.n * g.dx);
    long double total = 0.0L;
    for (int i = -g.n / 2; i < g.n / 2; ++i)
        for (int j = -g.n / 2; j < g.n / 2; ++j) {
            if (i == 0 && j == 0) continue;
            const long double kappa = dk * std::sqrt(static_cast<long double>(i * i + j * j));
            total += dk * dk * 2.0L * std::numbers::pi_v<long double> * p.k0 * p.k0 * p.z *
                     index_spectrum(p.cn2, p.tau, p.eta, kappa);
        }
    return static_cast<double>(total);
}

/// Direct O(n^4) 2-D DFT with negative exponent and 1/n scaling per axis.
inline std::vector<Complex> dft2(const std::vector<Complex>& in, int n, int sign = -1) {
    std::vector<Complex> out(in.size());
    const double two_pi = 2.0 * std::numbers::pi;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            Complex acc{};
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c)
                    acc += in[static_cast<std::size_t>(r * n + c)] *
                           std::polar(1.0, sign * two_pi * (static_cast<double>(u) * r + static_cast<double>(v) * c) / n);
            out[static_cast<std::size_t>(u * n + v)] = acc / static_cast<double>(n);
        }
    return out;
}

/// First Rayleigh-Sommerfeld solution by direct summation over source pixels:
/// u(x, y, z) = sum u0 (z / r^2) (1 / (2 pi r) + 1 / (i lambda)) exp(i k r) dx^2.
inline oamao::ComplexField rayleigh_sommerfeld(const oamao::ComplexField& src, double z) {
    const auto& g = src.grid();
    const double k = 2.0 * std::numbers::pi / g.wavelength;
    oamao::ComplexField out(g);
    for (int r = 0; r < g.n; ++r)
        for (int c = 0; c < g.n; ++c) {
            Complex acc{};
            for (int sr = 0; sr < g.n; ++sr)
                for (int sc = 0; sc < g.n; ++sc) {
                    const double dxp = g.coord(c) - g.coord(sc);
                    const double dyp = g.coord(r) - g.coord(sr);
                    const double rr = std::sqrt(dxp * dxp + dyp * dyp + z * z);
                    const Complex w = (z / (rr * rr)) * (1.0 / (2.0 * std::numbers::pi * rr) +
                                                         1.0 / Complex(0.0, g.wavelength)) *
                                      std::polar(1.0, k * rr);
                    acc += src(sr, sc) * w;
                }
            out(r, c) = acc * g.dx * g.dx;
        }
    return out;
}

/// Beam radius from the second moment: for I ~ exp(-2 r^2 / w^2), w^2 = 2 <x^2 + y^2>.
inline double second_moment_radius(const oamao::ComplexField& u) {
    const auto& g = u.grid();
    double num = 0.0, den = 0.0;
    for (int r = 0; r < g.n; ++r)
        for (int c = 0; c < g.n; ++c) {
            const double i = std::norm(u(r, c));
            const double x = g.coord(c), y = g.coord(r);
            num += i * (x * x + y * y);
            den += i;
        }
    return std::sqrt(2.0 * num / den);
}

/// Unnormalized p = 0 Laguerre-Gaussian mode, for synthesizing mode mixtures.
inline Complex lg_mode(double x, double y, int ell, double waist) {
    const double r = std::hypot(x, y);
    const double theta = std::atan2(y, x);
    const double rho = std::sqrt(2.0) * r / waist;
    return std::pow(rho, std::abs(ell)) * std::exp(-r * r / (waist * waist)) * std::polar(1.0, ell * theta);
}

}  // namespace oracle
