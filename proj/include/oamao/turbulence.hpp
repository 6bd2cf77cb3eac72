#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "oamao/field.hpp"

namespace oamao {

/// Physical parameters of the oceanic refractive-index spectrum plus the
/// optical wavenumber and path length that turn it into a phase spectrum.
struct TurbulenceParams {
    double cn2 = 0.0;        ///< temperature-fluctuation strength, K^2 m^-2/3
    double epsilon = 1e-5;   ///< kinetic-energy dissipation rate, m^2/s^3
    double chi_t = 0.0;      ///< temperature-variance dissipation rate, K^2/s
    double tau = -2.5;       ///< temperature/salinity balance, in [-5, 0)
    double eta = 1e-3;       ///< inner scale, m
    double z = 30.0;         ///< path length, m
    double k0 = 0.0;         ///< optical wavenumber 2 pi / lambda, 1/m

    /// Fixes epsilon at 1e-5 and derives chi_t from cn2 = 1e-8 eps^-1/3 chi_t.
    static TurbulenceParams from_cn2(double cn2, double wavelength, double z, double tau = -2.5,
                                     double eta = 1e-3);
    /// Derives cn2 from (epsilon, chi_t); both must lie in their physical ranges.
    static TurbulenceParams from_dissipation(double epsilon, double chi_t, double wavelength, double z,
                                             double tau = -2.5, double eta = 1e-3);

    void validate() const;
};

/// Four presets: weak, two medium, strong. Z = 30 m, 633 nm.
std::vector<TurbulenceParams> standard_levels();

inline constexpr double kStandardWavelength = 633e-9;
inline constexpr double kStandardPathLength = 30.0;

/// Refractive-index power spectrum Phi_ot(kappa). Throws DomainError for kappa <= 0.
double index_spectrum(const TurbulenceParams& params, double kappa);

/// Phase power spectrum 2 pi k0^2 Z Phi_ot(kappa).
double phase_spectrum(const TurbulenceParams& params, double kappa);

/// Deterministic generator for screen noise. Draws come from mt19937_64 with a
/// hand-rolled Box-Muller transform so the stream does not depend on the
/// standard library's distribution implementation.
class ScreenRng {
public:
    explicit ScreenRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal.
    double normal();
    /// Complex normal with unit total variance (1/2 per quadrature).
    Complex complex_normal();

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Power-spectrum inversion: filter complex white noise by sqrt(Phi(kappa)) on
/// the grid's DFT frequencies, transform, keep the real part. The spectral
/// amplitude carries an extra sqrt(2) so the real part alone holds the full
/// phase variance. The kappa = 0 bin is zero and the piston is removed.
PhaseScreen make_screen(const TurbulenceParams& params, const GridSpec& grid, ScreenRng& rng);

/// Expected per-pixel variance of make_screen output: the sum of
/// (2 pi / (n dx))^2 Phi(kappa) over every nonzero grid frequency.
double screen_variance(const TurbulenceParams& params, const GridSpec& grid);

}  // namespace oamao
