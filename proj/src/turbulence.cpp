#include "oamao/turbulence.hpp"

#include <cmath>
#include <numbers>

#include "oamao/fft.hpp"

namespace oamao {
namespace {

constexpr double kAT = 1.863e-2;
constexpr double kAS = 1.9e-4;
constexpr double kATS = 9.41e-3;

// DFT index -> signed frequency index.
int signed_index(int i, int n) { return i < n / 2 ? i : i - n; }

template <class F>
void for_each_frequency(const GridSpec& grid, F&& f) {
    const double dk = 2.0 * std::numbers::pi / grid.side();
    for (int row = 0; row < grid.n; ++row) {
        const double ky = dk * signed_index(row, grid.n);
        for (int col = 0; col < grid.n; ++col) {
            const double kx = dk * signed_index(col, grid.n);
            f(row, col, std::hypot(kx, ky));
        }
    }
}

}  // namespace

TurbulenceParams TurbulenceParams::from_cn2(double cn2, double wavelength, double z, double tau, double eta) {
    TurbulenceParams p;
    p.cn2 = cn2;
    p.epsilon = 1e-5;
    p.chi_t = cn2 * std::cbrt(p.epsilon) / 1e-8;
    p.tau = tau;
    p.eta = eta;
    p.z = z;
    p.k0 = 2.0 * std::numbers::pi / wavelength;
    p.validate();
    return p;
}

TurbulenceParams TurbulenceParams::from_dissipation(double epsilon, double chi_t, double wavelength, double z,
                                                    double tau, double eta) {
    if (!(epsilon >= 1e-10 && epsilon <= 1e-1))
        throw ConfigError("epsilon outside [1e-10, 1e-1] m^2/s^3");
    if (!(chi_t >= 1e-10 && chi_t <= 1e-4)) throw ConfigError("chi_T outside [1e-10, 1e-4] K^2/s");
    TurbulenceParams p;
    p.epsilon = epsilon;
    p.chi_t = chi_t;
    p.cn2 = 1e-8 * chi_t / std::cbrt(epsilon);
    p.tau = tau;
    p.eta = eta;
    p.z = z;
    p.k0 = 2.0 * std::numbers::pi / wavelength;
    p.validate();
    return p;
}

void TurbulenceParams::validate() const {
    if (!(cn2 >= 0.0) || !std::isfinite(cn2)) throw ConfigError("cn2 must be finite and non-negative");
    if (!(epsilon >= 1e-10 && epsilon <= 1e-1)) throw ConfigError("epsilon outside [1e-10, 1e-1] m^2/s^3");
    if (!(tau >= -5.0 && tau < 0.0)) throw ConfigError("tau must lie in [-5, 0)");
    if (!(eta > 0.0)) throw ConfigError("inner scale eta must be positive");
    if (!(z > 0.0)) throw ConfigError("path length must be positive");
    if (!(k0 > 0.0)) throw ConfigError("wavenumber must be positive");
}

std::vector<TurbulenceParams> standard_levels() {
    std::vector<TurbulenceParams> levels;
    for (double cn2 : {1e-15, 1e-14, 1e-13, 1e-12})
        levels.push_back(TurbulenceParams::from_cn2(cn2, kStandardWavelength, kStandardPathLength));
    return levels;
}

double index_spectrum(const TurbulenceParams& p, double kappa) {
    if (!(kappa > 0.0)) throw DomainError("index_spectrum: kappa must be positive");
    const double ke = kappa * p.eta;
    const double delta = 8.284 * std::pow(ke, 4.0 / 3.0) + 12.978 * ke * ke;
    const double balance = std::exp(-kAT * delta) - 2.0 / p.tau * std::exp(-kATS * delta) +
                           std::exp(-kAS * delta) / (p.tau * p.tau);
    return 0.388 * p.cn2 * std::pow(kappa, -11.0 / 3.0) * (1.0 + 2.35 * std::pow(ke, 2.0 / 3.0)) * balance;
}

double phase_spectrum(const TurbulenceParams& p, double kappa) {
    return 2.0 * std::numbers::pi * p.k0 * p.k0 * p.z * index_spectrum(p, kappa);
}

double ScreenRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double ScreenRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

Complex ScreenRng::complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2, im * std::numbers::sqrt2 / 2};
}

PhaseScreen make_screen(const TurbulenceParams& params, const GridSpec& grid, ScreenRng& rng) {
    grid.validate();
    params.validate();
    const double dk = 2.0 * std::numbers::pi / grid.side();
    Array2D<Complex> spectrum(grid.n);
    // Noise is drawn for every bin, including DC, so the stream layout does not
    // depend on the spectrum.
    for_each_frequency(grid, [&](int row, int col, double kappa) {
        const Complex noise = rng.complex_normal();
        if (kappa > 0.0)
            spectrum(row, col) = noise * (std::numbers::sqrt2 * dk * std::sqrt(phase_spectrum(params, kappa)));
    });
    // The unitary transform carries 1/n; scale back to a plain sum over bins.
    fft::forward(spectrum);
    PhaseScreen screen(grid);
    auto& phase = screen.phase();
    double mean = 0.0;
    for (std::size_t i = 0; i < phase.size(); ++i) {
        phase[i] = spectrum[i].real() * grid.n;
        mean += phase[i];
    }
    mean /= static_cast<double>(phase.size());
    for (auto& v : phase) v -= mean;
    return screen;
}

double screen_variance(const TurbulenceParams& params, const GridSpec& grid) {
    const double dk = 2.0 * std::numbers::pi / grid.side();
    double total = 0.0;
    for_each_frequency(grid, [&](int, int, double kappa) {
        if (kappa > 0.0) total += dk * dk * phase_spectrum(params, kappa);
    });
    return total;
}

}  // namespace oamao
