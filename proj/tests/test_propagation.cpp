#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oamao/metrics.hpp"
#include "oamao/propagation.hpp"
#include "oracles.hpp"

using namespace oamao;

namespace {

GridSpec desk_grid() { return GridSpec::from_side(64, 0.01, 633e-9); }

ComplexField random_field(const GridSpec& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    ComplexField u(g);
    for (auto& v : u.values()) v = {nd(rng), nd(rng)};
    return u;
}

double max_diff(const ComplexField& a, const ComplexField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

double max_abs(const ComplexField& a) {
    double m = 0.0;
    for (const auto& v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST_CASE("kernel identities") {
    const auto g = desk_grid();
    const auto identity = make_kernel(g, 0.0);
    for (const auto& v : identity.transfer()) CHECK(v == Complex(1.0, 0.0));

    const auto hp = make_kernel(g, 0.037);
    const auto hm = make_kernel(g, -0.037);
    for (std::size_t i = 0; i < hp.transfer().size(); ++i) {
        CHECK(std::abs(std::abs(hp.transfer()[i]) - 1.0) < 1e-15);
        CHECK(std::abs(hp.transfer()[i] * hm.transfer()[i] - 1.0) < 1e-14);
        CHECK(std::abs(hm.transfer()[i] - std::conj(hp.transfer()[i])) < 1e-14);
    }
}

TEST_CASE("kernel semigroup H(d1) H(d2) = H(d1 + d2)") {
    const auto g = desk_grid();
    // k d must stay small for a 1e-12 pointwise bound in double precision: one
    // ulp of d costs k * ulp(d) radians in the carrier.
    SUBCASE("sub-millimetre distances, 1e-12") {
        for (auto [d1, d2] : {std::pair{1e-4, 3e-5}, std::pair{-7e-5, 1.2e-4}}) {
            const auto a = make_kernel(g, d1), b = make_kernel(g, d2), c = make_kernel(g, d1 + d2);
            double err = 0.0;
            for (std::size_t i = 0; i < a.transfer().size(); ++i)
                err = std::max(err, std::abs(a.transfer()[i] * b.transfer()[i] - c.transfer()[i]));
            CHECK(err < 1e-12);
        }
    }
    SUBCASE("layer-scale distances, 1e-10") {
        for (auto [d1, d2] : {std::pair{0.05, 0.03}, std::pair{-0.02, 0.045}}) {
            const auto a = make_kernel(g, d1), b = make_kernel(g, d2), c = make_kernel(g, d1 + d2);
            double err = 0.0;
            for (std::size_t i = 0; i < a.transfer().size(); ++i)
                err = std::max(err, std::abs(a.transfer()[i] * b.transfer()[i] - c.transfer()[i]));
            CHECK(err < 1e-10);
        }
    }
}

TEST_CASE("propagation is unitary, linear, reversible and has the stated adjoint") {
    const auto g = desk_grid();
    const auto k = make_kernel(g, 0.05);
    const auto u = random_field(g, 1);
    const auto v = random_field(g, 2);

    const auto pu = propagate(u, k);
    CHECK(std::abs(pu.power() - u.power()) / u.power() < 1e-12);

    const auto back = propagate(pu, make_kernel(g, -0.05));
    CHECK(max_diff(back, u) < 1e-12 * max_abs(u));

    const Complex a{0.3, -1.2}, b{2.0, 0.5};
    ComplexField mix(g);
    for (std::size_t i = 0; i < g.size(); ++i) mix.values()[i] = a * u.values()[i] + b * v.values()[i];
    const auto pv = propagate(v, k);
    ComplexField expected(g);
    for (std::size_t i = 0; i < g.size(); ++i) expected.values()[i] = a * pu.values()[i] + b * pv.values()[i];
    CHECK(max_diff(propagate(mix, k), expected) < 1e-12 * max_abs(expected));

    const Complex lhs = inner_product(propagate(u, k), v);
    const Complex rhs = inner_product(u, propagate_adjoint(v, k));
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));

    CHECK_THROWS_AS(propagate(random_field(GridSpec::from_side(32, 0.01, 633e-9), 3), k), DimensionError);
}

TEST_CASE("unitary FFT matches the naive DFT oracle") {
    const auto g = GridSpec::from_side(8, 0.01, 633e-9);
    const auto u = random_field(g, 4);
    // propagate with distance 0 is IDFT(DFT(u)); check DFT itself through a kernel
    // whose transfer is exactly 1 and through the oracle round trip.
    const std::vector<Complex> in(u.values().begin(), u.values().end());
    const auto fwd = oracle::dft2(in, g.n, -1);
    const auto inv = oracle::dft2(fwd, g.n, +1);
    double err = 0.0;
    for (std::size_t i = 0; i < in.size(); ++i) err = std::max(err, std::abs(inv[i] - in[i]));
    CHECK(err < 1e-12);
    const auto p = propagate(u, make_kernel(g, 0.0));
    CHECK(max_diff(p, u) < 1e-13);
}

TEST_CASE("propagate agrees with the transfer function applied through the naive DFT") {
    const auto g = GridSpec::from_side(8, 1e-3, 633e-9);
    const auto u = random_field(g, 5);
    const auto k = make_kernel(g, 0.02);
    const std::vector<Complex> in(u.values().begin(), u.values().end());
    auto spec = oracle::dft2(in, g.n, -1);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= k.transfer()[i];
    const auto out = oracle::dft2(spec, g.n, +1);
    const auto p = propagate(u, k);
    double err = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) err = std::max(err, std::abs(out[i] - p.values()[i]));
    CHECK(err < 1e-12 * max_abs(u));
}

TEST_CASE("Gaussian beam width at one Rayleigh range is sqrt(2) w0") {
    const auto g = GridSpec::from_side(256, 0.01, 633e-9);
    const double w0 = 5e-4;
    const double zr = std::numbers::pi * w0 * w0 / g.wavelength;
    const auto u0 = make_vortex_beam(g, 0, w0);
    CHECK(oracle::second_moment_radius(u0) == doctest::Approx(w0).epsilon(1e-3));
    const auto u1 = propagate(u0, make_kernel(g, zr));
    CHECK(oracle::second_moment_radius(u1) == doctest::Approx(w0 * std::sqrt(2.0)).epsilon(0.01));
}

TEST_CASE("free-space propagation preserves the OAM charge") {
    // L = 0.02 m keeps the 3.5 mm doughnut clear of the aperture edge; at
    // L = 0.01 m the ring touches the boundary and wraparound costs ~1e-3 in MP.
    const auto g = GridSpec::from_side(256, 0.02, 633e-9);
    const auto u = propagate(make_vortex_beam(g, -3, 3.5e-3), make_kernel(g, 0.05));
    CHECK(std::abs(mode_purity(u, -3) - 1.0) < 1e-6);
}

TEST_CASE("padded propagation") {
    const auto g = desk_grid();
    const auto beam = make_vortex_beam(g, -3, 1e-3);
    const auto a = propagate(beam, make_kernel(g, 0.01));
    const auto b = propagate(beam, make_kernel(g, 0.01, true));
    // A small beam over a short hop never reaches the boundary, so padding changes nothing.
    CHECK(max_diff(a, b) < 1e-6 * max_abs(a));
    // Padding only removes power (what leaves the window is cropped).
    const auto wide = make_vortex_beam(g, -3, 3.5e-3);
    CHECK(propagate(wide, make_kernel(g, 2.0, true)).power() <= wide.power() * (1 + 1e-12));
    // Adjoint identity holds for the padded operator too.
    const auto u = random_field(g, 6), v = random_field(g, 7);
    const auto k = make_kernel(g, 0.3, true);
    const Complex lhs = inner_product(propagate(u, k), v);
    const Complex rhs = inner_product(u, propagate_adjoint(v, k));
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));
}

TEST_CASE("transfer-function propagation matches direct Rayleigh-Sommerfeld summation") {
    const auto g = GridSpec::from_side(32, 32 * 10e-6, 633e-9);
    ComplexField src(g);
    const double sigma = g.dx;
    for (int r = 0; r < g.n; ++r)
        for (int c = 0; c < g.n; ++c)
            src(r, c) = std::exp(-(g.coord(r) * g.coord(r) + g.coord(c) * g.coord(c)) / (2 * sigma * sigma));
    for (double fresnel : {16.0, 32.0}) {
        const double z = fresnel * g.dx * g.dx / g.wavelength;
        const auto tf = propagate(src, make_kernel(g, z));
        const auto rs = oracle::rayleigh_sommerfeld(src, z);
        double err = 0.0, peak = 0.0;
        for (int r = g.n / 2 - 4; r < g.n / 2 + 4; ++r)
            for (int c = g.n / 2 - 4; c < g.n / 2 + 4; ++c) {
                err = std::max(err, std::abs(tf(r, c) - rs(r, c)));
                peak = std::max(peak, std::abs(rs(r, c)));
            }
        CAPTURE(z);
        CHECK(err / peak < 0.01);
    }
}

TEST_CASE("layer_transmit") {
    const auto g = desk_grid();
    const auto u = random_field(g, 8);
    Array2D<Complex> t(g.n, Complex(0.5, 0.5));
    const auto out = layer_transmit(u, t);
    CHECK(out.values()[5] == u.values()[5] * Complex(0.5, 0.5));
    Array2D<Complex> gain(g.n, Complex(1.01, 0.0));
    CHECK_THROWS_AS(layer_transmit(u, gain), DomainError);
    CHECK_THROWS_AS(layer_transmit(u, Array2D<Complex>(32, Complex(1.0))), DimensionError);
}
