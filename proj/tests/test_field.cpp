#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oamao/field.hpp"
#include "oamao/turbulence.hpp"
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

}  // namespace

TEST_CASE("grid validation") {
    CHECK_NOTHROW(desk_grid().validate());
    CHECK_THROWS_AS(GridSpec::from_side(48, 0.01, 633e-9).validate(), ConfigError);
    CHECK_THROWS_AS(GridSpec::from_side(4, 0.01, 633e-9).validate(), ConfigError);
    CHECK_THROWS_AS((GridSpec{64, -1.0, 633e-9}).validate(), ConfigError);
    CHECK_THROWS_AS((GridSpec{64, 1e-4, 0.0}).validate(), ConfigError);
    const auto g = desk_grid();
    CHECK(g.dx == doctest::Approx(1.5625e-4).epsilon(1e-15));
    CHECK(g.side() == doctest::Approx(0.01).epsilon(1e-15));
    // No pixel centre on the axis.
    CHECK(g.coord(31) == doctest::Approx(-0.5 * g.dx));
    CHECK(g.coord(32) == doctest::Approx(0.5 * g.dx));
}

TEST_CASE("vortex beam: Gaussian for ell = 0 has constant phase") {
    const auto g = desk_grid();
    const auto u = make_vortex_beam(g, 0, 3.5e-3);
    for (const auto& v : u.values()) CHECK(std::abs(std::arg(v)) < 1e-15);
    CHECK(u.power() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("vortex beam ell = -3 at 256 x 256 is a doughnut with a dark core") {
    const auto g = GridSpec::from_side(256, 0.01, 633e-9);
    const auto img = intensity(make_vortex_beam(g, -3, 3.5e-3));
    double peak = 0.0;
    for (double v : img) peak = std::max(peak, v);
    // The four pixels around the axis are within half a pixel of r = 0.
    for (int r : {127, 128})
        for (int c : {127, 128}) CHECK(img(r, c) < 1e-9 * peak);
}

TEST_CASE("vortex beam ring radius follows w sqrt(|l| / 2)") {
    // A smaller waist keeps the ring away from the aperture edge.
    const auto g = GridSpec::from_side(256, 0.01, 633e-9);
    const double waist = 1.5e-3;
    const auto img = intensity(make_vortex_beam(g, -3, waist));
    int best = 0;
    double best_v = -1.0;
    const int row = 128;
    for (int c = 128; c < 256; ++c)
        if (img(row, c) > best_v) best_v = img(row, c), best = c;
    const double radius = std::hypot(g.coord(best), g.coord(row));
    CHECK(std::abs(radius - waist * std::sqrt(1.5)) <= g.dx);
}

TEST_CASE("vortex beam rejects bad parameters") {
    const auto g = desk_grid();
    CHECK_THROWS_AS(make_vortex_beam(g, -3, 0.0), ConfigError);
    CHECK_THROWS_AS(make_vortex_beam(g, -3, 0.006), ConfigError);
    CHECK_THROWS_AS(make_vortex_beam(g, 17, 1e-3), ConfigError);
    CHECK_NOTHROW(make_vortex_beam(g, 16, 1e-3));
}

TEST_CASE("vortex beam is invariant under 90 degree rotation in modulus") {
    const auto g = desk_grid();
    const auto u = make_vortex_beam(g, -3, 3.5e-3);
    double peak = 0.0, worst = 0.0;
    for (int r = 0; r < g.n; ++r)
        for (int c = 0; c < g.n; ++c) {
            peak = std::max(peak, std::abs(u(r, c)));
            worst = std::max(worst, std::abs(std::abs(u(r, c)) - std::abs(u(c, g.n - 1 - r))));
        }
    CHECK(worst / peak < 1e-6);
}

TEST_CASE("apply_phase") {
    const auto g = desk_grid();
    const auto u = make_vortex_beam(g, -3, 3.5e-3);

    SUBCASE("zero screen is the identity") { CHECK(apply_phase(u, PhaseScreen(g)).values() == u.values()); }

    SUBCASE("screen then its negation restores the field and power is conserved") {
        const auto levels = standard_levels();
        ScreenRng rng(11);
        const auto screen = make_screen(levels[3], g, rng);
        const auto d = apply_phase(u, screen);
        CHECK(std::abs(d.power() - u.power()) / u.power() < 1e-12);
        const auto back = apply_phase(d, negate(screen));
        double err = 0.0;
        for (std::size_t i = 0; i < u.values().size(); ++i)
            err = std::max(err, std::abs(back.values()[i] - u.values()[i]));
        CHECK(err < 1e-12);
    }

    SUBCASE("grid mismatch") {
        CHECK_THROWS_AS(apply_phase(u, PhaseScreen(GridSpec::from_side(32, 0.01, 633e-9))), DimensionError);
    }
}

TEST_CASE("intensity") {
    const auto g = desk_grid();
    for (double v : intensity(ComplexField(g))) CHECK(v == 0.0);

    const auto u = random_field(g, 3);
    const auto img = intensity(u);
    double sum = 0.0;
    for (double v : img) {
        CHECK(v >= 0.0);
        sum += v;
    }
    CHECK(sum == doctest::Approx(u.power() / (g.dx * g.dx)).epsilon(1e-12));

    const auto unit = make_vortex_beam(g, -3, 3.5e-3);
    double s = 0.0;
    for (double v : intensity(unit)) s += v;
    CHECK(s == doctest::Approx(1.0 / (g.dx * g.dx)).epsilon(1e-12));
}

TEST_CASE("normalize_image") {
    Image img(8);
    img[0] = 0.0;
    img[1] = 2.0;
    img[2] = 4.0;
    for (std::size_t i = 3; i < img.size(); ++i) img[i] = 2.0;
    const auto out = normalize_image(img);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.5);
    CHECK(out[2] == 1.0);
    CHECK(normalize_image(out) == out);
    CHECK_THROWS_AS(normalize_image(Image(8, 3.0)), DegenerateInputError);
    CHECK_THROWS_AS(normalize_image(Image(8)), DegenerateInputError);
}

TEST_CASE("normalized strong-turbulence intensity spans [0, 1]") {
    const auto g = desk_grid();
    ScreenRng rng(5);
    const auto screen = make_screen(standard_levels()[3], g, rng);
    const auto img = normalize_image(intensity(apply_phase(make_vortex_beam(g, -3, 3.5e-3), screen)));
    double lo = 1.0, hi = 0.0;
    for (double v : img) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo == 0.0);
    CHECK(hi == 1.0);
}
