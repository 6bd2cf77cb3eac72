#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include "oamao/io.hpp"
#include "oamao/metrics.hpp"
#include "oamao/turbulence.hpp"
#include "oracles.hpp"

using namespace oamao;

namespace {

const GridSpec kGrid = GridSpec::from_side(128, 0.01, 633e-9);

struct Mode {
    int ell;
    Complex coeff;
};

// Sum of p = 0 modes, each scaled to unit power before weighting, optionally
// rotated by `rotation` radians about the centre.
ComplexField mixture(const std::vector<Mode>& modes, double waist, double rotation = 0.0) {
    ComplexField out(kGrid);
    for (const auto& m : modes) {
        ComplexField mode(kGrid);
        for (int r = 0; r < kGrid.n; ++r)
            for (int c = 0; c < kGrid.n; ++c) {
                const double x = kGrid.coord(c), y = kGrid.coord(r);
                const double xr = std::cos(rotation) * x + std::sin(rotation) * y;
                const double yr = -std::sin(rotation) * x + std::cos(rotation) * y;
                mode(r, c) = oracle::lg_mode(xr, yr, m.ell, waist);
            }
        const double scale = 1.0 / std::sqrt(mode.power());
        for (std::size_t i = 0; i < out.values().size(); ++i) out.values()[i] += m.coeff * scale * mode.values()[i];
    }
    return out;
}

}  // namespace

TEST_CASE("pure vortex has unit purity") {
    for (int n : {64, 128, 256}) {
        const auto g = GridSpec::from_side(n, 0.01, 633e-9);
        const auto spec = oam_decompose(make_vortex_beam(g, -3, 3.5e-3));
        CHECK(spec.ell_min == -10);
        CHECK(spec.ell_max == 10);
        CHECK(spec.weights.size() == 21);
        CHECK(std::abs(mode_purity(spec, -3) - 1.0) < 1e-6);
        for (int ell = -10; ell <= 10; ++ell)
            if (ell != -3) CHECK(spec.weight(ell) < 1e-6);
        CHECK(mode_purity(spec, 0) < 1e-6);
    }
    CHECK(std::abs(mode_purity(make_vortex_beam(kGrid, -3, 3.5e-3), -3) - 1.0) < 1e-6);
}

TEST_CASE("equal superposition of +1 and -1") {
    const auto spec = oam_decompose(mixture({{1, 1.0}, {-1, 1.0}}, 2e-3));
    CHECK(std::abs(spec.weight(1) - 0.5) < 1e-3);
    CHECK(std::abs(spec.weight(-1) - 0.5) < 1e-3);
    CHECK(std::abs(mode_purity(spec, 1) - 0.5) < 1e-3);
}

TEST_CASE("spectrum weights are a distribution") {
    ScreenRng rng(5);
    const auto beam = make_vortex_beam(kGrid, -3, 3.5e-3);
    for (int level = 0; level < 4; ++level) {
        const auto spec = oam_decompose(apply_phase(beam, make_screen(standard_levels()[level], kGrid, rng)));
        double sum = 0.0;
        for (double w : spec.weights) {
            CHECK(w >= 0.0);
            sum += w;
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("decomposition recovers synthesis weights") {
    const std::vector<std::vector<Mode>> cases = {
        {{-3, 0.8}, {0, Complex(0.0, 0.6)}},
        {{-3, 1.0}, {-2, 0.5}, {-4, Complex(0.3, 0.3)}, {2, 0.2}, {5, Complex(0.0, -0.4)}},
        {{-7, 0.1}, {-1, 0.9}, {1, 0.3}, {4, Complex(-0.5, 0.2)}, {8, 0.25}},
    };
    for (const auto& modes : cases) {
        double total = 0.0;
        for (const auto& m : modes) total += std::norm(m.coeff);
        const auto spec = oam_decompose(mixture(modes, 1.5e-3));
        for (const auto& m : modes) CHECK(std::abs(spec.weight(m.ell) - std::norm(m.coeff) / total) < 1e-3);
    }
}

TEST_CASE("global phase invariance") {
    ScreenRng rng(9);
    const auto field =
        apply_phase(make_vortex_beam(kGrid, -3, 3.5e-3), make_screen(standard_levels()[2], kGrid, rng));
    const auto base = oam_decompose(field);
    for (double alpha : {0.3, 1.7, -2.9, 100.0}) {
        auto shifted = field;
        for (auto& v : shifted.values()) v *= std::polar(1.0, alpha);
        const auto spec = oam_decompose(shifted);
        for (std::size_t i = 0; i < spec.weights.size(); ++i) CHECK(std::abs(spec.weights[i] - base.weights[i]) < 1e-10);
    }
}

TEST_CASE("rotation equivariance") {
    const std::vector<Mode> modes = {{-3, 1.0}, {-1, 0.4}, {2, Complex(0.0, 0.5)}, {6, 0.3}};
    const auto base = oam_decompose(mixture(modes, 1.5e-3));
    for (double angle : {0.2, 0.9, std::numbers::pi / 3, 2.5}) {
        const auto spec = oam_decompose(mixture(modes, 1.5e-3, angle));
        for (std::size_t i = 0; i < spec.weights.size(); ++i) CHECK(std::abs(spec.weights[i] - base.weights[i]) < 1e-3);
    }
}

TEST_CASE("mode purity and decomposition errors") {
    const auto spec = oam_decompose(make_vortex_beam(kGrid, -3, 3.5e-3));
    CHECK_THROWS_AS(mode_purity(spec, 11), DomainError);
    CHECK_THROWS_AS(mode_purity(spec, -11), DomainError);
    CHECK_THROWS_AS(oam_decompose(ComplexField(kGrid)), DegenerateInputError);
    CHECK_THROWS_AS(oam_decompose(make_vortex_beam(kGrid, -3, 3.5e-3), 2, 1), DomainError);
    const auto narrow = oam_decompose(make_vortex_beam(kGrid, -3, 3.5e-3), -8, 2);
    CHECK(narrow.weights.size() == 11);
    CHECK(std::abs(narrow.weight(-3) - 1.0) < 1e-6);
}

TEST_CASE("mse and psnr") {
    Image a(16, 0.3);
    CHECK(psnr(a, a) == std::numeric_limits<double>::infinity());
    Image b(16, 0.4);
    CHECK(mse(a, b) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(psnr(b, a) == doctest::Approx(20.0).epsilon(1e-10));
    CHECK_THROWS_AS(mse(a, Image(8)), DimensionError);

    // PSNR is strictly decreasing in MSE.
    double prev = std::numeric_limits<double>::infinity();
    for (double e = 0.001; e < 0.5; e *= 1.7) {
        Image c(16, 0.3 + e);
        const double p = psnr(c, a);
        CHECK(p < prev);
        prev = p;
    }
}

TEST_CASE("metric CSV") {
    const std::vector<MetricRow> rows = {
        {12, 3, 0.1104987654321, 0.30951, 21.865, 50},
        {13, 3, 1.0 / 3.0, 0.25, std::numeric_limits<double>::infinity(), 10},
    };
    const auto text = format_metric_csv(rows);
    CHECK(text.rfind("sample_id,level,mp_distorted,mp_compensated,psnr,epoch\n", 0) == 0);

    const auto dir = std::filesystem::temp_directory_path() / "oamao_test_metrics";
    std::filesystem::create_directories(dir);
    write_metric_csv(dir / "m.csv", rows);
    const auto back = read_metric_csv(dir / "m.csv");
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back[i].sample_id == rows[i].sample_id);
        CHECK(back[i].level == rows[i].level);
        CHECK(back[i].mp_distorted == rows[i].mp_distorted);
        CHECK(back[i].mp_compensated == rows[i].mp_compensated);
        CHECK(back[i].psnr == rows[i].psnr);
        CHECK(back[i].epoch == rows[i].epoch);
    }

    io::write_file_atomic(dir / "bad_header.csv", "id,level\n1,2\n");
    CHECK_THROWS_AS(read_metric_csv(dir / "bad_header.csv"), ParseError);
    io::write_file_atomic(dir / "short.csv", std::string(kMetricCsvHeader) + "\n1,2,0.5\n");
    CHECK_THROWS_AS(read_metric_csv(dir / "short.csv"), ParseError);
    io::write_file_atomic(dir / "junk.csv", std::string(kMetricCsvHeader) + "\n1,2,0.5x,0.1,3,4\n");
    try {
        read_metric_csv(dir / "junk.csv");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == std::string(kMetricCsvHeader).size() + 1);
    }
    std::filesystem::remove_all(dir);
}
