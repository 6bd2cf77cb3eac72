#include "oamao/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "oamao/io.hpp"

namespace oamao {
namespace {

Complex sample_bilinear(const ComplexField& field, double x, double y) {
    const auto& g = field.grid();
    const double fx = x / g.dx + g.n / 2 - 0.5;
    const double fy = y / g.dx + g.n / 2 - 0.5;
    const int c0 = static_cast<int>(std::floor(fx));
    const int r0 = static_cast<int>(std::floor(fy));
    const double ax = fx - c0;
    const double ay = fy - r0;
    auto at = [&](int row, int col) {
        return field(std::clamp(row, 0, g.n - 1), std::clamp(col, 0, g.n - 1));
    };
    return (1 - ax) * (1 - ay) * at(r0, c0) + ax * (1 - ay) * at(r0, c0 + 1) + (1 - ax) * ay * at(r0 + 1, c0) +
           ax * ay * at(r0 + 1, c0 + 1);
}

}  // namespace

double OamSpectrum::weight(int ell) const {
    if (!contains(ell)) throw DomainError("charge " + std::to_string(ell) + " outside spectrum range");
    return weights[static_cast<std::size_t>(ell - ell_min)];
}

OamSpectrum oam_decompose(const ComplexField& field, int ell_min, int ell_max) {
    if (ell_min > ell_max) throw DomainError("oam_decompose: empty charge range");
    const auto& g = field.grid();
    const int radii = g.n / 2;
    const int angles = std::max(4, 4 * std::max(std::abs(ell_min), std::abs(ell_max)));
    const double r_step = 0.5 * g.side() / radii;

    OamSpectrum spectrum{ell_min, ell_max, std::vector<double>(static_cast<std::size_t>(ell_max - ell_min + 1))};
    std::vector<Complex> ring(static_cast<std::size_t>(angles));
    std::vector<Complex> twiddle(static_cast<std::size_t>(angles));
    for (int ri = 0; ri < radii; ++ri) {
        const double r = (ri + 0.5) * r_step;
        for (int a = 0; a < angles; ++a) {
            const double theta = 2.0 * std::numbers::pi * a / angles;
            ring[static_cast<std::size_t>(a)] = sample_bilinear(field, r * std::cos(theta), r * std::sin(theta));
        }
        for (int ell = ell_min; ell <= ell_max; ++ell) {
            Complex c{};
            for (int a = 0; a < angles; ++a)
                c += ring[static_cast<std::size_t>(a)] * std::polar(1.0, -2.0 * std::numbers::pi * ell * a / angles);
            c /= static_cast<double>(angles);
            spectrum.weights[static_cast<std::size_t>(ell - ell_min)] += r * std::norm(c);
        }
    }
    double total = 0.0;
    for (double w : spectrum.weights) total += w;
    if (!(total > 0.0)) throw DegenerateInputError("oam_decompose: field has no power in the charge range");
    for (auto& w : spectrum.weights) w /= total;
    return spectrum;
}

double mode_purity(const OamSpectrum& spectrum, int m) { return spectrum.weight(m); }

double mode_purity(const ComplexField& field, int m) { return mode_purity(oam_decompose(field), m); }

double mse(const Image& a, const Image& b) {
    if (a.n() != b.n()) throw DimensionError("mse: image sizes differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum / static_cast<double>(a.size());
}

double psnr(const Image& pred, const Image& truth) {
    const double err = mse(pred, truth);
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / err);
}

std::string format_metric_csv(const std::vector<MetricRow>& rows) {
    std::ostringstream out;
    out << kMetricCsvHeader << '\n';
    for (const auto& r : rows)
        out << r.sample_id << ',' << r.level << ',' << io::format_double(r.mp_distorted) << ','
            << io::format_double(r.mp_compensated) << ',' << io::format_double(r.psnr) << ',' << r.epoch << '\n';
    return std::move(out).str();
}

void write_metric_csv(const std::filesystem::path& path, const std::vector<MetricRow>& rows) {
    io::write_file_atomic(path, format_metric_csv(rows));
}

std::vector<MetricRow> read_metric_csv(const std::filesystem::path& path) {
    std::istringstream in(io::read_file(path));
    std::string line;
    std::size_t offset = 0;
    if (!std::getline(in, line) || line != kMetricCsvHeader) throw ParseError("metric CSV header mismatch", 0);
    offset += line.size() + 1;
    std::vector<MetricRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string cell[6];
        for (auto& c : cell)
            if (!std::getline(fields, c, ',')) throw ParseError("metric CSV row has fewer than 6 columns", offset);
        std::string extra;
        if (std::getline(fields, extra, ',')) throw ParseError("metric CSV row has more than 6 columns", offset);
        MetricRow r;
        r.sample_id = static_cast<long>(io::parse_int(cell[0], offset));
        r.level = static_cast<int>(io::parse_int(cell[1], offset));
        r.mp_distorted = io::parse_double(cell[2], offset);
        r.mp_compensated = io::parse_double(cell[3], offset);
        r.psnr = io::parse_double(cell[4], offset);
        r.epoch = static_cast<int>(io::parse_int(cell[5], offset));
        rows.push_back(r);
        offset += line.size() + 1;
    }
    return rows;
}

}  // namespace oamao
