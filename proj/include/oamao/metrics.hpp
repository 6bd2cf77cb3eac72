#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "oamao/field.hpp"

namespace oamao {

/// Normalized OAM power spectrum over an inclusive range of charges.
struct OamSpectrum {
    int ell_min = 0;
    int ell_max = 0;
    std::vector<double> weights;  ///< weights[ell - ell_min], summing to 1

    bool contains(int ell) const noexcept { return ell >= ell_min && ell <= ell_max; }
    double weight(int ell) const;
};

inline constexpr int kDefaultEllMin = -10;
inline constexpr int kDefaultEllMax = 10;

/// Azimuthal decomposition about the grid centre. The field is resampled by
/// bilinear interpolation onto n/2 radii spanning the inscribed circle and
/// 4 * max|ell| angles; I_ell = sum_r r |c_ell(r)|^2 with c_ell the angular
/// Fourier coefficient. Throws DegenerateInputError for a zero field.
OamSpectrum oam_decompose(const ComplexField& field, int ell_min = kDefaultEllMin, int ell_max = kDefaultEllMax);

/// Fraction of power in charge m. Throws DomainError if m is outside the range.
double mode_purity(const OamSpectrum& spectrum, int m);

/// Shorthand for mode_purity(oam_decompose(field), m) over the default range.
double mode_purity(const ComplexField& field, int m);

double mse(const Image& a, const Image& b);

/// 10 log10(1 / MSE) for images in [0, 1]. Identical images give +infinity.
double psnr(const Image& pred, const Image& truth);

/// One row of a metric report. Column order is fixed:
/// sample_id,level,mp_distorted,mp_compensated,psnr,epoch
struct MetricRow {
    long sample_id = 0;
    int level = 0;
    double mp_distorted = 0.0;
    double mp_compensated = 0.0;
    double psnr = 0.0;
    int epoch = 0;
};

inline constexpr const char* kMetricCsvHeader = "sample_id,level,mp_distorted,mp_compensated,psnr,epoch";

std::string format_metric_csv(const std::vector<MetricRow>& rows);
void write_metric_csv(const std::filesystem::path& path, const std::vector<MetricRow>& rows);
std::vector<MetricRow> read_metric_csv(const std::filesystem::path& path);

}  // namespace oamao
