#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oamao/dataset.hpp"
#include "oamao/ddnn.hpp"
#include "oamao/metrics.hpp"

namespace oamao {

/// Pointwise negation.
PhaseScreen conjugate_screen(const PhaseScreen& pred);

/// Applies a compensation screen to a field on the same grid.
ComplexField compensate(const ComplexField& distorted_field, const PhaseScreen& comp);

/// Something that estimates the distorting screen from a recorded sample.
class ScreenPredictor {
public:
    virtual ~ScreenPredictor() = default;

    struct Prediction {
        Image image;         ///< encoded screen in [0, 1], compared against the ground-truth image
        PhaseScreen screen;  ///< decoded screen in radians
    };

    virtual Prediction predict(const Sample& sample, const GridSpec& grid) const = 0;
    virtual std::string name() const = 0;
};

/// Runs the diffractive network on the distorted intensity.
class NetworkPredictor final : public ScreenPredictor {
public:
    explicit NetworkPredictor(const DiffractiveNetwork& net) : net_(net) {}
    Prediction predict(const Sample& sample, const GridSpec& grid) const override;
    std::string name() const override { return "network"; }

private:
    const DiffractiveNetwork& net_;
};

/// Returns the stored ground-truth image and the exact screen regenerated from
/// the sample seed, so its compensation reaches the perfect-knowledge bound.
class OraclePredictor final : public ScreenPredictor {
public:
    explicit OraclePredictor(const Manifest& manifest) : manifest_(manifest) {}
    Prediction predict(const Sample& sample, const GridSpec& grid) const override;
    std::string name() const override { return "oracle"; }

private:
    const Manifest& manifest_;
};

/// Returns a zero screen.
class IdentityPredictor final : public ScreenPredictor {
public:
    Prediction predict(const Sample& sample, const GridSpec& grid) const override;
    std::string name() const override { return "identity"; }
};

/// Per-sample outcome. Mode purities are measured at the screen plane, where
/// the compensation screen is applied; `mp_receiver` applies the same
/// compensation to the recorded field after the observation leg instead.
struct SampleEvaluation {
    MetricRow row;
    double mp_bound = 0.0;     ///< ground-truth conjugate at the screen plane
    double mp_receiver = 0.0;  ///< predicted conjugate at the receiver plane
    double mp_receiver_bound = 0.0;
};

struct LevelReport {
    int level = 0;
    int epoch = 0;
    std::string predictor;
    std::vector<SampleEvaluation> samples;  ///< in sample order

    std::vector<MetricRow> rows() const;
    double mean_mp_distorted() const;
    double mean_mp_compensated() const;
    double mean_mp_bound() const;
    double mean_mp_receiver() const;
    double mean_mp_receiver_bound() const;
    double mean_psnr() const;
    /// Fraction of samples whose compensated MP is strictly above the distorted MP.
    double fraction_improved() const;
};

struct EvaluateOptions {
    int epoch = 0;
    int threads = 0;  ///< 0 reads OAMAO_THREADS
    /// When set, writes {id}_gt.pgm, {id}_pred.pgm, {id}_distorted.pgm and
    /// {id}_compensated.pgm per sample.
    std::optional<std::filesystem::path> dump_dir;
};

/// Evaluates `predictor` on the given samples of one level. Fields are
/// regenerated from each sample's seed. Throws ConfigError for an empty set.
LevelReport evaluate_level(const ScreenPredictor& predictor, const Manifest& manifest,
                           const std::vector<Sample>& samples, int level, const EvaluateOptions& options = {});

struct SweepRow {
    int epoch = 0;
    double mean_psnr = 0.0;
    double mean_mp_compensated = 0.0;
    double mean_mp_distorted = 0.0;
    double fraction_improved = 0.0;
};

/// Evaluates one network per epoch (ascending) on the same samples.
std::vector<SweepRow> epoch_sweep(const std::map<int, DiffractiveNetwork>& networks, const Manifest& manifest,
                                  const std::vector<Sample>& samples, int level, int threads = 0);

/// Builds training pairs from loaded samples.
std::vector<TrainingPair> training_pairs(const std::vector<Sample>& samples);

}  // namespace oamao
