#include "oamao/pipeline.hpp"

#include <cmath>

#include "oamao/parallel.hpp"
#include "oamao/pgm.hpp"
#include "oamao/propagation.hpp"

namespace oamao {

PhaseScreen conjugate_screen(const PhaseScreen& pred) { return negate(pred); }

ComplexField compensate(const ComplexField& distorted_field, const PhaseScreen& comp) {
    if (!(distorted_field.grid() == comp.grid())) throw DimensionError("compensate: grids differ");
    return apply_phase(distorted_field, comp);
}

ScreenPredictor::Prediction NetworkPredictor::predict(const Sample& sample, const GridSpec& grid) const {
    sample.encoding.require_valid();
    auto fwd = forward(net_, encode_input(sample.distorted_img, grid));
    auto screen = sample.encoding.decode(fwd.output, grid);
    return {std::move(fwd.output), std::move(screen)};
}

ScreenPredictor::Prediction OraclePredictor::predict(const Sample& sample, const GridSpec& grid) const {
    sample.encoding.require_valid();
    if (!(grid == manifest_.grid)) throw DimensionError("oracle: grid differs from the manifest");
    SampleRecord rec;
    rec.id = sample.id;
    rec.level = sample.level_index;
    rec.seed = sample.seed;
    return {sample.gt_screen_img, synthesize_sample(manifest_, rec).screen};
}

ScreenPredictor::Prediction IdentityPredictor::predict(const Sample& sample, const GridSpec& grid) const {
    PhaseScreen zero(grid);
    sample.encoding.require_valid();
    return {sample.encoding.encode(zero), std::move(zero)};
}

namespace {

template <class F>
double mean_over(const std::vector<SampleEvaluation>& samples, F field) {
    if (samples.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& s : samples) sum += field(s);
    return sum / static_cast<double>(samples.size());
}

}  // namespace

std::vector<MetricRow> LevelReport::rows() const {
    std::vector<MetricRow> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.row);
    return out;
}

double LevelReport::mean_mp_distorted() const {
    return mean_over(samples, [](const SampleEvaluation& s) { return s.row.mp_distorted; });
}

double LevelReport::mean_mp_compensated() const {
    return mean_over(samples, [](const SampleEvaluation& s) { return s.row.mp_compensated; });
}

double LevelReport::mean_mp_bound() const {
    return mean_over(samples, [](const SampleEvaluation& s) { return s.mp_bound; });
}

double LevelReport::mean_mp_receiver() const {
    return mean_over(samples, [](const SampleEvaluation& s) { return s.mp_receiver; });
}

double LevelReport::mean_mp_receiver_bound() const {
    return mean_over(samples, [](const SampleEvaluation& s) { return s.mp_receiver_bound; });
}

double LevelReport::mean_psnr() const {
    return mean_over(samples, [](const SampleEvaluation& s) { return s.row.psnr; });
}

double LevelReport::fraction_improved() const {
    return mean_over(samples,
                     [](const SampleEvaluation& s) { return s.row.mp_compensated > s.row.mp_distorted ? 1.0 : 0.0; });
}

LevelReport evaluate_level(const ScreenPredictor& predictor, const Manifest& manifest,
                           const std::vector<Sample>& samples, int level, const EvaluateOptions& options) {
    std::vector<const Sample*> selected;
    for (const auto& s : samples)
        if (s.level_index == level) selected.push_back(&s);
    if (selected.empty()) throw ConfigError("evaluate_level: no samples for level " + std::to_string(level));
    if (options.dump_dir) std::filesystem::create_directories(*options.dump_dir);

    const GridSpec& grid = manifest.grid;
    const auto observation = make_kernel(grid, manifest.observation_distance);
    const int ell = manifest.ell;

    LevelReport report;
    report.level = level;
    report.epoch = options.epoch;
    report.predictor = predictor.name();
    report.samples.resize(selected.size());

    const int threads = options.threads > 0 ? options.threads : default_thread_count();
    parallel_for(selected.size(), threads, [&](std::size_t k) {
        const Sample& sample = *selected[k];
        SampleRecord rec;
        rec.id = sample.id;
        rec.level = sample.level_index;
        rec.seed = sample.seed;
        const auto fields = synthesize_sample(manifest, rec);
        const auto pred = predictor.predict(sample, grid);
        const auto comp = conjugate_screen(pred.screen);
        const auto truth_comp = conjugate_screen(fields.screen);

        const auto compensated = compensate(fields.distorted, comp);
        auto& out = report.samples[k];
        out.row.sample_id = sample.id;
        out.row.level = level;
        out.row.epoch = options.epoch;
        out.row.mp_distorted = mode_purity(fields.distorted, ell);
        out.row.mp_compensated = mode_purity(compensated, ell);
        out.row.psnr = psnr(pred.image, sample.gt_screen_img);
        out.mp_bound = mode_purity(compensate(fields.distorted, truth_comp), ell);
        out.mp_receiver = mode_purity(compensate(fields.received, comp), ell);
        out.mp_receiver_bound = mode_purity(compensate(fields.received, truth_comp), ell);

        if (options.dump_dir) {
            const auto base = *options.dump_dir / std::to_string(sample.id);
            export_image(sample.gt_screen_img, base.string() + "_gt.pgm");
            export_image(pred.image, base.string() + "_pred.pgm");
            export_image(sample.distorted_img, base.string() + "_distorted.pgm");
            export_image(normalize_image(intensity(propagate(compensated, observation))),
                         base.string() + "_compensated.pgm");
        }
    });
    return report;
}

std::vector<SweepRow> epoch_sweep(const std::map<int, DiffractiveNetwork>& networks, const Manifest& manifest,
                                  const std::vector<Sample>& samples, int level, int threads) {
    if (networks.empty()) throw ConfigError("epoch_sweep: no checkpoints");
    std::vector<SweepRow> out;
    for (const auto& [epoch, net] : networks) {
        NetworkPredictor predictor(net);
        EvaluateOptions options;
        options.epoch = epoch;
        options.threads = threads;
        const auto report = evaluate_level(predictor, manifest, samples, level, options);
        out.push_back({epoch, report.mean_psnr(), report.mean_mp_compensated(), report.mean_mp_distorted(),
                       report.fraction_improved()});
    }
    return out;
}

std::vector<TrainingPair> training_pairs(const std::vector<Sample>& samples) {
    std::vector<TrainingPair> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back({s.distorted_img, s.gt_screen_img});
    return out;
}

}  // namespace oamao
