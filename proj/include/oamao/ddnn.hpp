#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "oamao/encoding.hpp"
#include "oamao/field.hpp"
#include "oamao/propagation.hpp"

namespace oamao {

enum class Modulation { phase, amplitude, hybrid };

std::string_view to_string(Modulation mode);
/// Accepts "phase", "amp"/"amplitude", "hybrid".
Modulation parse_modulation(std::string_view text);

/// One passive modulation plane: t = exp(log_amplitude) * exp(i phase).
/// log_amplitude <= 0 keeps every pixel at or below unit transmission.
struct DiffractiveLayer {
    Array2D<double> phase;
    Array2D<double> log_amplitude;

    explicit DiffractiveLayer(int n = 0) : phase(n), log_amplitude(n) {}

    Array2D<Complex> transmission(Modulation mode) const;
    /// Phase folded into [0, 2 pi) for export.
    Array2D<double> wrapped_phase() const;
};

/// Stack of diffractive layers with identical spacing between every pair of
/// consecutive planes: input -> L1 -> ... -> Ln -> output.
class DiffractiveNetwork {
public:
    DiffractiveNetwork(const GridSpec& grid, int layer_count, double spacing, Modulation mode);

    const GridSpec& grid() const noexcept { return grid_; }
    double spacing() const noexcept { return spacing_; }
    Modulation mode() const noexcept { return mode_; }
    std::size_t layer_count() const noexcept { return layers_.size(); }
    const std::vector<DiffractiveLayer>& layers() const noexcept { return layers_; }
    const PropagationKernel& kernel() const noexcept { return kernel_; }

    /// Mutable access; invalidates tapes recorded before the call.
    std::vector<DiffractiveLayer>& mutable_layers() noexcept {
        ++revision_;
        return layers_;
    }
    void set_spacing(double spacing);
    std::uint64_t revision() const noexcept { return revision_; }

    /// Uniform random phases in [-amplitude, amplitude]; amplitudes stay at 1.
    void randomize_phases(std::uint64_t seed, double amplitude);

private:
    GridSpec grid_;
    double spacing_;
    Modulation mode_;
    std::vector<DiffractiveLayer> layers_;
    PropagationKernel kernel_;
    std::uint64_t revision_ = 0;
};

/// Layer spacing for a grid, scaled from 0.05 m at 256 x 256 over 0.01 m so the
/// diffraction spread per hop covers the same fraction of the aperture.
double default_spacing(const GridSpec& grid);

/// Intermediate fields kept by forward() for the exact adjoint pass.
struct Tape {
    std::uint64_t revision = 0;
    std::vector<ComplexField> pre_layer;   ///< field arriving at each layer
    std::vector<ComplexField> post_layer;  ///< field leaving each layer
    ComplexField output;                   ///< field at the output plane
    Image raw_intensity;                   ///< |output|^2
};

struct ForwardResult {
    Image output;  ///< normalized output image in [0, 1)
    Tape tape;
};

/// Amplitude encoding u = sqrt(img), zero phase, unit power.
/// Throws DomainError unless img lies in [0, 1]; DegenerateInputError if all zero.
ComplexField encode_input(const Image& img, const GridSpec& grid);

/// Maps raw output intensity to [0, 1) as I / (I + mean(I)). A flat output maps
/// to mid-gray, so the network starts near the mean of the screen encoding.
Image normalize_output(const Image& raw);

ForwardResult forward(const DiffractiveNetwork& net, const ComplexField& input);

/// Pixel mean of the squared difference.
double loss_mse(const Image& output, const Image& ground_truth);

struct Gradients {
    std::vector<Array2D<double>> phase;
    std::vector<Array2D<double>> log_amplitude;

    static Gradients zeros_like(const DiffractiveNetwork& net);
    void accumulate(const Gradients& other, double weight = 1.0);
    bool all_finite() const;
};

/// Exact gradients of loss_mse(output, ground_truth) with respect to every
/// trainable array, by adjoint propagation of the output-plane residual.
/// Throws ContractError if the tape was recorded on a different revision.
Gradients backward(const DiffractiveNetwork& net, const Tape& tape, const Image& output,
                   const Image& ground_truth);

struct AdamConfig {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct TrainState {
    DiffractiveNetwork network;
    AdamConfig adam;
    std::uint64_t step = 0;
    Gradients m;  ///< first moments
    Gradients v;  ///< second moments

    explicit TrainState(DiffractiveNetwork net, AdamConfig config = {});
};

/// One bias-corrected Adam update. Frozen arrays (per modulation mode) never
/// move, and log amplitudes are clamped to <= 0 afterwards.
/// Throws DivergenceError on any non-finite gradient.
void adam_step(TrainState& state, const Gradients& grads);

struct TrainingPair {
    Image input;         ///< normalized distorted intensity
    Image ground_truth;  ///< encoded screen
};

struct TrainOptions {
    int epochs = 50;
    /// Epochs already completed (when resuming); training runs start_epoch+1..epochs.
    int start_epoch = 0;
    int batch = 32;
    std::uint64_t shuffle_seed = 0;
    /// Worker threads for per-sample passes; 0 reads OAMAO_THREADS or uses 1.
    int threads = 0;
    /// Called after each epoch with the 1-based epoch number.
    std::function<void(int, const TrainState&)> on_epoch;
};

struct TrainResult {
    TrainState state;
    std::vector<double> loss_history;  ///< mean training loss per epoch run
};

/// Shuffled mini-batch Adam. Batch gradients are per-sample gradients summed in
/// sample order, so results do not depend on the thread count.
TrainResult train(TrainState state, const std::vector<TrainingPair>& data, const TrainOptions& options);

/// Fisher-Yates permutation of [0, count) driven by mt19937_64.
std::vector<std::size_t> shuffled_indices(std::size_t count, std::uint64_t seed);

/// Forward pass on a distorted image, decoded to a phase screen through `encoding`.
PhaseScreen predict_screen(const DiffractiveNetwork& net, const Image& distorted, const ScreenEncoding& encoding);

/// Thread count from OAMAO_THREADS, defaulting to 1.
int default_thread_count();

}  // namespace oamao
