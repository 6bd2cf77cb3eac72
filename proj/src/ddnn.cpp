#include "oamao/ddnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>

#include "oamao/parallel.hpp"

namespace oamao {

std::string_view to_string(Modulation mode) {
    switch (mode) {
        case Modulation::phase: return "phase";
        case Modulation::amplitude: return "amp";
        case Modulation::hybrid: return "hybrid";
    }
    return "hybrid";
}

Modulation parse_modulation(std::string_view text) {
    if (text == "phase") return Modulation::phase;
    if (text == "amp" || text == "amplitude") return Modulation::amplitude;
    if (text == "hybrid") return Modulation::hybrid;
    throw ConfigError("unknown modulation mode '" + std::string(text) + "'");
}

Array2D<Complex> DiffractiveLayer::transmission(Modulation mode) const {
    Array2D<Complex> t(phase.n());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double amp = mode == Modulation::phase ? 1.0 : std::exp(log_amplitude[i]);
        const double ph = mode == Modulation::amplitude ? 0.0 : phase[i];
        t[i] = std::polar(amp, ph);
    }
    return t;
}

Array2D<double> DiffractiveLayer::wrapped_phase() const {
    Array2D<double> out(phase.n());
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double v = std::fmod(phase[i], two_pi);
        if (v < 0) v += two_pi;
        out[i] = v;
    }
    return out;
}

DiffractiveNetwork::DiffractiveNetwork(const GridSpec& grid, int layer_count, double spacing, Modulation mode)
    : grid_(grid), spacing_(spacing), mode_(mode) {
    grid.validate();
    if (layer_count < 1) throw ConfigError("network needs at least one layer");
    if (!(spacing > 0.0)) throw ConfigError("layer spacing must be positive");
    layers_.assign(static_cast<std::size_t>(layer_count), DiffractiveLayer(grid.n));
    kernel_ = make_kernel(grid_, spacing_);
}

void DiffractiveNetwork::set_spacing(double spacing) {
    if (!(spacing > 0.0)) throw ConfigError("layer spacing must be positive");
    spacing_ = spacing;
    kernel_ = make_kernel(grid_, spacing_);
    ++revision_;
}

void DiffractiveNetwork::randomize_phases(std::uint64_t seed, double amplitude) {
    std::mt19937_64 engine(seed);
    for (auto& layer : mutable_layers())
        for (auto& v : layer.phase) v = amplitude * (2.0 * static_cast<double>(engine() >> 11) * 0x1.0p-53 - 1.0);
}

double default_spacing(const GridSpec& grid) {
    // 0.05 m at 256 x 256 over 0.01 m and 633 nm; keep lambda d / (L dx) fixed.
    constexpr double reference = 0.05 * 633e-9 / (0.01 * (0.01 / 256));
    return reference * grid.side() * grid.dx / grid.wavelength;
}

ComplexField encode_input(const Image& img, const GridSpec& grid) {
    if (img.n() != grid.n) throw DimensionError("encode_input: image size differs from grid");
    ComplexField field(grid);
    double total = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = img[i];
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("encode_input: image is not normalized to [0, 1]");
        field.values()[i] = std::sqrt(v);
        total += v;
    }
    if (!(total > 0.0)) throw DegenerateInputError("encode_input: image is all zero");
    const double scale = 1.0 / std::sqrt(field.power());
    for (auto& v : field.values()) v *= scale;
    return field;
}

namespace {

double mean_of(const Image& img) {
    double sum = 0.0;
    for (double v : img) sum += v;
    return sum / static_cast<double>(img.size());
}

// Vector-Jacobian product of normalize_output: given dL/dy, return dL/dI.
Image normalize_output_vjp(const Image& raw, const Image& dy) {
    const double m = mean_of(raw);
    const double count = static_cast<double>(raw.size());
    Image grad(raw.n());
    double coupling = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double denom = raw[i] + m;
        const double inv2 = 1.0 / (denom * denom);
        grad[i] = dy[i] * m * inv2;
        coupling += dy[i] * raw[i] * inv2;
    }
    coupling /= count;
    for (auto& g : grad) g -= coupling;
    return grad;
}

}  // namespace

Image normalize_output(const Image& raw) {
    const double m = mean_of(raw);
    Image out(raw.n());
    if (!(m > 0.0)) return out;
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] / (raw[i] + m);
    return out;
}

ForwardResult forward(const DiffractiveNetwork& net, const ComplexField& input) {
    if (!(input.grid() == net.grid())) throw DimensionError("forward: input grid differs from network grid");
    ForwardResult result;
    Tape& tape = result.tape;
    tape.revision = net.revision();
    tape.pre_layer.reserve(net.layer_count());
    tape.post_layer.reserve(net.layer_count());

    ComplexField u = input;
    for (const auto& layer : net.layers()) {
        u = propagate(u, net.kernel());
        tape.pre_layer.push_back(u);
        u = layer_transmit(u, layer.transmission(net.mode()));
        tape.post_layer.push_back(u);
    }
    tape.output = propagate(u, net.kernel());
    tape.raw_intensity = intensity(tape.output);
    result.output = normalize_output(tape.raw_intensity);
    return result;
}

double loss_mse(const Image& output, const Image& ground_truth) {
    if (output.n() != ground_truth.n()) throw DimensionError("loss_mse: image sizes differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < output.size(); ++i) {
        const double d = output[i] - ground_truth[i];
        sum += d * d;
    }
    return sum / static_cast<double>(output.size());
}

Gradients Gradients::zeros_like(const DiffractiveNetwork& net) {
    Gradients g;
    g.phase.assign(net.layer_count(), Array2D<double>(net.grid().n));
    g.log_amplitude.assign(net.layer_count(), Array2D<double>(net.grid().n));
    return g;
}

void Gradients::accumulate(const Gradients& other, double weight) {
    for (std::size_t l = 0; l < phase.size(); ++l) {
        for (std::size_t i = 0; i < phase[l].size(); ++i) {
            phase[l][i] += weight * other.phase[l][i];
            log_amplitude[l][i] += weight * other.log_amplitude[l][i];
        }
    }
}

bool Gradients::all_finite() const {
    for (std::size_t l = 0; l < phase.size(); ++l)
        for (std::size_t i = 0; i < phase[l].size(); ++i)
            if (!std::isfinite(phase[l][i]) || !std::isfinite(log_amplitude[l][i])) return false;
    return true;
}

Gradients backward(const DiffractiveNetwork& net, const Tape& tape, const Image& output, const Image& ground_truth) {
    if (tape.revision != net.revision() || tape.pre_layer.size() != net.layer_count())
        throw ContractError("backward: tape was not recorded on the current network");
    if (output.n() != ground_truth.n() || output.n() != net.grid().n)
        throw DimensionError("backward: image sizes differ from network grid");

    // dL/dy for the pixel-mean squared error.
    const double count = static_cast<double>(output.size());
    Image dy(output.n());
    for (std::size_t i = 0; i < output.size(); ++i) dy[i] = 2.0 * (output[i] - ground_truth[i]) / count;
    const Image dI = normalize_output_vjp(tape.raw_intensity, dy);

    // Adjoint field g = dL/dRe(u) + i dL/dIm(u) at the output plane.
    ComplexField adjoint(net.grid());
    for (std::size_t i = 0; i < dI.size(); ++i) adjoint.values()[i] = 2.0 * dI[i] * tape.output.values()[i];

    Gradients grads = Gradients::zeros_like(net);
    const bool train_phase = net.mode() != Modulation::amplitude;
    const bool train_amp = net.mode() != Modulation::phase;

    for (std::size_t l = net.layer_count(); l-- > 0;) {
        adjoint = propagate_adjoint(adjoint, net.kernel());
        const auto& post = tape.post_layer[l].values();
        const auto t = net.layers()[l].transmission(net.mode());
        auto& g = adjoint.values();
        for (std::size_t i = 0; i < g.size(); ++i) {
            // d u_post / d phase = i u_post ; d u_post / d log_amplitude = u_post.
            const Complex w = std::conj(g[i]) * post[i];
            if (train_phase) grads.phase[l][i] = -w.imag();
            if (train_amp) grads.log_amplitude[l][i] = w.real();
            g[i] *= std::conj(t[i]);
        }
    }
    return grads;
}

TrainState::TrainState(DiffractiveNetwork net, AdamConfig config)
    : network(std::move(net)), adam(config), m(Gradients::zeros_like(network)), v(Gradients::zeros_like(network)) {}

namespace {

void adam_update(Array2D<double>& param, Array2D<double>& m, Array2D<double>& v, const Array2D<double>& g,
                 const AdamConfig& cfg, double bias1, double bias2) {
    for (std::size_t i = 0; i < param.size(); ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
        const double m_hat = m[i] / bias1;
        const double v_hat = v[i] / bias2;
        param[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
}

}  // namespace

void adam_step(TrainState& state, const Gradients& grads) {
    auto& net = state.network;
    if (grads.phase.size() != net.layer_count() || grads.log_amplitude.size() != net.layer_count())
        throw DimensionError("adam_step: gradient layer count differs from network");
    for (std::size_t l = 0; l < net.layer_count(); ++l)
        if (grads.phase[l].n() != net.grid().n || grads.log_amplitude[l].n() != net.grid().n)
            throw DimensionError("adam_step: gradient array shape differs from parameters");
    if (!grads.all_finite())
        throw DivergenceError("adam_step: non-finite gradient at step " + std::to_string(state.step + 1) +
                              "; lower the learning rate or check the input images");

    ++state.step;
    const auto& cfg = state.adam;
    const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    const bool train_phase = net.mode() != Modulation::amplitude;
    const bool train_amp = net.mode() != Modulation::phase;

    auto& layers = net.mutable_layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (train_phase) adam_update(layers[l].phase, state.m.phase[l], state.v.phase[l], grads.phase[l], cfg, bias1, bias2);
        if (train_amp) {
            adam_update(layers[l].log_amplitude, state.m.log_amplitude[l], state.v.log_amplitude[l],
                        grads.log_amplitude[l], cfg, bias1, bias2);
            for (auto& a : layers[l].log_amplitude) a = std::min(a, 0.0);
        }
    }
}

std::vector<std::size_t> shuffled_indices(std::size_t count, std::uint64_t seed) {
    std::vector<std::size_t> order(count);
    for (std::size_t i = 0; i < count; ++i) order[i] = i;
    std::mt19937_64 engine(seed);
    for (std::size_t i = count; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(engine() % i);
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

int default_thread_count() {
    if (const char* env = std::getenv("OAMAO_THREADS")) {
        const int value = std::atoi(env);
        if (value > 0) return value;
    }
    return 1;
}

namespace {

struct SamplePass {
    Gradients grads;
    double loss = 0.0;
};

SamplePass run_sample(const DiffractiveNetwork& net, const TrainingPair& pair) {
    const auto input = encode_input(pair.input, net.grid());
    auto fwd = forward(net, input);
    SamplePass pass;
    pass.loss = loss_mse(fwd.output, pair.ground_truth);
    pass.grads = backward(net, fwd.tape, fwd.output, pair.ground_truth);
    return pass;
}

}  // namespace

TrainResult train(TrainState state, const std::vector<TrainingPair>& data, const TrainOptions& options) {
    if (data.empty()) throw ConfigError("train: dataset is empty");
    if (options.epochs < 1) throw ConfigError("train: epochs must be at least 1");
    if (options.start_epoch < 0 || options.start_epoch >= options.epochs)
        throw ConfigError("train: start epoch must lie below the epoch count");
    if (options.batch < 1) throw ConfigError("train: batch size must be at least 1");
    for (const auto& pair : data)
        if (pair.input.n() != state.network.grid().n || pair.ground_truth.n() != state.network.grid().n)
            throw DimensionError("train: dataset image size differs from network grid");

    const int threads = options.threads > 0 ? options.threads : default_thread_count();
    TrainResult result{std::move(state), {}};
    TrainState& st = result.state;
    std::vector<SamplePass> slots(static_cast<std::size_t>(threads));

    for (int epoch = options.start_epoch + 1; epoch <= options.epochs; ++epoch) {
        const auto order = shuffled_indices(data.size(), options.shuffle_seed + static_cast<std::uint64_t>(epoch));
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(options.batch)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(options.batch));
            Gradients batch_grads = Gradients::zeros_like(st.network);
            const double weight = 1.0 / static_cast<double>(stop - start);
            // Waves of `threads` samples; each wave is reduced in sample order.
            for (std::size_t wave = start; wave < stop; wave += slots.size()) {
                const std::size_t wave_end = std::min(stop, wave + slots.size());
                parallel_for(wave_end - wave, threads,
                             [&](std::size_t k) { slots[k] = run_sample(st.network, data[order[wave + k]]); });
                for (std::size_t k = wave; k < wave_end; ++k) {
                    batch_grads.accumulate(slots[k - wave].grads, weight);
                    epoch_loss += slots[k - wave].loss;
                }
            }
            adam_step(st, batch_grads);
        }
        result.loss_history.push_back(epoch_loss / static_cast<double>(data.size()));
        if (options.on_epoch) options.on_epoch(epoch, st);
    }
    return result;
}

PhaseScreen predict_screen(const DiffractiveNetwork& net, const Image& distorted, const ScreenEncoding& encoding) {
    encoding.require_valid();
    const auto fwd = forward(net, encode_input(distorted, net.grid()));
    return encoding.decode(fwd.output, net.grid());
}

}  // namespace oamao
