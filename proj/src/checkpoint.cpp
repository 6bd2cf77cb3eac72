#include "oamao/checkpoint.hpp"

#include <bit>

#include "oamao/io.hpp"

namespace oamao {
namespace {

constexpr std::string_view kMagic = "OAMAOCKP";
constexpr std::size_t kDigestLength = 32;

class Writer {
public:
    void u32(std::uint32_t v) { put(v, 4); }
    void i32(std::int32_t v) { put(static_cast<std::uint32_t>(v), 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
    void array(const Array2D<double>& a) {
        for (double v : a) f64(v);
    }
    void raw(std::string_view s) { out_.append(s); }
    std::string take() { return std::move(out_); }
    const std::string& bytes() const { return out_; }

private:
    void put(std::uint64_t v, int width) {
        for (int i = 0; i < width; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    std::string out_;
};

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    std::uint64_t u64() { return get(8); }
    double f64() { return std::bit_cast<double>(get(8)); }
    void array(Array2D<double>& a) {
        for (auto& v : a) v = f64();
    }
    std::string_view raw(std::size_t count) {
        need(count);
        auto s = bytes_.substr(pos_, count);
        pos_ += count;
        return s;
    }
    std::size_t pos() const noexcept { return pos_; }

private:
    void need(std::size_t count) const {
        if (bytes_.size() - pos_ < count) throw ParseError("checkpoint truncated", bytes_.size());
    }
    std::uint64_t get(int width) {
        need(static_cast<std::size_t>(width));
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + static_cast<std::size_t>(i)]))
                 << (8 * i);
        pos_ += static_cast<std::size_t>(width);
        return v;
    }
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
    const auto& st = ckpt.state;
    const auto& net = st.network;
    Writer w;
    w.raw(kMagic);
    w.u32(Checkpoint::kVersion);
    w.u32(static_cast<std::uint32_t>(net.grid().n));
    w.f64(net.grid().dx);
    w.f64(net.grid().wavelength);
    w.u32(static_cast<std::uint32_t>(net.layer_count()));
    w.f64(net.spacing());
    w.u32(static_cast<std::uint32_t>(net.mode()));
    w.i32(ckpt.level);
    w.u32(static_cast<std::uint32_t>(ckpt.epoch));
    w.u64(st.step);
    w.f64(st.adam.learning_rate);
    w.f64(st.adam.beta1);
    w.f64(st.adam.beta2);
    w.f64(st.adam.epsilon);
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        w.array(net.layers()[l].phase);
        w.array(net.layers()[l].log_amplitude);
        w.array(st.m.phase[l]);
        w.array(st.m.log_amplitude[l]);
        w.array(st.v.phase[l]);
        w.array(st.v.log_amplitude[l]);
    }
    w.raw(io::sha256_bytes(w.bytes()));
    return w.take();
}

Checkpoint decode_checkpoint(std::string_view bytes) {
    Reader r(bytes);
    if (r.raw(kMagic.size()) != kMagic) throw ParseError("not a checkpoint (bad magic)", 0);
    const auto version = r.u32();
    if (version != Checkpoint::kVersion)
        throw ConfigError("checkpoint schema version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(Checkpoint::kVersion) + ")");
    GridSpec grid;
    grid.n = static_cast<int>(r.u32());
    grid.dx = r.f64();
    grid.wavelength = r.f64();
    const auto layers = r.u32();
    const double spacing = r.f64();
    const auto mode = r.u32();
    if (mode > static_cast<std::uint32_t>(Modulation::hybrid)) throw ParseError("unknown modulation mode", r.pos() - 4);
    const int level = r.i32();
    const int epoch = static_cast<int>(r.u32());
    const auto step = r.u64();
    AdamConfig adam;
    adam.learning_rate = r.f64();
    adam.beta1 = r.f64();
    adam.beta2 = r.f64();
    adam.epsilon = r.f64();
    try {
        grid.validate();
    } catch (const ConfigError&) {
        throw ParseError("checkpoint grid is invalid", kMagic.size() + 4);
    }
    if (layers < 1 || layers > 64) throw ParseError("implausible layer count", kMagic.size() + 28);
    const std::size_t expected = r.pos() + static_cast<std::size_t>(layers) * 6 * 8 * grid.size() + kDigestLength;
    if (bytes.size() != expected) throw ParseError("checkpoint size does not match its header", bytes.size());
    if (io::sha256_bytes(bytes.substr(0, bytes.size() - kDigestLength)) !=
        bytes.substr(bytes.size() - kDigestLength))
        throw CorruptionError("checkpoint digest mismatch");

    DiffractiveNetwork net(grid, static_cast<int>(layers), spacing, static_cast<Modulation>(mode));
    Gradients m = Gradients::zeros_like(net);
    Gradients v = Gradients::zeros_like(net);
    auto& ls = net.mutable_layers();
    for (std::size_t l = 0; l < layers; ++l) {
        r.array(ls[l].phase);
        r.array(ls[l].log_amplitude);
        r.array(m.phase[l]);
        r.array(m.log_amplitude[l]);
        r.array(v.phase[l]);
        r.array(v.log_amplitude[l]);
    }
    Checkpoint ckpt{TrainState(std::move(net), adam), level, epoch};
    ckpt.state.step = step;
    ckpt.state.m = std::move(m);
    ckpt.state.v = std::move(v);
    return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    io::write_file_atomic(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw IoError("checkpoint not found: " + path.string());
    return decode_checkpoint(io::read_file(path));
}

}  // namespace oamao
