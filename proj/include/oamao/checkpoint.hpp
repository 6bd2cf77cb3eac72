#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "oamao/ddnn.hpp"

namespace oamao {

/// Training state plus the bookkeeping needed to resume or evaluate it.
struct Checkpoint {
    static constexpr std::uint32_t kVersion = 1;

    TrainState state;
    int level = 0;  ///< turbulence level the network was trained on
    int epoch = 0;  ///< epochs completed
};

// Layout, all little-endian: 8-byte magic "OAMAOCKP", u32 version, u32 n,
// f64 dx, f64 wavelength, u32 layer count, f64 spacing, u32 mode, i32 level,
// u32 epoch, u64 Adam step, f64 learning rate, beta1, beta2, epsilon; then per
// layer the f64 arrays phase, log_amplitude, m.phase, m.log_amplitude,
// v.phase, v.log_amplitude; then the 32-byte SHA-256 of everything before it.

std::string encode_checkpoint(const Checkpoint& ckpt);
/// Throws ParseError on truncation or a bad magic, ConfigError on a version
/// mismatch, CorruptionError on a digest mismatch.
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace oamao
