#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "oamao/encoding.hpp"
#include "oamao/field.hpp"
#include "oamao/turbulence.hpp"

namespace oamao {

enum class Split { train, test };

std::string to_string(Split split);
Split parse_split(std::string_view text);

/// Default free-space leg between the turbulence plane and the recorded
/// intensity, in meters.
inline constexpr double kDefaultObservationDistance = 5.0;
inline constexpr int kDefaultEll = -3;
inline constexpr double kDefaultWaist = 3.5e-3;
inline constexpr double kDefaultSide = 0.01;

/// One turbulence level as stored in a manifest.
struct LevelSpec {
    int index = 0;  ///< position in standard_levels(), or the caller's own label
    TurbulenceParams params;
    ScreenEncoding encoding;
};

struct SampleRecord {
    long id = 0;
    int level = 0;
    std::uint64_t seed = 0;
    Split split = Split::train;
    std::string sha_x;  ///< SHA-256 of the distorted-intensity PGM
    std::string sha_y;  ///< SHA-256 of the ground-truth screen PGM
};

struct Sample {
    long id = 0;
    int level_index = 0;
    std::uint64_t seed = 0;
    Image distorted_img;
    Image gt_screen_img;
    ScreenEncoding encoding;
};

struct DatasetConfig {
    GridSpec grid = GridSpec::from_side(64, kDefaultSide, kStandardWavelength);
    int ell = kDefaultEll;
    double waist = kDefaultWaist;
    double observation_distance = kDefaultObservationDistance;
    std::vector<LevelSpec> levels;  ///< encodings are filled in by generate_dataset
    int count_per_level = 600;
    int train_per_level = 500;
    std::uint64_t base_seed = 7;
    int threads = 1;

    /// 64x64, 600 per level (500 train), all four standard levels.
    static DatasetConfig desk();
    /// 256x256, 12,000 per level (10,000 train), all four standard levels.
    static DatasetConfig paper_scale();

    void validate() const;
};

/// Key-value text with fixed key names; see README for the schema.
struct Manifest {
    static constexpr int kVersion = 1;

    int version = kVersion;
    GridSpec grid;
    int ell = kDefaultEll;
    double waist = kDefaultWaist;
    double observation_distance = kDefaultObservationDistance;
    std::uint64_t base_seed = 0;
    int count_per_level = 0;
    int train_per_level = 0;
    std::vector<LevelSpec> levels;
    std::vector<SampleRecord> samples;  ///< ordered by id

    const LevelSpec& level(int index) const;
    std::vector<SampleRecord> records(Split split) const;
    std::vector<SampleRecord> records(Split split, int level_index) const;

    std::string to_text() const;
    /// Throws ParseError with the byte offset of the offending line.
    static Manifest parse(std::string_view text);
    static Manifest load(const std::filesystem::path& dir);
};

inline constexpr const char* kManifestName = "manifest.txt";

/// Relative path of a sample image: "{split}/{id}_x.pgm" or "{split}/{id}_y.pgm".
std::filesystem::path sample_path(const SampleRecord& rec, bool ground_truth);

/// Per-sample seed derived from the dataset seed and the sample id (splitmix64).
std::uint64_t sample_seed(std::uint64_t base_seed, long id);

/// Screen, field at the screen plane, and recorded images for one sample, all
/// recomputed from the seed.
struct SampleFields {
    PhaseScreen screen;
    ComplexField beam;        ///< undistorted beam at the screen plane
    ComplexField distorted;   ///< beam after the screen, at the screen plane
    ComplexField received;    ///< distorted field after the observation leg
    Image distorted_img;
    Image gt_screen_img;
};

SampleFields synthesize_sample(const Manifest& manifest, const SampleRecord& rec);

/// The manifest `generate_dataset` would write, without file hashes.
Manifest plan_dataset(const DatasetConfig& config);

/// Writes every sample and then the manifest (the commit point) into `out_dir`.
Manifest generate_dataset(const DatasetConfig& config, const std::filesystem::path& out_dir);

/// Loads one split in id order, verifying every file hash. Throws
/// CorruptionError naming the file on mismatch.
std::vector<Sample> load_split(const Manifest& manifest, const std::filesystem::path& dir, Split split);
std::vector<Sample> load_split(const Manifest& manifest, const std::filesystem::path& dir, Split split,
                               int level_index);

}  // namespace oamao
