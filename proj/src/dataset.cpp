#include "oamao/dataset.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "oamao/io.hpp"
#include "oamao/parallel.hpp"
#include "oamao/pgm.hpp"
#include "oamao/propagation.hpp"

namespace oamao {

std::string to_string(Split split) { return split == Split::train ? "train" : "test"; }

Split parse_split(std::string_view text) {
    if (text == "train") return Split::train;
    if (text == "test") return Split::test;
    throw ConfigError("unknown split '" + std::string(text) + "'");
}

namespace {

std::vector<LevelSpec> standard_level_specs(double wavelength) {
    std::vector<LevelSpec> out;
    int index = 0;
    for (const auto& p : standard_levels()) {
        auto params = TurbulenceParams::from_cn2(p.cn2, wavelength, p.z, p.tau, p.eta);
        out.push_back({index++, params, {}});
    }
    return out;
}

}  // namespace

DatasetConfig DatasetConfig::desk() {
    DatasetConfig c;
    c.levels = standard_level_specs(c.grid.wavelength);
    return c;
}

DatasetConfig DatasetConfig::paper_scale() {
    DatasetConfig c;
    c.grid = GridSpec::from_side(256, kDefaultSide, kStandardWavelength);
    c.count_per_level = 12000;
    c.train_per_level = 10000;
    c.levels = standard_level_specs(c.grid.wavelength);
    return c;
}

void DatasetConfig::validate() const {
    grid.validate();
    if (levels.empty()) throw ConfigError("dataset needs at least one turbulence level");
    if (count_per_level < 2) throw ConfigError("count per level must be at least 2");
    if (train_per_level < 1 || train_per_level >= count_per_level)
        throw ConfigError("train count must leave at least one test sample per level");
    if (!(observation_distance >= 0.0)) throw ConfigError("observation distance must be non-negative");
    for (const auto& level : levels) {
        level.params.validate();
        if (std::abs(level.params.k0 - grid.wavenumber()) > 1e-9 * grid.wavenumber())
            throw ConfigError("turbulence wavenumber differs from the grid wavelength");
    }
    // Beam limits are checked by make_vortex_beam.
    make_vortex_beam(grid, ell, waist);
}

const LevelSpec& Manifest::level(int index) const {
    for (const auto& l : levels)
        if (l.index == index) return l;
    throw ConfigError("manifest has no level " + std::to_string(index));
}

std::vector<SampleRecord> Manifest::records(Split split) const {
    std::vector<SampleRecord> out;
    for (const auto& r : samples)
        if (r.split == split) out.push_back(r);
    return out;
}

std::vector<SampleRecord> Manifest::records(Split split, int level_index) const {
    std::vector<SampleRecord> out;
    for (const auto& r : samples)
        if (r.split == split && r.level == level_index) out.push_back(r);
    return out;
}

std::string Manifest::to_text() const {
    using io::format_double;
    std::ostringstream out;
    out << "# oamao dataset manifest\n";
    out << "version = " << version << '\n';
    out << "grid.n = " << grid.n << '\n';
    out << "grid.dx = " << format_double(grid.dx) << '\n';
    out << "grid.wavelength = " << format_double(grid.wavelength) << '\n';
    out << "beam.ell = " << ell << '\n';
    out << "beam.waist = " << format_double(waist) << '\n';
    out << "observation.distance = " << format_double(observation_distance) << '\n';
    out << "seed = " << base_seed << '\n';
    out << "count_per_level = " << count_per_level << '\n';
    out << "train_per_level = " << train_per_level << '\n';
    out << "level.count = " << levels.size() << '\n';
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto& l = levels[i];
        const std::string p = "level." + std::to_string(i) + ".";
        out << p << "index = " << l.index << '\n';
        out << p << "cn2 = " << format_double(l.params.cn2) << '\n';
        out << p << "epsilon = " << format_double(l.params.epsilon) << '\n';
        out << p << "chi_t = " << format_double(l.params.chi_t) << '\n';
        out << p << "tau = " << format_double(l.params.tau) << '\n';
        out << p << "eta = " << format_double(l.params.eta) << '\n';
        out << p << "z = " << format_double(l.params.z) << '\n';
        out << p << "k0 = " << format_double(l.params.k0) << '\n';
        out << p << "encoding.lo = " << format_double(l.encoding.lo) << '\n';
        out << p << "encoding.hi = " << format_double(l.encoding.hi) << '\n';
    }
    out << "sample.count = " << samples.size() << '\n';
    for (const auto& s : samples)
        out << "sample." << s.id << " = " << to_string(s.split) << ' ' << s.level << ' ' << s.seed << ' ' << s.sha_x
            << ' ' << s.sha_y << '\n';
    return std::move(out).str();
}

Manifest Manifest::parse(std::string_view text) {
    const auto entries = io::parse_key_values(text);
    std::map<std::string, const io::KeyValue*> by_key;
    std::vector<const io::KeyValue*> sample_lines;
    for (const auto& kv : entries) {
        if (kv.key.rfind("sample.", 0) == 0 && kv.key != "sample.count") {
            sample_lines.push_back(&kv);
            continue;
        }
        if (!by_key.emplace(kv.key, &kv).second) throw ParseError("duplicate key '" + kv.key + "'", kv.offset);
    }
    auto get = [&](const std::string& key) -> const io::KeyValue& {
        const auto it = by_key.find(key);
        if (it == by_key.end()) throw ParseError("manifest is missing key '" + key + "'", text.size());
        return *it->second;
    };
    auto real = [&](const std::string& key) {
        const auto& kv = get(key);
        return io::parse_double(kv.value, kv.offset);
    };
    auto integer = [&](const std::string& key) {
        const auto& kv = get(key);
        return io::parse_int(kv.value, kv.offset);
    };

    Manifest m;
    m.version = static_cast<int>(integer("version"));
    if (m.version != kVersion)
        throw ParseError("unsupported manifest version " + std::to_string(m.version), get("version").offset);
    m.grid.n = static_cast<int>(integer("grid.n"));
    m.grid.dx = real("grid.dx");
    m.grid.wavelength = real("grid.wavelength");
    m.ell = static_cast<int>(integer("beam.ell"));
    m.waist = real("beam.waist");
    m.observation_distance = real("observation.distance");
    m.base_seed = io::parse_u64(get("seed").value, get("seed").offset);
    m.count_per_level = static_cast<int>(integer("count_per_level"));
    m.train_per_level = static_cast<int>(integer("train_per_level"));
    const auto level_count = integer("level.count");
    for (long long i = 0; i < level_count; ++i) {
        const std::string p = "level." + std::to_string(i) + ".";
        LevelSpec l;
        l.index = static_cast<int>(integer(p + "index"));
        l.params.cn2 = real(p + "cn2");
        l.params.epsilon = real(p + "epsilon");
        l.params.chi_t = real(p + "chi_t");
        l.params.tau = real(p + "tau");
        l.params.eta = real(p + "eta");
        l.params.z = real(p + "z");
        l.params.k0 = real(p + "k0");
        l.encoding.lo = real(p + "encoding.lo");
        l.encoding.hi = real(p + "encoding.hi");
        m.levels.push_back(l);
    }

    for (const auto* kv : sample_lines) {
        SampleRecord r;
        r.id = static_cast<long>(io::parse_int(std::string_view(kv->key).substr(7), kv->offset));
        std::istringstream fields(kv->value);
        std::string split, level, seed;
        if (!(fields >> split >> level >> seed >> r.sha_x >> r.sha_y))
            throw ParseError("sample line needs: split level seed sha_x sha_y", kv->offset);
        if (split != "train" && split != "test") throw ParseError("unknown split '" + split + "'", kv->offset);
        r.split = parse_split(split);
        r.level = static_cast<int>(io::parse_int(level, kv->offset));
        r.seed = io::parse_u64(seed, kv->offset);
        if (!m.samples.empty() && r.id <= m.samples.back().id)
            throw ParseError("sample ids must be strictly increasing", kv->offset);
        m.samples.push_back(std::move(r));
    }
    if (static_cast<long long>(m.samples.size()) != integer("sample.count"))
        throw ParseError("sample.count does not match the number of sample lines", get("sample.count").offset);
    try {
        m.grid.validate();
    } catch (const ConfigError& e) {
        throw ParseError(std::string("invalid grid: ") + e.what(), get("grid.n").offset);
    }
    return m;
}

Manifest Manifest::load(const std::filesystem::path& dir) { return parse(io::read_file(dir / kManifestName)); }

std::filesystem::path sample_path(const SampleRecord& rec, bool ground_truth) {
    return std::filesystem::path(to_string(rec.split)) /
           (std::to_string(rec.id) + (ground_truth ? "_y.pgm" : "_x.pgm"));
}

std::uint64_t sample_seed(std::uint64_t base_seed, long id) {
    // splitmix64 finalizer over the pair.
    std::uint64_t z = base_seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(id) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

SampleFields synthesize_sample(const Manifest& manifest, const SampleRecord& rec) {
    const auto& level = manifest.level(rec.level);
    ScreenRng rng(rec.seed);
    auto screen = make_screen(level.params, manifest.grid, rng);
    auto beam = make_vortex_beam(manifest.grid, manifest.ell, manifest.waist);
    auto distorted = apply_phase(beam, screen);
    auto received = manifest.observation_distance == 0.0
                        ? distorted
                        : propagate(distorted, make_kernel(manifest.grid, manifest.observation_distance));
    const auto raw = intensity(received);
    for (double v : raw)
        if (!std::isfinite(v))
            throw Error("non-finite field while generating sample " + std::to_string(rec.id) + " (seed " +
                        std::to_string(rec.seed) + ")");
    auto distorted_img = normalize_image(raw);
    auto gt_img = level.encoding.encode(screen);
    return {std::move(screen), std::move(beam), std::move(distorted), std::move(received), std::move(distorted_img),
            std::move(gt_img)};
}

Manifest plan_dataset(const DatasetConfig& config) {
    config.validate();

    Manifest m;
    m.grid = config.grid;
    m.ell = config.ell;
    m.waist = config.waist;
    m.observation_distance = config.observation_distance;
    m.base_seed = config.base_seed;
    m.count_per_level = config.count_per_level;
    m.train_per_level = config.train_per_level;
    m.levels = config.levels;
    for (auto& level : m.levels) level.encoding = symmetric_encoding(std::sqrt(screen_variance(level.params, m.grid)));

    for (std::size_t li = 0; li < m.levels.size(); ++li)
        for (int i = 0; i < config.count_per_level; ++i) {
            SampleRecord r;
            r.id = static_cast<long>(li) * config.count_per_level + i;
            r.level = m.levels[li].index;
            r.seed = sample_seed(config.base_seed, r.id);
            r.split = i < config.train_per_level ? Split::train : Split::test;
            m.samples.push_back(r);
        }
    return m;
}

Manifest generate_dataset(const DatasetConfig& config, const std::filesystem::path& out_dir) {
    Manifest m = plan_dataset(config);

    std::error_code ec;
    for (const char* split : {"train", "test"}) {
        std::filesystem::create_directories(out_dir / split, ec);
        if (ec) throw IoError("cannot create " + (out_dir / split).string() + ": " + ec.message());
    }

    parallel_for(m.samples.size(), config.threads, [&](std::size_t k) {
        auto& rec = m.samples[k];
        const auto fields = synthesize_sample(m, rec);
        const auto x = encode_pgm(fields.distorted_img);
        const auto y = encode_pgm(fields.gt_screen_img);
        try {
            io::write_file_atomic(out_dir / sample_path(rec, false), x);
            io::write_file_atomic(out_dir / sample_path(rec, true), y);
        } catch (const IoError& e) {
            throw IoError("sample " + std::to_string(rec.id) + ": " + e.what());
        }
        rec.sha_x = io::sha256_hex(x);
        rec.sha_y = io::sha256_hex(y);
    });

    io::write_file_atomic(out_dir / kManifestName, m.to_text());
    return m;
}

namespace {

Image load_verified(const std::filesystem::path& path, const std::string& expected_sha, int n) {
    const auto bytes = io::read_file(path);
    if (io::sha256_hex(bytes) != expected_sha) throw CorruptionError("hash mismatch in " + path.string());
    auto img = decode_pgm(bytes);
    if (img.n() != n) throw CorruptionError("unexpected image size in " + path.string());
    return img;
}

std::vector<Sample> load_records(const Manifest& manifest, const std::filesystem::path& dir,
                                 const std::vector<SampleRecord>& records) {
    std::vector<Sample> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        Sample s;
        s.id = r.id;
        s.level_index = r.level;
        s.seed = r.seed;
        s.distorted_img = load_verified(dir / sample_path(r, false), r.sha_x, manifest.grid.n);
        s.gt_screen_img = load_verified(dir / sample_path(r, true), r.sha_y, manifest.grid.n);
        s.encoding = manifest.level(r.level).encoding;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

std::vector<Sample> load_split(const Manifest& manifest, const std::filesystem::path& dir, Split split) {
    return load_records(manifest, dir, manifest.records(split));
}

std::vector<Sample> load_split(const Manifest& manifest, const std::filesystem::path& dir, Split split,
                               int level_index) {
    return load_records(manifest, dir, manifest.records(split, level_index));
}

}  // namespace oamao
