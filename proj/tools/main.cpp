// oamao: dataset generation, training, evaluation and inspection front end.
//
// Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "oamao/checkpoint.hpp"
#include "oamao/dataset.hpp"
#include "oamao/ddnn.hpp"
#include "oamao/io.hpp"
#include "oamao/metrics.hpp"
#include "oamao/pgm.hpp"
#include "oamao/pipeline.hpp"
#include "oamao/propagation.hpp"
#include "oamao/turbulence.hpp"

namespace fs = std::filesystem;
using namespace oamao;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw UsageError("expected a comma-separated integer list, got '" + text + "'");
        }
    }
    if (out.empty()) throw UsageError("empty list");
    return out;
}

// ---- gen-dataset ------------------------------------------------------------

struct GenArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string levels;
    std::optional<int> count;
    std::optional<int> grid;
    bool desk = false;
    bool paper = false;
    bool dry_run = false;
    int threads = 0;
};

int train_count_for(int count) { return count - std::max(1, count / 6); }

void apply_config_file(DatasetConfig& cfg, const fs::path& path) {
    const auto text = io::read_file(path);
    double side = cfg.grid.side();
    int n = cfg.grid.n;
    double wavelength = cfg.grid.wavelength;
    for (const auto& kv : io::parse_key_values(text)) {
        if (kv.key == "grid.n") n = static_cast<int>(io::parse_int(kv.value, kv.offset));
        else if (kv.key == "grid.side") side = io::parse_double(kv.value, kv.offset);
        else if (kv.key == "grid.wavelength") wavelength = io::parse_double(kv.value, kv.offset);
        else if (kv.key == "beam.ell") cfg.ell = static_cast<int>(io::parse_int(kv.value, kv.offset));
        else if (kv.key == "beam.waist") cfg.waist = io::parse_double(kv.value, kv.offset);
        else if (kv.key == "observation.distance") cfg.observation_distance = io::parse_double(kv.value, kv.offset);
        else if (kv.key == "seed") cfg.base_seed = io::parse_u64(kv.value, kv.offset);
        else if (kv.key == "count_per_level") cfg.count_per_level = static_cast<int>(io::parse_int(kv.value, kv.offset));
        else if (kv.key == "train_per_level") cfg.train_per_level = static_cast<int>(io::parse_int(kv.value, kv.offset));
        else if (kv.key == "threads") cfg.threads = static_cast<int>(io::parse_int(kv.value, kv.offset));
        else if (kv.key == "levels") {
            const auto all = standard_levels();
            cfg.levels.clear();
            for (int i : parse_int_list(kv.value)) {
                if (i < 0 || i >= static_cast<int>(all.size())) throw ConfigError("level index out of range in config");
                cfg.levels.push_back({i, all[static_cast<std::size_t>(i)], {}});
            }
        } else {
            throw ParseError("unknown config key '" + kv.key + "'", kv.offset);
        }
    }
    cfg.grid = GridSpec::from_side(n, side, wavelength);
}

int run_gen_dataset(const GenArgs& a) {
    DatasetConfig cfg = a.paper ? DatasetConfig::paper_scale() : DatasetConfig::desk();
    if (!a.config.empty()) apply_config_file(cfg, a.config);
    if (a.grid) cfg.grid = GridSpec::from_side(*a.grid, cfg.grid.side(), cfg.grid.wavelength);
    if (a.count) {
        cfg.count_per_level = *a.count;
        cfg.train_per_level = train_count_for(*a.count);
    }
    if (a.seed) cfg.base_seed = *a.seed;
    if (a.threads > 0) cfg.threads = a.threads;
    else cfg.threads = default_thread_count();
    if (!a.levels.empty()) {
        const auto all = standard_levels();
        cfg.levels.clear();
        for (int i : parse_int_list(a.levels)) {
            if (i < 0 || i >= static_cast<int>(all.size()))
                throw UsageError("--levels: index " + std::to_string(i) + " is not a standard level (0-3)");
            cfg.levels.push_back({i, all[static_cast<std::size_t>(i)], {}});
        }
    }
    for (auto& l : cfg.levels)
        l.params = TurbulenceParams::from_cn2(l.params.cn2, cfg.grid.wavelength, l.params.z, l.params.tau, l.params.eta);

    if (a.dry_run) {
        // Manifest keys only; the per-sample lines would need the files.
        const auto plan = plan_dataset(cfg);
        std::istringstream lines(plan.to_text());
        for (std::string line; std::getline(lines, line);)
            if (line.rfind("sample.", 0) != 0) std::printf("%s\n", line.c_str());
        std::printf("sample.count = %zu\n", plan.samples.size());
        return 0;
    }

    if (a.out.empty()) throw UsageError("gen-dataset: --out is required");
    const auto manifest = generate_dataset(cfg, a.out);
    std::printf("wrote %zu samples (%d x %d, %d per level, %d train) to %s\n", manifest.samples.size(),
                manifest.grid.n, manifest.grid.n, manifest.count_per_level, manifest.train_per_level, a.out.c_str());
    std::printf("manifest sha256 %s\n", io::sha256_hex(io::read_file(fs::path(a.out) / kManifestName)).c_str());
    std::printf("%-6s %-10s %-14s %-14s\n", "level", "cn2", "screen_var", "mean_mp_dist");
    for (const auto& level : manifest.levels) {
        const auto records = manifest.records(Split::test, level.index);
        const std::size_t count = std::min<std::size_t>(records.size(), 100);
        double mp = 0.0;
        for (std::size_t i = 0; i < count; ++i)
            mp += mode_purity(synthesize_sample(manifest, records[i]).distorted, manifest.ell);
        std::printf("%-6d %-10.3g %-14.6g %-14.6f\n", level.index, level.params.cn2,
                    screen_variance(level.params, manifest.grid), count ? mp / static_cast<double>(count) : 0.0);
    }
    return 0;
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
    std::string data;
    int level = 3;
    int epochs = 50;
    double lr = 0.01;
    int batch = 32;
    std::string mode = "hybrid";
    int layers = 5;
    int checkpoint_every = 10;
    std::string out;
    std::string resume;
    std::uint64_t seed = 0;
    int threads = 0;
};

std::string checkpoint_name(int epoch) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "epoch_%03d.ckpt", epoch);
    return buf;
}

int run_train(const TrainArgs& a) {
    const auto manifest = Manifest::load(a.data);
    const auto samples = load_split(manifest, a.data, Split::train, a.level);
    if (samples.empty()) throw ConfigError("no training samples for level " + std::to_string(a.level));
    const auto pairs = training_pairs(samples);

    AdamConfig adam;
    adam.learning_rate = a.lr;
    int start_epoch = 0;
    std::optional<TrainState> state;
    if (!a.resume.empty()) {
        if (!fs::exists(a.resume)) throw IoError("cannot resume: checkpoint " + a.resume + " does not exist");
        auto ckpt = load_checkpoint(a.resume);
        if (!(ckpt.state.network.grid() == manifest.grid)) throw ConfigError("checkpoint grid differs from dataset grid");
        start_epoch = ckpt.epoch;
        state.emplace(std::move(ckpt.state));
    } else {
        DiffractiveNetwork net(manifest.grid, a.layers, default_spacing(manifest.grid), parse_modulation(a.mode));
        state.emplace(std::move(net), adam);
    }
    if (start_epoch >= a.epochs) throw ConfigError("checkpoint already covers the requested epochs");

    fs::create_directories(a.out);
    const fs::path loss_path = fs::path(a.out) / "loss.csv";
    std::vector<std::pair<int, double>> losses;
    if (start_epoch > 0 && fs::exists(loss_path)) {
        std::istringstream in(io::read_file(loss_path));
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            const auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            const int epoch = std::stoi(line.substr(0, comma));
            if (epoch <= start_epoch) losses.emplace_back(epoch, std::stod(line.substr(comma + 1)));
        }
    }

    TrainOptions opt;
    opt.epochs = a.epochs;
    opt.start_epoch = start_epoch;
    opt.batch = a.batch;
    opt.shuffle_seed = a.seed;
    opt.threads = a.threads;
    opt.on_epoch = [&](int epoch, const TrainState& st) {
        if ((a.checkpoint_every > 0 && epoch % a.checkpoint_every == 0) || epoch == a.epochs) {
            Checkpoint ckpt{st, a.level, epoch};
            save_checkpoint(ckpt, fs::path(a.out) / checkpoint_name(epoch));
        }
    };
    const auto result = train(std::move(*state), pairs, opt);
    for (std::size_t i = 0; i < result.loss_history.size(); ++i) {
        const int epoch = start_epoch + 1 + static_cast<int>(i);
        losses.emplace_back(epoch, result.loss_history[i]);
        std::printf("epoch %3d loss %.6g\n", epoch, result.loss_history[i]);
    }
    std::ostringstream csv;
    csv << "epoch,loss\n";
    for (const auto& [epoch, loss] : losses) csv << epoch << ',' << io::format_double(loss) << '\n';
    io::write_file_atomic(loss_path, csv.str());
    return 0;
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
    std::string data;
    std::vector<std::string> checkpoints;
    bool oracle = false;
    bool identity = false;
    std::optional<int> level;
    std::string report;
    std::string dump_images;
    std::string split = "test";
    int threads = 0;
};

int run_eval(const EvalArgs& a) {
    const int stubs = (a.oracle ? 1 : 0) + (a.identity ? 1 : 0);
    if (stubs + (a.checkpoints.empty() ? 0 : 1) != 1)
        throw UsageError("give --checkpoint, --oracle-stub or --identity-stub (exactly one kind)");
    const auto manifest = Manifest::load(a.data);
    const auto split = parse_split(a.split);

    struct Job {
        std::unique_ptr<ScreenPredictor> predictor;
        std::optional<DiffractiveNetwork> net;
        int level;
        int epoch;
    };
    std::vector<Job> jobs;
    if (stubs) {
        Job job;
        job.level = a.level.value_or(manifest.levels.back().index);
        job.epoch = 0;
        if (a.oracle) job.predictor = std::make_unique<OraclePredictor>(manifest);
        else job.predictor = std::make_unique<IdentityPredictor>();
        jobs.push_back(std::move(job));
    } else {
        for (const auto& path : a.checkpoints) {
            auto ckpt = load_checkpoint(path);
            if (!(ckpt.state.network.grid() == manifest.grid))
                throw ConfigError("checkpoint " + path + " was trained on a different grid");
            Job job;
            job.level = a.level.value_or(ckpt.level);
            job.epoch = ckpt.epoch;
            job.net.emplace(std::move(ckpt.state.network));
            jobs.push_back(std::move(job));
        }
        for (auto& job : jobs) job.predictor = std::make_unique<NetworkPredictor>(*job.net);
    }

    std::vector<MetricRow> rows;
    std::printf("%-9s %-6s %-6s %-8s %-8s %-8s %-8s %-8s %-8s %-9s\n", "predictor", "level", "epoch", "mp_dist",
                "mp_comp", "mp_bound", "mp_rx", "mp_rx_bnd", "improved", "psnr_db");
    for (const auto& job : jobs) {
        const auto samples = load_split(manifest, a.data, split, job.level);
        EvaluateOptions opt;
        opt.epoch = job.epoch;
        opt.threads = a.threads;
        if (!a.dump_images.empty()) {
            opt.dump_dir = fs::path(a.dump_images);
            if (jobs.size() > 1) *opt.dump_dir /= "epoch_" + std::to_string(job.epoch);
        }
        const auto report = evaluate_level(*job.predictor, manifest, samples, job.level, opt);
        std::printf("%-9s %-6d %-6d %-8.4f %-8.4f %-8.4f %-8.4f %-8.4f %-8.2f %-9.3f\n", report.predictor.c_str(),
                    report.level, report.epoch, report.mean_mp_distorted(), report.mean_mp_compensated(),
                    report.mean_mp_bound(), report.mean_mp_receiver(), report.mean_mp_receiver_bound(),
                    report.fraction_improved(), report.mean_psnr());
        const auto r = report.rows();
        rows.insert(rows.end(), r.begin(), r.end());
    }
    write_metric_csv(a.report, rows);
    return 0;
}

// ---- inspect ----------------------------------------------------------------

struct InspectArgs {
    bool screen = false;
    bool beam = false;
    bool kernel = false;
    std::vector<std::string> params;
    std::string out;
    std::string spectrum;
};

std::map<std::string, std::string> parse_params(const std::vector<std::string>& items) {
    static const char* known[] = {"n", "side", "wavelength", "ell", "waist", "cn2", "z", "seed", "distance"};
    std::map<std::string, std::string> out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("parameter '" + item + "' is not key=value");
        const auto key = item.substr(0, eq);
        if (std::find(std::begin(known), std::end(known), key) == std::end(known))
            throw UsageError("unknown parameter '" + key + "'");
        out[key] = item.substr(eq + 1);
    }
    return out;
}

Image wrapped_phase_image(const Array2D<double>& phase) {
    Image img(phase.n());
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < img.size(); ++i) {
        double v = std::fmod(phase[i], two_pi);
        if (v < 0) v += two_pi;
        img[i] = v / two_pi;
        if (img[i] >= 1.0) img[i] = 0.0;
    }
    return img;
}

int run_inspect(const InspectArgs& a) {
    const auto p = parse_params(a.params);
    auto num = [&](const char* key, double fallback) {
        const auto it = p.find(key);
        if (it == p.end()) return fallback;
        try {
            return io::parse_double(it->second, 0);
        } catch (const ParseError&) {
            throw UsageError(std::string("parameter ") + key + " is not a number");
        }
    };
    const int n = static_cast<int>(num("n", 64));
    const auto grid = GridSpec::from_side(n, num("side", kDefaultSide), num("wavelength", kStandardWavelength));
    const int ell = static_cast<int>(num("ell", kDefaultEll));
    const double waist = num("waist", kDefaultWaist);

    Image img;
    std::optional<ComplexField> spectrum_field;
    if (a.beam) {
        auto beam = make_vortex_beam(grid, ell, waist);
        img = normalize_image(intensity(beam));
        spectrum_field = std::move(beam);
    } else if (a.screen) {
        const auto params = TurbulenceParams::from_cn2(num("cn2", 1e-12), grid.wavelength, num("z", kStandardPathLength));
        ScreenRng rng(static_cast<std::uint64_t>(num("seed", 1)));
        const auto screen = make_screen(params, grid, rng);
        img = wrapped_phase_image(screen.phase());
        spectrum_field = apply_phase(make_vortex_beam(grid, ell, waist), screen);
    } else {
        const auto kernel = make_kernel(grid, num("distance", 0.05));
        Array2D<double> phase(n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) phase(r, c) = std::arg(kernel.transfer()((r + n / 2) % n, (c + n / 2) % n));
        img = wrapped_phase_image(phase);
    }

    if (!a.out.empty()) export_image(img, a.out);
    if (!a.spectrum.empty()) {
        if (!spectrum_field) throw UsageError("--spectrum needs --beam or --screen");
        const auto spec = oam_decompose(*spectrum_field);
        std::ostringstream csv;
        csv << "ell,weight\n";
        for (int l = spec.ell_min; l <= spec.ell_max; ++l) csv << l << ',' << io::format_double(spec.weight(l)) << '\n';
        io::write_file_atomic(a.spectrum, csv.str());
    }
    if (a.out.empty() && a.spectrum.empty()) throw UsageError("nothing to write: give --out and/or --spectrum");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vortex-beam adaptive optics with a diffractive network in oceanic turbulence"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-dataset", "Generate a dataset of distorted intensities and screens");
    gen_cmd->add_option("--config", gen.config, "Key-value config file (flags override it)")->check(CLI::ExistingFile);
    gen_cmd->add_option("--out", gen.out, "Output directory (required unless --dry-run)");
    gen_cmd->add_option("--seed", gen.seed, "Base seed");
    gen_cmd->add_option("--levels", gen.levels, "Comma-separated standard level indices (0-3)");
    gen_cmd->add_option("--count", gen.count, "Samples per level")->check(CLI::Range(2, 1 << 24));
    gen_cmd->add_option("--grid", gen.grid, "Grid size n (n x n)")->check(CLI::Range(8, 4096));
    auto* desk = gen_cmd->add_flag("--desk", gen.desk, "64 x 64, 600 per level (default)");
    auto* paper = gen_cmd->add_flag("--paper-scale", gen.paper, "256 x 256, 12,000 per level");
    desk->excludes(paper);
    gen_cmd->add_flag("--dry-run", gen.dry_run, "Print the manifest keys without generating anything");
    gen_cmd->add_option("--threads", gen.threads, "Worker threads")->check(CLI::NonNegativeNumber);

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "Train a diffractive network on one turbulence level");
    train_cmd->add_option("--data", tr.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
    train_cmd->add_option("--level", tr.level, "Turbulence level index")->capture_default_str();
    train_cmd->add_option("--epochs", tr.epochs, "Epochs")->capture_default_str()->check(CLI::PositiveNumber);
    train_cmd->add_option("--lr", tr.lr, "Adam learning rate")->capture_default_str()->check(CLI::PositiveNumber);
    train_cmd->add_option("--batch", tr.batch, "Batch size")->capture_default_str()->check(CLI::PositiveNumber);
    train_cmd->add_option("--mode", tr.mode, "phase | amp | hybrid")->capture_default_str()
        ->check(CLI::IsMember({"phase", "amp", "amplitude", "hybrid"}));
    train_cmd->add_option("--layers", tr.layers, "Diffractive layers")->capture_default_str()->check(CLI::Range(1, 64));
    train_cmd->add_option("--checkpoint-every", tr.checkpoint_every, "Checkpoint period in epochs")->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--out", tr.out, "Output directory")->required();
    train_cmd->add_option("--resume", tr.resume, "Resume from this checkpoint");
    train_cmd->add_option("--seed", tr.seed, "Shuffle seed")->capture_default_str();
    train_cmd->add_option("--threads", tr.threads, "Worker threads")->check(CLI::NonNegativeNumber);

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate compensation on a dataset split");
    eval_cmd->add_option("--data", ev.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
    eval_cmd->add_option("--checkpoint", ev.checkpoints, "Checkpoint file (repeatable)");
    eval_cmd->add_flag("--oracle-stub", ev.oracle, "Predict the ground-truth screen");
    eval_cmd->add_flag("--identity-stub", ev.identity, "Predict a zero screen");
    eval_cmd->add_option("--level", ev.level, "Turbulence level (default: the checkpoint's)");
    eval_cmd->add_option("--report", ev.report, "Output CSV")->required();
    eval_cmd->add_option("--dump-images", ev.dump_images, "Directory for per-sample PGM panels");
    eval_cmd->add_option("--split", ev.split, "train | test")->capture_default_str()->check(CLI::IsMember({"train", "test"}));
    eval_cmd->add_option("--threads", ev.threads, "Worker threads")->check(CLI::NonNegativeNumber);

    InspectArgs in;
    auto* inspect_cmd = app.add_subcommand("inspect", "Render a single screen, beam or kernel");
    auto* s = inspect_cmd->add_flag("--screen", in.screen, "Phase screen (wrapped phase)");
    auto* b = inspect_cmd->add_flag("--beam", in.beam, "Vortex-beam intensity");
    auto* k = inspect_cmd->add_flag("--kernel", in.kernel, "Transfer-function phase (centred)");
    s->excludes(b)->excludes(k);
    b->excludes(k);
    inspect_cmd->add_option("params", in.params, "key=value: n side wavelength ell waist cn2 z seed distance");
    inspect_cmd->add_option("--out", in.out, "PGM output");
    inspect_cmd->add_option("--spectrum", in.spectrum, "OAM spectrum CSV output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*gen_cmd) return run_gen_dataset(gen);
        if (*train_cmd) return run_train(tr);
        if (*eval_cmd) return run_eval(ev);
        if (*inspect_cmd) {
            if (!in.screen && !in.beam && !in.kernel) throw UsageError("choose one of --screen, --beam, --kernel");
            return run_inspect(in);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
