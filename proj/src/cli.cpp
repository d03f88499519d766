#include "ecglab/cli.hpp"

#include <CLI11.hpp>

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "ecglab/config.hpp"
#include "ecglab/recipes.hpp"

namespace ecglab::cli {

namespace {

struct Flag {
    std::string name;  // without leading dashes
    std::string key;
    std::string help;
};

const std::map<std::string, std::vector<Flag>>& flag_table() {
    static const std::vector<Flag> cnn{
        {"epochs", "cnn.epochs", "training epochs"},
        {"filters", "cnn.filters", "filters per conv layer"},
        {"kernel", "cnn.kernel", "kernel length (K or KxM)"},
        {"layers", "cnn.layers", "conv layers"},
        {"pool-stride", "cnn.pool_stride", "pooling stride"},
        {"pool-mode", "cnn.pool_mode", "subsample | mean"},
        {"lr", "cnn.lr", "Adam learning rate"},
        {"batch", "cnn.batch", "mini-batch size"},
        {"clip", "cnn.clip", "gradient-norm cap"},
    };
    auto with = [](std::vector<Flag> a, const std::vector<Flag>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };
    static const std::map<std::string, std::vector<Flag>> t{
        {"synth",
         {{"duration", "synth.duration_s", "seconds to generate"},
          {"fs", "synth.fs", "sampling rate, Hz"},
          {"heart-rate", "synth.heart_rate_bpm", "beats per minute"},
          {"voltage-scale", "synth.voltage_scale", "peak-to-peak amplitude, mV"},
          {"z0", "synth.z0", "baseline offset"}}},
        {"add-noise",
         {{"input", "noise.input", "clean signal file"},
          {"kind", "noise.kind", "random | drift | random_plus_drift | recorded"},
          {"snr", "noise.snr_db", "target SNR, dB"},
          {"noise-record", "noise.record", "noise recording (kind=recorded)"}}},
        {"filter",
         {{"input", "filter.input", "signal file"},
          {"chain", "filter.chain", "algorithm1 | lowpass | highpass | bandstop"},
          {"cutoffs", "filter.cutoffs", "cutoff(s) in Hz, comma separated"},
          {"order", "filter.order", "filter order"},
          {"clean", "filter.clean", "clean reference for scoring"}}},
        {"wavelet-denoise",
         {{"input", "wavelet.input", "signal file"},
          {"family", "wavelet.family", "haar | db4 | sym4"},
          {"levels", "wavelet.levels", "decomposition depth"},
          {"clean", "wavelet.clean", "clean reference for scoring"}}},
        {"build-dataset",
         {{"scenario", "dataset.scenario", "single | multi | effort"},
          {"record", "dataset.record", "clean record file (default: synthetic)"},
          {"levels", "dataset.levels", "SNR levels, comma separated"},
          {"windows", "dataset.windows", "windows per record"},
          {"window-s", "dataset.window_s", "window length, s"},
          {"records", "dataset.records", "synthetic records (multi)"},
          {"rates", "dataset.rates", "heart rates, bpm (effort)"},
          {"windows-per-rate", "dataset.windows_per_rate", "windows per rate (effort)"},
          {"noise-draws", "dataset.noise_draws", "noise realizations per pair (effort)"},
          {"noise-kind", "dataset.noise_kind", "noise kind"},
          {"noise-record", "dataset.noise_record", "noise recording"}}},
        {"train", with({{"dataset", "train.dataset", "dataset manifest.csv"}}, cnn)},
        {"denoise",
         {{"model", "denoise.model", "CNN model file"},
          {"input", "denoise.input", "noisy signal file"},
          {"clean", "denoise.clean", "clean reference for scoring"}}},
        {"rbm-train",
         {{"dataset", "rbm.dataset", "dataset manifest.csv"},
          {"hidden", "rbm.hidden", "hidden units"},
          {"epochs", "rbm.epochs", "CD-1 epochs"},
          {"lr", "rbm.lr", "learning rate"},
          {"batch", "rbm.batch", "mini-batch size"}}},
        {"rbm-denoise",
         {{"model", "rbm.model", "RBM model file"},
          {"input", "rbm.input", "noisy signal file"},
          {"clean", "rbm.clean", "clean reference for scoring"}}},
        {"eval",
         {{"clean", "eval.clean", "clean signal file"},
          {"pred", "eval.pred", "predicted signal file"},
          {"window-s", "eval.window_s", "score per window of this length (0: whole signal)"}}},
        {"doe",
         with({{"fixture", "doe.fixture", "sim_id,filters,kernel,rms,snr,time_s CSV"},
               {"threshold", "doe.time_threshold_s", "time threshold, s"},
               {"tolerance", "doe.time_tolerance", "relative slack on the threshold"},
               {"knee", "doe.knee", "first sim id right of the quality knee"},
               {"knee-rms", "doe.knee_rms", "RMS bar locating the knee when --knee is absent"},
               {"objective", "doe.objective", "rms-time-snr | rms-snr-time"},
               {"grid-filters", "doe.filters", "filter counts for a live sweep"},
               {"grid-kernels", "doe.kernels", "kernel lengths for a live sweep"},
               {"windows", "doe.windows", "dataset windows for a live sweep"}},
              cnn)},
        {"reproduce-4.1",
         with({{"windows", "repro.windows", "one-second windows in the record"},
               {"levels", "repro.levels", "SNR levels"},
               {"variant", "repro.variant", "synthetic morphology variant"}},
              cnn)},
        {"reproduce-4.5",
         with({{"rates", "repro.rates", "training heart rates, bpm"},
               {"windows-per-rate", "repro.windows_per_rate", "windows per rate"},
               {"levels", "repro.levels", "SNR levels"},
               {"test-rate", "repro.test_rate_bpm", "heart rate of the unseen effort recording"},
               {"test-windows", "repro.test_windows", "windows in the effort recording"}},
              cnn)},
        {"plot",
         {{"inputs", "plot.inputs", "one to three signal files, comma separated"},
          {"labels", "plot.labels", "legend labels, comma separated"},
          {"title", "plot.title", "figure title"}}},
    };
    return t;
}

const std::map<std::string, std::string> kDescriptions{
    {"synth", "Generate a synthetic ECG with the dynamical model"},
    {"add-noise", "Corrupt a clean signal at an exact SNR"},
    {"filter", "Zero-phase Butterworth filtering or the classical chain"},
    {"wavelet-denoise", "Universal-threshold wavelet shrinkage"},
    {"build-dataset", "Write a paired clean/noisy dataset with manifest"},
    {"train", "Train the CNN denoiser on a dataset manifest"},
    {"denoise", "Denoise a signal with a trained CNN"},
    {"rbm-train", "Train the RBM denoiser on a dataset manifest"},
    {"rbm-denoise", "Denoise a signal with a trained RBM"},
    {"eval", "Score a prediction against a clean reference"},
    {"doe", "Architecture sweep or fixture selection report"},
    {"reproduce-4.1", "Desk-scale single-record training experiment"},
    {"reproduce-4.5", "Desk-scale rest-to-effort experiment"},
    {"plot", "Overlay up to three signals as SVG"},
};

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"ECG denoising laboratory"};
    app.require_subcommand(1);

    struct Bound {
        CLI::App* sub;
        std::string config_file;
        std::string seed;
        std::string out_dir;
        std::vector<std::string> sets;
        std::map<std::string, std::string> values;
    };
    std::map<std::string, Bound> bound;
    for (const auto& name : recipes::names()) {
        auto& b = bound[name];
        b.sub = app.add_subcommand(name, kDescriptions.at(name));
        b.sub->add_option("--config", b.config_file, "key=value config file with [section] headers");
        b.sub->add_option("--seed", b.seed, "master seed (mandatory here or in the config)");
        b.sub->add_option("--out-dir", b.out_dir, "directory for artifacts and the manifest");
        b.sub->add_option("--set", b.sets, "extra section.key=value override (repeatable)");
        for (const auto& f : flag_table().at(name)) {
            b.sub->add_option("--" + f.name, b.values[f.key], f.help);
        }
    }
    std::string replay_manifest;
    std::string replay_out;
    auto* replay = app.add_subcommand("replay", "Re-run a manifest and compare output hashes");
    replay->add_option("manifest", replay_manifest, "manifest file")->required();
    replay->add_option("--out-dir", replay_out, "where to re-run (default: <manifest dir>/replay)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (replay->parsed()) {
            const std::filesystem::path m = replay_manifest;
            const std::filesystem::path dir = replay_out.empty() ? m.parent_path() / "replay" : std::filesystem::path(replay_out);
            const auto rep = recipes::replay(m, dir, err);
            for (const auto& l : rep.lines) out << l << "\n";
            out << (rep.identical ? "replay: identical\n" : "replay: outputs differ\n");
            return rep.identical ? 0 : 1;
        }
        for (auto& [name, b] : bound) {
            if (!b.sub->parsed()) continue;
            Config cfg = b.config_file.empty() ? Config{} : Config::load(b.config_file);
            cfg.set("run.recipe", name);
            if (!b.seed.empty()) cfg.set("run.seed", b.seed);
            if (!b.out_dir.empty()) cfg.set("run.out_dir", b.out_dir);
            for (const auto& [k, v] : b.values) {
                if (!v.empty()) cfg.set(k, v);
            }
            for (const auto& s : b.sets) {
                const auto eq = s.find('=');
                if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects section.key=value, got '" + s + "'");
                cfg.set(s.substr(0, eq), s.substr(eq + 1));
            }
            const auto result = recipes::run(cfg, err);
            for (const auto& a : result.artifacts) {
                if (a.rfind("dataset/pairs/", 0) != 0) out << "wrote " << a << "\n";
            }
            if (!result.summary.empty()) out << result.summary << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace ecglab::cli
