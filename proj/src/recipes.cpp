#include "ecglab/recipes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ecglab/datasets.hpp"
#include "ecglab/doe.hpp"
#include "ecglab/filters.hpp"
#include "ecglab/hash.hpp"
#include "ecglab/metrics.hpp"
#include "ecglab/neural/cnn.hpp"
#include "ecglab/noise.hpp"
#include "ecglab/parallel.hpp"
#include "ecglab/rbm.hpp"
#include "ecglab/rng.hpp"
#include "ecglab/signal_io.hpp"
#include "ecglab/svg.hpp"
#include "ecglab/synth.hpp"
#include "ecglab/wavelet.hpp"

namespace ecglab::recipes {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "ecglab 1.0.0";
const std::vector<double> kDeskLevels{-6, 0, 6, 12};

struct Ctx {
    const Config& cfg;
    fs::path out_dir;
    std::uint64_t seed;
    std::ostream& log;
    std::vector<std::string> artifacts;
    std::string summary;

    fs::path path_of(const std::string& name) {
        const fs::path p = out_dir / name;
        fs::create_directories(p.parent_path());
        if (std::ranges::find(artifacts, name) == artifacts.end()) artifacts.push_back(name);
        return p;
    }
    void text(const std::string& name, const std::string& body) {
        std::ofstream os(path_of(name), std::ios::binary);
        os << body;
        if (!os) throw std::runtime_error("write failed: " + (out_dir / name).string());
    }
    void signal(const std::string& name, const Signal& s) { io::save(path_of(name), s); }
};

using RecipeFn = std::function<void(Ctx&)>;

struct Recipe {
    std::string name;
    std::vector<std::string> required_inputs;  ///< config keys naming files that must exist
    std::vector<std::string> optional_inputs;
    RecipeFn fn;
};

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::size_t positive(const Config& c, const std::string& key, long long fallback) {
    const long long v = c.get_int(key, fallback);
    if (v <= 0) throw ConfigError("'" + key + "' must be positive");
    return static_cast<std::size_t>(v);
}

// Validation failures inside module constructors surface as config errors.
template <class F>
auto checked(const std::string& what, F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

std::string report_csv(const metrics::EvalReport& r) {
    std::ostringstream os;
    metrics::write_csv(os, r);
    return os.str();
}

std::vector<Signal> windows_of(const Signal& s, std::size_t len) {
    if (s.size() % len != 0) {
        throw std::invalid_argument("signal of " + std::to_string(s.size()) + " samples is not a whole number of " +
                                    std::to_string(len) + "-sample windows");
    }
    std::vector<Signal> out;
    for (std::size_t i = 0; i < s.size(); i += len) out.push_back(slice(s, {i, len}));
    return out;
}

neural::CnnConfig cnn_config(const Config& c, std::uint64_t seed, std::size_t input_len, std::size_t epochs) {
    neural::CnnConfig cfg;
    cfg.input_len = input_len;
    cfg.epochs = positive(c, "cnn.epochs", static_cast<long long>(epochs));
    cfg.filters_per_layer = positive(c, "cnn.filters", 36);
    cfg.kernel_len = static_cast<std::size_t>(checked("cnn.kernel", [&] { return doe::parse_kernel(c.get_string("cnn.kernel", "23")); }));
    cfg.num_conv_layers = positive(c, "cnn.layers", 3);
    cfg.pool_stride = positive(c, "cnn.pool_stride", 4);
    const std::string mode = c.get_string("cnn.pool_mode", "subsample");
    if (mode == "subsample") {
        cfg.pool_mode = neural::PoolMode::subsample;
    } else if (mode == "mean") {
        cfg.pool_mode = neural::PoolMode::mean;
    } else {
        throw ConfigError("cnn.pool_mode must be subsample or mean");
    }
    cfg.learning_rate = c.get_double("cnn.lr", 0.01);
    cfg.grad_clip_norm = c.get_double("cnn.clip", 1.0);
    cfg.batch_size = positive(c, "cnn.batch", 200);
    cfg.seed = derive_seed(seed, "cnn");
    checked("cnn", [&] {
        cfg.validate();
        return 0;
    });
    return cfg;
}

datasets::NoiseOptions noise_options(const Config& c, const std::string& prefix) {
    datasets::NoiseOptions n;
    n.kind = checked(prefix + "noise_kind", [&] { return noise::parse_kind(c.get_string(prefix + "noise_kind", "random_plus_drift")); });
    if (const auto p = c.get(prefix + "noise_record")) n.noise_record = io::load(*p);
    if (n.kind == noise::Kind::recorded && !n.noise_record) {
        throw ConfigError(prefix + "noise_kind=recorded needs " + prefix + "noise_record");
    }
    return n;
}

std::string trace_csv(const std::vector<neural::EpochStats>& trace) {
    std::string s = "epoch,loss,rms\n";
    for (const auto& e : trace) s += std::to_string(e.epoch) + "," + fmt(e.loss) + "," + fmt(e.rms) + "\n";
    return s;
}

neural::TrainResult train_logged(Ctx& ctx, const neural::CnnConfig& cfg, const std::vector<Signal>& noisy,
                                 const std::vector<Signal>& clean) {
    ctx.log << "training " << cfg.num_conv_layers << "x" << cfg.filters_per_layer << " filters, kernel "
            << cfg.kernel_len << ", " << noisy.size() << " pairs, " << cfg.epochs << " epochs\n";
    return neural::train(cfg, noisy, clean, [&](const neural::EpochStats& e) {
        if (e.epoch == 1 || e.epoch % 10 == 0 || e.epoch == cfg.epochs) {
            ctx.log << "  epoch " << e.epoch << "  loss " << fmt(e.loss) << "\n" << std::flush;
        }
    });
}

// Clean/noisy/denoised example figure plus the two evaluation reports.
void score_and_plot(Ctx& ctx, const std::vector<Signal>& clean, const std::vector<Signal>& noisy,
                    const std::vector<Signal>& denoised) {
    std::vector<metrics::SignalScore> in, out;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        in.push_back({metrics::rms(clean[i], noisy[i]), metrics::snr_db(clean[i], noisy[i])});
        out.push_back({metrics::rms(clean[i], denoised[i]), metrics::snr_db(clean[i], denoised[i])});
    }
    const auto rin = metrics::summarize(std::move(in));
    const auto rout = metrics::summarize(std::move(out));
    ctx.text("eval_noisy.csv", report_csv(rin));
    ctx.text("eval_denoised.csv", report_csv(rout));
    ctx.text("summary.csv", "quantity,noisy,denoised\navg_rms_mv," + fmt(rin.avg_rms_mv) + "," + fmt(rout.avg_rms_mv) +
                                "\navg_snr_db," + fmt(rin.avg_snr_db) + "," + fmt(rout.avg_snr_db) +
                                "\npass_fraction," + fmt(rin.pass_fraction) + "," + fmt(rout.pass_fraction) + "\n");
    const std::vector<Signal> fig{clean.front(), noisy.front(), denoised.front()};
    const std::vector<std::string> labels{"clean", "noisy", "denoised"};
    ctx.text("example.svg", svg::plot_signals(fig, labels, "Denoised test window"));
    ctx.summary = "avg SNR noisy " + fmt(rin.avg_snr_db) + " dB -> denoised " + fmt(rout.avg_snr_db) +
                  " dB; avg RMS " + fmt(rout.avg_rms_mv) + " mV; joint pass " + fmt(100.0 * rout.pass_fraction) + "%";
}

void plot_pair(Ctx& ctx, const std::string& name, const Signal& input, const Signal& output,
               const std::optional<Signal>& clean, const std::string& title) {
    std::vector<Signal> sigs;
    std::vector<std::string> labels;
    if (clean) {
        sigs.push_back(*clean);
        labels.emplace_back("clean");
    }
    sigs.push_back(input);
    labels.emplace_back("input");
    sigs.push_back(output);
    labels.emplace_back("output");
    ctx.text(name, svg::plot_signals(sigs, labels, title));
}

void compare_csv(Ctx& ctx, const std::string& name, const Signal& clean, const Signal& input, const Signal& output) {
    ctx.text(name, "signal,rms_mv,snr_db\ninput," + fmt(metrics::rms(clean, input)) + "," +
                       fmt(metrics::snr_db(clean, input)) + "\noutput," + fmt(metrics::rms(clean, output)) + "," +
                       fmt(metrics::snr_db(clean, output)) + "\n");
}

std::optional<Signal> optional_signal(const Config& c, const std::string& key) {
    if (const auto p = c.get(key)) return io::load(*p);
    return std::nullopt;
}

// ---- recipes ----

void do_synth(Ctx& ctx) {
    const auto& c = ctx.cfg;
    synth::EcgModelParams p;
    p.heart_rate_bpm = c.get_double("synth.heart_rate_bpm", 60.0);
    p.voltage_scale = c.get_double("synth.voltage_scale", 1.0);
    p.z0 = c.get_double("synth.z0", 0.0);
    const double duration = c.get_double("synth.duration_s", 10.0);
    const int rate = static_cast<int>(positive(c, "synth.fs", 360));
    const Signal s = checked("synth", [&] { return synth::generate_ecg(p, duration, rate); });
    ctx.signal("synth.txt", s);
    const std::vector<Signal> fig{s};
    const std::vector<std::string> labels{"synthetic ECG"};
    ctx.text("synth.svg", svg::plot_signals(fig, labels, "Synthetic ECG"));
    ctx.summary = std::to_string(s.size()) + " samples at " + std::to_string(rate) + " Hz";
}

void do_add_noise(Ctx& ctx) {
    const auto& c = ctx.cfg;
    const Signal clean = io::load(c.require("noise.input"));
    noise::NoiseSpec spec;
    spec.kind = checked("noise.kind", [&] { return noise::parse_kind(c.get_string("noise.kind", "random_plus_drift")); });
    spec.target_snr_db = c.get_double("noise.snr_db", std::nan(""));
    if (!c.has("noise.snr_db")) throw ConfigError("missing required setting 'noise.snr_db'");
    spec.seed = derive_seed(ctx.seed, "noise");
    spec.noise_source = optional_signal(c, "noise.record");
    const Signal noisy = checked("add-noise", [&] { return noise::add_noise(clean, spec); });
    ctx.signal("noisy.txt", noisy);
    const double measured = metrics::snr_db(clean, noisy);
    ctx.text("noise_check.csv", "target_snr_db,measured_snr_db\n" + fmt(spec.target_snr_db) + "," + fmt(measured) + "\n");
    ctx.summary = "measured SNR " + fmt(measured) + " dB";
}

void do_filter(Ctx& ctx) {
    const auto& c = ctx.cfg;
    const Signal input = io::load(c.require("filter.input"));
    const auto clean = optional_signal(c, "filter.clean");
    const std::string chain = c.get_string("filter.chain", "algorithm1");
    Signal out = input;
    if (chain == "algorithm1") {
        out = checked("filter", [&] { return filters::algorithm1(input); });
    } else {
        const auto kind = checked("filter.chain", [&] { return filters::parse_kind(chain); });
        const auto f = checked("filter", [&] {
            return filters::design_butterworth(kind, c.get_list("filter.cutoffs", {}),
                                               static_cast<int>(c.get_int("filter.order", 1)), input.fs());
        });
        ctx.text("filter_design.txt", filters::describe(f));
        out = checked("filter", [&] { return filters::filtfilt(f, input); });
    }
    ctx.signal("filtered.txt", out);
    plot_pair(ctx, "filter.svg", input, out, clean, "Filter chain: " + chain);
    if (clean) {
        compare_csv(ctx, "filter_eval.csv", *clean, input, out);
        ctx.summary = "RMS " + fmt(metrics::rms(*clean, input)) + " -> " + fmt(metrics::rms(*clean, out)) + " mV";
    } else {
        ctx.summary = "filtered " + std::to_string(out.size()) + " samples";
    }
}

void do_wavelet(Ctx& ctx) {
    const auto& c = ctx.cfg;
    const Signal input = io::load(c.require("wavelet.input"));
    const auto clean = optional_signal(c, "wavelet.clean");
    const auto spec = wavelet::WaveletSpec::make(
        checked("wavelet.family", [&] { return wavelet::parse_family(c.get_string("wavelet.family", "sym4")); }));
    const int levels = static_cast<int>(c.get_int("wavelet.levels", wavelet::default_levels(input.size())));
    const Signal out = checked("wavelet-denoise", [&] { return wavelet::wavelet_denoise(input, spec, levels); });
    ctx.signal("wavelet_denoised.txt", out);
    plot_pair(ctx, "wavelet.svg", input, out, clean, "Wavelet shrinkage");
    if (clean) {
        compare_csv(ctx, "wavelet_eval.csv", *clean, input, out);
        ctx.summary = "RMS " + fmt(metrics::rms(*clean, input)) + " -> " + fmt(metrics::rms(*clean, out)) + " mV";
    } else {
        ctx.summary = "denoised " + std::to_string(out.size()) + " samples";
    }
}

datasets::PairedDataset dataset_from_config(Ctx& ctx) {
    const auto& c = ctx.cfg;
    const std::string scenario = c.get_string("dataset.scenario", "single");
    const double window_s = c.get_double("dataset.window_s", 1.0);
    const int rate = static_cast<int>(positive(c, "dataset.fs", 360));
    const auto noise = noise_options(c, "dataset.");
    const std::uint64_t seed = derive_seed(ctx.seed, "dataset");
    if (scenario == "single") {
        const std::size_t windows = positive(c, "dataset.windows", 100);
        const auto levels = c.get_list("dataset.levels", kDeskLevels);
        const Signal rec = c.has("dataset.record")
                               ? io::load(c.require("dataset.record"))
                               : synthetic_record(static_cast<double>(windows) * window_s, rate,
                                                  c.get_u64("dataset.variant", 0));
        return checked("build-dataset", [&] {
            return datasets::build_single_record(rec, levels, seed, windows, window_s, noise,
                                                 c.get_string("dataset.record_id", "record"));
        });
    }
    if (scenario == "multi") {
        const std::size_t windows = positive(c, "dataset.windows", 100);
        const std::vector<double> levels_default(std::begin(noise::kStressLevels), std::end(noise::kStressLevels));
        const auto levels = c.get_list("dataset.levels", levels_default);
        const std::size_t count = positive(c, "dataset.records", 3);
        std::vector<std::pair<std::string, Signal>> recs;
        for (std::size_t r = 0; r < count; ++r) {
            recs.emplace_back("synthetic-" + std::to_string(r + 1),
                              synthetic_record(static_cast<double>(windows) * window_s, rate, r + 1));
        }
        return checked("build-dataset",
                       [&] { return datasets::build_multi_record(recs, levels, seed, windows, window_s, noise); });
    }
    if (scenario == "effort") {
        datasets::EffortOptions opt;
        opt.windows_per_rate = positive(c, "dataset.windows_per_rate", 50);
        opt.noise_draws = positive(c, "dataset.noise_draws", 1);
        opt.window_s = window_s;
        opt.noise = noise;
        const auto rates = c.get_list("dataset.rates", {70, 90, 110, 130});
        const auto levels = c.get_list("dataset.levels", kDeskLevels);
        const Signal rest = synthetic_record(1.0, rate, 0);
        return checked("build-dataset", [&] { return datasets::build_effort_dataset(rest, rates, levels, seed, opt); });
    }
    throw ConfigError("dataset.scenario must be single, multi or effort");
}

void do_build_dataset(Ctx& ctx) {
    const auto data = dataset_from_config(ctx);
    datasets::write_manifest(data, ctx.out_dir / "dataset");
    ctx.path_of("dataset/manifest.csv");
    for (std::size_t i = 0; i < data.size(); ++i) {
        char stem[40];
        std::snprintf(stem, sizeof stem, "dataset/pairs/%06zu", i);
        ctx.path_of(std::string(stem) + ".noisy.bin");
        ctx.path_of(std::string(stem) + ".clean.bin");
    }
    ctx.summary = std::to_string(data.size()) + " pairs, " + std::to_string(data.split().train.size()) + " train / " +
                  std::to_string(data.split().test.size()) + " test";
}

void do_train(Ctx& ctx) {
    const auto data = datasets::read_manifest(ctx.cfg.require("train.dataset"));
    const auto& split = data.split();
    if (split.train.empty() || split.test.empty()) throw ConfigError("dataset needs both train and test items");
    const auto cfg = cnn_config(ctx.cfg, ctx.seed, data.clean(0).size(), 50);
    const auto res = train_logged(ctx, cfg, data.noisy_signals(split.train), data.clean_signals(split.train));
    neural::save(ctx.path_of("cnn.model"), res.model);
    ctx.text("train_trace.csv", trace_csv(res.trace));
    const auto clean = data.clean_signals(split.test);
    const auto noisy = data.noisy_signals(split.test);
    score_and_plot(ctx, clean, noisy, neural::denoise(res.model, noisy));
}

void do_denoise(Ctx& ctx) {
    const auto model = neural::load_model(ctx.cfg.require("denoise.model"));
    const Signal input = io::load(ctx.cfg.require("denoise.input"));
    const auto clean = optional_signal(ctx.cfg, "denoise.clean");
    const Signal out = checked("denoise", [&] { return neural::denoise(model, input); });
    ctx.signal("denoised.txt", out);
    plot_pair(ctx, "denoised.svg", input, out, clean, "CNN denoising");
    if (clean) compare_csv(ctx, "denoise_eval.csv", *clean, input, out);
    ctx.summary = "denoised " + std::to_string(out.size()) + " samples";
}

void do_rbm_train(Ctx& ctx) {
    const auto& c = ctx.cfg;
    const auto data = datasets::read_manifest(c.require("rbm.dataset"));
    const auto& split = data.split();
    if (split.train.empty() || split.test.empty()) throw ConfigError("dataset needs both train and test items");
    rbm::TrainConfig tc;
    tc.n_hidden = positive(c, "rbm.hidden", 64);
    tc.learning_rate = c.get_double("rbm.lr", 0.01);
    tc.epochs = positive(c, "rbm.epochs", 20);
    tc.batch_size = positive(c, "rbm.batch", 10);
    tc.seed = derive_seed(ctx.seed, "rbm");
    std::string trace = "epoch,reconstruction_error\n";
    const auto model = rbm::fit_denoiser(data.clean_signals(split.train), tc, [&](std::size_t e, double err) {
        trace += std::to_string(e) + "," + fmt(err) + "\n";
        ctx.log << "  epoch " << e << "  reconstruction error " << fmt(err) << "\n" << std::flush;
    });
    rbm::save(ctx.path_of("rbm.model"), model);
    ctx.text("rbm_trace.csv", trace);
    const auto clean = data.clean_signals(split.test);
    const auto noisy = data.noisy_signals(split.test);
    std::vector<Signal> out;
    for (const auto& s : noisy) out.push_back(rbm::denoise_rbm(model, s));
    score_and_plot(ctx, clean, noisy, out);
}

void do_rbm_denoise(Ctx& ctx) {
    const auto model = rbm::load_model(ctx.cfg.require("rbm.model"));
    const Signal input = io::load(ctx.cfg.require("rbm.input"));
    const auto clean = optional_signal(ctx.cfg, "rbm.clean");
    const auto parts = checked("rbm-denoise", [&] { return windows_of(input, model.params.n_visible); });
    std::vector<Signal> outs;
    for (const auto& p : parts) outs.push_back(rbm::denoise_rbm(model, p));
    const Signal out = concatenate(outs);
    ctx.signal("rbm_denoised.txt", out);
    plot_pair(ctx, "rbm_denoised.svg", input, out, clean, "RBM denoising");
    if (clean) compare_csv(ctx, "rbm_denoise_eval.csv", *clean, input, out);
    ctx.summary = "denoised " + std::to_string(out.size()) + " samples";
}

void do_eval(Ctx& ctx) {
    const Signal clean = io::load(ctx.cfg.require("eval.clean"));
    const Signal pred = io::load(ctx.cfg.require("eval.pred"));
    const double window_s = ctx.cfg.get_double("eval.window_s", 0.0);
    std::vector<std::pair<Signal, Signal>> pairs;
    if (window_s > 0.0) {
        const auto cw = checked("eval", [&] { return segment(clean, window_s); });
        const auto pw = checked("eval", [&] { return segment(pred, window_s); });
        if (cw.size() != pw.size()) throw ConfigError("eval: clean and prediction differ in length");
        for (std::size_t i = 0; i < cw.size(); ++i) pairs.emplace_back(cw[i], pw[i]);
    } else {
        pairs.emplace_back(clean, pred);
    }
    const auto rep = checked("eval", [&] { return metrics::evaluate_dataset(pairs); });
    ctx.text("eval.csv", report_csv(rep));
    ctx.summary = "avg RMS " + fmt(rep.avg_rms_mv) + " mV, avg SNR " + fmt(rep.avg_snr_db) + " dB";
}

void do_doe(Ctx& ctx) {
    const auto& c = ctx.cfg;
    std::vector<doe::DoeRow> rows;
    if (const auto fixture = c.get("doe.fixture")) {
        rows = checked("doe.fixture", [&] { return doe::read_fixture(fs::path(*fixture)); });
    } else {
        doe::Grid grid;
        for (double f : c.get_list("doe.filters", {16, 36})) grid.filters.push_back(static_cast<std::size_t>(f));
        for (double k : c.get_list("doe.kernels", {9, 23})) grid.kernel_lens.push_back(static_cast<std::size_t>(k));
        if (grid.filters.empty() || grid.kernel_lens.empty()) throw ConfigError("doe: empty grid");
        const std::size_t windows = positive(c, "doe.windows", 50);
        const auto rec = synthetic_record(static_cast<double>(windows), 360, 0);
        const auto data = datasets::build_single_record(rec, c.get_list("doe.levels", kDeskLevels),
                                                        derive_seed(ctx.seed, "dataset"), windows);
        auto base = cnn_config(c, ctx.seed, 360, 20);
        base.epochs = positive(c, "doe.epochs", static_cast<long long>(base.epochs));
        rows = doe::run_sweep(grid, data, base, worker_count(), [&](const doe::DoeRow& r) {
            ctx.log << "  cell " << r.sim_id << ": " << r.filters << " filters, kernel " << r.kernel << "  RMS "
                    << fmt(r.avg_rms_mv) << "  SNR " << fmt(r.avg_snr_db) << "  " << fmt(r.wall_time_s) << " s\n"
                    << std::flush;
        });
    }
    doe::SelectionPolicy policy;
    policy.time_threshold_s = c.get_double("doe.time_threshold_s", 5000.0);
    policy.time_tolerance = c.get_double("doe.time_tolerance", 0.05);
    policy.objective = checked("doe.objective", [&] { return doe::parse_objective(c.get_string("doe.objective", "rms-time-snr")); });
    if (c.has("doe.knee")) {
        policy.min_sim_id_cut = static_cast<int>(c.get_int("doe.knee", 14));
    } else {
        try {
            policy.min_sim_id_cut = doe::knee_sim_id(rows, c.get_double("doe.knee_rms", 0.14));
        } catch (const std::invalid_argument&) {
            policy.min_sim_id_cut = 1;
        }
    }
    checked("doe policy", [&] {
        policy.validate();
        return 0;
    });
    std::optional<doe::Selection> sel;
    try {
        sel = doe::select_optimal(rows, policy);
    } catch (const std::invalid_argument& e) {
        ctx.log << "no selection: " << e.what() << "\n";
    }
    for (const auto& p : doe::emit_report(rows, sel, ctx.out_dir)) ctx.path_of(p.filename().string());
    if (sel) {
        std::string ids;
        for (const auto& r : sel->shortlist) ids += (ids.empty() ? "" : " ") + std::to_string(r.sim_id);
        ctx.summary = "knee at sim " + std::to_string(policy.min_sim_id_cut) + "; shortlist of " +
                      std::to_string(sel->shortlist.size()) + " [" + ids + "]; best sim " +
                      std::to_string(sel->best.sim_id) + " (" + std::to_string(sel->best.filters) + " filters, " +
                      sel->best.kernel + ", RMS " + fmt(sel->best.avg_rms_mv) + ", SNR " + fmt(sel->best.avg_snr_db) +
                      ", " + fmt(sel->best.wall_time_s) + " s)";
    } else {
        ctx.summary = std::to_string(rows.size()) + " rows, no selection";
    }
}

void do_reproduce_41(Ctx& ctx) {
    const auto& c = ctx.cfg;
    const std::size_t windows = positive(c, "repro.windows", 100);
    const auto levels = c.get_list("repro.levels", kDeskLevels);
    const auto rec = synthetic_record(static_cast<double>(windows), 360, c.get_u64("repro.variant", 0));
    const auto data = checked("reproduce-4.1", [&] {
        return datasets::build_single_record(rec, levels, derive_seed(ctx.seed, "dataset"), windows);
    });
    const auto& split = data.split();
    const auto cfg = cnn_config(c, ctx.seed, 360, 150);
    const auto res = train_logged(ctx, cfg, data.noisy_signals(split.train), data.clean_signals(split.train));
    ctx.text("trace.csv", trace_csv(res.trace));
    const auto clean = data.clean_signals(split.test);
    const auto noisy = data.noisy_signals(split.test);
    score_and_plot(ctx, clean, noisy, neural::denoise(res.model, noisy));
}

void do_reproduce_45(Ctx& ctx) {
    const auto& c = ctx.cfg;
    datasets::EffortOptions opt;
    opt.windows_per_rate = positive(c, "repro.windows_per_rate", 50);
    const auto rates = c.get_list("repro.rates", {70, 90, 110, 130});
    const auto levels = c.get_list("repro.levels", kDeskLevels);
    const Signal rest = synthetic_record(1.0, 360, 0);
    const auto data = checked("reproduce-4.5", [&] {
        return datasets::build_effort_dataset(rest, rates, levels, derive_seed(ctx.seed, "dataset"), opt);
    });
    const auto& split = data.split();
    const auto cfg = cnn_config(c, ctx.seed, 360, 100);
    const auto res = train_logged(ctx, cfg, data.noisy_signals(split.train), data.clean_signals(split.train));
    ctx.text("trace.csv", trace_csv(res.trace));

    // Elevated-rate recording generated directly by the dynamical model, never seen in training.
    synth::EcgModelParams p;
    p.heart_rate_bpm = c.get_double("repro.test_rate_bpm", 120.0);
    const std::size_t test_windows = positive(c, "repro.test_windows", 20);
    const Signal effort = checked("reproduce-4.5", [&] {
        return minmax_scale(synth::generate_ecg(p, static_cast<double>(test_windows), 360), -3.0, 3.0).signal;
    });
    const auto test = datasets::build_single_record(effort, levels, derive_seed(ctx.seed, "effort-test"), test_windows,
                                                    1.0, {}, "effort-recording");
    std::vector<std::size_t> all(test.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto clean = test.clean_signals(all);
    const auto noisy = test.noisy_signals(all);
    score_and_plot(ctx, clean, noisy, neural::denoise(res.model, noisy));
}

void do_plot(Ctx& ctx) {
    const auto& c = ctx.cfg;
    std::vector<Signal> sigs;
    std::vector<std::string> labels;
    std::stringstream paths(c.require("plot.inputs"));
    for (std::string p; std::getline(paths, p, ',');) {
        if (p.empty()) continue;
        sigs.push_back(io::load(p));
        labels.push_back(fs::path(p).stem().string());
    }
    if (const auto l = c.get("plot.labels")) {
        labels.clear();
        std::stringstream ls(*l);
        for (std::string s; std::getline(ls, s, ',');) labels.push_back(s);
    }
    ctx.text("plot.svg",
             checked("plot", [&] { return svg::plot_signals(sigs, labels, c.get_string("plot.title", "")); }));
    ctx.summary = std::to_string(sigs.size()) + " signal(s) plotted";
}

const std::vector<Recipe>& registry() {
    static const std::vector<Recipe> r{
        {"synth", {}, {}, do_synth},
        {"add-noise", {"noise.input"}, {"noise.record"}, do_add_noise},
        {"filter", {"filter.input"}, {"filter.clean"}, do_filter},
        {"wavelet-denoise", {"wavelet.input"}, {"wavelet.clean"}, do_wavelet},
        {"build-dataset", {}, {"dataset.record", "dataset.noise_record"}, do_build_dataset},
        {"train", {"train.dataset"}, {}, do_train},
        {"denoise", {"denoise.model", "denoise.input"}, {"denoise.clean"}, do_denoise},
        {"rbm-train", {"rbm.dataset"}, {}, do_rbm_train},
        {"rbm-denoise", {"rbm.model", "rbm.input"}, {"rbm.clean"}, do_rbm_denoise},
        {"eval", {"eval.clean", "eval.pred"}, {}, do_eval},
        {"doe", {}, {"doe.fixture"}, do_doe},
        {"reproduce-4.1", {}, {}, do_reproduce_41},
        {"reproduce-4.5", {}, {}, do_reproduce_45},
        {"plot", {}, {}, do_plot},
    };
    return r;
}

std::vector<std::string> list_paths(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    for (std::string p; std::getline(ss, p, ',');) {
        if (!p.empty()) out.push_back(p);
    }
    return out;
}

}  // namespace

std::vector<std::string> names() {
    std::vector<std::string> n;
    for (const auto& r : registry()) n.push_back(r.name);
    return n;
}

Signal synthetic_record(double duration_s, int fs, std::uint64_t variant) {
    synth::EcgModelParams p;
    if (variant != 0) {
        SplitMix64 rng(derive_seed(variant, "morphology"));
        for (auto& s : p.spikes) {
            s.theta += rng.uniform(-0.08, 0.08);
            s.amplitude *= rng.uniform(0.6, 1.4);
            s.width *= rng.uniform(0.75, 1.35);
        }
        p.heart_rate_bpm = rng.uniform(50.0, 90.0);
    }
    return minmax_scale(synth::generate_ecg(p, duration_s, fs), -3.0, 3.0).signal;
}

RecipeResult run(const Config& cfg, std::ostream& log) {
    const std::string name = cfg.require("run.recipe");
    const auto& reg = registry();
    const auto it = std::ranges::find(reg, name, &Recipe::name);
    if (it == reg.end()) throw ConfigError("unknown recipe '" + name + "'");
    if (!cfg.has("run.seed")) throw ConfigError("run.seed is mandatory");
    const std::uint64_t seed = cfg.get_u64("run.seed", 0);

    std::vector<std::pair<std::string, std::string>> inputs;
    auto check_input = [&](const std::string& key, bool required) {
        const auto v = cfg.get(key);
        if (!v || v->empty()) {
            if (required) throw ConfigError("missing required input '" + key + "'");
            return;
        }
        for (const auto& p : list_paths(*v)) {
            if (!fs::is_regular_file(p)) throw ConfigError(key + ": no such file '" + p + "'");
            inputs.emplace_back(key, p);
        }
    };
    for (const auto& k : it->required_inputs) check_input(k, true);
    for (const auto& k : it->optional_inputs) check_input(k, false);
    if (name == "plot") check_input("plot.inputs", true);

    const fs::path out_dir = cfg.get_string("run.out_dir", ".");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " + ec.message());

    Ctx ctx{cfg, out_dir, seed, log, {}, {}};
    it->fn(ctx);

    Config manifest;
    manifest.set("manifest.recipe", name);
    manifest.set("manifest.seed", std::to_string(seed));
    manifest.set("manifest.version", kVersion);
    for (const auto& [k, v] : cfg.entries()) manifest.set("config." + k, v);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        manifest.set("inputs." + inputs[i].first + (i ? "#" + std::to_string(i) : ""),
                     inputs[i].second + " " + hash_file(inputs[i].second));
    }
    for (const auto& a : ctx.artifacts) manifest.set("outputs." + a, hash_file(out_dir / a));
    std::ofstream mf(out_dir / (name + ".manifest"), std::ios::binary);
    mf << manifest.serialize();
    if (!mf) throw std::runtime_error("cannot write manifest in " + out_dir.string());
    return {ctx.artifacts, ctx.summary};
}

ReplayReport replay(const fs::path& manifest, const fs::path& out_dir, std::ostream& log) {
    const Config m = Config::load(manifest);
    Config cfg = m.section("config");
    cfg.set("run.out_dir", out_dir.string());
    const auto recorded = m.section("outputs").entries();
    const auto result = run(cfg, log);
    const Config fresh = Config::load(out_dir / (cfg.require("run.recipe") + ".manifest"));
    const auto now = fresh.section("outputs").entries();
    ReplayReport rep;
    std::map<std::string, std::pair<std::string, std::string>> all;
    for (const auto& [k, v] : recorded) all[k].first = v;
    for (const auto& [k, v] : now) all[k].second = v;
    for (const auto& [k, v] : all) {
        const bool same = v.first == v.second;
        rep.identical = rep.identical && same;
        rep.lines.push_back(k + " " + (v.first.empty() ? "-" : v.first) + " " + (v.second.empty() ? "-" : v.second) +
                            (same ? "" : "  DIFFERS"));
    }
    return rep;
}

}  // namespace ecglab::recipes
