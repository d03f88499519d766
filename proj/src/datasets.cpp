#include "ecglab/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ecglab/neural/cnn.hpp"
#include "ecglab/parallel.hpp"
#include "ecglab/rng.hpp"
#include "ecglab/signal_io.hpp"
#include "ecglab/synth.hpp"

namespace ecglab::datasets {

namespace {

std::size_t window_samples(int fs, double window_s) {
    const double n = window_s * fs;
    if (!(window_s > 0.0) || std::abs(n - std::round(n)) > 1e-9 || std::round(n) < 1.0) {
        throw std::invalid_argument("window of " + std::to_string(window_s) + " s is not a whole number of samples at " +
                                    std::to_string(fs) + " Hz");
    }
    return static_cast<std::size_t>(std::round(n));
}

void require_levels(std::span<const double> levels) {
    if (levels.empty()) throw std::invalid_argument("no SNR levels given");
    for (double l : levels) {
        if (!std::isfinite(l)) throw std::invalid_argument("SNR levels must be finite");
    }
}

std::vector<Signal> cut_windows(const Signal& record, std::size_t windows, double window_s, const std::string& id) {
    const std::size_t len = window_samples(record.fs(), window_s);
    if (windows == 0) throw std::invalid_argument("window count must be positive");
    if (record.size() < windows * len) {
        throw std::invalid_argument("record '" + id + "' has " + std::to_string(record.size()) + " samples, " +
                                    std::to_string(windows) + " windows need " + std::to_string(windows * len));
    }
    std::vector<Signal> out;
    out.reserve(windows);
    for (std::size_t w = 0; w < windows; ++w) out.push_back(slice(record, {w * len, len}));
    return out;
}

// Every (window, level, draw) pair gets its own noise stream.
void add_items(std::vector<PairedDataset::Item>& items, std::size_t first_window, std::size_t windows,
               std::span<const double> levels, std::size_t draws, const std::string& id, double rate,
               std::uint64_t noise_root) {
    for (std::size_t w = 0; w < windows; ++w) {
        for (double level : levels) {
            for (std::size_t d = 0; d < draws; ++d) {
                const std::uint64_t s = derive_seed(noise_root, items.size());
                items.push_back({first_window + w, {id, level, rate}, s, std::nullopt});
            }
        }
    }
}

void validate_noise(const NoiseOptions& noise) {
    if (noise.kind == noise::Kind::recorded && !noise.noise_record) {
        throw std::invalid_argument("recorded noise needs a noise record");
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

PairedDataset::PairedDataset(std::vector<Signal> clean_windows, std::vector<Item> items, NoiseOptions noise,
                             std::uint64_t seed)
    : clean_windows_(std::move(clean_windows)),
      items_(std::move(items)),
      noise_(std::move(noise)),
      split_(shuffled_split(items_.size(), derive_seed(seed, "split"))),
      seed_(seed) {
    validate_noise(noise_);
    for (const auto& it : items_) {
        if (it.clean_index >= clean_windows_.size()) throw std::out_of_range("dataset item points past clean windows");
    }
}

PairedDataset::PairedDataset(std::vector<Signal> clean, std::vector<Signal> noisy, std::vector<ItemMeta> meta,
                             Split split, std::uint64_t seed)
    : clean_windows_(std::move(clean)), split_(std::move(split)), seed_(seed) {
    if (noisy.size() != clean_windows_.size() || meta.size() != clean_windows_.size()) {
        throw std::invalid_argument("clean, noisy and meta lists differ in length");
    }
    std::vector<char> seen(clean_windows_.size(), 0);
    for (const auto* part : {&split_.train, &split_.test}) {
        for (std::size_t i : *part) {
            if (i >= seen.size() || seen[i]) throw std::invalid_argument("split is not a partition of the items");
            seen[i] = 1;
        }
    }
    if (std::ranges::find(seen, 0) != seen.end()) throw std::invalid_argument("split is not a partition of the items");
    items_.reserve(noisy.size());
    for (std::size_t i = 0; i < noisy.size(); ++i) {
        if (noisy[i].size() != clean_windows_[i].size()) throw std::invalid_argument("pair lengths differ");
        items_.push_back({i, std::move(meta[i]), 0, std::move(noisy[i])});
    }
}

const Signal& PairedDataset::clean(std::size_t i) const { return clean_windows_.at(items_.at(i).clean_index); }

Signal PairedDataset::noisy(std::size_t i) const {
    const Item& it = items_.at(i);
    if (it.stored_noisy) return *it.stored_noisy;
    const Signal& c = clean_windows_[it.clean_index];
    if (noise_.kind == noise::Kind::recorded) {
        SplitMix64 rng(it.noise_seed);
        const Signal n = noise::tiled_segment(*noise_.noise_record, rng.below(noise_.noise_record->size()), c.size());
        return noise::scale_noise_to_snr(c, n, it.meta.snr_db);
    }
    return noise::add_noise(c, {noise_.kind, it.meta.snr_db, it.noise_seed, std::nullopt});
}

const ItemMeta& PairedDataset::meta(std::size_t i) const { return items_.at(i).meta; }

std::vector<std::string> PairedDataset::record_ids() const {
    std::set<std::string> ids;
    for (const auto& it : items_) ids.insert(it.meta.record_id);
    return {ids.begin(), ids.end()};
}

std::vector<Signal> PairedDataset::clean_signals(std::span<const std::size_t> indices) const {
    std::vector<Signal> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(clean(i));
    return out;
}

std::vector<Signal> PairedDataset::noisy_signals(std::span<const std::size_t> indices) const {
    std::vector<std::optional<Signal>> slots(indices.size());
    parallel_for(indices.size(), worker_count(), [&](std::size_t k) { slots[k] = noisy(indices[k]); });
    std::vector<Signal> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

Split shuffled_split(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitMix64 rng(seed);
    rng.shuffle(order);
    const std::size_t n_test = n / 4;
    Split s;
    s.train.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_test));
    s.test.assign(order.end() - static_cast<std::ptrdiff_t>(n_test), order.end());
    return s;
}

PairedDataset build_single_record(const Signal& clean_record, std::span<const double> snr_levels_db,
                                  std::uint64_t seed, std::size_t windows, double window_s, const NoiseOptions& noise,
                                  const std::string& record_id) {
    const std::pair<std::string, Signal> one{record_id, clean_record};
    return build_multi_record(std::span(&one, 1), snr_levels_db, seed, windows, window_s, noise);
}

PairedDataset build_multi_record(std::span<const std::pair<std::string, Signal>> records,
                                 std::span<const double> snr_levels_db, std::uint64_t seed, std::size_t windows,
                                 double window_s, const NoiseOptions& noise) {
    require_levels(snr_levels_db);
    validate_noise(noise);
    if (records.empty()) throw std::invalid_argument("no records given");
    std::set<std::string> ids;
    for (const auto& [id, sig] : records) {
        if (!ids.insert(id).second) throw std::invalid_argument("duplicate record id '" + id + "'");
    }
    std::vector<Signal> clean;
    std::vector<PairedDataset::Item> items;
    const std::uint64_t noise_root = derive_seed(seed, "noise");
    for (const auto& [id, sig] : records) {
        auto w = cut_windows(sig, windows, window_s, id);
        add_items(items, clean.size(), w.size(), snr_levels_db, 1, id, 0.0, noise_root);
        std::move(w.begin(), w.end(), std::back_inserter(clean));
    }
    return {std::move(clean), std::move(items), noise, seed};
}

PairedDataset build_effort_dataset(const Signal& rest_beat, std::span<const double> rates_bpm,
                                   std::span<const double> snr_levels_db, std::uint64_t seed,
                                   const EffortOptions& options) {
    require_levels(snr_levels_db);
    validate_noise(options.noise);
    if (rates_bpm.empty()) throw std::invalid_argument("no heart rates given");
    if (options.windows_per_rate == 0 || options.noise_draws == 0) {
        throw std::invalid_argument("windows_per_rate and noise_draws must be positive");
    }
    const std::size_t len = window_samples(rest_beat.fs(), options.window_s);
    const double duration = static_cast<double>(options.windows_per_rate * len) / rest_beat.fs();
    const auto family = synth::generate_effort_family(rest_beat, rates_bpm, rest_beat.fs(), duration);
    std::vector<Signal> clean;
    std::vector<PairedDataset::Item> items;
    const std::uint64_t noise_root = derive_seed(seed, "noise");
    for (std::size_t r = 0; r < family.size(); ++r) {
        auto w = cut_windows(family[r], options.windows_per_rate, options.window_s, "effort");
        add_items(items, clean.size(), w.size(), snr_levels_db, options.noise_draws, "effort", rates_bpm[r],
                  noise_root);
        std::move(w.begin(), w.end(), std::back_inserter(clean));
    }
    return {std::move(clean), std::move(items), options.noise, seed};
}

metrics::EvalReport evaluate(const PairedDataset& data, std::span<const std::size_t> indices,
                             const Denoiser& denoiser) {
    if (indices.empty()) throw std::invalid_argument("evaluate: no items");
    const auto noisy = data.noisy_signals(indices);
    std::vector<metrics::SignalScore> scores;
    scores.reserve(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const Signal out = denoiser(noisy[k]);
        const Signal& c = data.clean(indices[k]);
        scores.push_back({metrics::rms(c, out), metrics::snr_db(c, out)});
    }
    return metrics::summarize(std::move(scores));
}

metrics::EvalReport evaluate_noisy(const PairedDataset& data, std::span<const std::size_t> indices) {
    return evaluate(data, indices, [](const Signal& s) { return s; });
}

metrics::EvalReport holdout_record_eval(const Denoiser& denoiser, const PairedDataset& training,
                                        const PairedDataset& unseen) {
    if (unseen.size() == 0) throw std::invalid_argument("holdout evaluation: no pairs");
    const auto seen = training.record_ids();
    for (const auto& id : unseen.record_ids()) {
        if (std::ranges::binary_search(seen, id)) {
            throw std::invalid_argument("holdout evaluation: record '" + id + "' was used for training");
        }
    }
    std::vector<std::size_t> all(unseen.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return evaluate(unseen, all, denoiser);
}

metrics::EvalReport holdout_record_eval(const neural::CnnModel& model, const PairedDataset& training,
                                        const PairedDataset& unseen) {
    return holdout_record_eval([&](const Signal& s) { return neural::denoise(model, s); }, training, unseen);
}

std::filesystem::path write_manifest(const PairedDataset& data, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "pairs");
    std::vector<const char*> split_of(data.size(), "train");
    for (std::size_t i : data.split().test) split_of[i] = "test";
    const auto path = dir / "manifest.csv";
    std::ofstream csv(path);
    if (!csv) throw std::runtime_error("cannot write " + path.string());
    csv << "path,record_id,snr_db,beat_rate,split,clean_path\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "pairs/%06zu", i);
        const std::string noisy_rel = std::string(stem) + ".noisy.bin";
        const std::string clean_rel = std::string(stem) + ".clean.bin";
        io::save(dir / noisy_rel, data.noisy(i));
        io::save(dir / clean_rel, data.clean(i));
        const auto& m = data.meta(i);
        csv << noisy_rel << ',' << m.record_id << ',' << fmt(m.snr_db) << ',' << fmt(m.beat_rate) << ','
            << split_of[i] << ',' << clean_rel << '\n';
    }
    if (!csv) throw std::runtime_error("write failed: " + path.string());
    return path;
}

PairedDataset read_manifest(const std::filesystem::path& manifest_csv) {
    std::ifstream in(manifest_csv);
    if (!in) throw std::runtime_error("cannot open " + manifest_csv.string());
    const auto base = manifest_csv.parent_path();
    std::string line;
    std::getline(in, line);
    if (line.rfind("path,record_id,snr_db,beat_rate,split", 0) != 0) {
        throw std::invalid_argument(manifest_csv.string() + ": not a dataset manifest");
    }
    std::vector<Signal> clean, noisy;
    std::vector<ItemMeta> meta;
    Split split;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 6) throw std::invalid_argument("manifest row has " + std::to_string(f.size()) + " fields");
        const std::size_t i = noisy.size();
        noisy.push_back(io::load(base / f[0]));
        clean.push_back(io::load(base / f[5]));
        meta.push_back({f[1], std::stod(f[2]), std::stod(f[3])});
        if (f[4] == "train") {
            split.train.push_back(i);
        } else if (f[4] == "test") {
            split.test.push_back(i);
        } else {
            throw std::invalid_argument("manifest split must be train or test, got '" + f[4] + "'");
        }
    }
    return {std::move(clean), std::move(noisy), std::move(meta), std::move(split), 0};
}

}  // namespace ecglab::datasets
