#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ecglab/metrics.hpp"
#include "ecglab/noise.hpp"
#include "ecglab/signal.hpp"

namespace ecglab::neural {
class CnnModel;
}

namespace ecglab::datasets {

struct ItemMeta {
    std::string record_id;
    double snr_db = 0.0;
    double beat_rate = 0.0;  ///< bpm; 0 when unknown
};

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// How noise is drawn for generated pairs.
struct NoiseOptions {
    noise::Kind kind = noise::Kind::random_plus_drift;
    std::optional<Signal> noise_record;  ///< required for Kind::recorded
};

/// Aligned clean/noisy window pairs with per-item metadata and a 3:1 split.
///
/// Generated datasets keep only the clean windows and a noise recipe per item;
/// noisy windows are rebuilt on demand, bit-identically every time.
class PairedDataset {
public:
    struct Item {
        std::size_t clean_index;
        ItemMeta meta;
        std::uint64_t noise_seed;
        std::optional<Signal> stored_noisy;  ///< set for datasets loaded from disk
    };

    PairedDataset(std::vector<Signal> clean_windows, std::vector<Item> items, NoiseOptions noise, std::uint64_t seed);
    /// Fully materialized pairs, e.g. read back from a manifest.
    PairedDataset(std::vector<Signal> clean, std::vector<Signal> noisy, std::vector<ItemMeta> meta, Split split,
                  std::uint64_t seed);

    [[nodiscard]] std::size_t size() const noexcept { return items_.size(); }
    [[nodiscard]] const Signal& clean(std::size_t i) const;
    [[nodiscard]] Signal noisy(std::size_t i) const;
    [[nodiscard]] const ItemMeta& meta(std::size_t i) const;
    [[nodiscard]] const Split& split() const noexcept { return split_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::vector<std::string> record_ids() const;

    /// Copies of the clean / noisy windows at `indices`, built in parallel.
    [[nodiscard]] std::vector<Signal> clean_signals(std::span<const std::size_t> indices) const;
    [[nodiscard]] std::vector<Signal> noisy_signals(std::span<const std::size_t> indices) const;

private:
    std::vector<Signal> clean_windows_;
    std::vector<Item> items_;
    NoiseOptions noise_;
    Split split_;
    std::uint64_t seed_;
};

/// Seeded shuffle of [0, n) cut into the first n - n/4 (train) and the rest (test).
Split shuffled_split(std::size_t n, std::uint64_t seed);

/// `windows` consecutive windows of `window_s` seconds, each paired with every
/// SNR level. Throws on an empty level list or a record too short.
PairedDataset build_single_record(const Signal& clean_record, std::span<const double> snr_levels_db,
                                  std::uint64_t seed, std::size_t windows = 720, double window_s = 1.0,
                                  const NoiseOptions& noise = {}, const std::string& record_id = "record");

/// Same recipe over several records. Throws on duplicate ids.
PairedDataset build_multi_record(std::span<const std::pair<std::string, Signal>> records,
                                 std::span<const double> snr_levels_db, std::uint64_t seed, std::size_t windows = 720,
                                 double window_s = 1.0, const NoiseOptions& noise = {});

struct EffortOptions {
    std::size_t windows_per_rate = 50;
    std::size_t noise_draws = 1;  ///< independent noise realizations per (window, level)
    double window_s = 1.0;
    NoiseOptions noise;
};

/// Windows of the rate-compressed family built from one rest cycle, paired with
/// noise at each level. Beat rate metadata is the family's rate.
PairedDataset build_effort_dataset(const Signal& rest_beat, std::span<const double> rates_bpm,
                                   std::span<const double> snr_levels_db, std::uint64_t seed,
                                   const EffortOptions& options = {});

using Denoiser = std::function<Signal(const Signal&)>;

/// Scores denoiser(noisy) against clean over `indices`.
metrics::EvalReport evaluate(const PairedDataset& data, std::span<const std::size_t> indices,
                             const Denoiser& denoiser);
/// Scores the noisy inputs themselves.
metrics::EvalReport evaluate_noisy(const PairedDataset& data, std::span<const std::size_t> indices);

/// Evaluates every pair of `unseen`. Throws if it is empty or shares a record
/// id with `training`.
metrics::EvalReport holdout_record_eval(const Denoiser& denoiser, const PairedDataset& training,
                                        const PairedDataset& unseen);
metrics::EvalReport holdout_record_eval(const neural::CnnModel& model, const PairedDataset& training,
                                        const PairedDataset& unseen);

/// Writes pairs/NNNNNN.{clean,noisy}.bin under `dir` plus manifest.csv with
/// columns path,record_id,snr_db,beat_rate,split,clean_path (paths relative to dir).
std::filesystem::path write_manifest(const PairedDataset& data, const std::filesystem::path& dir);
PairedDataset read_manifest(const std::filesystem::path& manifest_csv);

}  // namespace ecglab::datasets
