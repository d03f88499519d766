#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecglab/datasets.hpp"
#include "ecglab/neural/cnn.hpp"

namespace ecglab::doe {

struct DoeRow {
    int sim_id = 0;
    int filters = 0;
    std::string kernel;  ///< as reported, e.g. "13x1" or "9x9"
    int kernel_len = 0;  ///< effective 1-D length
    double avg_rms_mv = 0.0;
    double avg_snr_db = 0.0;
    double wall_time_s = 0.0;
};

enum class Objective {
    rms_time_snr,  ///< min rms, then min time, then max snr
    rms_snr_time,  ///< min rms, then max snr, then min time
};

Objective parse_objective(std::string_view name);
std::string_view to_string(Objective o) noexcept;

struct SelectionPolicy {
    int min_sim_id_cut = 14;          ///< rows before this id are left of the quality knee
    double time_threshold_s = 5000.0;
    double time_tolerance = 0.05;     ///< "approximately": admits times up to threshold * (1 + tolerance)
    Objective objective = Objective::rms_time_snr;

    void validate() const;
};

struct Selection {
    DoeRow best;
    std::vector<DoeRow> shortlist;  ///< ascending sim id
};

/// Knee cut plus time threshold, then the lexicographic optimum (sim id breaks
/// any remaining tie). Throws on empty rows or an empty shortlist.
Selection select_optimal(std::span<const DoeRow> rows, const SelectionPolicy& policy);

/// Id of the first row (in id order) whose RMS is below `rms_bar`.
int knee_sim_id(std::span<const DoeRow> rows, double rms_bar = 0.14);

/// Parses "K" or "KxM" into the effective kernel length K.
int parse_kernel(const std::string& label);

/// CSV with header sim_id,filters,kernel,rms,snr,time_s.
std::vector<DoeRow> read_fixture(std::istream& is);
std::vector<DoeRow> read_fixture(const std::filesystem::path& path);
void write_rows(std::ostream& os, std::span<const DoeRow> rows);

struct Grid {
    std::vector<std::size_t> filters;
    std::vector<std::size_t> kernel_lens;
};

using CellCallback = std::function<void(const DoeRow&)>;

/// Trains one network per (filters, kernel) cell, filters-major, on the
/// dataset's train split and scores it on the test split. Cell i trains with
/// seed derive_seed(base.seed, i). Up to `workers` cells run at once; rows come
/// back in grid order. Failures are rethrown naming the cell.
std::vector<DoeRow> run_sweep(const Grid& grid, const datasets::PairedDataset& data, const neural::CnnConfig& base,
                              std::size_t workers = 1, const CellCallback& on_cell = {});

/// Writes doe_rows.csv, selection.csv (when a selection is given) and the
/// rms.svg / snr.svg / time.svg bar charts into `dir`. Returns the paths written.
std::vector<std::filesystem::path> emit_report(std::span<const DoeRow> rows, const std::optional<Selection>& selection,
                                               const std::filesystem::path& dir);

}  // namespace ecglab::doe
