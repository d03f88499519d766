#include "ecglab/doe.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "ecglab/parallel.hpp"
#include "ecglab/rng.hpp"
#include "ecglab/svg.hpp"

namespace ecglab::doe {

namespace {

std::string fmt(double v, const char* spec = "%.10g") {
    char buf[40];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        f.push_back(cell);
    }
    return f;
}

bool better(const DoeRow& a, const DoeRow& b, Objective o) {
    if (o == Objective::rms_time_snr) {
        return std::tuple(a.avg_rms_mv, a.wall_time_s, -a.avg_snr_db, a.sim_id) <
               std::tuple(b.avg_rms_mv, b.wall_time_s, -b.avg_snr_db, b.sim_id);
    }
    return std::tuple(a.avg_rms_mv, -a.avg_snr_db, a.wall_time_s, a.sim_id) <
           std::tuple(b.avg_rms_mv, -b.avg_snr_db, b.wall_time_s, b.sim_id);
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << content;
    if (!os) throw std::runtime_error("write failed: " + p.string());
}

}  // namespace

Objective parse_objective(std::string_view name) {
    if (name == "rms-time-snr") return Objective::rms_time_snr;
    if (name == "rms-snr-time") return Objective::rms_snr_time;
    throw std::invalid_argument("unknown objective '" + std::string(name) + "' (rms-time-snr | rms-snr-time)");
}

std::string_view to_string(Objective o) noexcept {
    return o == Objective::rms_time_snr ? "rms-time-snr" : "rms-snr-time";
}

void SelectionPolicy::validate() const {
    if (!(time_threshold_s > 0.0) || !std::isfinite(time_threshold_s)) {
        throw std::invalid_argument("time threshold must be positive");
    }
    if (!(time_tolerance >= 0.0) || !std::isfinite(time_tolerance)) {
        throw std::invalid_argument("time tolerance must be non-negative");
    }
}

Selection select_optimal(std::span<const DoeRow> rows, const SelectionPolicy& policy) {
    policy.validate();
    if (rows.empty()) throw std::invalid_argument("select_optimal: no rows");
    const double limit = policy.time_threshold_s * (1.0 + policy.time_tolerance);
    Selection sel;
    for (const auto& r : rows) {
        if (r.sim_id >= policy.min_sim_id_cut && r.wall_time_s <= limit) sel.shortlist.push_back(r);
    }
    if (sel.shortlist.empty()) throw std::invalid_argument("select_optimal: no row passes the knee and time threshold");
    std::ranges::sort(sel.shortlist, {}, &DoeRow::sim_id);
    sel.best = *std::ranges::min_element(sel.shortlist,
                                         [&](const DoeRow& a, const DoeRow& b) { return better(a, b, policy.objective); });
    return sel;
}

int knee_sim_id(std::span<const DoeRow> rows, double rms_bar) {
    std::vector<DoeRow> sorted(rows.begin(), rows.end());
    std::ranges::sort(sorted, {}, &DoeRow::sim_id);
    for (const auto& r : sorted) {
        if (r.avg_rms_mv < rms_bar) return r.sim_id;
    }
    throw std::invalid_argument("no row has RMS below " + fmt(rms_bar));
}

int parse_kernel(const std::string& label) {
    std::size_t used = 0;
    int k = 0;
    try {
        k = std::stoi(label, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    const std::string rest = used ? label.substr(used) : "";
    const bool ok = used > 0 && k > 0 &&
                    (rest.empty() || ((rest[0] == 'x' || rest[0] == 'X') && rest.size() > 1 &&
                                      rest.find_first_not_of("0123456789", 1) == std::string::npos));
    if (!ok) throw std::invalid_argument("bad kernel label '" + label + "' (expected K or KxM)");
    return k;
}

std::vector<DoeRow> read_fixture(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("fixture is empty");
    const auto head = split_csv(line);
    if (head != std::vector<std::string>{"sim_id", "filters", "kernel", "rms", "snr", "time_s"}) {
        throw std::invalid_argument("fixture header must be sim_id,filters,kernel,rms,snr,time_s");
    }
    std::vector<DoeRow> rows;
    for (std::size_t lineno = 2; std::getline(is, line); ++lineno) {
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv(line);
        if (f.size() != 6) throw std::invalid_argument("fixture line " + std::to_string(lineno) + ": expected 6 fields");
        try {
            DoeRow r{std::stoi(f[0]), std::stoi(f[1]), f[2], parse_kernel(f[2]),
                     std::stod(f[3]), std::stod(f[4]),  std::stod(f[5])};
            if (!std::isfinite(r.avg_rms_mv) || !std::isfinite(r.avg_snr_db) || !(r.wall_time_s > 0.0)) {
                throw std::invalid_argument("non-finite metric or non-positive time");
            }
            rows.push_back(std::move(r));
        } catch (const std::exception& e) {
            throw std::invalid_argument("fixture line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return rows;
}

std::vector<DoeRow> read_fixture(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    return read_fixture(is);
}

void write_rows(std::ostream& os, std::span<const DoeRow> rows) {
    os << "sim_id,filters,kernel,rms,snr,time_s\n";
    for (const auto& r : rows) {
        os << r.sim_id << ',' << r.filters << ',' << r.kernel << ',' << fmt(r.avg_rms_mv) << ',' << fmt(r.avg_snr_db)
           << ',' << fmt(r.wall_time_s) << '\n';
    }
}

std::vector<DoeRow> run_sweep(const Grid& grid, const datasets::PairedDataset& data, const neural::CnnConfig& base,
                              std::size_t workers, const CellCallback& on_cell) {
    if (grid.filters.empty() || grid.kernel_lens.empty()) throw std::invalid_argument("run_sweep: empty grid");
    const auto& split = data.split();
    if (split.train.empty() || split.test.empty()) throw std::invalid_argument("run_sweep: dataset split is empty");
    const auto train_noisy = data.noisy_signals(split.train);
    const auto train_clean = data.clean_signals(split.train);
    const auto test_noisy = data.noisy_signals(split.test);
    const auto test_clean = data.clean_signals(split.test);

    const std::size_t cells = grid.filters.size() * grid.kernel_lens.size();
    std::vector<DoeRow> rows(cells);
    parallel_for(cells, workers, [&](std::size_t i) {
        neural::CnnConfig cfg = base;
        cfg.filters_per_layer = grid.filters[i / grid.kernel_lens.size()];
        cfg.kernel_len = grid.kernel_lens[i % grid.kernel_lens.size()];
        cfg.seed = derive_seed(base.seed, static_cast<std::uint64_t>(i));
        DoeRow& row = rows[i];
        row.sim_id = static_cast<int>(i + 1);
        row.filters = static_cast<int>(cfg.filters_per_layer);
        row.kernel_len = static_cast<int>(cfg.kernel_len);
        row.kernel = std::to_string(cfg.kernel_len) + "x1";
        try {
            const auto t0 = std::chrono::steady_clock::now();
            const auto result = neural::train(cfg, train_noisy, train_clean);
            row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const auto pred = neural::denoise(result.model, test_noisy);
            std::vector<metrics::SignalScore> scores;
            for (std::size_t k = 0; k < pred.size(); ++k) {
                scores.push_back({metrics::rms(test_clean[k], pred[k]), metrics::snr_db(test_clean[k], pred[k])});
            }
            const auto rep = metrics::summarize(std::move(scores));
            row.avg_rms_mv = rep.avg_rms_mv;
            row.avg_snr_db = rep.avg_snr_db;
        } catch (const std::exception& e) {
            throw std::runtime_error("DoE cell " + std::to_string(row.sim_id) + " (" + std::to_string(row.filters) +
                                     " filters, kernel " + row.kernel + "): " + e.what());
        }
        if (on_cell) on_cell(row);
    });
    return rows;
}

std::vector<std::filesystem::path> emit_report(std::span<const DoeRow> rows, const std::optional<Selection>& selection,
                                               const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;

    std::ostringstream csv;
    write_rows(csv, rows);
    write_file(dir / "doe_rows.csv", csv.str());
    written.push_back(dir / "doe_rows.csv");

    std::vector<std::size_t> hot;
    if (selection) {
        std::ostringstream sel;
        sel << "role,sim_id,filters,kernel,rms,snr,time_s\n";
        auto line = [&](const char* role, const DoeRow& r) {
            sel << role << ',' << r.sim_id << ',' << r.filters << ',' << r.kernel << ',' << fmt(r.avg_rms_mv) << ','
                << fmt(r.avg_snr_db) << ',' << fmt(r.wall_time_s) << '\n';
        };
        line("best", selection->best);
        for (const auto& r : selection->shortlist) line("shortlist", r);
        write_file(dir / "selection.csv", sel.str());
        written.push_back(dir / "selection.csv");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].sim_id == selection->best.sim_id) hot.push_back(i);
        }
    }

    std::vector<std::string> labels;
    std::vector<double> rms, snr, time;
    for (const auto& r : rows) {
        labels.push_back(std::to_string(r.sim_id));
        rms.push_back(r.avg_rms_mv);
        snr.push_back(r.avg_snr_db);
        time.push_back(r.wall_time_s);
    }
    if (!rows.empty()) {
        write_file(dir / "rms.svg", svg::bar_chart("Average RMS per simulation", "RMS [mV]", labels, rms, hot));
        write_file(dir / "snr.svg", svg::bar_chart("Average SNR per simulation", "SNR [dB]", labels, snr, hot));
        write_file(dir / "time.svg", svg::bar_chart("Training time per simulation", "time [s]", labels, time, hot));
        for (const char* f : {"rms.svg", "snr.svg", "time.svg"}) written.push_back(dir / f);
    }
    return written;
}

}  // namespace ecglab::doe
