#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ecglab/config.hpp"
#include "ecglab/signal.hpp"

namespace ecglab::recipes {

/// Files a recipe wrote (relative to its output directory) and a short
/// human-readable summary.
struct RecipeResult {
    std::vector<std::string> artifacts;
    std::string summary;
};

/// Runs one recipe described by `cfg`:
///   run.recipe, run.seed (mandatory), run.out_dir (default "."),
/// plus the recipe's own [section] keys. Validates the config first (throws
/// ConfigError), then writes the artifacts and `<recipe>.manifest` into
/// run.out_dir. Progress goes to `log`.
RecipeResult run(const Config& cfg, std::ostream& log);

/// Recipe names in presentation order.
std::vector<std::string> names();

struct ReplayReport {
    bool identical = true;
    std::vector<std::string> lines;  ///< one "<artifact> <old> <new>" per output
};

/// Re-runs the config stored in a manifest into `out_dir` and compares the
/// output hashes with the recorded ones.
ReplayReport replay(const std::filesystem::path& manifest, const std::filesystem::path& out_dir, std::ostream& log);

/// The synthetic single-lead record used when no record file is given:
/// `duration_s` seconds at `fs` Hz, min-max scaled to [-3, 3] mV. `variant` 0
/// is the default morphology; other values perturb wave positions, widths,
/// amplitudes and heart rate deterministically.
Signal synthetic_record(double duration_s, int fs, std::uint64_t variant = 0);

}  // namespace ecglab::recipes
