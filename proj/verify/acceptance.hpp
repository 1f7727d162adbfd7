#pragma once

// Acceptance checks, one per criterion. Used by the acceptance test binary
// and by `idiobot selftest`.

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace idiobot::acceptance {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    bool skipped = false;
    std::string detail;
    double seconds = 0.0;
};

struct Options {
    std::filesystem::path map_file;     ///< campaign world; defaults to the shipped m1 map
    std::filesystem::path tables_file;  ///< transcribed behaviour tables
    bool campaign = true;               ///< false skips the two campaign-based criteria
    std::function<void(const CriterionResult&)> progress;
};

Options default_options();

CriterionResult oracle_equivalence();
CriterionResult normalization_and_clamps();
CriterionResult decay_law();
CriterionResult scheme_probabilities();
CriterionResult fitness_cross_check();
CriterionResult table_fidelity(const std::filesystem::path& tables_file);
CriterionResult soft_reproduction(const std::filesystem::path& map_file);
CriterionResult significance_oracle();
CriterionResult determinism(const std::filesystem::path& map_file);

/// Runs every criterion in order.
std::vector<CriterionResult> run_all(const Options& options);

/// "PASS  [n] title: detail" (or FAIL / SKIP).
std::string format_line(const CriterionResult& result);

}  // namespace idiobot::acceptance
