#pragma once

// Trial runner, batch statistics and report emission.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idiobot/behaviors.hpp"
#include "idiobot/immune_core.hpp"
#include "idiobot/selectors.hpp"
#include "idiobot/world.hpp"

namespace idiobot {

/// The idiotypic controller (no scheme) or one of the probabilistic schemes.
struct ControlSystem {
    std::optional<SchemeId> scheme;

    static ControlSystem idiotypic() { return {}; }
    static ControlSystem probabilistic(SchemeId s) { return {s}; }
    [[nodiscard]] bool is_idiotypic() const noexcept { return !scheme; }
    [[nodiscard]] std::string name() const;
    bool operator==(const ControlSystem&) const = default;
};

/// Accepts "id" or "r1".."r9".
std::optional<ControlSystem> parse_system(std::string_view text);
/// The idiotypic system followed by R1..R9.
std::vector<ControlSystem> all_systems();

struct ExperimentConfig {
    ControlSystem system;
    WorldMap world;
    std::string world_name = "world";
    std::uint64_t paratope_seed = 1;
    std::uint64_t rng_seed = 1;
    double max_duration = 1200.0;  // s
    ImmuneParams immune;
    SimConfig sim;
    ScoringConfig scoring;
    double start_jitter_m = 0.2;      ///< start position perturbation, drawn per rng seed
    double start_jitter_deg = 15.0;   ///< start heading perturbation

    void validate() const;
};

struct RunRecord {
    std::string system;
    std::string world;
    std::uint64_t paratope_seed = 0;
    std::uint64_t seed = 0;  ///< rng seed
    double T = 0.0;          ///< completion time, or elapsed time at timeout
    int sigma = 0;           ///< stall events
    double mu = 0.0;         ///< alternative-selection rate (idiotypic difference rate for id)
    bool completed = false;
    double F = 0.0;
    bool good = false;
    bool bad = false;

    // Selection diagnostics.
    long steps = 0;
    long alternatives = 0;  ///< steps where the executed antibody differed from alpha
    long stall_window_steps = 0;
    long stall_window_alternatives = 0;
    int doors_passed = 0;
};

struct TraceRow {
    double t;
    Pose pose;
    std::size_t dominant;
    std::size_t antibody;
    StallState stall;
};

using TraceSink = std::function<void(const TraceRow&)>;

/// Runs one trial: sense, detect antigens, arbitrate, act for one control
/// interval, score, reinforce; until the final marker is passed or
/// `max_duration` elapses. Deterministic for fixed seeds.
RunRecord run_trial(const ExperimentConfig& config, const TraceSink& trace = {});

/// phi = mean(T) / mean(sigma) over the completed records. Empty when no
/// record completed or the mean stall count is zero.
std::optional<double> compute_phi(const std::vector<RunRecord>& records);

/// F = (T + phi * sigma) / 2; without phi, F = T / 2.
double fitness(const RunRecord& record, std::optional<double> phi);

/// Good: F below the mean F of the completed runs. Bad: among the worst
/// floor(n / 10) completed runs by F, or timed out. Operates on the records
/// of one world and overwrites their good/bad flags.
void classify_runs(std::vector<RunRecord>& records);

/// Fills F, good and bad for every world in the batch; phi is taken per world.
void finalize_batch(std::vector<RunRecord>& records);

struct CampaignConfig {
    std::vector<ControlSystem> systems = all_systems();
    WorldMap world;
    std::string world_name = "world";
    int runs = 12;
    std::uint64_t paratope_seed = 1;  ///< first half of the runs uses this, the rest seed + 1
    std::uint64_t rng_seed = 1;       ///< run k uses rng_seed + k
    double max_duration = 1200.0;
    ImmuneParams immune;
    SimConfig sim;
    ScoringConfig scoring;
};

/// Per-run experiment configs in campaign order (system-major).
std::vector<ExperimentConfig> campaign_trials(const CampaignConfig& campaign);

/// Runs every trial of a campaign and finalizes the batch.
std::vector<RunRecord> run_campaign(const CampaignConfig& campaign,
                                    const std::function<void(const RunRecord&)>& progress = {});

struct SystemSummary {
    std::string system;
    std::string world;
    int runs = 0;
    int completed = 0;
    double mean_T = 0.0;
    double mean_sigma = 0.0;
    double mean_F = 0.0;
    double mean_mu = 0.0;
    double good_pct = 0.0;
    double bad_pct = 0.0;
    double phi = 0.0;  ///< NaN when undefined
};

struct Significance {
    std::string system;
    std::string world;
    std::string baseline;
    double level_T = 0.0;  ///< NaN when a sample has fewer than two completed runs
    double level_sigma = 0.0;
    double level_F = 0.0;
};

struct StatsSummary {
    std::vector<SystemSummary> systems;
    std::vector<Significance> significance;
};

/// Aggregates finalized records. Significance compares every other system in
/// the same world against `baseline`, testing that the baseline is lower.
StatsSummary summarize(const std::vector<RunRecord>& records, std::string_view baseline = "id");

std::string runs_csv(const std::vector<RunRecord>& records);
/// Parses a runs CSV. Diagnostic fields are left at zero.
std::vector<RunRecord> parse_runs_csv(std::string_view text);
std::string summary_csv(const StatsSummary& summary);
std::string significance_csv(const StatsSummary& summary);
/// Human-readable tables of means, run quality and significance levels.
std::string format_report(const StatsSummary& summary);

/// Writes the per-run CSV, summary.csv and significance.csv into `dir`,
/// creating it if needed. Throws std::runtime_error when the destination is
/// unwritable.
void emit_report(const std::filesystem::path& dir, const StatsSummary& summary,
                 const std::vector<RunRecord>& records, const std::string& runs_file = "runs.csv");

std::string trace_header();
std::string trace_line(const TraceRow& row);

}  // namespace idiobot
