// idiobot: run arbitration campaigns, compare their results and run the
// acceptance suite.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "acceptance.hpp"
#include "idiobot/behaviors.hpp"
#include "idiobot/harness.hpp"
#include "idiobot/log.hpp"
#include "idiobot/matrix_io.hpp"

namespace fs = std::filesystem;
using namespace idiobot;

namespace {

struct RunArgs {
    std::string system = "all";
    std::string world;
    int runs = 12;
    std::uint64_t paratope_seed = 1;
    std::uint64_t rng_seed = 1;
    double b = 80.0, k1 = 0.65, k2 = 0.05;
    double max_duration = 1200.0;
    std::string out;
    bool trace = false;
};

std::vector<ControlSystem> systems_from(const std::string& text) {
    if (text == "all") return all_systems();
    std::vector<ControlSystem> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string name = text.substr(pos, comma - pos);
        const auto sys = parse_system(name);
        if (!sys) throw CLI::ValidationError("--system", "unknown system '" + name + "'");
        out.push_back(*sys);
        pos = comma + 1;
    }
    return out;
}

int cmd_run(const RunArgs& a) {
    CampaignConfig c;
    c.systems = systems_from(a.system);
    c.world = load_map(a.world);
    c.world_name = fs::path(a.world).stem().string();
    c.runs = a.runs;
    c.paratope_seed = a.paratope_seed;
    c.rng_seed = a.rng_seed;
    c.max_duration = a.max_duration;
    c.immune.b = a.b;
    c.immune.k1 = a.k1;
    c.immune.k2 = a.k2;
    c.immune.validate();

    const fs::path out(a.out);
    fs::create_directories(out);

    std::vector<RunRecord> records;
    for (const ExperimentConfig& e : campaign_trials(c)) {
        std::string trace_text;
        TraceSink sink;
        if (a.trace) {
            trace_text = trace_header();
            sink = [&](const TraceRow& row) { trace_text += trace_line(row); };
        }
        records.push_back(run_trial(e, sink));
        const RunRecord& r = records.back();
        if (a.trace) {
            write_file(out / ("trace_" + r.system + "_" + std::to_string(r.seed) + ".csv"), trace_text);
        }
        std::fprintf(stderr, "%-3s seed %-4llu T %7.1f  sigma %3d  mu %.3f%s\n", r.system.c_str(),
                     static_cast<unsigned long long>(r.seed), r.T, r.sigma, r.mu,
                     r.completed ? "" : "  timeout");
    }
    finalize_batch(records);
    const StatsSummary summary = summarize(records);
    std::string label = a.system;
    std::replace(label.begin(), label.end(), ',', '-');
    emit_report(out, summary, records, "runs_" + label + ".csv");
    std::cout << format_report(summary);
    return 0;
}

int cmd_compare(const std::string& in, const std::string& baseline) {
    std::vector<RunRecord> records;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(in)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.starts_with("runs") && name.ends_with(".csv")) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "no runs*.csv files in " << in << "\n";
        return 2;
    }
    for (const fs::path& f : files) {
        std::vector<RunRecord> part = parse_runs_csv(read_file(f));
        records.insert(records.end(), part.begin(), part.end());
    }
    finalize_batch(records);
    const StatsSummary summary = summarize(records, baseline);
    write_file(fs::path(in) / "summary.csv", summary_csv(summary));
    write_file(fs::path(in) / "significance.csv", significance_csv(summary));
    std::cout << format_report(summary);
    return 0;
}

int cmd_selftest(bool quick) {
    acceptance::Options o = acceptance::default_options();
    o.campaign = !quick;
    o.progress = [](const acceptance::CriterionResult& r) { std::cout << acceptance::format_line(r) << std::endl; };
    const auto results = acceptance::run_all(o);
    const bool ok = std::all_of(results.begin(), results.end(),
                                [](const acceptance::CriterionResult& r) { return r.passed || r.skipped; });
    std::cout << (ok ? "all acceptance checks passed\n" : "acceptance checks FAILED\n");
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Idiotypic and probabilistic behaviour arbitration experiments"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Log diagnostics to stderr");

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run seeded trials and write per-run and summary CSV");
    run_cmd->add_option("--system", run.system, "id, r1..r9, a comma list, or all")->capture_default_str();
    run_cmd->add_option("--world", run.world, "Map file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--runs", run.runs, "Runs per system")->capture_default_str()->check(CLI::PositiveNumber);
    run_cmd->add_option("--paratope-seed", run.paratope_seed, "Initial paratope seed (second half uses seed + 1)")
        ->capture_default_str();
    run_cmd->add_option("--rng-seed", run.rng_seed, "Seed of the first run")->capture_default_str();
    run_cmd->add_option("--b", run.b, "Concentration rate constant")->capture_default_str();
    run_cmd->add_option("--k1", run.k1, "Suppression-stimulation balance")->capture_default_str();
    run_cmd->add_option("--k2", run.k2, "Death rate")->capture_default_str();
    run_cmd->add_option("--max-duration", run.max_duration, "Timeout per run in seconds")->capture_default_str();
    run_cmd->add_option("--out", run.out, "Output directory")->required();
    run_cmd->add_flag("--trace", run.trace, "Write a trajectory CSV per run");

    std::string in_dir, baseline = "id";
    auto* cmp_cmd = app.add_subcommand("compare", "Summarize every runs*.csv in a directory");
    cmp_cmd->add_option("--in", in_dir, "Directory written by run")->required()->check(CLI::ExistingDirectory);
    cmp_cmd->add_option("--baseline", baseline, "System the others are tested against")->capture_default_str();

    bool quick = false;
    auto* self_cmd = app.add_subcommand("selftest", "Run the acceptance checks");
    self_cmd->add_flag("--quick", quick, "Skip the campaign-based checks");

    auto* manifest_cmd = app.add_subcommand("manifest", "Print the antigen and antibody tables");

    CLI11_PARSE(app, argc, argv);
    log::set_level(verbose ? log::Level::debug : log::Level::warn);

    try {
        if (*run_cmd) return cmd_run(run);
        if (*cmp_cmd) return cmd_compare(in_dir, baseline);
        if (*self_cmd) return cmd_selftest(quick);
        if (*manifest_cmd) {
            std::cout << behaviour_manifest();
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
