#include "idiobot/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "idiobot/log.hpp"
#include "idiobot/matrix_io.hpp"
#include "idiobot/random.hpp"
#include "idiobot/stats.hpp"

namespace idiobot {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_stall_antigen(std::optional<std::size_t> d) {
    return d && (*d == antigen::stalled || *d == antigen::blocked_behind);
}

SensorMetrics sense(const World& world, const RobotState& robot, std::optional<double> odometry,
                    bool door_passed) {
    return compute_metrics(sense_laser(world, robot), sense_sonar(world, robot), odometry,
                           sense_camera(world, robot), door_passed);
}

bool clear_of_walls(const World& world, Vec2 p, double clearance) {
    return std::all_of(world.obstacles().begin(), world.obstacles().end(),
                       [&](const Segment& s) { return point_segment_distance(p, s) >= clearance; });
}

Pose jittered_start(const ExperimentConfig& cfg, const World& world) {
    // Separate stream so the selector draws do not depend on the jitter.
    Rng rng(cfg.rng_seed ^ 0x9E3779B97F4A7C15ULL);
    const Pose& s = cfg.world.start;
    Pose p{s.x + rng.uniform(-cfg.start_jitter_m, cfg.start_jitter_m),
           s.y + rng.uniform(-cfg.start_jitter_m, cfg.start_jitter_m),
           wrap_degrees(s.heading_deg + rng.uniform(-cfg.start_jitter_deg, cfg.start_jitter_deg))};
    if (!world.map().bounds.contains(p.position()) ||
        !clear_of_walls(world, p.position(), cfg.sim.robot_radius + 0.05)) {
        log::info("jittered start collides with the map, using the nominal start");
        return s;
    }
    return p;
}

std::vector<double> completed_values(const std::vector<const RunRecord*>& rs, double RunRecord::*field) {
    std::vector<double> out;
    for (const RunRecord* r : rs) {
        if (r->completed) out.push_back(r->*field);
    }
    return out;
}

double mean_or_nan(const std::vector<double>& xs) { return xs.empty() ? kNaN : mean(xs); }

double level_or_nan(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) return kNaN;
    return t_test_one_tailed(a, b);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t next = line.find(sep, pos);
        out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

std::string fmt(const char* spec, double v) {
    if (std::isnan(v)) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

}  // namespace

std::string ControlSystem::name() const { return scheme ? std::string(to_string(*scheme)) : "id"; }

std::optional<ControlSystem> parse_system(std::string_view text) {
    if (text == "id" || text == "ID") return ControlSystem::idiotypic();
    if (auto s = parse_scheme(text)) return ControlSystem::probabilistic(*s);
    return std::nullopt;
}

std::vector<ControlSystem> all_systems() {
    std::vector<ControlSystem> out{ControlSystem::idiotypic()};
    for (SchemeId s : kAllSchemes) out.push_back(ControlSystem::probabilistic(s));
    return out;
}

void ExperimentConfig::validate() const {
    if (!(max_duration > 0.0)) throw std::invalid_argument("max_duration must be positive");
    if (!(sim.control_interval > 0.0 && sim.substep > 0.0)) throw std::invalid_argument("time steps must be positive");
    immune.validate();
    world.validate();
}

RunRecord run_trial(const ExperimentConfig& cfg, const TraceSink& trace) {
    cfg.validate();
    World world(cfg.world, cfg.sim);
    Rng rng(cfg.rng_seed);

    ImmuneParams params = cfg.immune;
    params.num_antibodies = kNumAntibodies;
    params.num_antigens = kNumAntigens;
    ImmuneState immune = ImmuneState::create(random_paratope(cfg.paratope_seed), default_idiotope(), params);

    RunRecord rec;
    rec.system = cfg.system.name();
    rec.world = cfg.world_name;
    rec.paratope_seed = cfg.paratope_seed;
    rec.seed = cfg.rng_seed;

    RobotState robot;
    robot.pose = jittered_start(cfg, world);
    SensorMetrics metrics = sense(world, robot, std::nullopt, false);

    std::optional<std::size_t> previous_dominant;
    Outcome previous_outcome = Outcome::none;
    bool previously_stalled = false;
    long ticks = 0;  // elapsed physics substeps
    const int substeps = std::max(1, static_cast<int>(std::lround(cfg.sim.control_interval / cfg.sim.substep)));
    const double h = cfg.sim.control_interval / substeps;

    auto elapsed = [&] { return static_cast<double>(ticks) * h; };
    while (!world.completed() && elapsed() < cfg.max_duration - 1e-9) {
        const AntigenPresentation presentation = dominant_antigen(detect_antigens(metrics));
        const std::size_t d = *presentation.dominant;
        const bool stall_window = is_stall_antigen(d) || is_stall_antigen(previous_dominant);

        std::size_t alpha = 0, chosen = 0;
        if (cfg.system.is_idiotypic()) {
            StepResult step = idiotypic_step(immune, presentation);
            alpha = step.alpha;
            chosen = step.beta;
            immune = std::move(step.state);
        } else {
            const auto& p = immune.paratope;
            const Vector s1 = match_strength(p, antigen_weights(presentation, p));
            alpha = select_alpha(s1, p, d).index;
            const auto ctx = SelectorContext::from_history(previous_outcome, d, previous_dominant);
            chosen = select_scheme(*cfg.system.scheme, p, alpha, d, ctx, rng).chosen;
        }
        ++rec.steps;
        if (chosen != alpha) ++rec.alternatives;
        if (stall_window) {
            ++rec.stall_window_steps;
            if (chosen != alpha) ++rec.stall_window_alternatives;
        }

        const MotionCommand command = action_for(chosen, metrics);
        double moved = 0.0;
        bool door_passed = false;
        for (int k = 0; k < substeps; ++k) {
            const Vec2 from = robot.pose.position();
            robot = step_physics(world, robot, command, h);
            moved += robot.odometer;
            ++ticks;
            const ProgressEvent ev = advance_progression(world, from, robot.pose.position());
            if (ev.doors_passed > 0) {
                door_passed = true;
                rec.doors_passed += ev.doors_passed;
            }
            if (ev.completed) break;
        }

        SensorMetrics next = sense(world, robot, moved, door_passed);
        const double tau = score_outcome(metrics, next, d, cfg.scoring);
        immune.paratope = reinforce(immune.paratope, chosen, d, tau);
        previous_outcome = tau > 0.0 ? Outcome::success : Outcome::failure;

        const StallState stall = detect_stall(moved, next.e_av);
        const bool stalled = stall != StallState::none;
        if (stalled && !previously_stalled) ++rec.sigma;
        previously_stalled = stalled;

        if (trace) trace({elapsed(), robot.pose, d, chosen, stall});
        previous_dominant = d;
        metrics = std::move(next);
    }

    rec.T = elapsed();
    rec.completed = world.completed();
    rec.mu = rec.steps ? static_cast<double>(rec.alternatives) / static_cast<double>(rec.steps) : 0.0;
    return rec;
}

std::optional<double> compute_phi(const std::vector<RunRecord>& records) {
    double sum_t = 0.0, sum_sigma = 0.0;
    std::size_t n = 0;
    for (const RunRecord& r : records) {
        if (!r.completed) continue;
        sum_t += r.T;
        sum_sigma += r.sigma;
        ++n;
    }
    if (n == 0 || sum_sigma == 0.0) {
        log::info("compute_phi: phi undefined (no completed runs or no stalls); fitness falls back to T/2");
        return std::nullopt;
    }
    return (sum_t / static_cast<double>(n)) / (sum_sigma / static_cast<double>(n));
}

double fitness(const RunRecord& record, std::optional<double> phi) {
    if (!phi) return record.T / 2.0;
    return (record.T + *phi * record.sigma) / 2.0;
}

void classify_runs(std::vector<RunRecord>& records) {
    std::vector<std::size_t> done;
    for (std::size_t i = 0; i < records.size(); ++i) {
        records[i].good = false;
        records[i].bad = !records[i].completed;
        if (records[i].completed) done.push_back(i);
    }
    if (done.empty()) return;
    double total = 0.0;
    for (std::size_t i : done) total += records[i].F;
    const double mean_f = total / static_cast<double>(done.size());
    for (std::size_t i : done) records[i].good = records[i].F < mean_f;

    std::stable_sort(done.begin(), done.end(), [&](std::size_t a, std::size_t b) { return records[a].F > records[b].F; });
    const std::size_t worst = done.size() / 10;
    for (std::size_t k = 0; k < worst; ++k) records[done[k]].bad = true;
}

void finalize_batch(std::vector<RunRecord>& records) {
    std::vector<std::string> worlds;
    for (const RunRecord& r : records) {
        if (std::find(worlds.begin(), worlds.end(), r.world) == worlds.end()) worlds.push_back(r.world);
    }
    for (const std::string& w : worlds) {
        std::vector<std::size_t> idx;
        std::vector<RunRecord> group;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (records[i].world == w) {
                idx.push_back(i);
                group.push_back(records[i]);
            }
        }
        const auto phi = compute_phi(group);
        for (RunRecord& r : group) r.F = fitness(r, phi);
        classify_runs(group);
        for (std::size_t k = 0; k < idx.size(); ++k) records[idx[k]] = group[k];
    }
}

std::vector<ExperimentConfig> campaign_trials(const CampaignConfig& c) {
    if (c.runs < 1) throw std::invalid_argument("a campaign needs at least one run per system");
    std::vector<ExperimentConfig> out;
    const int first_half = (c.runs + 1) / 2;
    for (const ControlSystem& sys : c.systems) {
        for (int k = 0; k < c.runs; ++k) {
            ExperimentConfig e;
            e.system = sys;
            e.world = c.world;
            e.world_name = c.world_name;
            e.paratope_seed = c.paratope_seed + (k < first_half ? 0 : 1);
            e.rng_seed = c.rng_seed + static_cast<std::uint64_t>(k);
            e.max_duration = c.max_duration;
            e.immune = c.immune;
            e.sim = c.sim;
            e.scoring = c.scoring;
            out.push_back(std::move(e));
        }
    }
    return out;
}

std::vector<RunRecord> run_campaign(const CampaignConfig& campaign,
                                    const std::function<void(const RunRecord&)>& progress) {
    std::vector<RunRecord> records;
    for (const ExperimentConfig& e : campaign_trials(campaign)) {
        records.push_back(run_trial(e));
        if (progress) progress(records.back());
    }
    finalize_batch(records);
    return records;
}

StatsSummary summarize(const std::vector<RunRecord>& records, std::string_view baseline) {
    StatsSummary out;
    std::vector<std::pair<std::string, std::string>> keys;  // (world, system) in first-seen order
    for (const RunRecord& r : records) {
        std::pair<std::string, std::string> key{r.world, r.system};
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    std::map<std::string, std::optional<double>> phis;
    for (const auto& [world, system] : keys) {
        if (phis.count(world)) continue;
        std::vector<RunRecord> group;
        for (const RunRecord& r : records) {
            if (r.world == world) group.push_back(r);
        }
        phis[world] = compute_phi(group);
    }

    auto members = [&](const std::string& world, const std::string& system) {
        std::vector<const RunRecord*> rs;
        for (const RunRecord& r : records) {
            if (r.world == world && r.system == system) rs.push_back(&r);
        }
        return rs;
    };

    for (const auto& [world, system] : keys) {
        const auto rs = members(world, system);
        SystemSummary s;
        s.system = system;
        s.world = world;
        s.runs = static_cast<int>(rs.size());
        std::vector<double> sigma;
        for (const RunRecord* r : rs) {
            if (!r->completed) continue;
            ++s.completed;
            sigma.push_back(r->sigma);
        }
        s.mean_T = mean_or_nan(completed_values(rs, &RunRecord::T));
        s.mean_sigma = mean_or_nan(sigma);
        s.mean_F = mean_or_nan(completed_values(rs, &RunRecord::F));
        s.mean_mu = mean_or_nan(completed_values(rs, &RunRecord::mu));
        const auto good = std::count_if(rs.begin(), rs.end(), [](const RunRecord* r) { return r->good; });
        const auto bad = std::count_if(rs.begin(), rs.end(), [](const RunRecord* r) { return r->bad; });
        s.good_pct = rs.empty() ? 0.0 : 100.0 * static_cast<double>(good) / static_cast<double>(rs.size());
        s.bad_pct = rs.empty() ? 0.0 : 100.0 * static_cast<double>(bad) / static_cast<double>(rs.size());
        s.phi = phis[world].value_or(kNaN);
        out.systems.push_back(s);
    }

    for (const auto& [world, system] : keys) {
        if (system == baseline) continue;
        const auto base = members(world, std::string(baseline));
        if (base.empty()) continue;
        const auto other = members(world, system);
        auto sigmas = [](const std::vector<const RunRecord*>& rs) {
            std::vector<double> v;
            for (const RunRecord* r : rs) {
                if (r->completed) v.push_back(r->sigma);
            }
            return v;
        };
        Significance sig;
        sig.system = system;
        sig.world = world;
        sig.baseline = std::string(baseline);
        sig.level_T = level_or_nan(completed_values(base, &RunRecord::T), completed_values(other, &RunRecord::T));
        sig.level_sigma = level_or_nan(sigmas(base), sigmas(other));
        sig.level_F = level_or_nan(completed_values(base, &RunRecord::F), completed_values(other, &RunRecord::F));
        out.significance.push_back(sig);
    }
    return out;
}

std::string runs_csv(const std::vector<RunRecord>& records) {
    std::string out = "system,world,seed,T,sigma,mu,F,completed,good,bad\n";
    for (const RunRecord& r : records) {
        out += r.system + "," + r.world + "," + std::to_string(r.seed) + "," + format_double(r.T) + "," +
               std::to_string(r.sigma) + "," + format_double(r.mu) + "," + format_double(r.F) + "," +
               (r.completed ? "1" : "0") + "," + (r.good ? "1" : "0") + "," + (r.bad ? "1" : "0") + "\n";
    }
    return out;
}

std::vector<RunRecord> parse_runs_csv(std::string_view text) {
    std::vector<RunRecord> out;
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (line_no == 1) {
            if (line != "system,world,seed,T,sigma,mu,F,completed,good,bad") {
                throw ParseError("unexpected runs CSV header", 1, 1);
            }
            continue;
        }
        if (f.size() != 10) throw ParseError("expected 10 fields", line_no, 1);
        RunRecord r;
        r.system = std::string(f[0]);
        r.world = std::string(f[1]);
        double seed = 0.0, sigma = 0.0;
        auto num = [&](std::string_view s, double& v, std::size_t field) {
            if (!parse_double(s, v)) throw ParseError("bad number '" + std::string(s) + "'", line_no, field + 1);
        };
        num(f[2], seed, 2);
        num(f[3], r.T, 3);
        num(f[4], sigma, 4);
        num(f[5], r.mu, 5);
        num(f[6], r.F, 6);
        r.seed = static_cast<std::uint64_t>(seed);
        r.sigma = static_cast<int>(sigma);
        r.completed = f[7] == "1";
        r.good = f[8] == "1";
        r.bad = f[9] == "1";
        out.push_back(std::move(r));
    }
    return out;
}

std::string summary_csv(const StatsSummary& s) {
    std::string out = "system,world,runs,completed,T,sigma,F,mu_pct,good_pct,bad_pct,phi\n";
    for (const SystemSummary& r : s.systems) {
        out += r.system + "," + r.world + "," + std::to_string(r.runs) + "," + std::to_string(r.completed) + "," +
               format_double(r.mean_T) + "," + format_double(r.mean_sigma) + "," + format_double(r.mean_F) + "," +
               format_double(100.0 * r.mean_mu) + "," + format_double(r.good_pct) + "," +
               format_double(r.bad_pct) + "," + format_double(r.phi) + "\n";
    }
    return out;
}

std::string significance_csv(const StatsSummary& s) {
    std::string out = "system,world,baseline,T,sigma,F\n";
    for (const Significance& r : s.significance) {
        out += r.system + "," + r.world + "," + r.baseline + "," + format_double(r.level_T) + "," +
               format_double(r.level_sigma) + "," + format_double(r.level_F) + "\n";
    }
    return out;
}

std::string format_report(const StatsSummary& s) {
    std::string out;
    char line[256];
    out += "Mean task time, stalls, fitness and mu rate, with % of good and bad runs\n";
    std::snprintf(line, sizeof(line), "%-7s %-8s %5s %9s %7s %9s %7s %6s %6s\n", "system", "world", "done", "T",
                  "sigma", "F", "mu(%)", "good", "bad");
    out += line;
    for (const SystemSummary& r : s.systems) {
        const std::string done = std::to_string(r.completed) + "/" + std::to_string(r.runs);
        std::snprintf(line, sizeof(line), "%-7s %-8s %5s %9s %7s %9s %7s %6s %6s\n", r.system.c_str(),
                      r.world.c_str(), done.c_str(), fmt("%.1f", r.mean_T).c_str(),
                      fmt("%.1f", r.mean_sigma).c_str(), fmt("%.1f", r.mean_F).c_str(),
                      fmt("%.1f", 100.0 * r.mean_mu).c_str(), fmt("%.0f", r.good_pct).c_str(),
                      fmt("%.0f", r.bad_pct).c_str());
        out += line;
    }
    if (!s.systems.empty()) {
        std::string seen;
        for (const SystemSummary& r : s.systems) {
            if (seen.find("|" + r.world + "|") != std::string::npos) continue;
            seen += "|" + r.world + "|";
            out += "phi(" + r.world + ") = " + fmt("%.4f", r.phi) + "\n";
        }
    }
    if (!s.significance.empty()) {
        out += "\nSignificance level (%) that the baseline has the lower mean\n";
        std::snprintf(line, sizeof(line), "%-7s %-8s %-8s %7s %7s %7s\n", "system", "world", "baseline", "T",
                      "sigma", "F");
        out += line;
        for (const Significance& r : s.significance) {
            std::snprintf(line, sizeof(line), "%-7s %-8s %-8s %7s %7s %7s\n", r.system.c_str(), r.world.c_str(),
                          r.baseline.c_str(), fmt("%.1f", r.level_T).c_str(), fmt("%.1f", r.level_sigma).c_str(),
                          fmt("%.1f", r.level_F).c_str());
            out += line;
        }
    }
    return out;
}

void emit_report(const std::filesystem::path& dir, const StatsSummary& summary,
                 const std::vector<RunRecord>& records, const std::string& runs_file) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    write_file(dir / runs_file, runs_csv(records));
    write_file(dir / "summary.csv", summary_csv(summary));
    write_file(dir / "significance.csv", significance_csv(summary));
}

std::string trace_header() { return "t,x,y,heading,antigen_d,antibody,stall\n"; }

std::string trace_line(const TraceRow& row) {
    return format_double(row.t) + "," + format_double(row.pose.x) + "," + format_double(row.pose.y) + "," +
           format_double(row.pose.heading_deg) + "," + std::to_string(row.dominant) + "," +
           std::to_string(row.antibody) + "," + std::to_string(static_cast<int>(row.stall)) + "\n";
}

}  // namespace idiobot
