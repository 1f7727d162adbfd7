#include "acceptance.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "idiobot/behaviors.hpp"
#include "idiobot/harness.hpp"
#include "idiobot/immune_core.hpp"
#include "idiobot/selectors.hpp"
#include "idiobot/stats.hpp"
#include "oracles.hpp"

namespace idiobot::acceptance {
namespace {

using Clock = std::chrono::steady_clock;

std::string printf_string(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), fmt, args...);
    return buf;
}

/// Runs `body`, timing it. A positive `budget` (seconds) fails the criterion
/// when exceeded.
template <class F>
CriterionResult timed(int id, std::string title, double budget, F&& body) {
    CriterionResult r;
    r.id = id;
    r.title = std::move(title);
    const auto t0 = Clock::now();
    try {
        body(r);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (budget > 0.0 && r.seconds > budget) {
        r.passed = false;
        r.detail += printf_string("; over the %.0f s budget", budget);
    }
    return r;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) return INFINITY;
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

ImmuneState state_from(const oracle::NetworkInput& in) {
    ImmuneParams params;
    params.b = in.b;
    params.k1 = in.k1;
    params.k2 = in.k2;
    params.floor = in.floor;
    params.num_antibodies = in.paratope.rows();
    params.num_antigens = in.paratope.cols();
    params.normalization = in.unit_sum ? Normalization::unit_sum : Normalization::mean_one;
    return ImmuneState{ParatopeMatrix(in.paratope), IdiotopeMatrix(in.idiotope), ConcentrationVector(in.c), params};
}

AntigenPresentation presentation_from(const oracle::NetworkInput& in) {
    if (in.presenting.empty()) return AntigenPresentation::none();
    return AntigenPresentation::make(in.presenting, *in.dominant);
}

}  // namespace

CriterionResult oracle_equivalence() {
    return timed(1, "oracle equivalence of the network step", 10.0, [](CriterionResult& r) {
        constexpr int kInstances = 1000;
        constexpr double kTol = 1e-9;
        int mismatches = 0;
        double worst = 0.0;
        for (int k = 0; k < kInstances; ++k) {
            oracle::NetworkInput in = oracle::random_instance(1000 + k, 5, 3);
            in.unit_sum = (k % 4 == 3);
            const oracle::NetworkOutput want = oracle::direct_step(in);
            const StepResult got = idiotypic_step(state_from(in), presentation_from(in));
            const double diff = std::max({max_abs_diff(got.s2, want.s2), max_abs_diff(got.s3, want.s3),
                                          max_abs_diff(got.sg, want.sg),
                                          max_abs_diff(got.raw.values(), want.c_raw),
                                          max_abs_diff(got.state.concentrations.values(), want.c_norm)});
            worst = std::max(worst, diff);
            if (got.alpha != want.alpha || got.beta != want.beta || !(diff <= kTol)) ++mismatches;
        }
        r.passed = mismatches == 0;
        r.detail = printf_string("%d instances, %d mismatches, max |diff| %.3g", kInstances, mismatches, worst);
    });
}

CriterionResult normalization_and_clamps() {
    return timed(2, "normalization and clamps over 10^4 steps", 0.0, [](CriterionResult& r) {
        constexpr int kSteps = 10000;
        std::mt19937_64 gen(7);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        ImmuneState state = ImmuneState::create(random_paratope(3), default_idiotope());
        double worst_sum = 0.0;
        double min_p = INFINITY;
        for (int t = 0; t < kSteps; ++t) {
            std::vector<std::size_t> presenting;
            for (std::size_t j = 0; j < kDefaultAntigens; ++j) {
                if (coin(gen) < 0.3) presenting.push_back(j);
            }
            if (presenting.empty()) presenting.push_back(static_cast<std::size_t>(coin(gen) * kDefaultAntigens));
            const std::size_t d = presenting[static_cast<std::size_t>(coin(gen) * presenting.size())];
            StepResult step = idiotypic_step(state, AntigenPresentation::make(presenting, d));
            state = std::move(step.state);
            // Biased toward penalties so the zero clamp is exercised.
            const double tau = coin(gen) < 0.35 ? 0.05 : -0.05;
            state.paratope = reinforce(state.paratope, step.beta, d, tau);
            worst_sum = std::max(worst_sum, std::abs(state.concentrations.sum() - 16.0));
            for (double p : state.paratope.matrix().values()) min_p = std::min(min_p, p);
        }
        r.passed = worst_sum <= 1e-9 && min_p >= 0.0;
        r.detail = printf_string("max |sum C - 16| %.3g, min paratope entry %.3g", worst_sum, min_p);
    });
}

CriterionResult decay_law() {
    return timed(3, "decay law with no presenting antigens", 0.0, [](CriterionResult& r) {
        ImmuneParams params;
        const ParatopeMatrix p = random_paratope(11);
        const IdiotopeMatrix id = default_idiotope();
        std::vector<double> start(kDefaultAntibodies);
        for (std::size_t i = 0; i < start.size(); ++i) start[i] = 0.5 + 0.1 * static_cast<double>(i);
        ConcentrationVector c(start);
        const AntigenPresentation none = AntigenPresentation::none();
        double worst = 0.0;
        for (int t = 1; t <= 100; ++t) {
            const Vector s1 = match_strength(p, antigen_weights(none, p));
            const std::size_t a = select_alpha(s1, p, none.dominant).index;
            const CompetingSet h = competing_set(p, none, a);
            const Vector sg = global_strength(s1, suppression(p, id, a, h, c), stimulation(p, id, a, h, c), params.k1);
            c = update_concentrations(c, sg, params);
            for (std::size_t i = 0; i < start.size(); ++i) {
                worst = std::max(worst, std::abs(c[i] - start[i] * std::pow(0.95, t)));
            }
        }
        r.passed = worst <= 1e-12;
        r.detail = printf_string("max |C_t - 0.95^t C_0| over 100 steps %.3g", worst);
    });
}

CriterionResult scheme_probabilities() {
    return timed(4, "scheme selection frequencies", 30.0, [](CriterionResult& r) {
        struct Branch {
            SchemeId scheme;
            SelectorContext ctx;
            const char* label;
            std::array<double, 4> expect;  // alpha, 2nd, 3rd, 4th; negative means "not ranked"
        };
        const SelectorContext plain{};
        const SelectorContext fail{Outcome::failure, false};
        const SelectorContext ok{Outcome::success, false};
        const SelectorContext stall{Outcome::none, true};
        const std::array<Branch, 14> branches = {{
            {SchemeId::r1, plain, "r1", {0.80, -1, -1, -1}},
            {SchemeId::r2, plain, "r2", {0.80, -1, -1, -1}},
            {SchemeId::r3, plain, "r3", {0.80, 0.20, 0.0, 0.0}},
            {SchemeId::r4, plain, "r4", {0.80, 0.10, 0.10, 0.0}},
            {SchemeId::r5, plain, "r5", {0.80, 0.10, 0.05, 0.05}},
            {SchemeId::r6, fail, "r6/failure", {0.72, 0.14, 0.07, 0.07}},
            {SchemeId::r6, ok, "r6/success", {0.86, 0.07, 0.035, 0.035}},
            {SchemeId::r7, stall, "r7/stall", {0.67, 0.165, 0.0825, 0.0825}},
            {SchemeId::r7, plain, "r7/free", {0.85, 0.075, 0.0375, 0.0375}},
            {SchemeId::r8, stall, "r8/stall", {0.50, 0.25, 0.125, 0.125}},
            {SchemeId::r8, plain, "r8/free", {0.87, 0.065, 0.0325, 0.0325}},
            {SchemeId::r9, stall, "r9/stall", {0.25, 0.375, 0.1875, 0.1875}},
            {SchemeId::r9, plain, "r9/free", {0.98, 0.01, 0.005, 0.005}},
            {SchemeId::r6, SelectorContext{}, "r6/no verdict", {0.86, 0.07, 0.035, 0.035}},
        }};

        // Distinct scores on the dominant antigen; alpha is the best one.
        constexpr std::size_t d = 2;
        Matrix m(kDefaultAntibodies, kDefaultAntigens, 0.5);
        for (std::size_t i = 0; i < kDefaultAntibodies; ++i) m(i, d) = 0.2 + 0.05 * static_cast<double>((i * 7) % 16);
        const ParatopeMatrix p(m);
        std::size_t alpha = 0;
        for (std::size_t i = 1; i < kDefaultAntibodies; ++i) {
            if (m(i, d) > m(alpha, d)) alpha = i;
        }
        // Ranked alternatives computed here, independently of rank_candidates.
        std::vector<std::size_t> ranked;
        for (std::size_t i = 0; i < kDefaultAntibodies; ++i) {
            if (i != alpha) ranked.push_back(i);
        }
        std::sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) { return m(a, d) > m(b, d); });
        double other_sum = 0.0;
        for (std::size_t i : ranked) other_sum += m(i, d);

        constexpr int kDraws = 100000;
        double worst = 0.0;
        std::string worst_label;
        int seed = 0;
        for (const Branch& br : branches) {
            Rng rng(9000 + seed++);
            std::vector<int> hits(kDefaultAntibodies, 0);
            for (int k = 0; k < kDraws; ++k) ++hits[select_scheme(br.scheme, p, alpha, d, br.ctx, rng).chosen];
            auto freq = [&](std::size_t i) { return static_cast<double>(hits[i]) / kDraws; };
            auto check = [&](double got, double want) {
                const double e = std::abs(got - want);
                if (e > worst) {
                    worst = e;
                    worst_label = br.label;
                }
            };
            check(freq(alpha), br.expect[0]);
            if (br.scheme == SchemeId::r1) {
                for (std::size_t i : ranked) check(freq(i), 0.20 / 15.0);
            } else if (br.scheme == SchemeId::r2) {
                for (std::size_t i : ranked) check(freq(i), 0.20 * m(i, d) / other_sum);
            } else {
                for (std::size_t k = 0; k < 3; ++k) check(freq(ranked[k]), br.expect[k + 1]);
                for (std::size_t k = 3; k < ranked.size(); ++k) check(freq(ranked[k]), 0.0);
            }
        }
        r.passed = worst <= 0.01;
        r.detail = printf_string("%zu branches x %d draws, max |freq - table| %.4f (%s)", branches.size(), kDraws,
                                 worst, worst_label.c_str());
    });
}

CriterionResult fitness_cross_check() {
    return timed(5, "fitness from published means", 0.0, [](CriterionResult& r) {
        std::vector<RunRecord> records;
        for (const oracle::PublishedRow& row : oracle::published_m1()) {
            RunRecord rec;
            rec.system = row.system;
            rec.world = "m1";
            rec.T = row.T;
            rec.sigma = static_cast<int>(row.sigma);
            rec.completed = true;
            records.push_back(rec);
        }
        const std::optional<double> phi = compute_phi(records);
        if (!phi) throw std::runtime_error("phi undefined");
        const double hand_phi = oracle::published_phi();
        double worst = 0.0;
        std::string worst_system;
        std::size_t k = 0;
        for (const oracle::PublishedRow& row : oracle::published_m1()) {
            const double f = fitness(records[k++], phi);
            const double hand = oracle::published_fitness(row.T, row.sigma, hand_phi);
            if (std::abs(f - hand) > 1e-9) throw std::runtime_error("fitness disagrees with hand arithmetic");
            if (std::abs(f - row.F) > worst) {
                worst = std::abs(f - row.F);
                worst_system = row.system;
            }
        }
        const double f_id = fitness(records.front(), phi);
        r.passed = std::abs(*phi - 6.69) < 0.005 && std::abs(*phi - hand_phi) < 1e-12 && worst <= 6.0;
        r.detail = printf_string("phi %.4f, F(id) %.2f, max |F - published| %.2f (%s)", *phi, f_id, worst,
                                 worst_system.c_str());
    });
}

CriterionResult table_fidelity(const std::filesystem::path& tables_file) {
    return timed(6, "behaviour tables match the transcription", 0.0, [&](CriterionResult& r) {
        std::ifstream in(tables_file);
        if (!in) throw std::runtime_error("cannot open " + tables_file.string());
        const IdiotopeMatrix idiotope = default_idiotope();
        int checked = 0;
        std::vector<std::string> problems;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ss(line);
            std::string kind;
            std::size_t i = 0;
            ss >> kind >> i;
            if (kind == "antigen") {
                int priority = -1;
                ss >> priority;
                if (i >= kNumAntigens || kAntigens[i].priority != priority) problems.push_back(line);
            } else if (kind == "antibody") {
                std::string angular;
                double linear = NAN;
                ss >> angular >> linear;
                if (i >= kNumAntibodies) {
                    problems.push_back(line);
                } else if (angular == "variable") {
                    if (kAntibodies[i].steering == Steering::fixed || kAntibodies[i].linear_m_s != linear) {
                        problems.push_back(line);
                    }
                } else if (kAntibodies[i].steering != Steering::fixed ||
                           kAntibodies[i].angular_deg_s != std::stod(angular) || kAntibodies[i].linear_m_s != linear) {
                    problems.push_back(line);
                }
            } else if (kind == "idiotope") {
                for (std::size_t j = 0; j < kDefaultAntigens; ++j) {
                    double v = NAN;
                    ss >> v;
                    if (i >= kDefaultAntibodies || idiotope(i, j) != v) {
                        problems.push_back(line);
                        break;
                    }
                }
            } else {
                throw std::runtime_error("unknown record: " + line);
            }
            ++checked;
        }
        const int expected = static_cast<int>(kNumAntigens + kNumAntibodies + kDefaultAntibodies);
        r.passed = problems.empty() && checked == expected;
        r.detail = printf_string("%d/%d rows checked, %zu differ", checked, expected, problems.size());
        if (!problems.empty()) r.detail += "; first: " + problems.front();
    });
}

namespace {

CampaignConfig default_campaign(const std::filesystem::path& map_file) {
    CampaignConfig c;
    c.world = load_map(map_file);
    c.world_name = map_file.stem().string();
    return c;
}

}  // namespace

CriterionResult soft_reproduction(const std::filesystem::path& map_file) {
    return timed(7, "end-to-end soft reproduction", 900.0, [&](CriterionResult& r) {
        const std::vector<RunRecord> records = run_campaign(default_campaign(map_file));
        const StatsSummary summary = summarize(records);
        double f_id = NAN, f_r1 = NAN;
        for (const SystemSummary& s : summary.systems) {
            if (s.system == "id") f_id = s.mean_F;
            if (s.system == "r1") f_r1 = s.mean_F;
        }
        long steps = 0, alts = 0, sw_steps = 0, sw_alts = 0;
        for (const RunRecord& rec : records) {
            if (rec.system != "id") continue;
            steps += rec.steps;
            alts += rec.alternatives;
            sw_steps += rec.stall_window_steps;
            sw_alts += rec.stall_window_alternatives;
        }
        const double overall = steps ? static_cast<double>(alts) / steps : NAN;
        const double stall = sw_steps ? static_cast<double>(sw_alts) / sw_steps : NAN;
        const double free =
            steps > sw_steps ? static_cast<double>(alts - sw_alts) / static_cast<double>(steps - sw_steps) : NAN;

        const bool a = f_id <= f_r1;
        const bool b = overall >= 0.10 && overall <= 0.35;
        const bool c = stall > free;
        r.passed = a && b && c;
        r.detail = printf_string(
            "(a) F id %.1f vs r1 %.1f %s; (b) difference rate %.3f %s; (c) stall-window %.3f (%ld steps) vs free %.3f "
            "%s",
            f_id, f_r1, a ? "ok" : "FAILED", overall, b ? "ok" : "FAILED", stall, sw_steps, free,
            c ? "ok" : "FAILED");
    });
}

CriterionResult significance_oracle() {
    return timed(8, "t-test against a permutation oracle", 0.0, [](CriterionResult& r) {
        struct Pair {
            std::array<double, 12> a, b;
        };
        static const std::array<Pair, 3> pairs = {{
            {{212, 198, 231, 205, 224, 190, 243, 219, 201, 228, 210, 236},
             {236, 251, 219, 262, 240, 228, 270, 247, 233, 255, 226, 261}},
            {{51, 47, 58, 44, 62, 49, 55, 53, 46, 60, 50, 57}, {54, 59, 48, 63, 52, 61, 57, 50, 66, 55, 58, 53}},
            {{3.1, 2.4, 4.0, 1.8, 2.9, 3.5, 2.2, 3.8, 2.7, 3.3, 2.0, 3.6},
             {3.0, 2.6, 3.7, 2.1, 3.4, 2.8, 3.9, 2.5, 3.2, 2.3, 3.5, 2.9}},
        }};
        double worst = 0.0;
        std::string levels;
        std::uint64_t seed = 31;
        for (const Pair& p : pairs) {
            const double t = t_test_one_tailed(p.a, p.b);
            const double perm = oracle::permutation_level(p.a, p.b, 100000, seed++);
            worst = std::max(worst, std::abs(t - perm));
            levels += printf_string("%s%.2f/%.2f", levels.empty() ? "" : ", ", t, perm);
        }
        r.passed = worst <= 1.0;
        r.detail = "t/permutation levels " + levels + printf_string("; max gap %.2f pp", worst);
    });
}

CriterionResult determinism(const std::filesystem::path& map_file) {
    return timed(9, "campaign determinism", 0.0, [&](CriterionResult& r) {
        auto render = [&] {
            const std::vector<RunRecord> records = run_campaign(default_campaign(map_file));
            const StatsSummary summary = summarize(records);
            return runs_csv(records) + summary_csv(summary) + significance_csv(summary);
        };
        const std::string first = render();
        const std::string second = render();
        r.passed = first == second;
        r.detail = printf_string("two campaigns, %zu bytes of CSV, %s", first.size(),
                                 first == second ? "identical" : "different");
    });
}

Options default_options() {
    Options o;
    o.map_file = std::filesystem::path(IDIOBOT_MAP_DIR) / "m1.map";
    o.tables_file = IDIOBOT_TABLES_FILE;
    return o;
}

std::vector<CriterionResult> run_all(const Options& options) {
    std::vector<CriterionResult> out;
    auto push = [&](CriterionResult r) {
        if (options.progress) options.progress(r);
        out.push_back(std::move(r));
    };
    auto skipped = [](int id, const char* title) {
        CriterionResult r;
        r.id = id;
        r.title = title;
        r.skipped = true;
        r.detail = "campaign checks disabled";
        return r;
    };
    push(oracle_equivalence());
    push(normalization_and_clamps());
    push(decay_law());
    push(scheme_probabilities());
    push(fitness_cross_check());
    push(table_fidelity(options.tables_file));
    push(options.campaign ? soft_reproduction(options.map_file) : skipped(7, "end-to-end soft reproduction"));
    push(significance_oracle());
    push(options.campaign ? determinism(options.map_file) : skipped(9, "campaign determinism"));
    return out;
}

std::string format_line(const CriterionResult& r) {
    const char* tag = r.skipped ? "SKIP" : (r.passed ? "PASS" : "FAIL");
    return printf_string("%s  [%d] %s: %s (%.1f s)", tag, r.id, r.title.c_str(), r.detail.c_str(), r.seconds);
}

}  // namespace idiobot::acceptance
