#include "idiobot/selectors.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <stdexcept>

#include "idiobot/log.hpp"

namespace idiobot {
namespace {

constexpr std::size_t kStalledAntigen = 5;
constexpr std::size_t kBlockedAntigen = 6;

bool is_stall_antigen(std::optional<std::size_t> d) {
    return d && (*d == kStalledAntigen || *d == kBlockedAntigen);
}

}  // namespace

std::string_view to_string(SchemeId id) {
    static constexpr std::array<std::string_view, 9> names = {"r1", "r2", "r3", "r4", "r5",
                                                              "r6", "r7", "r8", "r9"};
    return names[static_cast<std::size_t>(id) - 1];
}

std::optional<SchemeId> parse_scheme(std::string_view text) {
    if (text.size() != 2 || std::tolower(static_cast<unsigned char>(text[0])) != 'r') return std::nullopt;
    if (text[1] < '1' || text[1] > '9') return std::nullopt;
    return static_cast<SchemeId>(text[1] - '0');
}

SelectorContext SelectorContext::from_history(Outcome previous, std::optional<std::size_t> current_dominant,
                                              std::optional<std::size_t> previous_dominant) {
    return {previous, is_stall_antigen(current_dominant) || is_stall_antigen(previous_dominant)};
}

BranchProbabilities branch_probabilities(SchemeId scheme, const SelectorContext& ctx) {
    const bool stall = ctx.stall_window;
    switch (scheme) {
        case SchemeId::r1:
        case SchemeId::r2:
        case SchemeId::r3: return {0.20, 0.0, 0.0};
        case SchemeId::r4: return {0.10, 0.10, 0.0};
        case SchemeId::r5: return {0.10, 0.05, 0.05};
        case SchemeId::r6:
            // No verdict yet counts as success.
            return ctx.previous_outcome == Outcome::failure ? BranchProbabilities{0.14, 0.07, 0.07}
                                                            : BranchProbabilities{0.07, 0.035, 0.035};
        case SchemeId::r7:
            return stall ? BranchProbabilities{0.165, 0.0825, 0.0825} : BranchProbabilities{0.075, 0.0375, 0.0375};
        case SchemeId::r8:
            return stall ? BranchProbabilities{0.25, 0.125, 0.125} : BranchProbabilities{0.065, 0.0325, 0.0325};
        case SchemeId::r9:
            return stall ? BranchProbabilities{0.375, 0.1875, 0.1875} : BranchProbabilities{0.01, 0.005, 0.005};
    }
    throw std::invalid_argument("unknown scheme");
}

std::vector<std::size_t> rank_candidates(const ParatopeMatrix& paratope, std::size_t dominant) {
    if (dominant >= paratope.antigens()) throw StructuralError("dominant antigen out of range");
    std::vector<std::size_t> order(paratope.antibodies());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return paratope(a, dominant) > paratope(b, dominant);
    });
    return order;
}

RouletteDraw roulette_by_score(const ParatopeMatrix& paratope, std::size_t dominant, std::size_t exclude,
                               Rng& rng) {
    const std::size_t n = paratope.antibodies();
    if (dominant >= paratope.antigens() || exclude >= n) throw StructuralError("roulette index out of range");
    if (n < 2) throw StructuralError("roulette needs at least two antibodies");

    double total = 0.0, others = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += paratope(i, dominant);
        if (i != exclude) others += paratope(i, dominant);
    }
    if (!(others > 0.0)) {
        log::debug("roulette_by_score: all alternative scores are zero, drawing uniformly");
        std::size_t k = rng.index(n - 1);
        return {k >= exclude ? k + 1 : k, true};
    }
    for (;;) {
        const double target = rng.uniform() * total;
        double acc = 0.0;
        std::size_t pick = n;
        for (std::size_t i = 0; i < n; ++i) {
            acc += paratope(i, dominant);
            if (target < acc) {
                pick = i;
                break;
            }
        }
        // Rounding can leave target at or beyond the last boundary.
        if (pick == n) {
            pick = n - 1;
            while (paratope(pick, dominant) <= 0.0) --pick;
        }
        if (pick != exclude) return {pick, false};
    }
}

SelectionOutcome select_scheme(SchemeId scheme, const ParatopeMatrix& paratope, std::size_t alpha,
                               std::size_t dominant, const SelectorContext& ctx, Rng& rng) {
    if (alpha >= paratope.antibodies()) throw StructuralError("alpha out of range");
    SelectionOutcome out{alpha, alpha, false, RankUsed::alpha, false};
    const BranchProbabilities probs = branch_probabilities(scheme, ctx);
    const double u = rng.uniform();
    if (u >= probs.mu()) return out;
    if (paratope.antibodies() < 2) {
        log::debug("select_scheme: no alternative antibody exists");
        out.folded = true;
        return out;
    }

    if (scheme == SchemeId::r1) {
        const std::size_t k = rng.index(paratope.antibodies() - 1);
        out.chosen = k >= alpha ? k + 1 : k;
        out.rank_used = RankUsed::uniform;
    } else if (scheme == SchemeId::r2) {
        out.chosen = roulette_by_score(paratope, dominant, alpha, rng).index;
        out.rank_used = RankUsed::roulette;
    } else {
        std::vector<std::size_t> alternatives = rank_candidates(paratope, dominant);
        alternatives.erase(std::find(alternatives.begin(), alternatives.end(), alpha));
        std::size_t depth = u < probs.second ? 0 : (u < probs.second + probs.third ? 1 : 2);
        if (depth >= alternatives.size()) {
            log::debug("select_scheme: requested rank folded onto the deepest available alternative");
            depth = alternatives.size() - 1;
            out.folded = true;
        }
        out.chosen = alternatives[depth];
        out.rank_used = depth == 0 ? RankUsed::second : (depth == 1 ? RankUsed::third : RankUsed::fourth);
    }
    out.was_mu = out.chosen != alpha;
    return out;
}

double observed_mu_rate(std::span<const SelectionOutcome> log) {
    if (log.empty()) throw std::invalid_argument("observed_mu_rate: empty selection log");
    const auto mu = std::count_if(log.begin(), log.end(), [](const SelectionOutcome& o) { return o.was_mu; });
    return static_cast<double>(mu) / static_cast<double>(log.size());
}

}  // namespace idiobot
