#pragma once

// Probabilistic baseline arbitration schemes R1..R9.
//
// Every scheme starts from the antigenic antibody alpha and, with a fixed or
// context-dependent probability, swaps it for an alternative mu. The
// alternatives are the non-alpha antibodies ranked by their paratope score
// against the dominant antigen.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "idiobot/immune_core.hpp"
#include "idiobot/random.hpp"

namespace idiobot {

enum class SchemeId { r1 = 1, r2, r3, r4, r5, r6, r7, r8, r9 };

inline constexpr std::array<SchemeId, 9> kAllSchemes = {
    SchemeId::r1, SchemeId::r2, SchemeId::r3, SchemeId::r4, SchemeId::r5,
    SchemeId::r6, SchemeId::r7, SchemeId::r8, SchemeId::r9,
};

std::string_view to_string(SchemeId id);
/// Accepts "r1".."r9" (case-insensitive).
std::optional<SchemeId> parse_scheme(std::string_view text);

enum class Outcome { none, success, failure };

struct SelectorContext {
    Outcome previous_outcome = Outcome::none;
    bool stall_window = false;  ///< current or previous dominant antigen was 5 or 6

    static SelectorContext from_history(Outcome previous, std::optional<std::size_t> current_dominant,
                                        std::optional<std::size_t> previous_dominant);
};

enum class RankUsed { alpha, second, third, fourth, roulette, uniform };

struct SelectionOutcome {
    std::size_t chosen = 0;
    std::size_t alpha = 0;
    bool was_mu = false;
    RankUsed rank_used = RankUsed::alpha;
    bool folded = false;  ///< a requested rank did not exist and was folded onto the deepest one
};

/// Probabilities of choosing the 2nd, 3rd and 4th ranked alternatives.
/// Schemes R1 and R2 put their whole mu mass in `second` and draw the
/// alternative uniformly or by roulette respectively.
struct BranchProbabilities {
    double second = 0.0;
    double third = 0.0;
    double fourth = 0.0;
    [[nodiscard]] double mu() const noexcept { return second + third + fourth; }
};

BranchProbabilities branch_probabilities(SchemeId scheme, const SelectorContext& ctx);

/// Antibody indices by P[.][d] descending, lowest index first on ties.
std::vector<std::size_t> rank_candidates(const ParatopeMatrix& paratope, std::size_t dominant);

struct RouletteDraw {
    std::size_t index = 0;
    bool degenerate = false;  ///< every non-alpha score was zero; drawn uniformly
};

/// Roulette wheel over P[.][d], redrawn until the result differs from alpha.
RouletteDraw roulette_by_score(const ParatopeMatrix& paratope, std::size_t dominant, std::size_t exclude,
                               Rng& rng);

SelectionOutcome select_scheme(SchemeId scheme, const ParatopeMatrix& paratope, std::size_t alpha,
                               std::size_t dominant, const SelectorContext& ctx, Rng& rng);

/// Fraction of outcomes that picked an alternative. Throws on an empty log.
double observed_mu_rate(std::span<const SelectionOutcome> log);

}  // namespace idiobot
