#include "idiobot/immune_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "idiobot/log.hpp"
#include "idiobot/random.hpp"

namespace idiobot {
namespace {

constexpr double kDominantWeight = 2.0;
constexpr double kPresentingWeight = 0.25;

void require(bool ok, const char* what) {
    if (!ok) throw StructuralError(what);
}

std::size_t argmax_lowest(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

void check_shapes(const ParatopeMatrix& p, const IdiotopeMatrix& id, std::size_t alpha,
                  const CompetingSet& h, const ConcentrationVector& c) {
    require(p.antibodies() == id.antibodies() && p.antigens() == id.antigens(),
            "paratope and idiotope shapes differ");
    require(h.size() == p.antibodies() && c.size() == p.antibodies(),
            "competing set or concentration length differs from antibody count");
    require(alpha < p.antibodies(), "alpha out of range");
}

}  // namespace

void ImmuneParams::validate() const {
    require(b > 0.0, "b must be positive");
    require(k1 >= 0.0 && k1 <= 1.0, "k1 must lie in [0, 1]");
    require(k2 > 0.0 && k2 < 1.0, "k2 must lie in (0, 1)");
    require(num_antibodies >= 1, "at least one antibody required");
    require(num_antigens >= 1, "at least one antigen required");
    require(floor >= 0.0, "concentration floor must be nonnegative");
}

ParatopeMatrix::ParatopeMatrix(Matrix scores) : m_(std::move(scores)) {
    for (double v : m_.values()) {
        require(std::isfinite(v) && v >= 0.0, "paratope entries must be finite and nonnegative");
    }
}

IdiotopeMatrix::IdiotopeMatrix(Matrix weights) : m_(std::move(weights)) {
    for (double v : m_.values()) {
        require(v == 0.0 || v == 0.5 || v == 1.0, "idiotope entries must be 0, 0.5 or 1");
    }
}

ConcentrationVector::ConcentrationVector(std::vector<double> values) : c_(std::move(values)) {
    for (double v : c_) {
        require(std::isfinite(v) && v >= 0.0, "concentrations must be finite and nonnegative");
    }
}

double ConcentrationVector::sum() const noexcept { return std::accumulate(c_.begin(), c_.end(), 0.0); }

AntigenPresentation AntigenPresentation::make(std::vector<std::size_t> presenting, std::size_t dominant) {
    std::sort(presenting.begin(), presenting.end());
    presenting.erase(std::unique(presenting.begin(), presenting.end()), presenting.end());
    require(std::binary_search(presenting.begin(), presenting.end(), dominant),
            "dominant antigen must be presenting");
    return {std::move(presenting), dominant};
}

bool AntigenPresentation::presents(std::size_t antigen) const noexcept {
    return std::binary_search(presenting.begin(), presenting.end(), antigen);
}

ImmuneState ImmuneState::create(ParatopeMatrix paratope, IdiotopeMatrix idiotope, ImmuneParams params) {
    params.num_antibodies = paratope.antibodies();
    params.num_antigens = paratope.antigens();
    const double start = params.normalization == Normalization::mean_one
                             ? 1.0
                             : 1.0 / static_cast<double>(paratope.antibodies());
    ImmuneState s{std::move(paratope), std::move(idiotope),
                  ConcentrationVector::uniform(params.num_antibodies, start), params};
    s.validate();
    return s;
}

void ImmuneState::validate() const {
    params.validate();
    require(paratope.antibodies() == params.num_antibodies && paratope.antigens() == params.num_antigens,
            "paratope shape disagrees with params");
    require(idiotope.antibodies() == params.num_antibodies && idiotope.antigens() == params.num_antigens,
            "idiotope shape disagrees with params");
    require(concentrations.size() == params.num_antibodies, "concentration length disagrees with params");
}

Matrix antigen_weights(const AntigenPresentation& presentation, const ParatopeMatrix& paratope) {
    const std::size_t n = paratope.antibodies();
    const std::size_t l = paratope.antigens();
    Matrix g(n, l, 0.0);
    if (presentation.empty()) return g;
    require(presentation.dominant.has_value(), "nonempty presentation without a dominant antigen");
    require(presentation.presenting.back() < l, "presenting antigen index out of range");
    const std::size_t d = *presentation.dominant;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : presentation.presenting) {
            if (j == d) {
                g(i, j) = paratope(i, d) > 0.0 ? kDominantWeight : 0.0;
            } else {
                g(i, j) = kPresentingWeight;
            }
        }
    }
    return g;
}

Vector match_strength(const ParatopeMatrix& paratope, const Matrix& weights) {
    require(weights.rows() == paratope.antibodies() && weights.cols() == paratope.antigens(),
            "antigen weight shape differs from paratope");
    Vector s1(paratope.antibodies(), 0.0);
    for (std::size_t i = 0; i < s1.size(); ++i) {
        for (std::size_t j = 0; j < paratope.antigens(); ++j) s1[i] += paratope(i, j) * weights(i, j);
    }
    return s1;
}

AlphaChoice select_alpha(std::span<const double> s1) {
    require(!s1.empty(), "S1 is empty");
    const std::size_t best = argmax_lowest(s1);
    if (s1[best] > 0.0) return {best, false};
    log::debug("select_alpha: all match strengths are zero, falling back to antibody 0");
    return {0, true};
}

AlphaChoice select_alpha(std::span<const double> s1, const ParatopeMatrix& paratope,
                         std::optional<std::size_t> dominant) {
    require(s1.size() == paratope.antibodies(), "S1 length differs from antibody count");
    AlphaChoice choice = select_alpha(s1);
    if (!choice.degenerate || !dominant) return choice;
    for (std::size_t i = 0; i < paratope.antibodies(); ++i) {
        if (paratope(i, *dominant) > 0.0) return {i, true};
    }
    return choice;
}

CompetingSet competing_set(const ParatopeMatrix& paratope, const AntigenPresentation& presentation,
                           std::size_t alpha) {
    require(alpha < paratope.antibodies(), "alpha out of range");
    CompetingSet h(paratope.antibodies(), 0);
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (i == alpha) continue;
        double match = 0.0;
        for (std::size_t j : presentation.presenting) match += paratope(i, j);
        h[i] = match > 0.0 ? 1 : 0;
    }
    return h;
}

Vector suppression(const ParatopeMatrix& paratope, const IdiotopeMatrix& idiotope, std::size_t alpha,
                   const CompetingSet& competing, const ConcentrationVector& c) {
    check_shapes(paratope, idiotope, alpha, competing, c);
    Vector s2(paratope.antibodies(), 0.0);
    for (std::size_t i = 0; i < s2.size(); ++i) {
        if (!competing[i]) continue;
        double sum = 0.0;
        for (std::size_t m = 0; m < paratope.antigens(); ++m) sum += paratope(alpha, m) * idiotope(i, m);
        s2[i] = sum * c[i] * c[alpha];
    }
    return s2;
}

Vector stimulation(const ParatopeMatrix& paratope, const IdiotopeMatrix& idiotope, std::size_t alpha,
                   const CompetingSet& competing, const ConcentrationVector& c) {
    check_shapes(paratope, idiotope, alpha, competing, c);
    Vector s3(paratope.antibodies(), 0.0);
    for (std::size_t i = 0; i < s3.size(); ++i) {
        if (!competing[i]) continue;
        double sum = 0.0;
        for (std::size_t p = 0; p < paratope.antigens(); ++p) {
            sum += (1.0 - paratope(i, p)) * idiotope(alpha, p);
        }
        s3[i] = sum * c[i] * c[alpha];
    }
    return s3;
}

Vector global_strength(std::span<const double> s1, std::span<const double> s2, std::span<const double> s3,
                       double k1) {
    require(s1.size() == s2.size() && s1.size() == s3.size(), "strength vectors differ in length");
    Vector sg(s1.size());
    for (std::size_t i = 0; i < sg.size(); ++i) sg[i] = s1[i] - k1 * s2[i] + s3[i];
    return sg;
}

ConcentrationVector update_concentrations(const ConcentrationVector& c, std::span<const double> sg,
                                          const ImmuneParams& params) {
    require(sg.size() == c.size(), "Sg length differs from concentration length");
    std::vector<double> next(c.size());
    for (std::size_t i = 0; i < next.size(); ++i) {
        if (!std::isfinite(sg[i])) throw NumericError("non-finite global strength for antibody " + std::to_string(i));
        next[i] = std::max(params.floor, c[i] + params.b * sg[i] - params.k2 * c[i]);
    }
    return ConcentrationVector(std::move(next));
}

NormalizeResult normalize(const ConcentrationVector& c, Normalization mode) {
    const double n = static_cast<double>(c.size());
    const double target = mode == Normalization::mean_one ? n : 1.0;
    const double total = c.sum();
    if (!(total > 0.0)) {
        log::warn("normalize: concentration sum is zero, resetting to uniform");
        return {ConcentrationVector::uniform(c.size(), target / n), true};
    }
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = target * c[i] / total;
    return {ConcentrationVector(std::move(out)), false};
}

std::size_t select_beta(const ConcentrationVector& c) {
    require(c.size() > 0, "empty concentration vector");
    return argmax_lowest(c.values());
}

StepResult idiotypic_step(const ImmuneState& state, const AntigenPresentation& presentation) {
    state.validate();
    const auto& p = state.paratope;
    const auto& id = state.idiotope;
    const auto& c = state.concentrations;

    StepResult r;
    const Matrix g = antigen_weights(presentation, p);
    r.s1 = match_strength(p, g);
    const AlphaChoice alpha = select_alpha(r.s1, p, presentation.dominant);
    r.alpha = alpha.index;
    r.degenerate_alpha = alpha.degenerate;

    const CompetingSet h = competing_set(p, presentation, r.alpha);
    r.s2 = suppression(p, id, r.alpha, h, c);
    r.s3 = stimulation(p, id, r.alpha, h, c);
    r.sg = global_strength(r.s1, r.s2, r.s3, state.params.k1);
    r.raw = update_concentrations(c, r.sg, state.params);

    NormalizeResult norm = normalize(r.raw, state.params.normalization);
    r.normalization_reset = norm.reset;
    r.beta = select_beta(norm.concentrations);
    r.state = ImmuneState{p, id, std::move(norm.concentrations), state.params};
    return r;
}

ParatopeMatrix reinforce(const ParatopeMatrix& paratope, std::size_t selected, std::size_t dominant,
                         double tau) {
    require(selected < paratope.antibodies() && dominant < paratope.antigens(),
            "reinforce index out of range");
    ParatopeMatrix out = paratope;
    out.m_(selected, dominant) = std::max(0.0, paratope(selected, dominant) + tau);
    return out;
}

IdiotopeMatrix default_idiotope() {
    // clang-format off
    static const std::vector<double> table = {
        0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0,
        0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0,
        0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0,
    };
    // clang-format on
    return IdiotopeMatrix(Matrix(kDefaultAntibodies, kDefaultAntigens, table));
}

ParatopeMatrix random_paratope(std::uint64_t seed, std::size_t antibodies, std::size_t antigens) {
    Rng rng(seed);
    Matrix m(antibodies, antigens);
    for (std::size_t i = 0; i < antibodies; ++i) {
        for (std::size_t j = 0; j < antigens; ++j) m(i, j) = rng.uniform(0.50, 0.75);
    }
    return ParatopeMatrix(std::move(m));
}

}  // namespace idiobot
