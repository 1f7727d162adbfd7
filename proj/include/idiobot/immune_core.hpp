#pragma once

// Reduced idiotypic network used for behaviour arbitration.
//
// Each control step the presenting antigens are weighted into an antigen
// array G, every antibody's strength of match S1 is taken against it and the
// best match alpha is found. Alpha then suppresses (S2) and stimulates (S3)
// every competing antibody through the fixed idiotope matrix. The resulting
// global strength Sg drives a discrete concentration update that is
// renormalized, and the antibody with the highest concentration (beta) is the
// one executed.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "idiobot/matrix.hpp"

namespace idiobot {

inline constexpr std::size_t kDefaultAntibodies = 16;
inline constexpr std::size_t kDefaultAntigens = 8;

enum class Normalization {
    mean_one,  ///< concentrations sum to N; all start at 1.0
    unit_sum,  ///< concentrations sum to 1
};

struct ImmuneParams {
    double b = 80.0;
    double k1 = 0.65;
    double k2 = 0.05;
    std::size_t num_antibodies = kDefaultAntibodies;
    std::size_t num_antigens = kDefaultAntigens;
    double floor = 1e-6;  ///< lower bound for any concentration after an update
    Normalization normalization = Normalization::mean_one;

    /// Throws StructuralError if any invariant is violated.
    void validate() const;
};

/// RL-learned match scores between antibodies (rows) and antigens (columns).
/// Entries are never negative.
class ParatopeMatrix {
public:
    ParatopeMatrix() = default;
    explicit ParatopeMatrix(Matrix scores);

    [[nodiscard]] std::size_t antibodies() const noexcept { return m_.rows(); }
    [[nodiscard]] std::size_t antigens() const noexcept { return m_.cols(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
    [[nodiscard]] const Matrix& matrix() const noexcept { return m_; }

    bool operator==(const ParatopeMatrix&) const = default;

private:
    friend ParatopeMatrix reinforce(const ParatopeMatrix&, std::size_t, std::size_t, double);
    Matrix m_;
};

/// Fixed disallowed antibody-antigen combinations; values are 0, 0.5 or 1.
class IdiotopeMatrix {
public:
    IdiotopeMatrix() = default;
    explicit IdiotopeMatrix(Matrix weights);

    [[nodiscard]] std::size_t antibodies() const noexcept { return m_.rows(); }
    [[nodiscard]] std::size_t antigens() const noexcept { return m_.cols(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
    [[nodiscard]] const Matrix& matrix() const noexcept { return m_; }

    bool operator==(const IdiotopeMatrix&) const = default;

private:
    Matrix m_;
};

class ConcentrationVector {
public:
    ConcentrationVector() = default;
    explicit ConcentrationVector(std::vector<double> values);

    static ConcentrationVector uniform(std::size_t n, double value = 1.0) {
        return ConcentrationVector(std::vector<double>(n, value));
    }

    [[nodiscard]] std::size_t size() const noexcept { return c_.size(); }
    double operator[](std::size_t i) const noexcept { return c_[i]; }
    [[nodiscard]] std::span<const double> values() const noexcept { return c_; }
    [[nodiscard]] double sum() const noexcept;

    bool operator==(const ConcentrationVector&) const = default;

private:
    std::vector<double> c_;
};

/// Presenting antigens for one step. `dominant` is empty only when nothing
/// presents; otherwise it is a member of `presenting`.
struct AntigenPresentation {
    std::vector<std::size_t> presenting;  // sorted, unique
    std::optional<std::size_t> dominant;

    static AntigenPresentation none() { return {}; }
    /// Builds and validates a presentation. Throws StructuralError.
    static AntigenPresentation make(std::vector<std::size_t> presenting, std::size_t dominant);

    [[nodiscard]] bool presents(std::size_t antigen) const noexcept;
    [[nodiscard]] bool empty() const noexcept { return presenting.empty(); }
};

struct ImmuneState {
    ParatopeMatrix paratope;
    IdiotopeMatrix idiotope;
    ConcentrationVector concentrations;
    ImmuneParams params;

    /// All concentrations start at 1.0 (or 1/N in the unit-sum variant).
    static ImmuneState create(ParatopeMatrix paratope, IdiotopeMatrix idiotope,
                              ImmuneParams params = {});
    void validate() const;
};

using Vector = std::vector<double>;
using CompetingSet = std::vector<std::uint8_t>;

// --- individual stages --------------------------------------------------

/// Antigen array G: 2 for the dominant antigen (0 if the antibody's paratope
/// score for it is 0), 0.25 for other presenting antigens, 0 elsewhere.
Matrix antigen_weights(const AntigenPresentation& presentation, const ParatopeMatrix& paratope);

/// S1[i] = sum_j P[i][j] * G[i][j].
Vector match_strength(const ParatopeMatrix& paratope, const Matrix& weights);

struct AlphaChoice {
    std::size_t index = 0;
    bool degenerate = false;  ///< every S1 was zero
};

/// Argmax of S1, lowest index on ties. When S1 is all zero the lowest antibody
/// with a nonzero score for the dominant antigen is used, else antibody 0.
AlphaChoice select_alpha(std::span<const double> s1, const ParatopeMatrix& paratope,
                         std::optional<std::size_t> dominant);
AlphaChoice select_alpha(std::span<const double> s1);

/// H[i] = 1 iff i != alpha and antibody i scores above zero on some presenting antigen.
CompetingSet competing_set(const ParatopeMatrix& paratope, const AntigenPresentation& presentation,
                           std::size_t alpha);

/// Suppression S2[i] = sum_m P[alpha][m] I[i][m] H[i] C[i] C[alpha].
Vector suppression(const ParatopeMatrix& paratope, const IdiotopeMatrix& idiotope,
                   std::size_t alpha, const CompetingSet& competing,
                   const ConcentrationVector& c);

/// Stimulation S3[i] = sum_p (1 - P[i][p]) I[alpha][p] H[i] C[i] C[alpha].
Vector stimulation(const ParatopeMatrix& paratope, const IdiotopeMatrix& idiotope,
                   std::size_t alpha, const CompetingSet& competing,
                   const ConcentrationVector& c);

/// Sg = S1 - k1 * S2 + S3.
Vector global_strength(std::span<const double> s1, std::span<const double> s2,
                       std::span<const double> s3, double k1);

/// C'[i] = max(floor, C[i] + b * Sg[i] - k2 * C[i]). Throws NumericError on
/// non-finite input.
ConcentrationVector update_concentrations(const ConcentrationVector& c, std::span<const double> sg,
                                          const ImmuneParams& params);

struct NormalizeResult {
    ConcentrationVector concentrations;
    bool reset = false;  ///< the sum was zero and the vector was reset to uniform
};

NormalizeResult normalize(const ConcentrationVector& c, Normalization mode = Normalization::mean_one);

/// Argmax of the normalized concentrations, lowest index on ties.
std::size_t select_beta(const ConcentrationVector& c);

// --- composed step ------------------------------------------------------

struct StepResult {
    std::size_t alpha = 0;
    std::size_t beta = 0;
    bool degenerate_alpha = false;
    bool normalization_reset = false;
    Vector s1, s2, s3, sg;
    ConcentrationVector raw;  ///< concentrations before normalization
    ImmuneState state;        ///< updated state; paratope unchanged

    [[nodiscard]] bool idiotypic_difference() const noexcept { return alpha != beta; }
};

StepResult idiotypic_step(const ImmuneState& state, const AntigenPresentation& presentation);

/// P'[selected][d] = max(0, P[selected][d] + tau); every other entry is kept.
ParatopeMatrix reinforce(const ParatopeMatrix& paratope, std::size_t selected,
                         std::size_t dominant, double tau);

/// The fixed 16x8 idiotope used by the idiotypic controller.
IdiotopeMatrix default_idiotope();

/// Entries drawn uniformly from [0.50, 0.75], deterministic per seed.
ParatopeMatrix random_paratope(std::uint64_t seed, std::size_t antibodies = kDefaultAntibodies,
                               std::size_t antigens = kDefaultAntigens);

}  // namespace idiobot
