#pragma once

// Independent reference implementations used to cross-check the library.
// They deliberately share no code with the components they check beyond
// plain data types.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "idiobot/geometry.hpp"
#include "idiobot/matrix.hpp"

namespace idiobot::oracle {

// --- immune network ------------------------------------------------------

struct NetworkInput {
    Matrix paratope;              // N x L
    Matrix idiotope;              // N x L
    std::vector<double> c;        // N
    std::vector<std::size_t> presenting;
    std::optional<std::size_t> dominant;
    double b = 80.0, k1 = 0.65, k2 = 0.05, floor = 1e-6;
    bool unit_sum = false;
};

struct NetworkOutput {
    std::size_t alpha = 0;
    std::vector<double> s2, s3, sg;
    std::vector<double> c_raw;   // after the concentration update
    std::vector<double> c_norm;  // after renormalization
    std::size_t beta = 0;
};

/// Evaluates one network step through the explicit matching matrices U, V'
/// and W' rather than the staged pipeline.
NetworkOutput direct_step(const NetworkInput& in);

/// Random instance with N <= max_n antibodies and L <= max_l antigens.
/// Paratope entries include exact zeros so the degenerate branches are hit.
NetworkInput random_instance(std::uint64_t seed, std::size_t max_n, std::size_t max_l);

// --- geometry ------------------------------------------------------------

/// Ray distance to the nearest segment by solving the 2x2 system with
/// Cramer's rule; `max_range` when nothing is hit.
double ray_cast(Vec2 origin, Vec2 dir, std::span<const Segment> segments, double max_range);

/// Same query by marching the ray in small increments and bisecting the
/// first step that crosses a segment. Accurate to roughly `tol`.
double ray_march(Vec2 origin, Vec2 dir, std::span<const Segment> segments, double max_range,
                 double tol = 1e-9);

// --- statistics ----------------------------------------------------------

/// Welch t statistic for mean(b) - mean(a).
double welch_t(std::span<const double> a, std::span<const double> b);

/// One-tailed permutation test that mean(a) < mean(b), resampling group
/// labels and comparing the Welch statistic. Returns (1 - p) * 100.
double permutation_level(std::span<const double> a, std::span<const double> b, std::size_t resamples,
                         std::uint64_t seed);

// --- published results ---------------------------------------------------

struct PublishedRow {
    const char* system;
    double T, sigma, F;
};

/// Per-system means reported for the first maze world.
std::span<const PublishedRow> published_m1();

/// phi and F recomputed from the published means by hand arithmetic.
double published_phi();
double published_fitness(double T, double sigma, double phi);

}  // namespace idiobot::oracle
