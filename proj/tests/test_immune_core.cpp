#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "idiobot/immune_core.hpp"
#include "idiobot/random.hpp"
#include "oracles.hpp"

using namespace idiobot;

namespace {

ParatopeMatrix para(std::size_t n, std::size_t l, std::vector<double> v) {
    return ParatopeMatrix(Matrix(n, l, std::move(v)));
}

// The small worked instance used throughout: three antibodies, two antigens.
ParatopeMatrix three_by_two() { return para(3, 2, {0.6, 0.5, 0.7, 0.2, 0.1, 0.9}); }

IdiotopeMatrix top_left_idiotope(std::size_t n, std::size_t l) {
    const IdiotopeMatrix full = default_idiotope();
    Matrix m(n, l);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < l; ++j) m(i, j) = full(i, j);
    return IdiotopeMatrix(m);
}

ImmuneParams small_params(std::size_t n, std::size_t l) {
    ImmuneParams p;
    p.num_antibodies = n;
    p.num_antigens = l;
    return p;
}

}  // namespace

TEST_CASE("antigen weights: dominant gets 2, others 0.25, absent 0") {
    const auto pres = AntigenPresentation::make({0, 1}, 0);
    const ParatopeMatrix p = para(2, 3, {0.6, 0.5, 0.4, 0.0, 0.5, 0.4});
    const Matrix g = antigen_weights(pres, p);
    CHECK(g(0, 0) == 2.0);
    CHECK(g(0, 1) == 0.25);
    CHECK(g(0, 2) == 0.0);
    // zero paratope score on the dominant antigen zeroes its weight
    CHECK(g(1, 0) == 0.0);
    CHECK(g(1, 1) == 0.25);

    const Matrix none = antigen_weights(AntigenPresentation::none(), p);
    for (double v : none.values()) CHECK(v == 0.0);
}

TEST_CASE("antigen weights reject a presentation outside the matrix") {
    const auto pres = AntigenPresentation::make({0, 3}, 3);
    CHECK_THROWS_AS(antigen_weights(pres, three_by_two()), StructuralError);
}

TEST_CASE("presentation validation") {
    CHECK_THROWS_AS(AntigenPresentation::make({0, 1}, 2), StructuralError);
    const auto p = AntigenPresentation::make({3, 1, 1}, 3);
    CHECK(p.presenting == std::vector<std::size_t>{1, 3});
    CHECK(p.presents(3));
    CHECK_FALSE(p.presents(0));
}

TEST_CASE("match strength on the three-by-two instance") {
    const auto p = three_by_two();
    const auto s1 = match_strength(p, antigen_weights(AntigenPresentation::make({0, 1}, 0), p));
    REQUIRE(s1.size() == 3);
    CHECK(s1[0] == doctest::Approx(1.325).epsilon(1e-15));
    CHECK(s1[1] == doctest::Approx(1.45).epsilon(1e-15));
    CHECK(s1[2] == doctest::Approx(0.425).epsilon(1e-15));

    const auto zero = match_strength(p, Matrix(3, 2, 0.0));
    for (double v : zero) CHECK(v == 0.0);
}

TEST_CASE("alpha selection") {
    CHECK(select_alpha(std::vector<double>{1.325, 1.45, 0.425}).index == 1);
    CHECK(select_alpha(std::vector<double>{0.5, 0.5}).index == 0);
    const auto deg = select_alpha(std::vector<double>{0.0, 0.0, 0.0});
    CHECK(deg.index == 0);
    CHECK(deg.degenerate);

    // degenerate with a dominant antigen falls to the first antibody scoring on it
    const auto p = para(3, 2, {0.0, 0.4, 0.0, 0.0, 0.3, 0.0});
    const auto d = select_alpha(std::vector<double>{0.0, 0.0, 0.0}, p, 0);
    CHECK(d.index == 2);
    CHECK(d.degenerate);
}

TEST_CASE("competing set excludes alpha and non-matching antibodies") {
    const auto p = para(3, 2, {0.6, 0.5, 0.7, 0.2, 0.0, 0.0});
    const auto pres = AntigenPresentation::make({0, 1}, 0);
    CHECK(competing_set(p, pres, 1) == CompetingSet{1, 0, 0});
    CHECK(competing_set(p, AntigenPresentation::none(), 1) == CompetingSet{0, 0, 0});
    CHECK(competing_set(three_by_two(), pres, 0) == CompetingSet{0, 1, 1});
}

TEST_CASE("suppression and stimulation single-term cases") {
    const auto c = ConcentrationVector::uniform(2);
    {
        const auto p = para(2, 1, {0.8, 0.3});
        const IdiotopeMatrix id(Matrix(2, 1, std::vector<double>{0.0, 1.0}));
        const auto s2 = suppression(p, id, 0, {0, 1}, c);
        CHECK(s2[1] == doctest::Approx(0.8));
        CHECK(s2[0] == 0.0);
        CHECK(suppression(p, id, 0, {0, 0}, c)[1] == 0.0);
    }
    {
        const auto p = para(2, 1, {0.9, 0.25});
        const IdiotopeMatrix id(Matrix(2, 1, std::vector<double>{1.0, 0.0}));
        CHECK(stimulation(p, id, 0, {0, 1}, c)[1] == doctest::Approx(0.75));
        const IdiotopeMatrix silent(Matrix(2, 1, 0.0));
        CHECK(stimulation(p, silent, 0, {0, 1}, c)[1] == 0.0);
        const auto ones = para(2, 1, {1.0, 1.0});
        CHECK(stimulation(ones, id, 0, {0, 1}, c)[1] == 0.0);
    }
}

TEST_CASE("stimulation goes negative once a paratope entry exceeds one") {
    const auto p = para(2, 1, {0.9, 1.4});
    const IdiotopeMatrix id(Matrix(2, 1, std::vector<double>{1.0, 1.0}));
    CHECK(stimulation(p, id, 0, {0, 1}, ConcentrationVector::uniform(2))[1] == doctest::Approx(-0.4));
}

TEST_CASE("global strength") {
    const auto sg = global_strength(std::vector<double>{1.0}, std::vector<double>{0.8},
                                    std::vector<double>{0.2}, 0.65);
    CHECK(sg[0] == doctest::Approx(0.68));
    CHECK(global_strength(std::vector<double>{1.5}, std::vector<double>{0.0}, std::vector<double>{0.0}, 0.65)[0] ==
          1.5);
    CHECK(global_strength(std::vector<double>{1.0}, std::vector<double>{9.0}, std::vector<double>{0.5}, 0.0)[0] ==
          1.5);
}

TEST_CASE("concentration update") {
    const ImmuneParams params;
    CHECK(update_concentrations(ConcentrationVector({1.0}), std::vector<double>{0.0}, params)[0] ==
          doctest::Approx(0.95));
    CHECK(update_concentrations(ConcentrationVector({1.0}), std::vector<double>{0.01}, params)[0] ==
          doctest::Approx(1.75));
    CHECK(update_concentrations(ConcentrationVector({0.001}), std::vector<double>{-1.0}, params)[0] == params.floor);
    CHECK_THROWS_AS(update_concentrations(ConcentrationVector({1.0}), std::vector<double>{NAN}, params),
                    NumericError);
}

TEST_CASE("normalization") {
    const auto eq = normalize(ConcentrationVector({2.0, 2.0, 2.0})).concentrations;
    for (double v : eq.values()) CHECK(v == doctest::Approx(1.0));

    const auto two = normalize(ConcentrationVector({3.0, 1.0})).concentrations;
    CHECK(two[0] == doctest::Approx(1.5));
    CHECK(two[1] == doctest::Approx(0.5));

    const auto unit = normalize(ConcentrationVector({3.0, 1.0}), Normalization::unit_sum).concentrations;
    CHECK(unit[0] == doctest::Approx(0.75));

    const auto reset = normalize(ConcentrationVector({0.0, 0.0}));
    CHECK(reset.reset);
    CHECK(reset.concentrations[1] == 1.0);
}

TEST_CASE("normalization is scale invariant") {
    Rng rng(4);
    for (int k = 0; k < 200; ++k) {
        std::vector<double> v(6), w(6);
        const double scale = rng.uniform(0.01, 100.0);
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = rng.uniform(0.001, 5.0);
            w[i] = v[i] * scale;
        }
        const auto a = normalize(ConcentrationVector(v)).concentrations;
        const auto b = normalize(ConcentrationVector(w)).concentrations;
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
        CHECK(select_beta(a) == select_beta(ConcentrationVector(w)));
    }
}

TEST_CASE("beta selection") {
    CHECK(select_beta(ConcentrationVector({0.9, 1.1})) == 1);
    CHECK(select_beta(ConcentrationVector::uniform(4)) == 0);
}

TEST_CASE("three-by-two instance with idiotope rows matches the direct evaluation") {
    const auto p = three_by_two();
    const auto id = top_left_idiotope(3, 2);
    const ImmuneState st = ImmuneState::create(p, id, small_params(3, 2));
    const auto pres = AntigenPresentation::make({0, 1}, 0);
    const StepResult r = idiotypic_step(st, pres);

    oracle::NetworkInput in;
    in.paratope = p.matrix();
    in.idiotope = id.matrix();
    in.c = {1.0, 1.0, 1.0};
    in.presenting = {0, 1};
    in.dominant = 0;
    const auto o = oracle::direct_step(in);

    CHECK(r.alpha == o.alpha);
    CHECK(r.beta == o.beta);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(r.s2[i] - o.s2[i]) <= 1e-12);
        CHECK(std::abs(r.s3[i] - o.s3[i]) <= 1e-12);
        CHECK(std::abs(r.sg[i] - o.sg[i]) <= 1e-12);
        CHECK(std::abs(r.state.concentrations[i] - o.c_norm[i]) <= 1e-12);
    }
}

TEST_CASE("full step agrees with the direct evaluation on random small instances") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const oracle::NetworkInput in = oracle::random_instance(seed, 5, 3);
        ImmuneParams params = small_params(in.paratope.rows(), in.paratope.cols());
        params.b = in.b;
        params.k1 = in.k1;
        params.k2 = in.k2;
        ImmuneState st{ParatopeMatrix(in.paratope), IdiotopeMatrix(in.idiotope), ConcentrationVector(in.c), params};
        const AntigenPresentation pres =
            in.dominant ? AntigenPresentation::make(in.presenting, *in.dominant) : AntigenPresentation::none();
        const StepResult r = idiotypic_step(st, pres);
        const auto o = oracle::direct_step(in);
        CAPTURE(seed);
        CHECK(r.alpha == o.alpha);
        CHECK(r.beta == o.beta);
        for (std::size_t i = 0; i < in.c.size(); ++i) {
            CHECK(std::abs(r.raw[i] - o.c_raw[i]) <= 1e-9);
            CHECK(std::abs(r.state.concentrations[i] - o.c_norm[i]) <= 1e-9);
        }
    }
}

TEST_CASE("neutral idiotope: alpha and beta agree from uniform concentrations") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const ParatopeMatrix p = random_paratope(seed);
        const ImmuneState st = ImmuneState::create(p, IdiotopeMatrix(Matrix(16, 8, 0.0)));
        Rng rng(seed);
        std::vector<std::size_t> pres;
        for (std::size_t j = 0; j < 8; ++j)
            if (rng.uniform() < 0.5) pres.push_back(j);
        if (pres.empty()) pres.push_back(rng.index(8));
        const StepResult r = idiotypic_step(st, AntigenPresentation::make(pres, pres[rng.index(pres.size())]));
        CHECK(r.alpha == r.beta);
    }
}

TEST_CASE("neutral idiotope over a hundred consecutive steps") {
    ImmuneState st = ImmuneState::create(random_paratope(7), IdiotopeMatrix(Matrix(16, 8, 0.0)));
    Rng rng(77);
    for (int t = 0; t < 100; ++t) {
        const std::size_t d = rng.index(8);
        const StepResult r = idiotypic_step(st, AntigenPresentation::make({d}, d));
        CHECK(r.alpha == r.beta);
        st = r.state;
    }
}

TEST_CASE("default network shows some but not exclusive idiotypic difference") {
    ImmuneState st = ImmuneState::create(random_paratope(1), default_idiotope());
    Rng rng(2024);
    int diffs = 0;
    const int steps = 5000;
    for (int t = 0; t < steps; ++t) {
        std::vector<std::size_t> pres;
        for (std::size_t j = 0; j < 8; ++j)
            if (rng.uniform() < 0.3) pres.push_back(j);
        if (pres.empty()) pres.push_back(rng.index(8));
        const std::size_t d = pres[rng.index(pres.size())];
        const StepResult r = idiotypic_step(st, AntigenPresentation::make(pres, d));
        if (r.idiotypic_difference()) ++diffs;
        st = r.state;
        st.paratope = reinforce(st.paratope, r.beta, d, rng.uniform() < 0.5 ? 0.05 : -0.05);
    }
    CHECK(diffs > 0);
    CHECK(diffs < steps);
}

TEST_CASE("single antibody network") {
    const ImmuneState st = ImmuneState::create(para(1, 2, {0.6, 0.7}), IdiotopeMatrix(Matrix(1, 2, 0.5)),
                                               small_params(1, 2));
    const StepResult r = idiotypic_step(st, AntigenPresentation::make({1}, 1));
    CHECK(r.alpha == 0);
    CHECK(r.beta == 0);
    CHECK(r.state.concentrations[0] == doctest::Approx(1.0));
}

TEST_CASE("decay: concentrations fall by 0.95 per step and halve after 14") {
    const ImmuneParams params;
    ConcentrationVector c({1.0});
    for (int t = 1; t <= 14; ++t) {
        c = update_concentrations(c, std::vector<double>{0.0}, params);
        if (t == 13) CHECK(c[0] > 0.5);
    }
    CHECK(c[0] < 0.5);
    CHECK(c[0] == doctest::Approx(std::pow(0.95, 14)).epsilon(1e-12));
    CHECK(std::ceil(std::log(2.0) / -std::log(1.0 - params.k2)) == 14.0);
}

TEST_CASE("normalization and nonnegativity hold under arbitrary reinforcement") {
    ImmuneState st = ImmuneState::create(random_paratope(3), default_idiotope());
    Rng rng(99);
    for (int t = 0; t < 2000; ++t) {
        const std::size_t d = rng.index(8);
        const StepResult r = idiotypic_step(st, AntigenPresentation::make({d}, d));
        st = r.state;
        CHECK(std::abs(st.concentrations.sum() - 16.0) <= 1e-9);
        for (double v : st.concentrations.values()) CHECK(v >= 0.0);
        st.paratope = reinforce(st.paratope, r.beta, d, rng.uniform(-0.8, 0.3));
        for (double v : st.paratope.matrix().values()) CHECK(v >= 0.0);
    }
}

TEST_CASE("reinforcement") {
    const ParatopeMatrix p = para(2, 2, {0.6, 0.6, 0.6, 0.6});
    CHECK(reinforce(p, 1, 0, 0.05)(1, 0) == doctest::Approx(0.65));
    CHECK(reinforce(p, 1, 0, 0.05)(0, 0) == 0.6);
    CHECK(reinforce(p, 1, 0, -0.7)(1, 0) == 0.0);
    CHECK(reinforce(p, 1, 0, 0.0) == p);
}

TEST_CASE("fixed idiotope entries") {
    const IdiotopeMatrix id = default_idiotope();
    REQUIRE(id.antibodies() == 16);
    REQUIRE(id.antigens() == 8);
    CHECK(id(0, 0) == 0.5);
    CHECK(id(11, 5) == 1.0);
    CHECK(id(3, 0) == 0.0);
    const std::vector<std::pair<int, int>> halves = {{0, 0},  {0, 2},  {10, 0}, {10, 2},
                                                      {14, 0}, {14, 2}, {15, 0}, {15, 2}};
    int count = 0;
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 8; ++j)
            if (id(i, j) == 0.5) ++count;
    CHECK(count == 8);
    for (auto [i, j] : halves) CHECK(id(i, j) == 0.5);
}

TEST_CASE("random paratope range and determinism") {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const ParatopeMatrix p = random_paratope(s);
        for (double v : p.matrix().values()) {
            CHECK(v >= 0.5);
            CHECK(v <= 0.75);
        }
    }
    CHECK(random_paratope(5) == random_paratope(5));
    int differing = 0;
    for (std::uint64_t s = 0; s < 100; ++s)
        if (!(random_paratope(2 * s) == random_paratope(2 * s + 1))) ++differing;
    CHECK(differing == 100);
}

TEST_CASE("state validation catches shape mismatches") {
    ImmuneState st = ImmuneState::create(random_paratope(1), default_idiotope());
    CHECK_NOTHROW(st.validate());
    st.concentrations = ConcentrationVector::uniform(3);
    CHECK_THROWS_AS(st.validate(), StructuralError);

    ImmuneParams bad;
    bad.k2 = -1.0;
    CHECK_THROWS(bad.validate());
}
