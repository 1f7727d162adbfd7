#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>

#include "idiobot/immune_core.hpp"
#include "idiobot/matrix_io.hpp"
#include "idiobot/random.hpp"

using namespace idiobot;

namespace {

bool bit_equal(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return std::memcmp(a.values().data(), b.values().data(), a.values().size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("matrix text round trip is bit exact") {
    Rng rng(61);
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 1 + rng.index(16), l = 1 + rng.index(8);
        Matrix m(n, l);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < l; ++j) m(i, j) = std::ldexp(rng.uniform(-1.0, 1.0), int(rng.index(80)) - 40);
        CHECK(bit_equal(read_matrix(write_matrix(m)), m));
    }
    Matrix edge(1, 5, std::vector<double>{0.1, 1e-300, std::numeric_limits<double>::denorm_min(),
                                          std::numeric_limits<double>::max(), -0.0});
    CHECK(bit_equal(read_matrix(write_matrix(edge)), edge));
}

TEST_CASE("matrix text format") {
    const Matrix m(2, 3, std::vector<double>{0.5, 0.75, 1, 0, 0.25, 2});
    CHECK(write_matrix(m) == "2 3\n0.5 0.75 1\n0 0.25 2\n");
    CHECK(read_matrix("2 3\n0.5 0.75 1\n0 0.25 2\n") == m);
}

TEST_CASE("shipped idiotope and a random paratope survive a file round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "idiobot_matrix_io";
    std::filesystem::create_directories(dir);
    save_matrix(dir / "i.txt", default_idiotope().matrix());
    CHECK(load_matrix(dir / "i.txt") == default_idiotope().matrix());
    const ParatopeMatrix p = random_paratope(9);
    save_matrix(dir / "p.txt", p.matrix());
    CHECK(bit_equal(load_matrix(dir / "p.txt"), p.matrix()));
    std::filesystem::remove_all(dir);
}

TEST_CASE("malformed matrix text") {
    CHECK_THROWS_AS(read_matrix(""), ParseError);
    CHECK_THROWS_AS(read_matrix("2 2\n1 2\n3\n"), ParseError);
    CHECK_THROWS_AS(read_matrix("1 2\n1 x\n"), ParseError);
    CHECK_THROWS_AS(read_matrix("1 1\n1\n2\n"), ParseError);
    try {
        read_matrix("2 2\n1 2\n3 oops\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS(load_matrix("/nonexistent/matrix.txt"));
}

TEST_CASE("shortest double formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
    double v = 0;
    CHECK(parse_double("1e-3", v));
    CHECK(v == 0.001);
    CHECK_FALSE(parse_double("1.0x", v));
    CHECK_FALSE(parse_double("", v));
}
