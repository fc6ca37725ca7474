#include <doctest.h>

#include <random>

#include "bqk/integer_matrix.hpp"

using namespace bqk;

namespace {

bool diagonal_chain(const SmithForm& f) {
    const IntegerMatrix& S = f.S;
    for (std::size_t r = 0; r < S.rows(); ++r)
        for (std::size_t c = 0; c < S.cols(); ++c)
            if (r != c && S(r, c) != 0) return false;
    const auto d = f.invariant_factors();
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] <= 0) return false;
        if (i + 1 < d.size() && d[i + 1] % d[i] != 0) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("textbook Smith forms") {
    // diag(2, 6, 12) from a hand-reduced example
    const IntegerMatrix a(3, 3, {2, 4, 4, -6, 6, 12, 10, -4, -16});
    const SmithForm f = smith_normal_form(a);
    const auto d = f.invariant_factors();
    REQUIRE(d.size() == 3);
    CHECK(d[0] == 2);
    CHECK(d[1] == 6);
    CHECK(d[2] == 12);
    CHECK(f.U * a * f.V == f.S);

    // boundary of the projective plane's single 2-cell: relation 2a
    const SmithForm rp = smith_normal_form(IntegerMatrix(1, 1, {2}));
    CHECK(rp.invariant_factors() == std::vector<Integer>{2});

    // zero matrix has rank 0
    const SmithForm z = smith_normal_form(IntegerMatrix(2, 3));
    CHECK(z.rank == 0);
    CHECK(z.invariant_factors().empty());
}

TEST_CASE("unimodular transforms and their inverses") {
    const IntegerMatrix a(2, 3, {4, 6, 8, 10, 12, 14});
    const SmithForm f = smith_normal_form(a);
    CHECK(f.U * f.U_inv == IntegerMatrix::identity(2));
    CHECK(f.V * f.V_inv == IntegerMatrix::identity(3));
    CHECK(abs(determinant(f.U)) == 1);
    CHECK(abs(determinant(f.V)) == 1);
    const auto d = f.invariant_factors();
    REQUIRE(d.size() == 2);
    CHECK(d[0] == 2);
    CHECK(d[1] == 6);  // gcd of the 2x2 minors is 12
}

TEST_CASE("random round trip") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t r = 1 + rng() % 8, c = 1 + rng() % 8;
        IntegerMatrix a(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) a(i, j) = static_cast<long>(rng() % 19) - 9;
        const SmithForm f = smith_normal_form(a);
        REQUIRE(f.U * a * f.V == f.S);
        REQUIRE(f.U_inv * f.S * f.V_inv == a);
        REQUIRE(diagonal_chain(f));
    }
}

TEST_CASE("determinant") {
    CHECK(determinant(IntegerMatrix(2, 2, {1, 2, 3, 4})) == -2);
    CHECK(determinant(IntegerMatrix(3, 3, {2, 0, 0, 0, 3, 0, 0, 0, 5})) == 30);
    CHECK(determinant(IntegerMatrix(2, 2, {1, 2, 2, 4})) == 0);
}
