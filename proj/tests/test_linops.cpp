#include <doctest.h>

#include <sstream>
#include <thread>

#include "amprestore/linops.hpp"
#include "oracles.hpp"

using namespace amprestore;

namespace {

double max_err(std::span<const double> a, std::span<const double> b) { return oracle::max_abs_diff(a, b); }

}  // namespace

TEST_CASE("dct_forward of a constant excites only the DC coefficient") {
    const Signal x{1, 1, 1, 1};
    const Signal expected{2, 0, 0, 0};
    CHECK(max_err(dct_forward(x), expected) < 1e-15);
}

TEST_CASE("dct_forward of an impulse matches the definition oracle") {
    const Signal x{1, 0, 0, 0};
    // Frozen from oracle::naive_dct.
    const Signal expected{0.5, 0.6533, 0.5, 0.2706};
    CHECK(max_err(dct_forward(x), expected) < 1e-4);
    CHECK(max_err(dct_forward(x), oracle::naive_dct(x)) < 1e-15);
}

TEST_CASE("dct round trips") {
    const Signal x{1, 2, 3, 4};
    CHECK(max_err(dct_inverse(dct_forward(x)), x) < 1e-12);
    CHECK(max_err(dct_inverse(Signal{2, 0, 0, 0}), Signal{1, 1, 1, 1}) < 1e-15);

    std::mt19937_64 rng(3);
    for (std::size_t m : {1u, 2u, 4u, 64u, 512u, 12u, 100u}) {
        const Signal c = oracle::random_vector(rng, m);
        CHECK(max_err(dct_forward(dct_inverse(c)), c) < 1e-12);
        CHECK(max_err(dct_inverse(dct_forward(c)), c) < 1e-10);
    }
}

TEST_CASE("dct_inverse of e_1 is column 1 of the DCT-II transpose") {
    const Signal e1{0, 1, 0, 0};
    const auto c = oracle::dct_matrix(4);
    const Signal got = dct_inverse(e1);
    for (std::size_t n = 0; n < 4; ++n) {
        const double expected = std::sqrt(2.0 / 4.0) * std::cos(std::numbers::pi * (2.0 * n + 1.0) / 8.0);
        CHECK(std::abs(got[n] - expected) < 1e-15);
        CHECK(std::abs(got[n] - c[1 * 4 + n]) < 1e-15);
    }
}

TEST_CASE("fast dct agrees with the naive definition") {
    std::mt19937_64 rng(11);
    for (std::size_t m : {4u, 8u, 64u, 512u}) {
        CHECK(DctPlan(m).is_fast());
        const Signal x = oracle::random_vector(rng, m);
        CHECK(max_err(dct_forward(x), oracle::naive_dct(x)) < 1e-9);
        CHECK(max_err(dct_inverse(x), oracle::naive_idct(x)) < 1e-9);
    }
}

TEST_CASE("non power-of-two lengths use the direct path") {
    std::mt19937_64 rng(12);
    for (std::size_t m : {3u, 12u, 100u}) {
        CHECK_FALSE(DctPlan(m).is_fast());
        const Signal x = oracle::random_vector(rng, m);
        CHECK(max_err(dct_forward(x), oracle::naive_dct(x)) < 1e-12);
    }
}

TEST_CASE("apply examples") {
    CHECK(make_identity(4)->apply(Signal{1, 2, 3, 4}) == Signal{1, 2, 3, 4});

    const auto stacked = make_stacked(make_dct_synthesis(4), make_identity(4));
    CHECK(stacked->rows() == 4);
    CHECK(stacked->cols() == 8);
    CHECK(max_err(stacked->apply(Signal{2, 0, 0, 0, 0.1, 0, 0, 0}), Signal{1.1, 1, 1, 1}) < 1e-15);

    const auto dense = make_dense(2, 3, {1, 0, 2, 0, 1, 0});
    CHECK(dense->apply(Signal{1, 1, 1}) == Signal{3, 1});
}

TEST_CASE("apply_adjoint examples") {
    CHECK(make_identity(2)->apply_adjoint(Signal{5, 6}) == Signal{5, 6});
    const auto stacked = make_stacked(make_dct_synthesis(4), make_identity(4));
    CHECK(max_err(stacked->apply_adjoint(Signal{1, 1, 1, 1}), Signal{2, 0, 0, 0, 1, 1, 1, 1}) < 1e-15);
    CHECK(make_dense(2, 3, {1, 0, 2, 0, 1, 0})->apply_adjoint(Signal{1, 2}) == Signal{1, 2, 2});
}

TEST_CASE("adjoint inner-product identity holds for every operator kind") {
    std::mt19937_64 rng(5);
    std::vector<OperatorPtr> ops{
        make_dct_synthesis(64),
        make_dct_synthesis(12),
        make_identity(16),
        make_dense(7, 13, oracle::random_vector(rng, 7 * 13)),
        make_stacked(make_dct_synthesis(32), make_identity(32)),
        make_stacked(make_dense(5, 4, oracle::random_vector(rng, 20)), make_identity(5)),
    };
    for (const auto& op : ops) {
        CAPTURE(to_string(op->kind()));
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const Signal x = oracle::random_vector(rng, op->cols());
            const Signal y = oracle::random_vector(rng, op->rows());
            const double lhs = dot(op->apply(x), y);
            const double rhs = dot(x, op->apply_adjoint(y));
            worst = std::max(worst, std::abs(lhs - rhs) / (norm2(x) * norm2(y)));
        }
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("dictionary columns have unit norm") {
    for (const auto& op : {make_dct_synthesis(64), make_identity(64),
                           make_stacked(make_dct_synthesis(64), make_identity(64))}) {
        const auto m = materialize(*op);
        for (std::size_t c = 0; c < op->cols(); ++c) {
            double s = 0.0;
            for (std::size_t r = 0; r < op->rows(); ++r) s += m[r * op->cols() + c] * m[r * op->cols() + c];
            CHECK(std::abs(std::sqrt(s) - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("dimension mismatches are reported") {
    const auto op = make_dense(2, 3, {1, 0, 2, 0, 1, 0});
    CHECK_THROWS_AS(op->apply(Signal{1, 1}), DimensionError);
    CHECK_THROWS_AS(op->apply_adjoint(Signal{1, 1, 1}), DimensionError);
    CHECK_THROWS_AS(make_stacked(make_identity(3), make_identity(4)), DimensionError);
    CHECK_THROWS_AS(make_dense(2, 2, {1, 2, 3}), DimensionError);
    DctPlan plan(8);
    Signal out(8);
    CHECK_THROWS_AS(plan.forward(Signal(4), out), DimensionError);
    try {
        op->apply(Signal{1});
    } catch (const DimensionError& e) {
        CHECK(e.expected() == 3);
        CHECK(e.actual() == 1);
    }
}

TEST_CASE("operators are safe to share across threads") {
    const auto op = make_stacked(make_dct_synthesis(256), make_identity(256));
    std::mt19937_64 rng(9);
    const Signal x = oracle::random_vector(rng, 512);
    const Signal expected = op->apply(x);
    std::vector<Signal> results(4);
    {
        std::vector<std::jthread> threads;
        for (auto& r : results)
            threads.emplace_back([&] {
                for (int i = 0; i < 200; ++i) r = op->apply(x);
            });
    }
    for (const auto& r : results) CHECK(r == expected);
}

TEST_CASE("dense matrix text format") {
    std::istringstream in("2 3\n1 0 2\n0 1 0.5e1\n");
    const auto m = read_dense_matrix(in);
    CHECK(m->rows() == 2);
    CHECK(m->cols() == 3);
    CHECK(m->at(1, 2) == 5.0);

    std::ostringstream out;
    write_dense_matrix(out, *m);
    std::istringstream back(out.str());
    CHECK(read_dense_matrix(back)->apply(Signal{1, 1, 1}) == m->apply(Signal{1, 1, 1}));

    std::istringstream bad_header("2\n1 2\n");
    CHECK_THROWS_AS(read_dense_matrix(bad_header), ParseError);
    std::istringstream short_row("2 2\n1 2\n3\n");
    CHECK_THROWS_WITH_AS(read_dense_matrix(short_row, "m.txt"), doctest::Contains("m.txt:3"), ParseError);
    std::istringstream missing_row("2 2\n1 2\n");
    CHECK_THROWS_AS(read_dense_matrix(missing_row), ParseError);
    std::istringstream junk("1 2\n1 x\n");
    CHECK_THROWS_AS(read_dense_matrix(junk), ParseError);
    std::istringstream nan("1 1\nnan\n");
    CHECK_THROWS_AS(read_dense_matrix(nan), ParseError);

    std::istringstream vec("1 2\n3\n\n4.5\n");
    CHECK(read_vector(vec) == Signal{1, 2, 3, 4.5});
    std::istringstream empty("");
    CHECK_THROWS_AS(read_vector(empty), ParseError);
}
