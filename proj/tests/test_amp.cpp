#include <doctest.h>

#include <cstring>
#include <sstream>

#include "amprestore/amp.hpp"
#include "amprestore/metrics.hpp"
#include "oracles.hpp"

using namespace amprestore;

TEST_CASE("soft_threshold examples") {
    CHECK(soft_threshold(Signal{3, -0.5, 1.0}, 1.0) == Signal{2, 0, 0});
    const Signal v{0.3, -7, 0, 2.5};
    CHECK(soft_threshold(v, 0.0) == v);
    CHECK(soft_threshold(Signal{-2.5}, 1.5) == Signal{-1.0});
    CHECK_THROWS_AS(soft_threshold(v, -0.1), std::invalid_argument);
}

TEST_CASE("soft_threshold is odd, 1-Lipschitz and norm-shrinking") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> lam_dist(0.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Signal v = oracle::random_vector(rng, 32, 2.0);
        const Signal w = oracle::random_vector(rng, 32, 2.0);
        const double lam = lam_dist(rng);
        Signal neg(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) neg[i] = -v[i];
        const Signal ev = soft_threshold(v, lam);
        const Signal eneg = soft_threshold(neg, lam);
        const Signal ew = soft_threshold(w, lam);
        for (std::size_t i = 0; i < v.size(); ++i) {
            CHECK(eneg[i] == -ev[i]);
            CHECK(std::abs(ev[i] - ew[i]) <= std::abs(v[i] - w[i]) + 1e-15);
        }
        CHECK(norm2(ev) <= norm2(v));
    }
}

TEST_CASE("threshold policies") {
    SolverConfig cfg;
    AmpState s;
    s.z = {0, 0, 0, 0};
    cfg.policy = ResidualEnergyThreshold{1.0};
    CHECK(threshold_policy(s, cfg, 4) == 0.0);

    s.z = {1, 1, 1, 1};
    cfg.policy = ResidualEnergyThreshold{2.0};
    CHECK(threshold_policy(s, cfg, 4) == doctest::Approx(2.0));

    s.z = {1, -2, 3, -4};
    cfg.policy = MedianThreshold{1.0};
    CHECK(threshold_policy(s, cfg, 4) == doctest::Approx(2.5 / 0.6745));
    CHECK(threshold_policy(s, cfg, 4) == doctest::Approx(3.7064).epsilon(1e-4));
    s.z = {5, -1, 3};
    CHECK(threshold_policy(s, cfg, 3) == doctest::Approx(3.0 / 0.6745));

    cfg.policy = FixedThreshold{0.7};
    CHECK(threshold_policy(s, cfg, 3) == 0.7);
    CHECK_THROWS_AS(threshold_policy(s, cfg, 4), DimensionError);
}

TEST_CASE("threshold policy parsing") {
    CHECK(std::get<FixedThreshold>(parse_threshold_policy("fixed:0.25")).lambda == 0.25);
    CHECK(std::get<ResidualEnergyThreshold>(parse_threshold_policy("residual")).tau == 1.5);
    CHECK(std::get<MedianThreshold>(parse_threshold_policy("median:3")).tau == 3.0);
    CHECK(to_string(parse_threshold_policy("median:3")) == "median:3");
    CHECK_THROWS_AS(parse_threshold_policy("fixed"), std::invalid_argument);
    CHECK_THROWS_AS(parse_threshold_policy("residual:-1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_threshold_policy("hard:1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_threshold_policy("residual:1x"), std::invalid_argument);
}

TEST_CASE("solver config validation") {
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.max_iters == 28);
    CHECK(cfg.effective_onsager_cap(128, 256) == 2.0);
    cfg.max_iters = 0;
    CHECK_THROWS(cfg.validate());
    cfg = {};
    cfg.damping = 1.0;
    CHECK_THROWS(cfg.validate());
    cfg = {};
    cfg.onsager_cap = -1.0;
    CHECK_THROWS(cfg.validate());
    cfg = {};
    cfg.policy = FixedThreshold{-0.5};
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("amp_iterate on the identity reduces to thresholding y") {
    const auto op = make_identity(2);
    const Signal y{1, -3};
    SolverConfig cfg;
    cfg.policy = FixedThreshold{0.5};
    const AmpState s0 = initial_state(y, *op, cfg);
    CHECK(s0.x == Signal{0, 0});
    CHECK(s0.z == y);
    const AmpState s1 = amp_iterate(s0, *op, y, cfg);
    CHECK(s1.x == Signal{0.5, -2.5});
    CHECK(s1.support_size == 2);
    CHECK(s1.t == 1);
    // z1 = y - x1 + (2/2) z0
    CHECK(s1.z == Signal{1.5, -3.5});
}

TEST_CASE("amp_iterate matches a term-by-term evaluation on a 2x4 dense instance") {
    const std::vector<double> a{0.5, -0.2, 0.1, 0.7, 0.3, 0.8, -0.6, 0.1};
    const auto op = make_dense(2, 4, a);
    const Signal y{1.0, -0.4};
    SolverConfig cfg;
    cfg.policy = FixedThreshold{0.1};

    // Straight-line evaluation of one AMP step.
    auto script = [&](const Signal& x, const Signal& z, double lambda) {
        Signal pseudo(4), x1(4), z1(2);
        for (int j = 0; j < 4; ++j) pseudo[j] = x[j] + a[0 * 4 + j] * z[0] + a[1 * 4 + j] * z[1];
        int support = 0;
        for (int j = 0; j < 4; ++j) {
            const double m = std::abs(pseudo[j]) - lambda;
            x1[j] = m > 0 ? (pseudo[j] > 0 ? m : -m) : 0.0;
            support += x1[j] != 0.0;
        }
        const double onsager = std::min(support / 2.0, 4.0 / 2.0);
        for (int i = 0; i < 2; ++i) {
            double ax = 0.0;
            for (int j = 0; j < 4; ++j) ax += a[i * 4 + j] * x1[j];
            z1[i] = y[i] - ax + onsager * z[i];
        }
        return std::pair{x1, z1};
    };

    const AmpState s0 = initial_state(y, *op, cfg);
    const AmpState s1 = amp_iterate(s0, *op, y, cfg);
    const auto [x1, z1] = script(s0.x, s0.z, 0.1);
    CHECK(oracle::max_abs_diff(s1.x, x1) < 1e-14);
    CHECK(oracle::max_abs_diff(s1.z, z1) < 1e-14);
    // Hand-computed values.
    CHECK(oracle::max_abs_diff(s1.x, Signal{0.28, -0.42, 0.24, 0.56}) < 1e-12);
    CHECK(oracle::max_abs_diff(s1.z, Signal{2.36, -0.86}) < 1e-12);

    const AmpState s2 = amp_iterate(s1, *op, y, cfg);
    const auto [x2, z2] = script(s1.x, s1.z, 0.1);
    CHECK(oracle::max_abs_diff(s2.x, x2) < 1e-13);
    CHECK(oracle::max_abs_diff(s2.z, z2) < 1e-13);
}

TEST_CASE("thresholded entries are zero or carry the sign of the pseudo-data") {
    const GaussianInstance g = make_gaussian_instance(64, 128, 6, 0.01, 4);
    SolverConfig cfg;
    AmpState s = initial_state(g.measurements, *g.matrix, cfg);
    for (int t = 0; t < 10; ++t) {
        Signal pseudo = g.matrix->apply_adjoint(s.z);
        for (std::size_t i = 0; i < pseudo.size(); ++i) pseudo[i] += s.x[i];
        const AmpState next = amp_iterate(s, *g.matrix, g.measurements, cfg);
        for (std::size_t i = 0; i < next.x.size(); ++i) {
            if (next.x[i] == 0.0) continue;
            CHECK(std::signbit(next.x[i]) == std::signbit(pseudo[i]));
        }
        CHECK(next.support_size == count_nonzero(next.x));
        CHECK(next.t == s.t + 1);
        CHECK(next.lambda >= 0.0);
        s = next;
    }
}

TEST_CASE("amp_recover of a zero measurement stops immediately") {
    const GaussianInstance g = make_gaussian_instance(16, 32, 0, 0.0, 1);
    const RecoveryResult r = amp_recover(g.measurements, *g.matrix, SolverConfig{});
    CHECK(count_nonzero(r.estimate) == 0);
    CHECK(r.trace.size() == 1);
    CHECK(r.trace.back().t == 0);
    CHECK(r.converged);

    const RecoveryResult ist = ist_recover(g.measurements, *g.matrix, SolverConfig{});
    CHECK(count_nonzero(ist.estimate) == 0);
}

TEST_CASE("amp_recover solves a 128x256 Gaussian instance within 28 iterations") {
    const GaussianInstance g = make_gaussian_instance(128, 256, 12, 0.0, 7);
    const RecoveryResult amp = amp_recover(g.measurements, *g.matrix, SolverConfig{});
    CHECK(amp.trace.back().t <= 28);
    CHECK(relative_error(amp.estimate, g.truth) < 1e-2);

    // Long-run IST reaches the same point.
    SolverConfig slow;
    slow.max_iters = 10000;
    slow.tolerance = 1e-12;
    slow.policy = ResidualEnergyThreshold{2.5};
    const RecoveryResult ist = ist_recover(g.measurements, *g.matrix, slow);
    CHECK(relative_error(ist.estimate, g.truth) < 1e-6);
    CHECK(relative_error(amp.estimate, ist.estimate) < 1e-2);
}

TEST_CASE("a zero residual on the tiny instance recovers the exhaustive oracle support") {
    const SolverConfig cfg;
    int exact = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const GaussianInstance g = make_gaussian_instance(6, 12, 2, 0.0, seed);
        const auto best = oracle::best_support(g.matrix->data(), 6, 12, g.measurements, 2);
        std::vector<std::size_t> truth;
        for (std::size_t i = 0; i < 12; ++i)
            if (g.truth[i] != 0.0) truth.push_back(i);
        CHECK(best == truth);

        const RecoveryResult r = amp_recover(g.measurements, *g.matrix, cfg);
        if (r.converged) {
            ++exact;
            CHECK(oracle::top_k(r.estimate, 2) == best);
        }
    }
    CHECK(exact > 0);
}

TEST_CASE("ist keeps a zero estimate when lambda exceeds every correlation") {
    const GaussianInstance g = make_gaussian_instance(32, 64, 4, 0.0, 2);
    const Signal corr = g.matrix->apply_adjoint(g.measurements);
    double peak = 0.0;
    for (double c : corr) peak = std::max(peak, std::abs(c));
    SolverConfig cfg;
    cfg.policy = FixedThreshold{peak * 1.01};
    const RecoveryResult r = ist_recover(g.measurements, *g.matrix, cfg);
    CHECK(count_nonzero(r.estimate) == 0);
    for (const auto& row : r.trace) CHECK(row.residual_l2 == r.trace.front().residual_l2);
}

TEST_CASE("amp with a zero Onsager cap is bit-identical to ist") {
    const GaussianInstance g = make_gaussian_instance(128, 256, 12, 0.0, 3);
    SolverConfig cfg;
    cfg.policy = ResidualEnergyThreshold{2.5};
    cfg.max_iters = 60;
    const RecoveryResult ist = ist_recover(g.measurements, *g.matrix, cfg);
    cfg.onsager_cap = 0.0;
    const RecoveryResult amp = amp_recover(g.measurements, *g.matrix, cfg);
    CHECK(amp.trace == ist.trace);
    CHECK(std::memcmp(amp.estimate.data(), ist.estimate.data(), amp.estimate.size() * sizeof(double)) == 0);
}

TEST_CASE("ist needs more iterations than amp to reach 1e-2") {
    const GaussianInstance g = make_gaussian_instance(128, 256, 12, 0.0, 7);
    SolverConfig cfg;
    cfg.max_iters = 500;
    cfg.tolerance = 0.0;
    cfg.policy = ResidualEnergyThreshold{2.5};
    auto first_hit = [&](bool amp) {
        int hit = -1;
        auto obs = [&](const AmpState& s) {
            if (hit < 0 && relative_error(s.x, g.truth) < 1e-2) hit = s.t;
        };
        amp ? amp_recover(g.measurements, *g.matrix, cfg, obs) : ist_recover(g.measurements, *g.matrix, cfg, obs);
        return hit;
    };
    const int amp_hit = first_hit(true);
    const int ist_hit = first_hit(false);
    REQUIRE(amp_hit > 0);
    CHECK((ist_hit < 0 || ist_hit > amp_hit));
}

TEST_CASE("trace bookkeeping and determinism") {
    const GaussianInstance g = make_gaussian_instance(64, 128, 5, 0.01, 8);
    const SolverConfig cfg;
    const RecoveryResult a = amp_recover(g.measurements, *g.matrix, cfg);
    const RecoveryResult b = amp_recover(g.measurements, *g.matrix, cfg);
    CHECK(a.trace == b.trace);
    CHECK(a.estimate == b.estimate);
    CHECK(a.trace.back().support == count_nonzero(a.estimate));
    for (std::size_t i = 0; i < a.trace.size(); ++i) CHECK(a.trace[i].t == static_cast<int>(i));

    std::ostringstream csv;
    write_trace_csv(csv, a.trace);
    std::istringstream lines(csv.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header == "t,residual_l2,lambda,support");
    std::size_t rows = 0;
    for (std::string line; std::getline(lines, line);) ++rows;
    CHECK(rows == a.trace.size());
}

TEST_CASE("non-finite updates raise a divergence error with the partial trace") {
    const auto op = make_dense(1, 1, {1e200});
    const Signal y{1e300};
    SolverConfig cfg;
    cfg.policy = FixedThreshold{0.0};
    try {
        amp_recover(y, *op, cfg);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.iteration() == 1);
        REQUIRE(e.trace().size() == 1);
        CHECK(e.trace().front().t == 0);
    }
    CHECK_THROWS_AS(amp_recover(Signal{NAN}, *make_identity(1), cfg), std::invalid_argument);
    CHECK_THROWS_AS(amp_recover(Signal{1, 2}, *make_identity(3), cfg), DimensionError);
}

TEST_CASE("damping blends the residual update") {
    const auto op = make_identity(2);
    const Signal y{1, -3};
    SolverConfig cfg;
    cfg.policy = FixedThreshold{0.5};
    cfg.damping = 0.25;
    const AmpState s1 = amp_iterate(initial_state(y, *op, cfg), *op, y, cfg);
    // 0.75 * [1.5, -3.5] + 0.25 * [1, -3]
    CHECK(oracle::max_abs_diff(s1.z, Signal{1.375, -3.375}) < 1e-15);
}
