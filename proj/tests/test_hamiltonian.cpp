#include <doctest.h>

#include <cmath>
#include <random>

#include "mfg/hamiltonian.hpp"
#include "oracles.hpp"

using namespace mfg;

TEST_CASE("policy extraction") {
    const auto grid = GridSpec::make_1d(Bc::Periodic, 0.0, 3.0, 3, 0.1, 1); // h = 1
    ScalarField u(grid, FieldRole::Value);
    auto level = u.level(0);
    level[0] = 0.0;
    level[1] = 1.0;
    level[2] = 0.0;

    SUBCASE("hand gradient") {
        const auto q = extract_policy(u, 100.0);
        CHECK(q.ql(0, 1, 0) == doctest::Approx(1.0));
        CHECK(q.qr(0, 1, 0) == doctest::Approx(-1.0));
        // downhill node: positive part of D_L and negative part of D_R both vanish
        CHECK(q.ql(0, 0, 0) == 0.0);
        CHECK(q.qr(0, 2, 0) == 0.0);
    }
    SUBCASE("cap saturation") {
        long clipped = 0;
        const auto q = extract_policy(u, 0.5, &clipped);
        CHECK(q.ql(0, 1, 0) == doctest::Approx(0.5));
        CHECK(q.qr(0, 1, 0) == doctest::Approx(-0.5));
        CHECK(clipped == 2);
    }
    SUBCASE("constant field gives the zero policy") {
        ScalarField c(grid, FieldRole::Value);
        for (double& v : c.data()) v = 4.2;
        const auto q = extract_policy(c, 10.0);
        for (double v : q.data()) CHECK(v == 0.0);
    }
    SUBCASE("outputs stay in the admissible box") {
        std::mt19937_64 rng(41);
        const auto g = GridSpec::make_1d(Bc::Periodic, -1.0, 1.0, 16, 0.1, 4);
        ScalarField w(g, FieldRole::Value);
        for (double& v : w.data()) v = std::uniform_real_distribution<double>(-5.0, 5.0)(rng);
        const double cap = 3.0;
        const auto q = extract_policy(w, cap);
        for (int tau = 0; tau < q.levels(); ++tau) {
            for (int i = 0; i < g.node_count(); ++i) {
                CHECK(q.ql(tau, i, 0) >= 0.0);
                CHECK(q.ql(tau, i, 0) <= cap);
                CHECK(q.qr(tau, i, 0) <= 0.0);
                CHECK(q.qr(tau, i, 0) >= -cap);
            }
        }
    }
    SUBCASE("cap-inactive extraction reproduces the one-sided gradients") {
        std::mt19937_64 rng(43);
        const auto g = GridSpec::make_1d(Bc::Neumann, -1.0, 1.0, 12, 0.1, 2);
        ScalarField w(g, FieldRole::Value);
        for (double& v : w.data()) v = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
        const auto q = extract_policy(w, 1e6);
        std::vector<double> dl(g.node_count()), dr(g.node_count());
        for (int tau = 0; tau < q.levels(); ++tau) {
            two_sided_gradient(w.level(tau), g, 0, dl, dr);
            for (int i = 0; i < g.node_count(); ++i) {
                CHECK(q.ql(tau, i, 0) == doctest::Approx(std::max(dl[i], 0.0)).epsilon(1e-15));
                CHECK(q.qr(tau, i, 0) == doctest::Approx(std::min(dr[i], 0.0)).epsilon(1e-15));
            }
        }
    }
}

TEST_CASE("running cost") {
    using Pair = std::pair<double, double>;
    CHECK(running_cost(std::vector<Pair>{{0.0, 0.0}}, 0.0) == 0.0);
    CHECK(running_cost(std::vector<Pair>{{3.0, -4.0}}, 1.0) == doctest::Approx(13.5));
    // wrong-signed components saturate to zero effective parts
    CHECK(running_cost(std::vector<Pair>{{-2.0, 5.0}}, 2.0) == doctest::Approx(2.0));
    // 2d: kinetic terms add across axes
    CHECK(running_cost(std::vector<Pair>{{1.0, 0.0}, {0.0, -2.0}}, 0.5) ==
          doctest::Approx(0.5 * (1.0 + 4.0) + 0.5));
}

TEST_CASE("legendre gap") {
    const std::vector<double> p = {1.0, 0.0};
    SUBCASE("zero at the argmax and the hand value") {
        CHECK(legendre_gap(p, p, 0.7) == doctest::Approx(0.0));
        CHECK(legendre_gap(p, std::vector<double>{0.0, 0.0}, 0.0) == doctest::Approx(0.5));
    }
    SUBCASE("equals |p-q|^2/2 for the quadratic Hamiltonian") {
        std::mt19937_64 rng(47);
        std::uniform_real_distribution<double> d(-3.0, 3.0);
        for (int trial = 0; trial < 200; ++trial) {
            const std::vector<double> pv = {d(rng), d(rng)};
            const std::vector<double> qv = {d(rng), d(rng)};
            const double gap = legendre_gap(pv, qv, d(rng));
            double half_sq = 0.0;
            for (int k = 0; k < 2; ++k) half_sq += 0.5 * (pv[k] - qv[k]) * (pv[k] - qv[k]);
            CHECK(gap == doctest::Approx(half_sq).epsilon(1e-14));
            CHECK(gap >= -1e-14);
        }
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(legendre_gap(p, std::vector<double>{1.0}, 0.0), InputError);
    }
}

TEST_CASE("hamiltonian spec validation") {
    const auto g = GridSpec::make_1d(Bc::Periodic, -1.0, 1.0, 4, 0.1, 1);
    HamiltonianSpec h;
    h.v_values.assign(4, 0.0);
    h.cap = 0.0;
    CHECK_THROWS_AS(h.validate(g), InputError);
    h.cap = 1.0;
    CHECK_NOTHROW(h.validate(g));
    h.v_values[2] = std::nan("");
    CHECK_THROWS_AS(h.validate(g), InputError);
}
