#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pgic/waterfill.hpp"

using namespace pgic;
using Catch::Matchers::WithinAbs;

namespace {

TermSpec sic_term(double cap = kInfinity, double weight = 1.0) {
    TermSpec t;
    t.form = TermForm::sic;
    t.cap = cap;
    t.weight = weight;
    return t;
}

TermSpec noise_term(double gain, double cross, double cap = kInfinity, double weight = 1.0) {
    TermSpec t;
    t.form = TermForm::noise_coupled;
    t.weak_gain = gain;
    t.cross = cross;
    t.cap = cap;
    t.weight = weight;
    return t;
}

// deterministic mixed term-set generator for the property checks
std::vector<TermSpec> random_terms(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> count(1, 8);
    std::vector<TermSpec> terms(static_cast<std::size_t>(count(rng)));
    for (TermSpec& t : terms) {
        if (u(rng) < 0.5) {
            t = sic_term();
        } else {
            const double g = u(rng) < 0.5 ? u(rng) * 0.95 : 1.0 + u(rng) * 15.0;
            t = noise_term(g, u(rng) * 20.0);
        }
        if (u(rng) < 0.3) t.cap = 0.5 + u(rng) * 12.0;
        t.weight = 0.05 + u(rng) * 0.95;
    }
    return terms;
}

}  // namespace

TEST_CASE("marginal values") {
    CHECK_THAT(marginal(sic_term(), 0.0, 1.0), WithinAbs(1.0, 1e-15));
    CHECK_THAT(marginal(noise_term(0.7, 0.0), 0.0, 1.0), WithinAbs(1.0, 1e-15));
    CHECK_THAT(marginal(noise_term(0.1, 10.0), 0.0, 1.0), WithinAbs(0.40909090909090906, 1e-12));
    CHECK_THAT(marginal(sic_term(kInfinity, 0.25), 9.0, 1.0), WithinAbs(0.025, 1e-15));
}

TEST_CASE("coordinate_alloc closed forms and boundaries") {
    CHECK_THAT(coordinate_alloc(sic_term(), 0.1, 1.0, 100.0), WithinAbs(9.0, 1e-12));
    CHECK_THAT(coordinate_alloc(sic_term(5.0), 0.1, 1.0, 100.0), WithinAbs(5.0, 1e-12));
    CHECK_THAT(coordinate_alloc(sic_term(), 2.0, 1.0, 100.0), WithinAbs(0.0, 1e-15));

    // price above the whole marginal range keeps the coordinate dark
    const TermSpec t = noise_term(0.1, 10.0);
    const double m0 = marginal(t, 0.0, 1.0);
    CHECK_THAT(coordinate_alloc(t, m0 * 1.5, 1.0, 100.0), WithinAbs(0.0, 1e-15));

    CHECK_THROWS_AS(coordinate_alloc(sic_term(), 0.0, 1.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(coordinate_alloc(sic_term(), -1.0, 1.0, 10.0), std::invalid_argument);
}

TEST_CASE("coordinate_alloc noise form satisfies first-order optimality") {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        const double g = u(rng) < 0.5 ? u(rng) * 0.9 : 1.0 + 12.0 * u(rng);
        const TermSpec t = noise_term(g, 0.1 + 25.0 * u(rng));
        const double lambda = 0.005 + u(rng);
        const double budget = 1.0 + 60.0 * u(rng);
        const double x = coordinate_alloc(t, lambda, 1.0, budget);
        const double ub = std::min(t.cap, budget);
        REQUIRE(x >= 0.0);
        REQUIRE(x <= ub + 1e-9);
        if (x > 1e-9 && x < ub - 1e-9)
            CHECK_THAT(marginal(t, x, 1.0), WithinAbs(lambda, 1e-7));
        // never worse than the endpoints
        const double obj_x = coordinate_rate_nats(t, x, 1.0) - lambda * x;
        CHECK(obj_x >= coordinate_rate_nats(t, 0.0, 1.0) - 1e-10);
        CHECK(obj_x >= coordinate_rate_nats(t, ub, 1.0) - lambda * ub - 1e-10);
    }
}

TEST_CASE("waterfill_budget on clean channels reproduces classical waterfilling") {
    const std::vector<TermSpec> pair{sic_term(), sic_term()};
    const WaterLevelSolution sol = waterfill_budget(pair, 18.0, 1.0, 1e-5);
    CHECK_THAT(sol.powers[0], WithinAbs(9.0, 1e-4));
    CHECK_THAT(sol.powers[1], WithinAbs(9.0, 1e-4));
    CHECK_THAT(sol.lambda, WithinAbs(0.1, 1e-5));
    CHECK_THAT(sol.budget_used, WithinAbs(18.0, 1e-5));

    const std::vector<TermSpec> one{sic_term()};
    const WaterLevelSolution s1 = waterfill_budget(one, 9.0, 1.0, 1e-5);
    CHECK_THAT(s1.powers[0], WithinAbs(9.0, 1e-5));
    CHECK_THAT(s1.lambda, WithinAbs(0.1, 1e-6));

    // equal weights, no caps: all active coordinates share one water level
    std::vector<TermSpec> four(4, sic_term());
    const WaterLevelSolution s4 = waterfill_budget(four, 30.0, 1.0, 1e-6);
    for (double x : s4.powers) CHECK_THAT(1.0 + x, WithinAbs(1.0 / s4.lambda, 1e-4));
}

TEST_CASE("waterfill_budget respects caps and reports the active set") {
    std::vector<TermSpec> terms{sic_term(2.0), sic_term(), sic_term()};
    const WaterLevelSolution sol = waterfill_budget(terms, 20.0, 1.0, 1e-6);
    CHECK_THAT(sol.powers[0], WithinAbs(2.0, 1e-9));
    CHECK(sol.active_set[0] == WaterLevelSolution::CoordStatus::capped);
    CHECK_THAT(sol.powers[1], WithinAbs(9.0, 1e-4));
    CHECK_THAT(sol.powers[2], WithinAbs(9.0, 1e-4));
    CHECK(sol.active_set[1] == WaterLevelSolution::CoordStatus::interior);
    CHECK_THAT(sol.budget_used, WithinAbs(20.0, 1e-6));
}

TEST_CASE("waterfill_budget edge cases") {
    const std::vector<TermSpec> terms{sic_term(), noise_term(0.1, 5.0)};
    const WaterLevelSolution zero = waterfill_budget(terms, 0.0, 1.0, 1e-6);
    CHECK_THAT(zero.budget_used, WithinAbs(0.0, 1e-15));
    for (double x : zero.powers) CHECK(x == 0.0);
    // price sits at the top of the marginal range so zeros are optimal
    CHECK(zero.lambda >= marginal(terms[0], 0.0, 1.0) - 1e-12);

    CHECK_THROWS_AS(waterfill_budget(terms, -1.0, 1.0, 1e-6), std::invalid_argument);
    CHECK_THROWS_AS(waterfill_budget(std::vector<TermSpec>{}, 1.0, 1.0, 1e-6),
                    std::invalid_argument);

    // caps below the budget: saturate and report the largest all-capped price
    const std::vector<TermSpec> capped{sic_term(3.0), sic_term(4.0)};
    const WaterLevelSolution s = waterfill_budget(capped, 20.0, 1.0, 1e-6);
    CHECK_THAT(s.budget_used, WithinAbs(7.0, 1e-12));
    CHECK(s.active_set[0] == WaterLevelSolution::CoordStatus::capped);
    CHECK(s.active_set[1] == WaterLevelSolution::CoordStatus::capped);
    CHECK_THAT(s.lambda, WithinAbs(marginal(capped[1], 4.0, 1.0), 1e-12));
}

TEST_CASE("total allocation is nonincreasing in the water price") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::vector<TermSpec> terms = random_terms(rng);
        const double budget = 40.0;
        double lambda = 1e-4;
        double prev = kInfinity;
        for (int k = 0; k < 14; ++k) {
            double total = 0.0;
            for (const TermSpec& t : terms) total += coordinate_alloc(t, lambda, 1.0, budget);
            CHECK(total <= prev + 1e-6);
            prev = total;
            lambda *= 2.0;
        }
    }
}

TEST_CASE("waterfill_budget lands the budget or has a certified excuse") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double tau = 1e-5;
    for (int trial = 0; trial < 60; ++trial) {
        const std::vector<TermSpec> terms = random_terms(rng);
        const double budget = u(rng) * 60.0;
        const WaterLevelSolution sol = waterfill_budget(terms, budget, 1.0, tau);

        REQUIRE(sol.budget_used <= budget + tau);
        for (std::size_t k = 0; k < terms.size(); ++k) {
            REQUIRE(sol.powers[k] >= 0.0);
            REQUIRE(sol.powers[k] <= std::min(terms[k].cap, budget) + 1e-9);
        }
        if (sol.budget_used < budget - tau) {
            // leftover budget is legitimate only when no coordinate can use it:
            // every one is at its bound or dumping the remainder loses rate
            const double remaining = budget - sol.budget_used;
            for (std::size_t k = 0; k < terms.size(); ++k) {
                const double ub = std::min(terms[k].cap, budget);
                if (sol.powers[k] >= ub - 1e-9) continue;
                const double hi = std::min(ub, sol.powers[k] + remaining);
                const double here = coordinate_rate_nats(terms[k], sol.powers[k], 1.0);
                CHECK(coordinate_rate_nats(terms[k], hi, 1.0) <= here + 1e-9);
            }
        }
    }
}

TEST_CASE("scaling all weights by a constant leaves the allocation unchanged") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 15; ++trial) {
        std::vector<TermSpec> terms = random_terms(rng);
        const double budget = 5.0 + 40.0 * u(rng);
        const WaterLevelSolution base = waterfill_budget(terms, budget, 1.0, 1e-7);
        std::vector<TermSpec> scaled = terms;
        for (TermSpec& t : scaled) t.weight *= 3.7;
        const WaterLevelSolution s = waterfill_budget(scaled, budget, 1.0, 1e-7);
        for (std::size_t k = 0; k < terms.size(); ++k)
            CHECK_THAT(s.powers[k], WithinAbs(base.powers[k], 1e-4));
    }
}

TEST_CASE("single-transmitter KKT residual certifies waterfill output") {
    // exact closed-form point
    const std::vector<TermSpec> one{sic_term()};
    const std::vector<double> nine{9.0};
    CHECK_THAT(waterfill_kkt_residual(one, nine, 0.1, 1.0, 9.0), WithinAbs(0.0, 1e-12));

    // all-zero boundary point with the price at the top of the marginals
    const std::vector<TermSpec> terms{sic_term(), noise_term(0.1, 4.0)};
    const std::vector<double> zeros{0.0, 0.0};
    double lam = 0.0;
    for (const TermSpec& t : terms) lam = std::max(lam, marginal(t, 0.0, 1.0));
    CHECK_THAT(waterfill_kkt_residual(terms, zeros, lam, 1.0, 0.0), WithinAbs(0.0, 1e-12));

    // priced waterfills certify themselves; duality-gap fills are exempt
    std::mt19937 rng(404);
    int certified = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::vector<TermSpec> ts = random_terms(rng);
        const WaterLevelSolution sol = waterfill_budget(ts, 30.0, 1.0, 1e-7);
        if (sol.priced && sol.budget_used > 30.0 - 1e-5) {
            CHECK(waterfill_kkt_residual(ts, sol.powers, sol.lambda, 1.0, 30.0) < 1e-3);
            ++certified;
        }
    }
    CHECK(certified >= 5);
}
