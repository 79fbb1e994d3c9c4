#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pgic/oracle.hpp"
#include "pgic/waterfill.hpp"

using namespace pgic;
using Catch::Matchers::WithinAbs;

TEST_CASE("project_budget_box") {
    const std::vector<double> caps_inf(8, kInfinity);

    SECTION("feasible points pass through") {
        std::vector<double> v{1.0, 2.0, 0.5, 0.0, 1.5, 0.25, 0.75, 1.0};
        const std::vector<double> out = project_budget_box(v, 10.0, caps_inf);
        for (std::size_t k = 0; k < v.size(); ++k) CHECK_THAT(out[k], WithinAbs(v[k], 1e-12));
    }

    SECTION("uniform overshoot shifts evenly") {
        const std::vector<double> out = project_budget_box(std::vector<double>(8, 10.0), 8.0, caps_inf);
        for (double x : out) CHECK_THAT(x, WithinAbs(1.0, 1e-9));
    }

    SECTION("box clipping dominates when the budget is loose") {
        std::vector<double> caps(8, kInfinity);
        caps[0] = 5.0;
        std::vector<double> v(8, 0.0);
        v[0] = 10.0;
        const std::vector<double> out = project_budget_box(v, 100.0, caps);
        CHECK_THAT(out[0], WithinAbs(5.0, 1e-12));
        for (std::size_t k = 1; k < out.size(); ++k) CHECK_THAT(out[k], WithinAbs(0.0, 1e-12));
    }

    SECTION("projection always lands in the feasible set") {
        std::mt19937 rng(5150);
        std::uniform_real_distribution<double> u(-5.0, 30.0);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> v(8), caps(8);
            for (double& x : v) x = u(rng);
            for (double& c : caps) c = std::abs(u(rng));
            const double budget = std::abs(u(rng));
            const std::vector<double> out = project_budget_box(v, budget, caps);
            double sum = 0.0;
            for (std::size_t k = 0; k < out.size(); ++k) {
                CHECK(out[k] >= -1e-12);
                CHECK(out[k] <= caps[k] + 1e-12);
                sum += out[k];
            }
            CHECK(sum <= budget + 1e-6);
        }
    }
}

TEST_CASE("grid_search behaviour on small instances") {
    SolverConfig cfg;
    cfg.gains.a2 = 1000.0;  // keep the caps out of the way
    cfg.gains.b2 = 1000.0;

    SECTION("single clean coordinate rides the boundary") {
        SolverConfig c = cfg;
        c.tx1_budget = 9.0;
        const SolveResult r = grid_search(RateScheme::sic, c, {1}, 1001);  // tx1 (0,1)
        CHECK_THAT(r.allocation.tx1(0, 1), WithinAbs(9.0, 1e-9));
    }

    SECTION("two symmetric clean coordinates split evenly") {
        SolverConfig c = cfg;
        c.tx1_budget = 18.0;
        const SolveResult r = grid_search(RateScheme::sic, c, {1, 6}, 7);  // tx1 (0,1) and (1,2)
        CHECK_THAT(r.allocation.tx1(0, 1), WithinAbs(9.0, 1e-9));
        CHECK_THAT(r.allocation.tx1(1, 2), WithinAbs(9.0, 1e-9));
    }

    SECTION("zero budget pins the origin") {
        SolverConfig c = cfg;
        c.tx1_budget = 0.0;
        c.tx2_budget = 0.0;
        const SolveResult r = grid_search(RateScheme::sic, c, {1, 6}, 11);
        CHECK_THAT(r.ergodic_rate, WithinAbs(0.0, 1e-12));
    }

    SECTION("input validation") {
        CHECK_THROWS_AS(grid_search(RateScheme::sic, cfg, {0, 1, 2, 3, 4}, 11),
                        std::invalid_argument);
        CHECK_THROWS_AS(grid_search(RateScheme::sic, cfg, {}, 11), std::invalid_argument);
        CHECK_THROWS_AS(grid_search(RateScheme::sic, cfg, {16}, 11), std::invalid_argument);
        CHECK_THROWS_AS(grid_search(RateScheme::sic, cfg, {0}, 1), std::invalid_argument);
    }
}

TEST_CASE("waterfill_budget matches grid search on two-coordinate instances") {
    SolverConfig cfg;
    cfg.gains.a2 = 1000.0;
    cfg.gains.b2 = 1000.0;
    cfg.tx1_budget = 18.0;
    // the same two clean coordinates, solved by the price search
    std::vector<TermSpec> terms{TermSpec{}, TermSpec{}};
    terms[0].weight = cfg.probs[1];
    terms[1].weight = cfg.probs[2];
    const WaterLevelSolution w = waterfill_budget(terms, cfg.tx1_budget, cfg.sigma2, 1e-7);
    const SolveResult g = grid_search(RateScheme::sic, cfg, {1, 6}, 601);
    const double wf_rate = cfg.probs[1] * std::log2(1.0 + w.powers[0]) +
                           cfg.probs[2] * std::log2(1.0 + w.powers[1]);
    CHECK(wf_rate >= g.ergodic_rate - 1e-4);
}

TEST_CASE("projected gradient ascent basics") {
    SECTION("zero budgets give the zero rate") {
        SolverConfig cfg;
        cfg.tx1_budget = 0.0;
        cfg.tx2_budget = 0.0;
        OracleConfig ocfg;
        ocfg.restarts = 1;
        ocfg.max_steps = 10;
        const SolveResult r = projected_gradient_solve(RateScheme::sic, cfg, ocfg);
        CHECK_THAT(r.ergodic_rate, WithinAbs(0.0, 1e-12));
    }

    SECTION("deterministic for a fixed seed") {
        SolverConfig cfg;
        cfg.tx1_budget = 20.0;
        cfg.tx2_budget = 20.0;
        OracleConfig ocfg;
        ocfg.restarts = 2;
        ocfg.max_steps = 120;
        ocfg.seed = 99;
        const double r1 = projected_gradient_solve(RateScheme::noise, cfg, ocfg).ergodic_rate;
        const double r2 = projected_gradient_solve(RateScheme::noise, cfg, ocfg).ergodic_rate;
        CHECK(r1 == r2);
    }

    SECTION("never worse than a supplied feasible start") {
        const SolverConfig cfg;
        const PowerAllocation equal{PowerMatrix::equal_split(cfg.tx1_budget),
                                    PowerMatrix::equal_split(cfg.tx2_budget)};
        const double seed_rate =
            ergodic_rate(RateScheme::noise, equal, cfg.gains, cfg.probs, cfg.sigma2);
        OracleConfig ocfg;
        ocfg.restarts = 1;
        ocfg.max_steps = 200;
        const SolveResult r =
            projected_gradient_solve(RateScheme::noise, cfg, ocfg, {equal});
        CHECK(r.ergodic_rate >= seed_rate - 1e-9);
    }

    SECTION("output is feasible") {
        SolverConfig cfg;
        cfg.tx1_budget = 35.0;
        cfg.tx2_budget = 35.0;
        OracleConfig ocfg;
        ocfg.restarts = 3;
        ocfg.max_steps = 250;
        const SolveResult r = projected_gradient_solve(RateScheme::sic, cfg, ocfg);
        const CapMatrix caps = vsic_caps(cfg.gains, cfg.sigma2, cfg.caps_mode);
        CHECK(validate_allocation(r.allocation, caps, cfg).feasible);
    }
}

TEST_CASE("oracle agrees with the solver at the default SIC operating point") {
    const SolverConfig cfg;
    OracleConfig ocfg;
    ocfg.restarts = 8;
    ocfg.max_steps = 1500;
    const double solver_rate = alternate_solve(cfg).ergodic_rate;
    const double oracle_rate = projected_gradient_solve(RateScheme::sic, cfg, ocfg).ergodic_rate;
    CHECK(std::abs(oracle_rate - solver_rate) <= 0.02 * solver_rate);
}

TEST_CASE("oracle cross-validates the noise scheme on the weak-weak problem") {
    SolverConfig cfg;
    cfg.probs.p = {1.0, 0.0, 0.0, 0.0};
    OracleConfig ocfg;
    ocfg.restarts = 4;
    ocfg.max_steps = 2000;
    const double solver_rate = scheme2_solve(cfg).ergodic_rate;
    const double oracle_rate = projected_gradient_solve(RateScheme::noise, cfg, ocfg).ergodic_rate;
    CHECK_THAT(oracle_rate, WithinAbs(solver_rate, 1e-2));
}

TEST_CASE("oracle clears the grid bound on a reduced instance") {
    SolverConfig cfg;
    cfg.gains.a2 = 1000.0;
    cfg.gains.b2 = 1000.0;
    cfg.tx1_budget = 18.0;
    cfg.tx2_budget = 0.0;
    const SolveResult g = grid_search(RateScheme::sic, cfg, {1, 6}, 301);
    OracleConfig ocfg;
    ocfg.restarts = 3;
    ocfg.max_steps = 400;
    const SolveResult r = projected_gradient_solve(RateScheme::sic, cfg, ocfg);
    CHECK(r.ergodic_rate >= g.ergodic_rate - 0.05);
}
