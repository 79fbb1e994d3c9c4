#pragma once

// Reference optimizers used to cross-check the waterfilling solver:
// multi-restart projected gradient ascent on the full 16-power problem with
// numerical gradients, and exhaustive grid search over a few coordinates.
// Both are deliberately independent of the marginal formulas under test.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "pgic/model.hpp"
#include "pgic/schemes.hpp"

namespace pgic {

struct OracleConfig {
    int restarts = 8;        // random starts in addition to the equal split
    int max_steps = 1500;    // ascent steps per start
    double step_size = 1.0;  // initial gradient step, adapted during ascent
    std::uint64_t seed = 1;
    int grid_resolution = 201;

    void validate() const {
        if (restarts < 1) throw std::invalid_argument("oracle: restarts must be >= 1");
        if (grid_resolution < 2) throw std::invalid_argument("oracle: grid_resolution must be >= 2");
        if (max_steps < 1) throw std::invalid_argument("oracle: max_steps must be >= 1");
        if (!(step_size > 0.0)) throw std::invalid_argument("oracle: step_size must be positive");
    }
};

/// Euclidean projection onto {x : 0 <= x <= caps, sum(x) <= budget},
/// computed by bisection on the common shift with box clipping.
inline std::vector<double> project_budget_box(std::vector<double> v, double budget,
                                              const std::vector<double>& caps) {
    if (!(budget >= 0.0)) throw std::invalid_argument("project_budget_box: budget must be nonnegative");
    if (caps.size() != v.size()) throw std::invalid_argument("project_budget_box: size mismatch");
    const auto clip = [&](double shift) {
        double s = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k)
            s += std::clamp(v[k] - shift, 0.0, caps[k]);
        return s;
    };
    if (clip(0.0) <= budget) {
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::clamp(v[k], 0.0, caps[k]);
        return v;
    }
    double lo = 0.0, hi = 0.0;
    for (double x : v) hi = std::max(hi, x);
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (clip(mid) > budget) lo = mid;
        else hi = mid;
    }
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::clamp(v[k] - hi, 0.0, caps[k]);
    return v;
}

namespace detail {

inline PowerAllocation unpack_point(const std::vector<double>& x) {
    PowerAllocation a;
    for (std::size_t k = 0; k < kCoordsPerTx; ++k) {
        a.tx1.v[k] = x[k];
        a.tx2.v[k] = x[kCoordsPerTx + k];
    }
    return a;
}

inline double point_rate(const std::vector<double>& x, RateScheme scheme,
                         const SolverConfig& config) {
    return ergodic_rate(scheme, unpack_point(x), config.gains, config.probs, config.sigma2);
}

inline std::vector<double> scheme_caps_flat(RateScheme scheme, const SolverConfig& config,
                                            TxSide tx) {
    std::vector<double> caps(kCoordsPerTx, kInfinity);
    if (scheme == RateScheme::sic) {
        const CapMatrix cm = vsic_caps(config.gains, config.sigma2, config.caps_mode);
        const PowerMatrix& m = tx == TxSide::tx1 ? cm.tx1 : cm.tx2;
        for (std::size_t k = 0; k < kCoordsPerTx; ++k) caps[k] = m.v[k];
    }
    const double budget = tx == TxSide::tx1 ? config.tx1_budget : config.tx2_budget;
    for (double& c : caps) c = std::min(c, budget);
    return caps;
}

}  // namespace detail

/// Multi-restart projected gradient ascent on the full 16-variable ergodic
/// rate. Gradients are central differences; each step projects the two
/// transmitters' blocks onto their own budget boxes. Starts are the equal
/// split, `restarts` uniform-random feasible points and any extra points
/// supplied by the caller. Deterministic for a fixed seed.
inline SolveResult projected_gradient_solve(RateScheme scheme, const SolverConfig& config,
                                            const OracleConfig& oracle_cfg,
                                            const std::vector<PowerAllocation>& extra_starts = {}) {
    config.validate();
    oracle_cfg.validate();
    const std::vector<double> caps1 = detail::scheme_caps_flat(scheme, config, TxSide::tx1);
    const std::vector<double> caps2 = detail::scheme_caps_flat(scheme, config, TxSide::tx2);

    const auto project_point = [&](std::vector<double>& x) {
        std::vector<double> b1(x.begin(), x.begin() + kCoordsPerTx);
        std::vector<double> b2(x.begin() + kCoordsPerTx, x.end());
        b1 = project_budget_box(std::move(b1), config.tx1_budget, caps1);
        b2 = project_budget_box(std::move(b2), config.tx2_budget, caps2);
        std::copy(b1.begin(), b1.end(), x.begin());
        std::copy(b2.begin(), b2.end(), x.begin() + kCoordsPerTx);
    };

    std::mt19937_64 rng(oracle_cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<std::vector<double>> starts;
    {
        std::vector<double> eq(2 * kCoordsPerTx);
        for (std::size_t k = 0; k < kCoordsPerTx; ++k) {
            eq[k] = config.tx1_budget / kCoordsPerTx;
            eq[kCoordsPerTx + k] = config.tx2_budget / kCoordsPerTx;
        }
        starts.push_back(std::move(eq));
    }
    for (int r = 0; r < oracle_cfg.restarts; ++r) {
        std::vector<double> x(2 * kCoordsPerTx);
        for (std::size_t k = 0; k < kCoordsPerTx; ++k) x[k] = unit(rng) * config.tx1_budget;
        for (std::size_t k = 0; k < kCoordsPerTx; ++k)
            x[kCoordsPerTx + k] = unit(rng) * config.tx2_budget;
        starts.push_back(std::move(x));
    }
    for (const PowerAllocation& a : extra_starts) {
        std::vector<double> x(2 * kCoordsPerTx);
        for (std::size_t k = 0; k < kCoordsPerTx; ++k) {
            x[k] = a.tx1.v[k];
            x[kCoordsPerTx + k] = a.tx2.v[k];
        }
        starts.push_back(std::move(x));
    }

    double best_rate = -kInfinity;
    std::vector<double> best_x(2 * kCoordsPerTx, 0.0);
    std::vector<double> grad(2 * kCoordsPerTx);
    for (std::vector<double>& x : starts) {
        project_point(x);
        double fx = detail::point_rate(x, scheme, config);
        double step = oracle_cfg.step_size;
        for (int it = 0; it < oracle_cfg.max_steps; ++it) {
            for (std::size_t k = 0; k < x.size(); ++k) {
                const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
                std::vector<double> xp = x, xm = x;
                xp[k] += h;
                xm[k] -= h;
                grad[k] = (detail::point_rate(xp, scheme, config) -
                           detail::point_rate(xm, scheme, config)) /
                          (2.0 * h);
            }
            std::vector<double> cand = x;
            for (std::size_t k = 0; k < x.size(); ++k) cand[k] += step * grad[k];
            project_point(cand);
            const double fc = detail::point_rate(cand, scheme, config);
            if (fc > fx + 1e-12) {
                x = std::move(cand);
                fx = fc;
                step *= 1.2;
            } else {
                step *= 0.5;
                if (step < 1e-9) break;
            }
        }
        if (fx > best_rate) {
            best_rate = fx;
            best_x = x;
        }
    }

    SolveResult result;
    result.allocation = detail::unpack_point(best_x);
    result.regime_rates =
        all_regime_rates(scheme, result.allocation, config.gains, config.sigma2);
    result.ergodic_rate = 0.0;
    for (int j = 0; j < kRegimes; ++j)
        result.ergodic_rate += config.probs[j] * result.regime_rates[static_cast<std::size_t>(j)];
    result.converged = true;
    return result;
}

/// Exhaustive search over up to four coordinates (0..7: transmitter 1,
/// 8..15: transmitter 2, row-major (subchannel, regime)); all other
/// coordinates are held at zero. Exact maximizer at the grid resolution.
inline SolveResult grid_search(RateScheme scheme, const SolverConfig& config,
                               const std::vector<int>& active_coords, int resolution) {
    config.validate();
    if (active_coords.empty() || active_coords.size() > 4)
        throw std::invalid_argument("grid_search: need 1 to 4 active coordinates");
    if (resolution < 2) throw std::invalid_argument("grid_search: resolution must be >= 2");
    for (int c : active_coords)
        if (c < 0 || c >= 2 * kCoordsPerTx)
            throw std::invalid_argument("grid_search: coordinate index out of range");

    const std::vector<double> caps1 = detail::scheme_caps_flat(scheme, config, TxSide::tx1);
    const std::vector<double> caps2 = detail::scheme_caps_flat(scheme, config, TxSide::tx2);
    std::vector<double> upper;
    for (int c : active_coords)
        upper.push_back(c < kCoordsPerTx ? caps1[static_cast<std::size_t>(c)]
                                         : caps2[static_cast<std::size_t>(c - kCoordsPerTx)]);

    std::vector<double> x(2 * kCoordsPerTx, 0.0);
    std::vector<double> best_x = x;
    double best_rate = -kInfinity;
    std::vector<int> idx(active_coords.size(), 0);
    const double budget_tol = 1e-12;
    while (true) {
        double sum1 = 0.0, sum2 = 0.0;
        for (std::size_t k = 0; k < active_coords.size(); ++k) {
            const double val = upper[k] * idx[k] / (resolution - 1);
            x[static_cast<std::size_t>(active_coords[k])] = val;
            (active_coords[k] < kCoordsPerTx ? sum1 : sum2) += val;
        }
        if (sum1 <= config.tx1_budget + budget_tol && sum2 <= config.tx2_budget + budget_tol) {
            const double r = detail::point_rate(x, scheme, config);
            if (r > best_rate) {
                best_rate = r;
                best_x = x;
            }
        }
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == resolution) idx[k++] = 0;
        if (k == idx.size()) break;
    }

    SolveResult result;
    result.allocation = detail::unpack_point(best_x);
    result.regime_rates =
        all_regime_rates(scheme, result.allocation, config.gains, config.sigma2);
    result.ergodic_rate = 0.0;
    for (int j = 0; j < kRegimes; ++j)
        result.ergodic_rate += config.probs[j] * result.regime_rates[static_cast<std::size_t>(j)];
    result.converged = true;
    return result;
}

}  // namespace pgic
