#pragma once

// Generalized iterative waterfilling. Each transmitter's subproblem is
// separable across the eight (subchannel, regime) coordinates once the other
// transmitter's powers are fixed: maximize sum_k w_k * r_k(x_k) - lambda *
// sum_k x_k subject to 0 <= x_k <= cap_k, where r_k is either a clean
// interference-free log (SIC coordinates) or the coupled weak-interference
// expression. The water price lambda is found by bisection so the budget is
// met; the two transmitters alternate until the ergodic rate settles.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "pgic/model.hpp"

namespace pgic {

enum class TxSide { tx1, tx2 };
enum class TermForm { sic, noise_coupled };

/// One waterfilling coordinate: which power it is, the shape of its rate
/// contribution, the fixed cross power, its cap and its gradient weight
/// (the regime probability in weighted mode, 1 otherwise).
struct TermSpec {
    TxSide tx = TxSide::tx1;
    int subchannel = 0;
    int regime = 0;
    TermForm form = TermForm::sic;
    double weak_gain = 0.0;  // g, used by noise_coupled only
    double cross = 0.0;      // fixed other-transmitter power on this coordinate
    double cap = kInfinity;
    double weight = 1.0;
};

/// d/dx of the weighted natural-log rate contribution of one coordinate.
/// SIC form: w / (sigma^2 + x). Noise-coupled form picks up the loss the
/// own power inflicts on the cross link through the weak gain.
inline double marginal(const TermSpec& t, double x, double sigma2) {
    if (t.form == TermForm::sic) return t.weight / (sigma2 + x);
    const double g = t.weak_gain;
    const double c = t.cross;
    return t.weight * (1.0 / (sigma2 + c * g + x) + g / (sigma2 + x * g + c) -
                       g / (sigma2 + x * g));
}

/// Weighted natural-log rate contribution of one coordinate (both directions
/// of the subchannel that depend on this power, cross power fixed).
inline double coordinate_rate_nats(const TermSpec& t, double x, double sigma2) {
    if (t.form == TermForm::sic) return t.weight * std::log1p(x / sigma2);
    const double g = t.weak_gain;
    const double c = t.cross;
    return t.weight * (std::log1p(x / (sigma2 + c * g)) + std::log1p(c / (sigma2 + x * g)));
}

namespace detail {

// Stationary points of w*r(x) - lambda*x on [lo, hi]: sign changes of
// marginal(x) - lambda, bracketed on a uniform scan and bisected down to
// ~1e-10 W. The marginal equation clears to a cubic, so a fine scan cannot
// miss an odd root; near-tangent root pairs cost only a negligible rate.
inline void append_stationary_points(const TermSpec& t, double lambda, double sigma2,
                                     double lo, double hi, std::vector<double>& out) {
    constexpr int kCells = 512;
    const double width = hi - lo;
    if (!(width > 0.0)) return;
    double prev_x = lo;
    double prev_f = marginal(t, lo, sigma2) - lambda;
    for (int k = 1; k <= kCells; ++k) {
        const double x = lo + width * static_cast<double>(k) / kCells;
        const double f = marginal(t, x, sigma2) - lambda;
        if (prev_f == 0.0) out.push_back(prev_x);
        if (prev_f * f < 0.0) {
            double a = prev_x, b = x, fa = prev_f;
            for (int it = 0; it < 100 && (b - a) > 1e-12; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = marginal(t, m, sigma2) - lambda;
                if (fa * fm <= 0.0) b = m;
                else { a = m; fa = fm; }
            }
            out.push_back(0.5 * (a + b));
        }
        prev_x = x;
        prev_f = f;
    }
}

// argmax of w*r(x) - lambda*x over [lo, hi]; ties go to the larger x so the
// allocation-vs-price map stays monotone at branch switches.
inline double argmax_on_interval(const TermSpec& t, double lambda, double sigma2,
                                 double lo, double hi) {
    std::vector<double> cands{lo, hi};
    append_stationary_points(t, lambda, sigma2, lo, hi, cands);
    double best_val = -kInfinity;
    double best_x = lo;
    for (double x : cands) {
        const double v = coordinate_rate_nats(t, x, sigma2) - lambda * x;
        if (v > best_val + 1e-15 || (std::abs(v - best_val) <= 1e-15 && x > best_x)) {
            best_val = v;
            best_x = x;
        }
    }
    return best_x;
}

}  // namespace detail

/// Best power for one coordinate at water price lambda, restricted to
/// [0, min(cap, budget_hint)]. Closed form for SIC-shaped coordinates;
/// bracketing search with candidate comparison otherwise.
inline double coordinate_alloc(const TermSpec& t, double lambda, double sigma2,
                               double budget_hint) {
    if (!(lambda > 0.0)) throw std::invalid_argument("coordinate_alloc: lambda must be positive");
    const double ub = std::min(t.cap, budget_hint);
    if (!(ub > 0.0)) return 0.0;
    // With zero weak gain or zero cross power the coupled form collapses to
    // the clean 1/(sigma^2+x) marginal.
    if (t.form == TermForm::sic || t.weak_gain <= 0.0 || t.cross <= 0.0)
        return std::clamp(t.weight / lambda - sigma2, 0.0, ub);
    return detail::argmax_on_interval(t, lambda, sigma2, 0.0, ub);
}

/// Outcome of one single-transmitter waterfilling pass.
struct WaterLevelSolution {
    enum class CoordStatus { zero, interior, capped };

    std::vector<double> powers;
    double lambda = 0.0;  // water price; water level is 1/lambda
    double budget_used = 0.0;
    std::vector<CoordStatus> active_set;
    // True when the price search alone produced this point, so lambda is a
    // stationarity certificate. False after a duality-gap fill: a nonconcave
    // coordinate jumped across the budget and leftover watts were placed by
    // rate comparison instead of a common price.
    bool priced = true;
};

namespace detail {

inline double marginal_upper_bound(const TermSpec& t, double sigma2) {
    const double g = t.form == TermForm::sic ? 0.0 : t.weak_gain;
    return t.weight * (1.0 + g) / sigma2;
}

inline void classify_active_set(std::span<const TermSpec> terms, WaterLevelSolution& sol) {
    sol.active_set.resize(terms.size());
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const double x = sol.powers[k];
        const double cap = terms[k].cap;
        if (std::isfinite(cap) && cap - x <= 1e-9 * std::max(1.0, cap))
            sol.active_set[k] = WaterLevelSolution::CoordStatus::capped;
        else if (x <= 1e-12)
            sol.active_set[k] = WaterLevelSolution::CoordStatus::zero;
        else
            sol.active_set[k] = WaterLevelSolution::CoordStatus::interior;
    }
}

// Spend leftover budget after the price search. The per-coordinate argmax
// can jump as lambda crosses a branch point of a nonconcave coordinate, in
// which case no price lands the budget exactly; greedily move the
// coordinate whose rate gains most from the remaining watts. Stops when no
// move gains rate, so deliberate slack at a local optimum is preserved.
inline double fill_remaining_budget(std::span<const TermSpec> terms, double budget,
                                    double sigma2, double tau,
                                    std::vector<double>& powers) {
    double used = 0.0;
    for (double x : powers) used += x;
    double moved = 0.0;
    double remaining = budget - used;
    const int max_rounds = 4 * static_cast<int>(terms.size());
    for (int round = 0; round < max_rounds && remaining > 0.5 * tau; ++round) {
        double best_gain = 1e-14;
        std::size_t best_k = terms.size();
        double best_x = 0.0;
        for (std::size_t k = 0; k < terms.size(); ++k) {
            const TermSpec& t = terms[k];
            const double ub = std::min(t.cap, budget);
            if (powers[k] >= ub - 1e-15) continue;
            const double hi = std::min(ub, powers[k] + remaining);
            // Maximize the raw rate on the window: price ~ 0 keeps endpoint
            // and stationary candidates comparable.
            std::vector<double> cands{powers[k], hi};
            append_stationary_points(t, 0.0, sigma2, powers[k], hi, cands);
            double loc_best = -kInfinity, loc_x = powers[k];
            for (double x : cands) {
                const double v = coordinate_rate_nats(t, x, sigma2);
                if (v > loc_best) { loc_best = v; loc_x = x; }
            }
            const double gain = loc_best - coordinate_rate_nats(t, powers[k], sigma2);
            if (gain > best_gain) {
                best_gain = gain;
                best_k = k;
                best_x = loc_x;
            }
        }
        if (best_k == terms.size()) break;
        remaining -= best_x - powers[best_k];
        moved += best_x - powers[best_k];
        powers[best_k] = best_x;
    }
    return moved;
}

}  // namespace detail

/// Single-transmitter generalized waterfilling: finds the water price lambda
/// whose per-coordinate optima consume `budget` within tau (bisection over
/// lambda; total allocation is nonincreasing in the price), or saturates all
/// caps when they sum below the budget.
inline WaterLevelSolution waterfill_budget(std::span<const TermSpec> terms, double budget,
                                           double sigma2, double tau) {
    if (terms.empty()) throw std::invalid_argument("waterfill_budget: no terms");
    if (!(budget >= 0.0)) throw std::invalid_argument("waterfill_budget: budget must be nonnegative");
    if (!(tau > 0.0)) throw std::invalid_argument("waterfill_budget: tau must be positive");

    WaterLevelSolution sol;
    sol.powers.assign(terms.size(), 0.0);

    if (budget == 0.0) {
        double lam = 0.0;
        for (const TermSpec& t : terms) lam = std::max(lam, marginal(t, 0.0, sigma2));
        sol.lambda = std::max(lam, std::numeric_limits<double>::min());
        detail::classify_active_set(terms, sol);
        return sol;
    }

    // All caps finite and jointly below the budget: saturate them. lambda is
    // the largest price at which every coordinate still prefers its cap.
    double cap_sum = 0.0;
    bool all_finite = true;
    for (const TermSpec& t : terms) {
        if (!std::isfinite(t.cap)) { all_finite = false; break; }
        cap_sum += std::max(t.cap, 0.0);
    }
    if (all_finite && cap_sum <= budget) {
        double lam = kInfinity;
        for (std::size_t k = 0; k < terms.size(); ++k) {
            sol.powers[k] = std::max(terms[k].cap, 0.0);
            lam = std::min(lam, marginal(terms[k], sol.powers[k], sigma2));
        }
        sol.lambda = std::max(lam, 0.0);
        sol.budget_used = cap_sum;
        detail::classify_active_set(terms, sol);
        return sol;
    }

    const auto total_at = [&](double lam) {
        double s = 0.0;
        for (const TermSpec& t : terms) s += coordinate_alloc(t, lam, sigma2, budget);
        return s;
    };

    double hi = 0.0;
    for (const TermSpec& t : terms) hi = std::max(hi, detail::marginal_upper_bound(t, sigma2));
    if (hi <= 0.0) {  // all weights zero: any allocation is rate-neutral
        sol.lambda = std::numeric_limits<double>::min();
        detail::classify_active_set(terms, sol);
        return sol;
    }
    hi *= 1.0 + 1e-9;
    double lo = hi;
    bool bracketed = false;
    for (int k = 0; k < 200; ++k) {
        lo *= 0.5;
        if (total_at(lo) >= budget) { bracketed = true; break; }
    }
    double lambda = lo;
    if (bracketed) {
        // run to bracket collapse: lo converges to the largest price that
        // still spends the whole budget (coordinates clamped at the budget
        // keep the total flat, so an early stop would understate the price)
        for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (total_at(mid) >= budget) lo = mid;
            else hi = mid;
        }
        lambda = total_at(lo) <= budget + 0.5 * tau ? lo : hi;
    }
    sol.lambda = lambda;
    for (std::size_t k = 0; k < terms.size(); ++k)
        sol.powers[k] = coordinate_alloc(terms[k], lambda, sigma2, budget);

    const double moved = detail::fill_remaining_budget(terms, budget, sigma2, tau, sol.powers);
    sol.priced = moved <= tau;

    sol.budget_used = 0.0;
    for (double x : sol.powers) sol.budget_used += x;
    detail::classify_active_set(terms, sol);
    return sol;
}

/// Waterfilling coordinates of one transmitter for the SIC scheme: clean
/// SIC terms on strong-slot subchannels, weak-gain coupled terms elsewhere,
/// caps from the selected cap mode. Cross powers start at zero and are
/// refreshed each outer iteration.
inline std::array<TermSpec, kCoordsPerTx> scheme1_terms(TxSide tx, const SolverConfig& config,
                                                        const CapMatrix& caps) {
    std::array<TermSpec, kCoordsPerTx> terms;
    const PowerMatrix& cap_m = tx == TxSide::tx1 ? caps.tx1 : caps.tx2;
    std::size_t k = 0;
    for (int sub = 0; sub < kSubchannels; ++sub) {
        for (int j = 0; j < kRegimes; ++j, ++k) {
            TermSpec& t = terms[k];
            t.tx = tx;
            t.subchannel = sub;
            t.regime = j;
            t.cap = cap_m(sub, j);
            t.weight = config.weighted_gradients ? config.probs[j] : 1.0;
            if (strong_slot(sub, j)) {
                t.form = TermForm::sic;
            } else {
                t.form = TermForm::noise_coupled;
                t.weak_gain = subchannel_gain(config.gains, sub, j);
            }
        }
    }
    return terms;
}

/// Coordinates for the interference-as-noise scheme: every term coupled
/// through the actual regime gain, no caps.
inline std::array<TermSpec, kCoordsPerTx> scheme2_terms(TxSide tx, const SolverConfig& config) {
    std::array<TermSpec, kCoordsPerTx> terms;
    std::size_t k = 0;
    for (int sub = 0; sub < kSubchannels; ++sub) {
        for (int j = 0; j < kRegimes; ++j, ++k) {
            TermSpec& t = terms[k];
            t.tx = tx;
            t.subchannel = sub;
            t.regime = j;
            t.form = TermForm::noise_coupled;
            t.weak_gain = subchannel_gain(config.gains, sub, j);
            t.weight = config.weighted_gradients ? config.probs[j] : 1.0;
        }
    }
    return terms;
}

/// Stationarity / complementary-slackness residual of one transmitter's
/// allocation at price lambda (nats/watt). Fully pinned coordinates
/// (effective upper bound 0) contribute nothing.
inline double waterfill_kkt_residual(std::span<const TermSpec> terms,
                                     std::span<const double> powers, double lambda,
                                     double sigma2, double budget) {
    double resid = 0.0;
    double used = 0.0;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const TermSpec& t = terms[k];
        const double x = powers[k];
        used += x;
        const double ub = std::min(t.cap, budget);
        if (ub <= 1e-12) continue;
        const double m = marginal(t, x, sigma2);
        if (x <= 1e-9)
            resid = std::max(resid, std::max(0.0, m - lambda));
        else if (ub - x <= 1e-9 * std::max(1.0, ub))
            resid = std::max(resid, std::max(0.0, lambda - m));
        else
            resid = std::max(resid, std::abs(m - lambda));
    }
    resid = std::max(resid, std::abs(lambda * (used - budget)));
    return resid;
}

namespace detail {

inline void refresh_cross_powers(std::array<TermSpec, kCoordsPerTx>& terms,
                                 const PowerMatrix& other) {
    for (TermSpec& t : terms) t.cross = other(t.subchannel, t.regime);
}

inline void store_powers(const std::array<TermSpec, kCoordsPerTx>& terms,
                         const std::vector<double>& powers, PowerMatrix& into) {
    for (std::size_t k = 0; k < terms.size(); ++k)
        into(terms[k].subchannel, terms[k].regime) = powers[k];
}

inline double two_sided_kkt_residual(std::array<TermSpec, kCoordsPerTx> terms1,
                                     std::array<TermSpec, kCoordsPerTx> terms2,
                                     const PowerAllocation& alloc, double lambda, double mu,
                                     const SolverConfig& config) {
    refresh_cross_powers(terms1, alloc.tx2);
    refresh_cross_powers(terms2, alloc.tx1);
    std::vector<double> p1(kCoordsPerTx), p2(kCoordsPerTx);
    for (std::size_t k = 0; k < kCoordsPerTx; ++k) {
        p1[k] = alloc.tx1(terms1[k].subchannel, terms1[k].regime);
        p2[k] = alloc.tx2(terms2[k].subchannel, terms2[k].regime);
    }
    const double r1 = waterfill_kkt_residual(terms1, p1, lambda, config.sigma2, config.tx1_budget);
    const double r2 = waterfill_kkt_residual(terms2, p2, mu, config.sigma2, config.tx2_budget);
    return std::max(r1, r2);
}

// Alternating block maximization shared by the SIC scheme and the
// interference-as-noise baseline. Both transmitters start from the equal
// split; starting from all zeros makes the first mover claim every clean
// coordinate and settles on the mirror-image equilibrium.
inline SolveResult alternating_solve(std::array<TermSpec, kCoordsPerTx> terms1,
                                     std::array<TermSpec, kCoordsPerTx> terms2,
                                     RateScheme score, const SolverConfig& config) {
    config.validate();
    SolveResult best;
    PowerAllocation alloc;
    alloc.tx1 = PowerMatrix::equal_split(config.tx1_budget);
    alloc.tx2 = PowerMatrix::equal_split(config.tx2_budget);

    double prev_rate = -kInfinity;
    double best_rate = -kInfinity;
    double lambda = 0.0, mu = 0.0;
    int iterations = 0;
    bool converged = false;

    for (int outer = 1; outer <= config.max_outer; ++outer) {
        iterations = outer;
        refresh_cross_powers(terms1, alloc.tx2);
        WaterLevelSolution w1 =
            waterfill_budget(terms1, config.tx1_budget, config.sigma2, config.tolerance);
        store_powers(terms1, w1.powers, alloc.tx1);
        lambda = w1.lambda;

        refresh_cross_powers(terms2, alloc.tx1);
        WaterLevelSolution w2 =
            waterfill_budget(terms2, config.tx2_budget, config.sigma2, config.tolerance);
        store_powers(terms2, w2.powers, alloc.tx2);
        mu = w2.lambda;

        const double rate = ergodic_rate(score, alloc, config.gains, config.probs, config.sigma2);
        if (rate > best_rate) {
            best_rate = rate;
            best.allocation = alloc;
            best.water_level_tx1 = lambda > 0.0 ? 1.0 / lambda : kInfinity;
            best.water_level_tx2 = mu > 0.0 ? 1.0 / mu : kInfinity;
        }
        if (std::abs(rate - prev_rate) < config.tolerance) {
            converged = true;
            break;
        }
        prev_rate = rate;
    }

    best.converged = converged;
    best.outer_iterations = iterations;
    best.regime_rates = all_regime_rates(score, best.allocation, config.gains, config.sigma2);
    best.ergodic_rate = 0.0;
    for (int j = 0; j < kRegimes; ++j)
        best.ergodic_rate += config.probs[j] * best.regime_rates[static_cast<std::size_t>(j)];
    const double lam_best =
        std::isfinite(best.water_level_tx1) && best.water_level_tx1 > 0.0 ? 1.0 / best.water_level_tx1 : 0.0;
    const double mu_best =
        std::isfinite(best.water_level_tx2) && best.water_level_tx2 > 0.0 ? 1.0 / best.water_level_tx2 : 0.0;
    best.kkt_residual = two_sided_kkt_residual(terms1, terms2, best.allocation, lam_best, mu_best, config);
    return best;
}

}  // namespace detail

/// SIC scheme solve: alternating generalized waterfilling with the
/// very-strong-interference caps, scored by the SIC rate expressions.
inline SolveResult alternate_solve(const SolverConfig& config) {
    const CapMatrix caps = vsic_caps(config.gains, config.sigma2, config.caps_mode);
    return detail::alternating_solve(scheme1_terms(TxSide::tx1, config, caps),
                                     scheme1_terms(TxSide::tx2, config, caps),
                                     RateScheme::sic, config);
}

/// Max KKT violation of a SIC-scheme result: per-coordinate stationarity and
/// cap/zero complementarity for both transmitters plus the budget
/// complementary-slackness terms, in nats/watt.
inline double kkt_residual(const SolveResult& result, const SolverConfig& config) {
    const CapMatrix caps = vsic_caps(config.gains, config.sigma2, config.caps_mode);
    const double lambda = std::isfinite(result.water_level_tx1) && result.water_level_tx1 > 0.0
                              ? 1.0 / result.water_level_tx1
                              : 0.0;
    const double mu = std::isfinite(result.water_level_tx2) && result.water_level_tx2 > 0.0
                          ? 1.0 / result.water_level_tx2
                          : 0.0;
    return detail::two_sided_kkt_residual(scheme1_terms(TxSide::tx1, config, caps),
                                          scheme1_terms(TxSide::tx2, config, caps),
                                          result.allocation, lambda, mu, config);
}

}  // namespace pgic
