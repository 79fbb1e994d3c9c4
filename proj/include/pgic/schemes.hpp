#pragma once

// Baseline power-allocation schemes: optimal iterative waterfilling with
// interference treated as noise (scheme 2) and the blind equal split
// (scheme 3). Scheme 1 is alternate_solve in waterfill.hpp.

#include "pgic/model.hpp"
#include "pgic/waterfill.hpp"

namespace pgic {

/// Scheme 2: the same alternating waterfilling machinery with every
/// coordinate coupled through the actual regime gain and no caps, scored by
/// the no-cancellation rate.
inline SolveResult scheme2_solve(const SolverConfig& config) {
    return detail::alternating_solve(scheme2_terms(TxSide::tx1, config),
                                     scheme2_terms(TxSide::tx2, config),
                                     RateScheme::noise, config);
}

/// Scheme 3: budget split equally over all eight coordinates of each
/// transmitter, interference treated as noise. No water levels.
inline SolveResult scheme3_allocate(const SolverConfig& config) {
    config.validate();
    SolveResult result;
    result.allocation.tx1 = PowerMatrix::equal_split(config.tx1_budget);
    result.allocation.tx2 = PowerMatrix::equal_split(config.tx2_budget);
    result.regime_rates =
        all_regime_rates(RateScheme::noise, result.allocation, config.gains, config.sigma2);
    result.ergodic_rate = 0.0;
    for (int j = 0; j < kRegimes; ++j)
        result.ergodic_rate += config.probs[j] * result.regime_rates[static_cast<std::size_t>(j)];
    result.converged = true;
    result.outer_iterations = 0;
    result.kkt_residual = 0.0;
    return result;
}

/// Dispatch by scheme number (1..3).
inline SolveResult solve_scheme(int scheme, const SolverConfig& config) {
    switch (scheme) {
        case 1: return alternate_solve(config);
        case 2: return scheme2_solve(config);
        case 3: return scheme3_allocate(config);
        default: throw std::invalid_argument("solve_scheme: scheme must be 1, 2 or 3");
    }
}

}  // namespace pgic
