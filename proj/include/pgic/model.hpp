#pragma once

// Domain model for the two-user, two-subchannel parallel Gaussian
// interference channel: quantized channel gains, interference-regime
// probabilities, power matrices, very-strong-interference power caps and
// the closed-form per-regime sum rates (SIC and interference-as-noise).

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pgic {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline constexpr int kSubchannels = 2;
// Joint interference regimes, indexed 0..3:
//   0: (weak, weak)   1: (strong, weak)   2: (weak, strong)   3: (strong, strong)
// where the first slot is subchannel 1 and the second subchannel 2.
inline constexpr int kRegimes = 4;
inline constexpr int kCoordsPerTx = kSubchannels * kRegimes;

enum class InterferenceRegime { weak, strong_or_very_strong };

/// Classifies a single interference gain. Gains >= 1 are strong (or very
/// strong, depending on the allocated power); gains < 1 are weak.
inline InterferenceRegime classify_gain(double gain) {
    if (!(gain >= 0.0))
        throw std::invalid_argument("classify_gain: gain must be nonnegative");
    return gain < 1.0 ? InterferenceRegime::weak
                      : InterferenceRegime::strong_or_very_strong;
}

/// True when the given subchannel uses its strong-slot gain in the given
/// regime. The regime index fixes the structure; the numeric gain value is
/// not re-classified.
inline constexpr bool strong_slot(int subchannel, int regime) {
    return subchannel == 0 ? (regime == 1 || regime == 3)
                           : (regime == 2 || regime == 3);
}

/// Quantized cross-link gains. a1/b1 are the weak-regime values for
/// subchannels 1 and 2; a2/b2 the strong/very-strong values.
struct ChannelGains {
    double a1 = 0.1;
    double b1 = 0.1;
    double a2 = 10.0;
    double b2 = 10.0;

    void validate() const {
        if (!(a1 >= 0.0 && a1 < 1.0))
            throw std::invalid_argument("gains: a1 must satisfy 0 <= a1 < 1");
        if (!(b1 >= 0.0 && b1 < 1.0))
            throw std::invalid_argument("gains: b1 must satisfy 0 <= b1 < 1");
        if (!(a2 >= 1.0))
            throw std::invalid_argument("gains: a2 must satisfy a2 >= 1");
        if (!(b2 >= 1.0))
            throw std::invalid_argument("gains: b2 must satisfy b2 >= 1");
    }
};

/// Gain seen on `subchannel` in joint regime `regime`.
inline double subchannel_gain(const ChannelGains& g, int subchannel, int regime) {
    if (subchannel == 0) return strong_slot(0, regime) ? g.a2 : g.a1;
    return strong_slot(1, regime) ? g.b2 : g.b1;
}

/// Probabilities of the four joint regimes, in regime-index order.
struct RegimeDistribution {
    std::array<double, kRegimes> p{0.25, 0.25, 0.25, 0.25};

    static RegimeDistribution uniform() { return {}; }

    double operator[](int regime) const { return p[static_cast<std::size_t>(regime)]; }

    void validate(double sum_tol = 1e-12) const {
        double sum = 0.0;
        for (double v : p) {
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("probs: each probability must lie in [0, 1]");
            sum += v;
        }
        if (std::abs(sum - 1.0) > sum_tol)
            throw std::invalid_argument("probs: probabilities must sum to 1");
    }
};

/// 2x4 matrix of transmit powers for one transmitter, indexed by
/// (subchannel, regime), row-major.
struct PowerMatrix {
    std::array<double, kCoordsPerTx> v{};

    double& operator()(int subchannel, int regime) {
        return v[static_cast<std::size_t>(subchannel * kRegimes + regime)];
    }
    double operator()(int subchannel, int regime) const {
        return v[static_cast<std::size_t>(subchannel * kRegimes + regime)];
    }

    double sum() const {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }

    static PowerMatrix equal_split(double total) {
        PowerMatrix m;
        m.v.fill(total / kCoordsPerTx);
        return m;
    }
};

/// Power matrices for both transmitters.
struct PowerAllocation {
    PowerMatrix tx1;  // P
    PowerMatrix tx2;  // Q
};

/// Which constraint set forces the very-strong regime.
///  - paper:     caps exactly on P12/P14/P22/P24 and Q13/Q14/Q23/Q24.
///  - symmetric: caps on every SIC-decoded power (both transmitters on
///               subchannel 1 in regimes 1,3 and subchannel 2 in 2,3).
enum class CapsMode { paper, symmetric };

/// Full problem description: noise power, sum-power budgets, convergence
/// tolerance, iteration cap, cap placement and gradient weighting.
struct SolverConfig {
    double sigma2 = 1.0;
    double tx1_budget = 50.0;  // P
    double tx2_budget = 50.0;  // Q
    double tolerance = 1e-5;   // tau
    int max_outer = 100;
    CapsMode caps_mode = CapsMode::paper;
    bool weighted_gradients = true;
    ChannelGains gains;
    RegimeDistribution probs;

    void validate() const {
        if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
        if (!(tx1_budget >= 0.0)) throw std::invalid_argument("P must be nonnegative");
        if (!(tx2_budget >= 0.0)) throw std::invalid_argument("Q must be nonnegative");
        if (!(tolerance > 0.0)) throw std::invalid_argument("tau must be positive");
        if (max_outer < 1) throw std::invalid_argument("max_outer must be >= 1");
        gains.validate();
        probs.validate();
    }
};

inline SolverConfig default_config() { return SolverConfig{}; }

/// Per-coordinate power upper bounds that enforce the very-strong regime.
/// +infinity marks unconstrained coordinates.
struct CapMatrix {
    PowerMatrix tx1;
    PowerMatrix tx2;

    CapMatrix() {
        tx1.v.fill(kInfinity);
        tx2.v.fill(kInfinity);
    }
};

/// Cap matrix for the selected mode. A cross link with quantized gain g >= 1
/// becomes very strong (hence removable by SIC) when the interfering power
/// stays at or below (g - 1) * sigma^2.
inline CapMatrix vsic_caps(const ChannelGains& gains, double sigma2, CapsMode mode) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("vsic_caps: sigma2 must be positive");
    const double cap_a = (gains.a2 - 1.0) * sigma2;
    const double cap_b = (gains.b2 - 1.0) * sigma2;
    CapMatrix caps;
    if (mode == CapsMode::paper) {
        caps.tx1(0, 1) = cap_a;
        caps.tx1(0, 3) = cap_a;
        caps.tx1(1, 1) = cap_b;
        caps.tx1(1, 3) = cap_b;
        caps.tx2(0, 2) = cap_a;
        caps.tx2(0, 3) = cap_a;
        caps.tx2(1, 2) = cap_b;
        caps.tx2(1, 3) = cap_b;
    } else {
        for (int j : {1, 3}) {
            caps.tx1(0, j) = cap_a;
            caps.tx2(0, j) = cap_a;
        }
        for (int j : {2, 3}) {
            caps.tx1(1, j) = cap_b;
            caps.tx2(1, j) = cap_b;
        }
    }
    return caps;
}

enum class RateScheme { sic, noise };

namespace detail {

// Both directions of one subchannel with the cross link treated as noise.
inline double noise_pair_rate(double own, double other, double gain, double sigma2) {
    return std::log2(1.0 + own / (sigma2 + other * gain)) +
           std::log2(1.0 + other / (sigma2 + own * gain));
}

}  // namespace detail

/// Sum rate of regime `regime` under the SIC scheme: strong-slot
/// subchannels carry interference-free terms (interference made very strong
/// and cancelled), weak-slot subchannels treat the cross power as noise.
inline double regime_rate_scheme1(int regime, const PowerAllocation& alloc,
                                  const ChannelGains& gains, double sigma2) {
    double r = 0.0;
    for (int sub = 0; sub < kSubchannels; ++sub) {
        const double p = alloc.tx1(sub, regime);
        const double q = alloc.tx2(sub, regime);
        if (strong_slot(sub, regime))
            r += std::log2(1.0 + p / sigma2) + std::log2(1.0 + q / sigma2);
        else
            r += detail::noise_pair_rate(p, q, subchannel_gain(gains, sub, regime), sigma2);
    }
    return r;
}

/// Sum rate of regime `regime` with interference never cancelled.
inline double regime_rate_noise(int regime, const PowerAllocation& alloc,
                                const ChannelGains& gains, double sigma2) {
    double r = 0.0;
    for (int sub = 0; sub < kSubchannels; ++sub)
        r += detail::noise_pair_rate(alloc.tx1(sub, regime), alloc.tx2(sub, regime),
                                     subchannel_gain(gains, sub, regime), sigma2);
    return r;
}

inline double regime_rate(RateScheme scheme, int regime, const PowerAllocation& alloc,
                          const ChannelGains& gains, double sigma2) {
    return scheme == RateScheme::sic ? regime_rate_scheme1(regime, alloc, gains, sigma2)
                                     : regime_rate_noise(regime, alloc, gains, sigma2);
}

inline std::array<double, kRegimes> all_regime_rates(RateScheme scheme,
                                                     const PowerAllocation& alloc,
                                                     const ChannelGains& gains,
                                                     double sigma2) {
    std::array<double, kRegimes> r{};
    for (int j = 0; j < kRegimes; ++j) r[static_cast<std::size_t>(j)] = regime_rate(scheme, j, alloc, gains, sigma2);
    return r;
}

/// Probability-weighted average rate over the four regimes, in bits/s/Hz.
inline double ergodic_rate(RateScheme scheme, const PowerAllocation& alloc,
                           const ChannelGains& gains, const RegimeDistribution& probs,
                           double sigma2) {
    double r = 0.0;
    for (int j = 0; j < kRegimes; ++j)
        r += probs[j] * regime_rate(scheme, j, alloc, gains, sigma2);
    return r;
}

/// Solver output: best allocation found, its rates, the water levels
/// 1/lambda and 1/mu (NaN when the scheme has none), iteration count,
/// optimality residual and convergence flag.
struct SolveResult {
    PowerAllocation allocation;
    double ergodic_rate = 0.0;
    std::array<double, kRegimes> regime_rates{};
    double water_level_tx1 = std::numeric_limits<double>::quiet_NaN();
    double water_level_tx2 = std::numeric_limits<double>::quiet_NaN();
    int outer_iterations = 0;
    double kkt_residual = 0.0;
    bool converged = false;
};

/// One feasibility defect found by validate_allocation.
struct AllocationIssue {
    enum class Kind { negative, over_cap };
    Kind kind;
    int tx;  // 1 or 2
    int subchannel;
    int regime;
    double value;
    double bound;
};

struct ValidationReport {
    bool feasible = true;
    double tx1_budget_slack = 0.0;  // budget - sum, negative when exceeded
    double tx2_budget_slack = 0.0;
    std::vector<AllocationIssue> issues;
};

/// Checks nonnegativity, the sum-power budgets (within config.tolerance)
/// and the per-coordinate caps. Violations are collected, not thrown.
inline ValidationReport validate_allocation(const PowerAllocation& alloc,
                                            const CapMatrix& caps,
                                            const SolverConfig& config) {
    ValidationReport rep;
    const double cap_tol = 1e-9;
    for (int tx = 0; tx < 2; ++tx) {
        const PowerMatrix& m = tx == 0 ? alloc.tx1 : alloc.tx2;
        const PowerMatrix& c = tx == 0 ? caps.tx1 : caps.tx2;
        for (int sub = 0; sub < kSubchannels; ++sub) {
            for (int j = 0; j < kRegimes; ++j) {
                const double x = m(sub, j);
                if (x < 0.0) {
                    rep.issues.push_back({AllocationIssue::Kind::negative, tx + 1, sub, j, x, 0.0});
                    rep.feasible = false;
                }
                if (x > c(sub, j) + cap_tol) {
                    rep.issues.push_back({AllocationIssue::Kind::over_cap, tx + 1, sub, j, x, c(sub, j)});
                    rep.feasible = false;
                }
            }
        }
    }
    rep.tx1_budget_slack = config.tx1_budget - alloc.tx1.sum();
    rep.tx2_budget_slack = config.tx2_budget - alloc.tx2.sum();
    if (rep.tx1_budget_slack < -config.tolerance || rep.tx2_budget_slack < -config.tolerance)
        rep.feasible = false;
    return rep;
}

}  // namespace pgic
