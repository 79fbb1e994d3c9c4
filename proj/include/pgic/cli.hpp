#pragma once

// Command dispatch for the pgic tool. Argument parsing lives in the binary;
// this header turns a parsed invocation into solves, sweeps and files so
// tests can drive the exact command surface.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "pgic/config_io.hpp"
#include "pgic/experiments.hpp"
#include "pgic/schemes.hpp"

namespace pgic {

enum class Command { solve, sweep, compare, validate };
enum class SweepKind { power, gain, prob, asym };

struct CliInvocation {
    Command command = Command::solve;
    int scheme = 0;  // 1..3, required by solve
    std::optional<SweepKind> sweep_kind;
    std::string config_path;  // empty: defaults
    std::string output_dir = ".";
    bool emit_svg = false;
    unsigned jobs = 0;  // 0: one worker per execution unit
};

// exit codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;

namespace detail {

inline const char* sweep_kind_name(SweepKind k) {
    switch (k) {
        case SweepKind::power: return "power";
        case SweepKind::gain: return "gain";
        case SweepKind::prob: return "prob";
        case SweepKind::asym: return "asym";
    }
    return "?";
}

inline void print_power_matrix(std::ostream& os, const char* name, const PowerMatrix& m) {
    for (int sub = 0; sub < kSubchannels; ++sub) {
        os << name << "_sub" << sub + 1 << '=';
        for (int j = 0; j < kRegimes; ++j) {
            if (j) os << ' ';
            os << format_sig6(m(sub, j));
        }
        os << '\n';
    }
}

inline void print_solve_result(std::ostream& os, const SolveResult& r) {
    os << "converged=" << (r.converged ? "true" : "false") << '\n';
    os << "outer_iterations=" << r.outer_iterations << '\n';
    os << "rate_bps_hz=" << format_sig6(r.ergodic_rate) << '\n';
    os << "regime_rates_bps_hz=";
    for (int j = 0; j < kRegimes; ++j) {
        if (j) os << ' ';
        os << format_sig6(r.regime_rates[static_cast<std::size_t>(j)]);
    }
    os << '\n';
    os << "water_level_tx1=" << (std::isnan(r.water_level_tx1) ? "n/a" : format_sig6(r.water_level_tx1)) << '\n';
    os << "water_level_tx2=" << (std::isnan(r.water_level_tx2) ? "n/a" : format_sig6(r.water_level_tx2)) << '\n';
    os << "kkt_residual=" << format_sig6(r.kkt_residual) << '\n';
    print_power_matrix(os, "P", r.allocation.tx1);
    print_power_matrix(os, "Q", r.allocation.tx2);
}

inline void warn_not_converged(const SolveResult& r, int scheme) {
    if (!r.converged)
        std::cerr << "warning: scheme " << scheme << " did not converge within max_outer "
                  << "iterations; reported rate is a feasible lower bound\n";
}

inline SweepTable run_sweep_kind(SweepKind kind, const SolverConfig& cfg, unsigned jobs) {
    switch (kind) {
        case SweepKind::power: return sweep_power(10.0, 100.0, 10.0, cfg, jobs);
        case SweepKind::gain: return sweep_gain(1.0, 20.0, 1.0, cfg, jobs);
        case SweepKind::prob: return sweep_prob(0.0, 0.5, 0.05, cfg, jobs);
        case SweepKind::asym: return sweep_asym(0.1, 1.0, 0.1, cfg, jobs);
    }
    throw std::invalid_argument("unknown sweep kind");
}

}  // namespace detail

/// Executes one parsed invocation. Returns the process exit status:
/// 0 on success, 1 on usage/config errors, 2 on I/O failures.
inline int run(const CliInvocation& inv) {
    SolverConfig cfg;
    try {
        cfg = inv.config_path.empty() ? default_config() : parse_config(inv.config_path);
    } catch (const ConfigIoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ConfigParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        switch (inv.command) {
            case Command::solve: {
                if (inv.scheme < 1 || inv.scheme > 3) {
                    std::cerr << "error: solve requires --scheme 1, 2 or 3\n";
                    return kExitUsage;
                }
                const SolveResult r = solve_scheme(inv.scheme, cfg);
                std::cout << "scheme=" << inv.scheme << '\n';
                detail::print_solve_result(std::cout, r);
                detail::warn_not_converged(r, inv.scheme);
                return kExitOk;
            }
            case Command::compare: {
                SolveResult rs[3];
                for (int s = 0; s < 3; ++s) {
                    rs[s] = solve_scheme(s + 1, cfg);
                    std::cout << "scheme" << s + 1
                              << "_bps_hz=" << format_sig6(rs[s].ergodic_rate) << '\n';
                    detail::warn_not_converged(rs[s], s + 1);
                }
                int order[3] = {0, 1, 2};
                std::sort(order, order + 3,
                          [&](int a, int b) { return rs[a].ergodic_rate > rs[b].ergodic_rate; });
                std::cout << "ordering=scheme" << order[0] + 1 << ">scheme" << order[1] + 1
                          << ">scheme" << order[2] + 1 << '\n';
                return kExitOk;
            }
            case Command::validate: {
                // The parser already enforced every config invariant; getting
                // here means the config is feasible. Echo the derived caps so
                // a degenerate setup (all caps zero) is visible.
                std::cout << "config_ok=true\n";
                std::cout << "cap_subchannel1_w=" << format_sig6((cfg.gains.a2 - 1.0) * cfg.sigma2)
                          << '\n';
                std::cout << "cap_subchannel2_w=" << format_sig6((cfg.gains.b2 - 1.0) * cfg.sigma2)
                          << '\n';
                return kExitOk;
            }
            case Command::sweep: {
                if (!inv.sweep_kind) {
                    std::cerr << "error: sweep requires --kind power|gain|prob|asym\n";
                    return kExitUsage;
                }
                const SweepTable table = detail::run_sweep_kind(*inv.sweep_kind, cfg, inv.jobs);
                std::error_code ec;
                std::filesystem::create_directories(inv.output_dir, ec);
                if (ec) {
                    std::cerr << "error: cannot create output directory " << inv.output_dir
                              << ": " << ec.message() << '\n';
                    return kExitIo;
                }
                const std::string kind = detail::sweep_kind_name(*inv.sweep_kind);
                const std::filesystem::path csv =
                    std::filesystem::path(inv.output_dir) / ("sweep_" + kind + ".csv");
                write_csv(table, csv);
                std::cout << "csv=" << csv.string() << '\n';
                if (inv.emit_svg) {
                    const std::filesystem::path svg =
                        std::filesystem::path(inv.output_dir) / ("sweep_" + kind + ".svg");
                    render_svg(table, svg);
                    std::cout << "svg=" << svg.string() << '\n';
                }
                std::cout << "max_advantage_vs_scheme2_pct=" << format_sig6(max_advantage_pct(table, 2))
                          << '\n';
                std::cout << "max_advantage_vs_scheme3_pct=" << format_sig6(max_advantage_pct(table, 3))
                          << '\n';
                bool all_converged = true;
                for (const auto& row : table.converged)
                    for (bool c : row) all_converged = all_converged && c;
                if (!all_converged)
                    std::cerr << "warning: some sweep points did not converge; "
                                 "their rows hold feasible lower bounds\n";
                if (!table.notes.empty()) std::cout << "notes=" << table.notes << '\n';
                return kExitOk;
            }
        }
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace pgic
