#pragma once

// Parameter sweeps across the three schemes with CSV tables and static SVG
// line charts. Sweep points are independent solves and run on a small
// worker pool; rows are stored by index so the output does not depend on
// scheduling.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pgic/model.hpp"
#include "pgic/schemes.hpp"

namespace pgic {

/// One sweep: x axis, the three per-scheme rate columns and a snapshot of
/// the base configuration the sweep was derived from.
struct SweepTable {
    std::string x_label;
    std::string title;
    std::vector<double> x_values;
    std::array<std::vector<double>, 3> scheme_rates;  // [scheme-1][point], bits/s/Hz
    std::vector<std::array<bool, 3>> converged;       // per point, per scheme
    SolverConfig base;
    std::string notes;
};

/// Value with six significant digits, trailing zeros kept ("4.82450").
inline std::string format_sig6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%#.6g", v);
    return buf;
}

namespace detail {

inline void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    unsigned workers = jobs != 0 ? jobs : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline std::vector<double> sweep_axis(double lo, double hi, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("sweep: step must be positive");
    if (lo > hi) throw std::invalid_argument("sweep: lo must not exceed hi");
    std::vector<double> xs;
    const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    xs.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) xs.push_back(lo + step * k);
    return xs;
}

inline SweepTable run_sweep(std::vector<double> xs, const SolverConfig& base,
                            const std::function<SolverConfig(double)>& config_at,
                            unsigned jobs) {
    SweepTable table;
    table.base = base;
    table.x_values = std::move(xs);
    const std::size_t n = table.x_values.size();
    for (auto& col : table.scheme_rates) col.assign(n, 0.0);
    table.converged.assign(n, {true, true, true});
    parallel_for(n, jobs, [&](std::size_t i) {
        const SolverConfig cfg = config_at(table.x_values[i]);
        for (int s = 0; s < 3; ++s) {
            const SolveResult r = solve_scheme(s + 1, cfg);
            table.scheme_rates[static_cast<std::size_t>(s)][i] = r.ergodic_rate;
            table.converged[i][static_cast<std::size_t>(s)] = r.converged;
        }
    });
    return table;
}

}  // namespace detail

/// Sum-rate vs equal sum-power budgets P = Q = v.
inline SweepTable sweep_power(double lo, double hi, double step, const SolverConfig& base,
                              unsigned jobs = 0) {
    SweepTable t = detail::run_sweep(detail::sweep_axis(lo, hi, step), base,
                                     [&](double v) {
                                         SolverConfig c = base;
                                         c.tx1_budget = v;
                                         c.tx2_budget = v;
                                         return c;
                                     },
                                     jobs);
    t.x_label = "total_power_w";
    t.title = "Sum-rate vs total power";
    return t;
}

/// Sum-rate vs the strong-slot gains a2 = b2 = v (v >= 1), budgets fixed.
inline SweepTable sweep_gain(double lo, double hi, double step, const SolverConfig& base,
                             unsigned jobs = 0) {
    if (!(lo >= 1.0)) throw std::invalid_argument("sweep_gain: lo must be >= 1");
    SweepTable t = detail::run_sweep(detail::sweep_axis(lo, hi, step), base,
                                     [&](double v) {
                                         SolverConfig c = base;
                                         c.gains.a2 = v;
                                         c.gains.b2 = v;
                                         return c;
                                     },
                                     jobs);
    t.x_label = "strong_gain";
    t.title = "Sum-rate vs strong/very-strong quantized gain";
    return t;
}

/// Sum-rate vs the regime-distribution parameter p: probabilities
/// (p, 0.5 - p, 0.5 - p, p) in regime order.
inline SweepTable sweep_prob(double p_lo, double p_hi, double step, const SolverConfig& base,
                             unsigned jobs = 0) {
    if (!(p_lo >= 0.0 && p_hi <= 0.5))
        throw std::invalid_argument("sweep_prob: p must lie in [0, 0.5]");
    SweepTable t = detail::run_sweep(detail::sweep_axis(p_lo, p_hi, step), base,
                                     [&](double p) {
                                         SolverConfig c = base;
                                         c.probs.p = {p, 0.5 - p, 0.5 - p, p};
                                         return c;
                                     },
                                     jobs);
    t.x_label = "p_same_regime";
    t.title = "Sum-rate vs regime probability p";
    return t;
}

/// Sum-rate vs the cross-subchannel asymmetry ratio k: b1 = k * a1 and
/// b2 = k * a2 with a1 = 0.1, a2 = 10. The regime structure stays fixed;
/// b2 is used as the strong-slot gain even if k * a2 dips below 1.
inline SweepTable sweep_asym(double k_lo, double k_hi, double step, const SolverConfig& base,
                             unsigned jobs = 0) {
    if (!(k_lo > 0.0 && k_hi <= 1.0))
        throw std::invalid_argument("sweep_asym: k must lie in (0, 1]");
    SweepTable t = detail::run_sweep(detail::sweep_axis(k_lo, k_hi, step), base,
                                     [&](double k) {
                                         SolverConfig c = base;
                                         c.gains.a1 = 0.1;
                                         c.gains.a2 = 10.0;
                                         c.gains.b1 = k * c.gains.a1;
                                         c.gains.b2 = k * c.gains.a2;
                                         return c;
                                     },
                                     jobs);
    t.x_label = "gain_ratio_k";
    t.title = "Sum-rate vs subchannel gain asymmetry";
    t.notes = "regime structure fixed: b-gains quantized by slot, not re-classified";
    return t;
}

/// Largest percentage advantage of scheme 1 over the given scheme (2 or 3)
/// across the sweep, as 100 * (r1 / r_other - 1).
inline double max_advantage_pct(const SweepTable& table, int other_scheme) {
    if (other_scheme != 2 && other_scheme != 3)
        throw std::invalid_argument("max_advantage_pct: scheme must be 2 or 3");
    const auto& r1 = table.scheme_rates[0];
    const auto& ro = table.scheme_rates[static_cast<std::size_t>(other_scheme - 1)];
    double best = -kInfinity;
    for (std::size_t i = 0; i < r1.size(); ++i)
        if (ro[i] > 0.0) best = std::max(best, 100.0 * (r1[i] / ro[i] - 1.0));
    return best;
}

inline void write_csv(const SweepTable& table, std::ostream& os) {
    os << "x,scheme1_bps_hz,scheme2_bps_hz,scheme3_bps_hz\n";
    for (std::size_t i = 0; i < table.x_values.size(); ++i) {
        os << format_sig6(table.x_values[i]);
        for (const auto& col : table.scheme_rates) os << ',' << format_sig6(col[i]);
        os << '\n';
    }
}

/// UTF-8 CSV, six significant digits, newline-terminated final row.
inline void write_csv(const SweepTable& table, const std::filesystem::path& destination) {
    std::ofstream os(destination);
    if (!os) throw std::runtime_error("cannot open for writing: " + destination.string());
    write_csv(table, os);
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + destination.string());
}

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace detail

inline void render_svg(const SweepTable& table, std::ostream& os) {
    if (table.x_values.size() < 2)
        throw std::invalid_argument("render_svg: need at least 2 points");

    const double width = 800.0, height = 520.0;
    const double ml = 70.0, mr = 150.0, mt = 48.0, mb = 56.0;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double x_min = table.x_values.front(), x_max = table.x_values.back();
    for (double x : table.x_values) {
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
    }
    if (x_max == x_min) x_max = x_min + 1.0;
    double y_max = 0.0;
    for (const auto& col : table.scheme_rates)
        for (double r : col) y_max = std::max(y_max, r);
    if (y_max <= 0.0) y_max = 1.0;
    y_max *= 1.05;

    const auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
    const auto py = [&](double y) { return mt + ph - y / y_max * ph; };

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
       << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
       << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
          "text-anchor=\"middle\">"
       << detail::xml_escape(table.title) << "</text>\n";

    // axes
    os << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
       << mt + ph << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
       << "\" stroke=\"black\"/>\n";
    const int n_ticks = 5;
    for (int k = 0; k < n_ticks; ++k) {
        const double fx = x_min + (x_max - x_min) * k / (n_ticks - 1);
        const double fy = y_max * k / (n_ticks - 1);
        os << "<line x1=\"" << px(fx) << "\" y1=\"" << mt + ph << "\" x2=\"" << px(fx)
           << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << px(fx) << "\" y=\"" << mt + ph + 20
           << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", fx);
        os << buf << "</text>\n";
        os << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << ml << "\" y2=\""
           << py(fy) << "\" stroke=\"black\"/>\n";
        std::snprintf(buf, sizeof buf, "%.4g", fy);
        os << "<text x=\"" << ml - 8 << "\" y=\"" << py(fy) + 4
           << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << buf
           << "</text>\n";
    }
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 14
       << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
       << detail::xml_escape(table.x_label) << "</text>\n";
    os << "<text x=\"18\" y=\"" << mt + ph / 2
       << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
          "transform=\"rotate(-90 18 "
       << mt + ph / 2 << ")\">rate_bps_hz</text>\n";

    const char* colors[3] = {"#1f77b4", "#ff7f0e", "#2ca02c"};
    for (int s = 0; s < 3; ++s) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[s] << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < table.x_values.size(); ++i) {
            if (i) os << ' ';
            os << px(table.x_values[i]) << ','
               << py(table.scheme_rates[static_cast<std::size_t>(s)][i]);
        }
        os << "\"/>\n";
        const double ly = mt + 16.0 + 22.0 * s;
        os << "<line x1=\"" << ml + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << ml + pw + 36
           << "\" y2=\"" << ly << "\" stroke=\"" << colors[s] << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << ml + pw + 42 << "\" y=\"" << ly + 4
           << "\" font-family=\"sans-serif\" font-size=\"12\">Scheme " << s + 1 << "</text>\n";
    }
    os << "</svg>\n";
}

/// Standalone SVG 1.1 line chart of the three scheme columns.
inline void render_svg(const SweepTable& table, const std::filesystem::path& destination) {
    if (table.x_values.size() < 2)
        throw std::invalid_argument("render_svg: need at least 2 points");
    std::ofstream os(destination);
    if (!os) throw std::runtime_error("cannot open for writing: " + destination.string());
    render_svg(table, os);
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + destination.string());
}

}  // namespace pgic
