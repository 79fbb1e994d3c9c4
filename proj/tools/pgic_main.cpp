// pgic: ergodic sum-rate power allocation for the two-user, two-subchannel
// parallel Gaussian interference channel.

#include <map>
#include <string>

#include <CLI11.hpp>

#include "pgic/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Ergodic sum-rate power allocation for the 2-user, 2-subchannel "
                 "parallel Gaussian interference channel"};
    app.require_subcommand(1);

    pgic::CliInvocation inv;
    std::string kind;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", inv.config_path, "JSON config file (defaults when omitted)");
    };

    CLI::App* solve = app.add_subcommand("solve", "Solve one scheme and print the allocation");
    add_common(solve);
    solve->add_option("--scheme", inv.scheme, "Scheme: 1 (SIC), 2 (noise), 3 (equal split)")
        ->required()
        ->check(CLI::Range(1, 3));

    CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter sweep and write CSV/SVG");
    add_common(sweep);
    sweep->add_option("--kind", kind, "Sweep kind: power, gain, prob or asym")
        ->required()
        ->check(CLI::IsMember({"power", "gain", "prob", "asym"}));
    sweep->add_option("--out", inv.output_dir, "Output directory (default: .)");
    sweep->add_flag("--svg", inv.emit_svg, "Also render an SVG chart");
    sweep->add_option("--jobs", inv.jobs, "Worker count (default: hardware concurrency)");

    CLI::App* compare = app.add_subcommand("compare", "Solve all three schemes and print rates");
    add_common(compare);

    CLI::App* validate = app.add_subcommand("validate", "Check a config file");
    add_common(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? pgic::kExitOk : pgic::kExitUsage;
    }

    if (solve->parsed()) inv.command = pgic::Command::solve;
    else if (compare->parsed()) inv.command = pgic::Command::compare;
    else if (validate->parsed()) inv.command = pgic::Command::validate;
    else {
        inv.command = pgic::Command::sweep;
        static const std::map<std::string, pgic::SweepKind> kinds = {
            {"power", pgic::SweepKind::power},
            {"gain", pgic::SweepKind::gain},
            {"prob", pgic::SweepKind::prob},
            {"asym", pgic::SweepKind::asym},
        };
        inv.sweep_kind = kinds.at(kind);
    }
    return pgic::run(inv);
}
