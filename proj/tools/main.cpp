#include <CLI11.hpp>
#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Locally quasiconformal maps: allowability, Beltrami solves, moduli and extremality experiments"};
    app.set_version_flag("--version", std::string(lqc::kVersion));
    app.require_subcommand(1);

    std::optional<std::string> config, grid;
    std::optional<std::int64_t> seed;
    std::string out = "out";
    app.add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--out", out, "output directory")->capture_default_str();
    app.add_option("--seed", seed, "seed recorded in every output header");
    app.add_option("--grid", grid, "polar grid <n_r>x<n_theta>");

    const std::vector<std::pair<const char*, const char*>> commands{
        {"rho-check", "allowability report and I(t) samples for a growth function"},
        {"map-analyze", "dilatation, distortion, K^rho and David profile of a map"},
        {"beltrami-solve", "disk, exhaustion or Teichmuller-type Beltrami solve"},
        {"modulus", "quadrilateral moduli against the lower bound, capacity table"},
        {"qs-bound", "lambda(t) table and quasisymmetry check of a map"},
        {"extremal-demo", "extremal search over boundary-fixing twists"},
        {"report", "SVG charts from the CSVs of an output directory"},
    };
    for (auto [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : lqc::cli::kUsage;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        auto ctx = lqc::cli::make_context(command, config, out, seed, grid);
        return lqc::cli::run(ctx);
    } catch (const lqc::cli::UsageError& e) {
        std::cerr << "lqc " << command << ": " << e.what() << '\n';
        return lqc::cli::kUsage;
    }
}
