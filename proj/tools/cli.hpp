#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lqc/grid.hpp"
#include "lqc/growth.hpp"
#include "lqc/holo.hpp"

namespace lqc::cli {

/// Bad flags or config: exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum ExitCode { kPass = 0, kFail = 1, kUsage = 2 };

std::uint64_t fnv1a64(const std::string& bytes);

/// "<n_r>x<n_theta>".
PolarGrid parse_grid(const std::string& s);

struct RunContext {
    std::string command;
    nlohmann::json config = nlohmann::json::object();  // effective config, flags applied
    std::filesystem::path out_dir = "out";
    std::uint64_t seed = 0;

    /// Hash of config.dump(): key order is sorted by the json type, so equal
    /// configs hash equally.
    std::uint64_t config_hash() const;
    /// "lqc <version> command=<cmd> config_hash=<16 hex> seed=<n>".
    std::string header() const;
    /// Opens out_dir/name for writing; text files get "# <header>" first.
    std::ofstream open(const std::string& name, bool with_header = true) const;
    /// Writes a JSON document with a "header" member.
    void write_json(const std::string& name, nlohmann::json doc) const;

    PolarGrid grid(const PolarGrid& fallback = {}) const;
    growth::GrowthFunction rho(const char* key = "rho") const;
    std::vector<std::string> written;  // file names, in order
};

/// Builds the effective config: file contents (or {}), then --seed and --grid.
RunContext make_context(const std::string& command, const std::optional<std::string>& config_path,
                        const std::string& out_dir, std::optional<std::int64_t> seed,
                        std::optional<std::string> grid);

/// Map spec JSON: {"kind": "identity" | "radial" (a) | "power" (alpha) |
/// "spiral" | "mobius" (p: [re, im], angle) | "rotation" (angle) |
/// "teichmuller" (phi0, K0, rho, solver) | "file" (path to LQCGRID)}.
DiskGridMap map_from_spec(const nlohmann::json& spec, const PolarGrid& g);
/// [[re, im], ...] or [re, ...].
HoloDensity holo_from_json(const nlohmann::json& j);
nlohmann::json complex_json(cplx z);

/// Runs a subcommand; maps exceptions to exit codes.
int run(RunContext& ctx);

int cmd_rho_check(RunContext& ctx);
int cmd_map_analyze(RunContext& ctx);
int cmd_beltrami_solve(RunContext& ctx);
int cmd_modulus(RunContext& ctx);
int cmd_qs_bound(RunContext& ctx);
int cmd_extremal_demo(RunContext& ctx);
int cmd_report(RunContext& ctx);

// ---- SVG -----------------------------------------------------------------------

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};
struct ChartOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
};
/// Minimal line chart; non-finite points are dropped.
std::string svg_line_chart(const std::vector<Series>& series, const ChartOptions& opt);

/// Numeric CSV with a header row; leading '#' lines are skipped.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<double> column(const std::string& name) const;
};
CsvTable read_csv(const std::filesystem::path& p);

}  // namespace lqc::cli
