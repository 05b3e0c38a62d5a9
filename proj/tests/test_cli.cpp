#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using namespace lqc;
using namespace lqc::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "lqc_cli_test" / name;
    fs::remove_all(p);
    return p;
}

int run_with(const std::string& command, const nlohmann::json& config, const fs::path& out) {
    RunContext ctx;
    ctx.command = command;
    ctx.config = config;
    ctx.out_dir = out;
    if (config.contains("seed")) ctx.seed = config["seed"].get<std::uint64_t>();
    return run(ctx);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("FNV-1a and grid flags") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    const auto g = parse_grid("64x128");
    CHECK(g.n_r == 64);
    CHECK(g.n_theta == 128);
    CHECK_THROWS_AS(parse_grid("64by128"), UsageError);
    CHECK_THROWS_AS(parse_grid("64x10"), UsageError);
}

TEST_CASE("context: config file, flag overrides, header") {
    const fs::path dir = scratch("ctx");
    fs::create_directories(dir);
    {
        std::ofstream(dir / "c.json") << R"({"rho": {"kind": "constant"}, "seed": 3})";
        std::ofstream(dir / "bad.json") << R"({"rho": )";
    }
    auto ctx = make_context("rho-check", (dir / "c.json").string(), (dir / "out").string(), std::nullopt, "32x64");
    CHECK(ctx.seed == 3);
    CHECK(ctx.config["grid"] == "32x64");
    auto again = make_context("rho-check", (dir / "c.json").string(), "elsewhere", std::nullopt, "32x64");
    CHECK(again.config_hash() == ctx.config_hash());
    auto seeded = make_context("rho-check", (dir / "c.json").string(), "x", 9, std::nullopt);
    CHECK(seeded.seed == 9);
    CHECK(seeded.config_hash() != ctx.config_hash());
    const std::string h = ctx.header();
    CHECK(h.rfind(std::string("lqc ") + kVersion + " command=rho-check config_hash=", 0) == 0);
    CHECK(h.find(" seed=3") != std::string::npos);
    CHECK_THROWS_AS(make_context("rho-check", (dir / "bad.json").string(), "x", std::nullopt, std::nullopt), UsageError);
    CHECK_THROWS_AS(make_context("rho-check", (dir / "none.json").string(), "x", std::nullopt, std::nullopt), UsageError);
}

TEST_CASE("rho-check exit codes and outputs") {
    const fs::path a = scratch("rho_const"), b = scratch("rho_a3");
    CHECK(run_with("rho-check", {{"rho", {{"kind", "constant"}}}}, a) == kPass);
    CHECK(run_with("rho-check", {{"rho", {{"kind", "radialFamily"}, {"a", 3.0}}}}, b) == kFail);
    const auto doc = nlohmann::json::parse(slurp(b / "rho_report.json"));
    CHECK(doc["integrability"]["verdict"] == "divergent");
    CHECK(doc["header"].get<std::string>().find("command=rho-check") != std::string::npos);
    const std::string csv = slurp(a / "rho_samples.csv");
    CHECK(csv.rfind("# lqc ", 0) == 0);
    CHECK(csv.find("\nt,I\n") != std::string::npos);
    CHECK(run_with("rho-check", nlohmann::json::object(), scratch("rho_none")) == kUsage);
    CHECK(run_with("rho-check", {{"rho", {{"kind", "nope"}}}}, scratch("rho_bad")) == kUsage);
    CHECK(run_with("no-such-command", nlohmann::json::object(), scratch("none")) == kUsage);
}

TEST_CASE("map-analyze") {
    const nlohmann::json grid = "64x128";
    const fs::path idp = scratch("id");
    CHECK(run_with("map-analyze", {{"map", {{"kind", "identity"}}}, {"grid", grid}}, idp) == kPass);
    const auto id = nlohmann::json::parse(slurp(idp / "map_summary.json"));
    CHECK(id["k_rho"]["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));

    const fs::path f15 = scratch("f15");
    CHECK(run_with("map-analyze",
                   {{"map", {{"kind", "radial"}, {"a", 1.5}}}, {"rho", {{"kind", "radialFamily"}, {"a", 1.5}}}, {"grid", grid}},
                   f15) == kPass);
    const auto s = nlohmann::json::parse(slurp(f15 / "map_summary.json"));
    CHECK(s["k_rho"]["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(fs::exists(f15 / "mu.lqcmu"));
    std::ifstream mu(f15 / "mu.lqcmu");
    CHECK(read_mu(mu).grid.n_r == 64);

    CHECK(run_with("map-analyze", {{"map", {{"kind", "radial"}, {"a", 3.0}}}, {"grid", grid}}, scratch("f3")) == kFail);
    CHECK(run_with("map-analyze", {{"map", {{"kind", "warp"}}}}, scratch("warp")) == kUsage);
}

TEST_CASE("qs-bound: table, verification, domain rule, determinism") {
    const fs::path a = scratch("qs_a"), b = scratch("qs_b"), c = scratch("qs_c");
    const nlohmann::json cfg{{"rho", {{"kind", "constant"}}},
                             {"map", {{"kind", "identity"}}},
                             {"grid", "64x128"},
                             {"seed", 5},
                             {"samples", {{"n_xi", 5}, {"n_t", 8}, {"random_xi", true}}}};
    CHECK(run_with("qs-bound", cfg, a) == kPass);
    CHECK(run_with("qs-bound", cfg, b) == kPass);
    for (const char* f : {"lambda.csv", "qs_verification.csv", "qs_report.json"}) CHECK(slurp(a / f) == slurp(b / f));

    auto other = cfg;
    other["seed"] = 6;
    CHECK(run_with("qs-bound", other, c) == kPass);
    CHECK(slurp(a / "qs_verification.csv") != slurp(c / "qs_verification.csv"));

    const auto lam = read_csv(a / "lambda.csv");
    const auto col = lam.column("lambda");
    for (std::size_t k = 1; k < col.size(); ++k) CHECK(col[k] <= col[k - 1]);

    CHECK(run_with("qs-bound", {{"t_grid", {{"min", 0.1}, {"max", 2.0}, {"n", 4}}}}, scratch("qs_t")) == kUsage);
}

TEST_CASE("modulus, beltrami-solve, extremal-demo, report") {
    const fs::path m = scratch("mod");
    CHECK(run_with("modulus", {{"capacity", {{"s", {0.5, 1.0, 2.0}}}}}, m) == kPass);
    const auto t = read_csv(m / "modulus.csv");
    for (double margin : t.column("margin")) CHECK(margin >= 0.0);
    CHECK(slurp(m / "tau.csv").find("s,tau\n0.5,") != std::string::npos);

    const fs::path z = scratch("solve_zero");
    CHECK(run_with("beltrami-solve",
                   {{"mode", "disk"}, {"mu", {{"kind", "zero"}}}, {"grid", "64x128"}, {"solver", {{"fft_size", 128}}}},
                   z) == kPass);
    std::ifstream gs(z / "map.lqcgrid");
    const auto map = read_grid(gs);
    double err = 0.0;
    for (int i = 0; i < map.grid.n_r; ++i)
        for (int j = 0; j < map.grid.n_theta; ++j) err = std::max(err, std::abs(map.at(i, j) - map.grid.node(i, j)));
    CHECK(err < 1e-12);
    const fs::path third = scratch("solve_third");
    CHECK(run_with("beltrami-solve",
                   {{"mode", "disk"}, {"mu", {{"kind", "constant"}, {"k", 1.0 / 3.0}}}, {"grid", "64x128"},
                    {"solver", {{"fft_size", 128}}}},
                   third) == kPass);
    CHECK(nlohmann::json::parse(slurp(third / "summary.json"))["reextraction_error_0.8"].get<double>() < 1e-3);
    CHECK(run_with("beltrami-solve", {{"mode", "sideways"}}, scratch("solve_bad")) == kUsage);

    const fs::path e = scratch("extremal");
    CHECK(run_with("extremal-demo", {{"preset", "identity"}, {"grid", "64x128"}}, e) == kPass);
    CHECK(slurp(e / "verdict.txt").find("verdict=minimizer at c=0") != std::string::npos);
    CHECK(slurp(e / "search_log.csv").find("\nstep,c1,c2,c3,objective\n") != std::string::npos);

    const fs::path r = scratch("report");
    RunContext ctx;
    ctx.command = "report";
    ctx.out_dir = r;
    ctx.config = {{"inputs", e.string()}};
    CHECK(run(ctx) == kPass);
    const std::string svg = slurp(r / "search_log.svg");
    CHECK(svg.rfind("<!-- lqc ", 0) == 0);
    CHECK(svg.find("<polyline") != std::string::npos);
    ctx.out_dir = scratch("empty_report");
    ctx.config = {{"inputs", scratch("nothing").string()}};
    CHECK(run(ctx) == kFail);
}

TEST_CASE("SVG emitter and CSV reader") {
    const std::string s = svg_line_chart({{"a<b", {0, 1, 2}, {1, 10, 100}}}, {"t", "x", "y", true});
    CHECK(s.find("a&lt;b") != std::string::npos);
    CHECK(s.find("</svg>") != std::string::npos);
    const fs::path p = scratch("csv");
    fs::create_directories(p);
    std::ofstream(p / "t.csv") << "# header\nx,y\n1,inf\n2,3\n";
    const auto t = read_csv(p / "t.csv");
    CHECK(t.columns.size() == 2);
    CHECK(std::isinf(t.column("y")[0]));
    CHECK_THROWS_AS(t.column("z"), UsageError);
}
