#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <set>

#include "cli.hpp"
#include "lqc/beltrami.hpp"
#include "lqc/mapcore.hpp"
#include "lqc/teich.hpp"

namespace lqc::cli {

namespace {

BeltramiField mu_from_spec(const nlohmann::json& spec, const PolarGrid& g) {
    const std::string kind = spec.value("kind", "");
    if (kind == "zero") return BeltramiField(g);
    if (kind == "constant") {
        const auto& k = spec.at("k");
        const cplx c = k.is_array() ? cplx(k.at(0).get<double>(), k.at(1).get<double>()) : cplx(k.get<double>());
        return BeltramiField::from_function(g, [c](cplx) { return c; });
    }
    if (kind == "radial") {
        const mapcore::RadialMapSpec s(spec.at("a").get<double>());
        return BeltramiField::from_function(g, [s](cplx z) { return mapcore::radial_dilatation(s, z); });
    }
    if (kind == "power") {
        const double alpha = spec.at("alpha").get<double>();
        return BeltramiField::from_function(g, [alpha](cplx z) { return mapcore::power_dilatation(alpha, z); });
    }
    if (kind == "file") {
        std::ifstream is(spec.at("path").get<std::string>());
        if (!is) throw UsageError("cannot read mu file");
        return read_mu(is);
    }
    throw UsageError("unknown mu kind '" + kind + "'");
}

// sup |mu_fd - mu| over unflagged nodes with |z| <= r.
double reextraction_error(const DiskGridMap& f, const BeltramiField& mu, double r) {
    const auto fd = mapcore::dilatation_field(f);
    double e = 0.0;
    for (int i = 0; i < mu.grid.rings_within(r); ++i)
        for (int j = 0; j < mu.grid.n_theta; ++j) {
            const std::size_t k = mu.grid.index(i, j);
            if (fd.flagged(k, kDegenerate)) continue;
            e = std::max(e, std::abs(fd.values[k] - mu.values[k]));
        }
    return e;
}

}  // namespace

int cmd_beltrami_solve(RunContext& ctx) {
    const std::string mode = ctx.config.value("mode", "disk");
    beltrami::SolverConfig cfg;
    if (ctx.config.contains("solver")) cfg = beltrami::solver_config_from_json(ctx.config["solver"]);
    const auto g = ctx.grid(PolarGrid{});
    const auto rho = ctx.rho();

    beltrami::DiskSolution sol;
    nlohmann::json summary;
    if (mode == "disk" || mode == "exhaustion") {
        if (!ctx.config.contains("mu")) throw UsageError("beltrami-solve needs a \"mu\" block in disk/exhaustion mode");
        const auto mu = mu_from_spec(ctx.config["mu"], g);
        sol = mode == "disk" ? beltrami::solve_disk(mu, cfg) : beltrami::solve_exhaustion(mu, rho, cfg);
        summary["reextraction_error_0.8"] = reextraction_error(sol.map, mu, 0.8);
    } else if (mode == "teichmuller") {
        const auto phi0 = ctx.config.contains("phi0") ? holo_from_json(ctx.config["phi0"]) : HoloDensity::constant();
        if (!ctx.config.contains("K0") || !ctx.config["K0"].is_number()) throw UsageError("teichmuller mode needs \"K0\"");
        sol = beltrami::solve_teichmuller_type(phi0, ctx.config["K0"].get<double>(), rho, g, cfg);
        const auto D = mapcore::distortion_field(sol.map);
        summary["k_rho_inverse_0.9"] = mapcore::k_rho_inverse(D, sol.map, rho, 0.9).value;
    } else {
        throw UsageError("unknown mode '" + mode + "' (disk, exhaustion, teichmuller)");
    }
    {
        auto os = ctx.open("map.lqcgrid", false);
        write_grid(os, sol.map);
    }
    {
        auto os = ctx.open("residuals.csv");
        os << "stage,iteration,residual\n";
        for (std::size_t s = 0; s < sol.report.stages.size(); ++s)
            for (std::size_t k = 0; k < sol.report.stages[s].residuals.size(); ++k)
                os << s << ',' << k + 1 << ',' << sol.report.stages[s].residuals[k] << '\n';
    }
    ctx.write_json("solve_report.json", sol.report);
    summary["mode"] = mode;
    summary["converged"] = sol.report.converged;
    summary["circle_deviation"] = sol.report.circle_deviation;
    summary["message"] = sol.report.message;
    ctx.write_json("summary.json", summary);
    std::cout << summary.dump() << '\n';
    return sol.report.converged ? kPass : kFail;
}

int cmd_extremal_demo(RunContext& ctx) {
    const std::string preset = ctx.config.value("preset", "teichmuller");
    const auto g = ctx.grid(PolarGrid{128, 256, 1.0});
    const auto rho = ctx.rho();
    DiskGridMap f0;
    if (preset == "teichmuller") {
        nlohmann::json spec{{"kind", "teichmuller"}, {"K0", ctx.config.value("K0", 2.0)}, {"rho", rho}};
        spec["solver"] = ctx.config.value("solver", nlohmann::json{{"fft_size", 256}});
        f0 = map_from_spec(spec, g);
    } else if (preset == "identity") {
        f0 = map_from_spec({{"kind", "identity"}}, g);
    } else if (preset == "custom") {
        if (!ctx.config.contains("map")) throw UsageError("custom preset needs a \"map\" block");
        f0 = map_from_spec(ctx.config["map"], g);
    } else {
        throw UsageError("unknown preset '" + preset + "' (teichmuller, identity, custom)");
    }
    auto basis = teich::default_basis();
    if (preset == "teichmuller") basis.resize(2);
    if (ctx.config.contains("basis")) basis = ctx.config["basis"].get<std::vector<teich::BoundaryFixingTwist>>();
    auto box = teich::CoefficientBox::symmetric(basis.size(), 0.5);
    if (ctx.config.contains("box")) box = ctx.config["box"].get<teich::CoefficientBox>();
    teich::SearchOptions opt;
    if (ctx.config.contains("search")) {
        const auto& s = ctx.config["search"];
        opt.line_tolerance = s.value("line_tolerance", opt.line_tolerance);
        opt.max_sweeps = s.value("max_sweeps", opt.max_sweeps);
        opt.domain_cut = s.value("domain_cut", opt.domain_cut);
    }
    const auto res = teich::extremal_search(f0, rho, basis, box, opt);
    {
        auto os = ctx.open("search_log.csv");
        teich::write_search_log(os, res);
    }
    double dist = 0.0;
    for (double c : res.argmin) dist = std::max(dist, std::abs(c));
    const bool at_zero = dist <= opt.line_tolerance;
    {
        auto os = ctx.open("verdict.txt");
        os << "preset=" << preset << " argmin=(";
        for (std::size_t k = 0; k < res.argmin.size(); ++k) os << (k ? "," : "") << res.argmin[k];
        os << ") K_min=" << res.k_min << " K_at_zero=" << res.k_at_zero << " evaluations=" << res.log.size()
           << " verdict=" << (at_zero ? "minimizer at c=0" : "minimizer away from c=0") << '\n';
    }
    std::cout << "K_min " << res.k_min << (at_zero ? " at c = 0\n" : " away from c = 0\n");
    if (preset == "teichmuller" && !at_zero) return kFail;
    return kPass;
}

// ---- report ------------------------------------------------------------------------

namespace {

struct Plot {
    const char* csv;
    const char* x;
    std::vector<const char*> ys;
    ChartOptions opt;
    const char* group = nullptr;  // split series by this column
};

const std::vector<Plot>& known_plots() {
    static const std::vector<Plot> plots{
        {"rho_samples.csv", "t", {"I"}, {"I(t)", "t", "I", false}},
        {"lambda.csv", "t", {"lambda"}, {"lambda(t)", "t", "lambda", true}},
        {"ring_ratio.csv", "r", {"ratio"}, {"ring sup of D/rho", "r", "D/rho", true}},
        {"david.csv", "K", {"measure", "bound"}, {"area of {D > K}", "K", "area", true}},
        {"modulus.csv", "R", {"modulus", "lower", "bound"}, {"quadrilateral modulus", "R", "modulus", false}},
        {"residuals.csv", "iteration", {"residual"}, {"Neumann residuals", "iteration", "residual", true}, "stage"},
        {"search_log.csv", "step", {"objective"}, {"extremal search", "step", "K^rho of inverse", false}},
        {"qs_verification.csv", "t", {"ratio", "upper"}, {"quasisymmetry ratios", "t", "ratio", true}},
    };
    return plots;
}

}  // namespace

int cmd_report(RunContext& ctx) {
    const std::filesystem::path in = ctx.config.value("inputs", ctx.out_dir.string());
    int made = 0;
    std::vector<std::string> lines;
    for (const auto& p : known_plots()) {
        const auto path = in / p.csv;
        if (!std::filesystem::exists(path)) continue;
        const auto table = read_csv(path);
        std::vector<Series> series;
        if (p.group) {
            const auto grp = table.column(p.group), x = table.column(p.x), y = table.column(p.ys[0]);
            std::map<double, Series> by;
            for (std::size_t k = 0; k < grp.size(); ++k) {
                auto& s = by[grp[k]];
                s.x.push_back(x[k]);
                s.y.push_back(y[k]);
            }
            for (auto& [key, s] : by) {
                s.label = std::string(p.group) + " " + std::to_string(static_cast<long long>(key));
                series.push_back(std::move(s));
            }
        } else {
            for (const char* y : p.ys) series.push_back({y, table.column(p.x), table.column(y)});
        }
        const std::string name = std::filesystem::path(p.csv).stem().string() + ".svg";
        auto os = ctx.open(name, false);
        os << "<!-- " << ctx.header() << " -->\n" << svg_line_chart(series, p.opt);
        lines.push_back(std::string(p.csv) + " -> " + name);
        ++made;
    }
    auto os = ctx.open("report.txt");
    for (const auto& l : lines) os << l << '\n';
    std::cout << made << " chart(s) written\n";
    return made > 0 ? kPass : kFail;
}

}  // namespace lqc::cli
