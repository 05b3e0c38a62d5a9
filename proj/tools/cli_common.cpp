#include <cstdio>
#include <iostream>
#include <regex>

#include "cli.hpp"
#include "lqc/beltrami.hpp"
#include "lqc/boundary.hpp"
#include "lqc/mapcore.hpp"
#include "lqc/mobius.hpp"

namespace lqc::cli {

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

PolarGrid parse_grid(const std::string& s) {
    static const std::regex re(R"((\d+)x(\d+))");
    std::smatch m;
    if (!std::regex_match(s, m, re)) throw UsageError("--grid expects <n_r>x<n_theta>, got '" + s + "'");
    PolarGrid g{std::stoi(m[1]), std::stoi(m[2]), 1.0};
    try {
        g.validate();
    } catch (const PreconditionError& e) {
        throw UsageError(std::string("--grid: ") + e.what());
    }
    return g;
}

std::uint64_t RunContext::config_hash() const { return fnv1a64(config.dump()); }

std::string RunContext::header() const {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(config_hash()));
    return std::string("lqc ") + kVersion + " command=" + command + " config_hash=" + hex +
           " seed=" + std::to_string(seed);
}

std::ofstream RunContext::open(const std::string& name, bool with_header) const {
    std::filesystem::create_directories(out_dir);
    std::ofstream os(out_dir / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (out_dir / name).string());
    const_cast<RunContext*>(this)->written.push_back(name);
    os.precision(12);
    if (with_header) os << "# " << header() << '\n';
    return os;
}

void RunContext::write_json(const std::string& name, nlohmann::json doc) const {
    doc["header"] = header();
    auto os = open(name, false);
    os << doc.dump(2) << '\n';
}

PolarGrid RunContext::grid(const PolarGrid& fallback) const {
    if (config.contains("grid")) {
        if (!config["grid"].is_string()) throw UsageError("config \"grid\" must be a string like \"128x256\"");
        return parse_grid(config["grid"].get<std::string>());
    }
    return fallback;
}

growth::GrowthFunction RunContext::rho(const char* key) const {
    if (!config.contains(key)) return growth::GrowthFunction::constant();
    return growth::growth_from_json(config[key]);
}

RunContext make_context(const std::string& command, const std::optional<std::string>& config_path,
                        const std::string& out_dir, std::optional<std::int64_t> seed,
                        std::optional<std::string> grid) {
    RunContext ctx;
    ctx.command = command;
    ctx.out_dir = out_dir;
    if (config_path) {
        std::ifstream is(*config_path);
        if (!is) throw UsageError("cannot read config '" + *config_path + "'");
        try {
            ctx.config = nlohmann::json::parse(is);
        } catch (const nlohmann::json::parse_error& e) {
            throw UsageError(std::string("malformed JSON in config: ") + e.what());
        }
        if (!ctx.config.is_object()) throw UsageError("config must be a JSON object");
    }
    if (seed) ctx.config["seed"] = *seed;
    if (grid) {
        parse_grid(*grid);
        ctx.config["grid"] = *grid;
    }
    if (ctx.config.contains("seed")) {
        if (!ctx.config["seed"].is_number_integer()) throw UsageError("config \"seed\" must be an integer");
        ctx.seed = ctx.config["seed"].get<std::uint64_t>();
    }
    return ctx;
}

nlohmann::json complex_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

namespace {

cplx complex_from_json(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    throw UsageError("expected a number or [re, im], got " + j.dump());
}

double number(const nlohmann::json& spec, const char* key, std::optional<double> fallback = std::nullopt) {
    if (!spec.contains(key)) {
        if (fallback) return *fallback;
        throw UsageError(std::string("map spec needs \"") + key + "\"");
    }
    if (!spec[key].is_number()) throw UsageError(std::string("\"") + key + "\" must be a number");
    return spec[key].get<double>();
}

}  // namespace

HoloDensity holo_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) throw UsageError("holomorphic density needs a non-empty coefficient list");
    std::vector<cplx> c;
    for (const auto& e : j) c.push_back(complex_from_json(e));
    return HoloDensity(std::move(c));
}

DiskGridMap map_from_spec(const nlohmann::json& spec, const PolarGrid& g) {
    if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string())
        throw UsageError("map spec needs a string \"kind\"");
    const std::string kind = spec["kind"];
    if (kind == "identity") return DiskGridMap::from_function(g, [](cplx z) { return z; }, "identity");
    if (kind == "radial") {
        const mapcore::RadialMapSpec s(number(spec, "a"));
        auto m = DiskGridMap::from_function(g, [s](cplx z) { return mapcore::radial_eval(s, z); }, "radial");
        m.mu = BeltramiField::from_function(g, [s](cplx z) { return mapcore::radial_dilatation(s, z); }).values;
        return m;
    }
    if (kind == "power") {
        const double alpha = number(spec, "alpha");
        return DiskGridMap::from_function(g, [alpha](cplx z) { return mapcore::power_eval(alpha, z); }, "power");
    }
    if (kind == "spiral") {
        PolarGrid gs = g;
        gs.r_max = number(spec, "r_max", 1.0 - 1e-4);
        return DiskGridMap::from_function(gs, [](cplx z) { return mapcore::spiral_eval(z); }, "spiral", false);
    }
    if (kind == "mobius" || kind == "rotation") {
        const cplx p = kind == "mobius" ? complex_from_json(spec.value("p", nlohmann::json(0.0))) : cplx(0.0);
        if (!(std::abs(p) < 1.0)) throw UsageError("mobius \"p\" must lie in the open disk");
        const Mobius M = Mobius::disk_automorphism(p, number(spec, "angle", 0.0));
        return DiskGridMap::from_function(g, [M](cplx z) { return M(z); }, kind);
    }
    if (kind == "teichmuller") {
        beltrami::SolverConfig cfg;
        if (spec.contains("solver")) cfg = beltrami::solver_config_from_json(spec["solver"]);
        const auto rho = spec.contains("rho") ? growth::growth_from_json(spec["rho"]) : growth::GrowthFunction::constant();
        const auto phi0 = spec.contains("phi0") ? holo_from_json(spec["phi0"]) : HoloDensity::constant();
        return beltrami::solve_teichmuller_type(phi0, number(spec, "K0"), rho, g, cfg).map;
    }
    if (kind == "file") {
        if (!spec.contains("path") || !spec["path"].is_string()) throw UsageError("file map needs \"path\"");
        std::ifstream is(spec["path"].get<std::string>());
        if (!is) throw UsageError("cannot read map file " + spec["path"].get<std::string>());
        return read_grid(is);
    }
    throw UsageError("unknown map kind '" + kind + "'");
}

int run(RunContext& ctx) {
    try {
        if (ctx.command == "rho-check") return cmd_rho_check(ctx);
        if (ctx.command == "map-analyze") return cmd_map_analyze(ctx);
        if (ctx.command == "beltrami-solve") return cmd_beltrami_solve(ctx);
        if (ctx.command == "modulus") return cmd_modulus(ctx);
        if (ctx.command == "qs-bound") return cmd_qs_bound(ctx);
        if (ctx.command == "extremal-demo") return cmd_extremal_demo(ctx);
        if (ctx.command == "report") return cmd_report(ctx);
        throw UsageError("unknown command '" + ctx.command + "'");
    } catch (const UsageError& e) {
        std::cerr << "lqc " << ctx.command << ": " << e.what() << '\n';
        return kUsage;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "lqc " << ctx.command << ": invalid config: " << e.what() << '\n';
        return kUsage;
    } catch (const PreconditionError& e) {
        std::cerr << "lqc " << ctx.command << ": invalid input: " << e.what() << '\n';
        return kUsage;
    } catch (const boundary::ExtensionError& e) {
        std::cerr << "lqc " << ctx.command << ": " << e.what() << '\n';
        return kFail;
    } catch (const DomainError& e) {
        std::cerr << "lqc " << ctx.command << ": invalid input: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "lqc " << ctx.command << ": " << e.what() << '\n';
        return kFail;
    }
}

}  // namespace lqc::cli
