#include <cmath>
#include <iostream>
#include <random>

#include "cli.hpp"
#include "lqc/boundary.hpp"
#include "lqc/mapcore.hpp"
#include "lqc/modulus.hpp"

namespace lqc::cli {

namespace {

const PolarGrid kAnalysisGrid{128, 256, 1.0};

double get(const nlohmann::json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw UsageError(std::string("\"") + key + "\" must be a number");
    return j[key].get<double>();
}

int get_int(const nlohmann::json& j, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) throw UsageError(std::string("\"") + key + "\" must be an integer");
    return j[key].get<int>();
}

template <class T>
void write_number(std::ostream& os, T v) {
    if (std::isfinite(v)) os << v; else os << "inf";
}

BeltramiField field_of(const DiskGridMap& f) {
    if (f.mu) {
        BeltramiField b(f.grid);
        b.values = *f.mu;
        return b;
    }
    return mapcore::dilatation_field(f);
}

}  // namespace

int cmd_rho_check(RunContext& ctx) {
    if (!ctx.config.contains("rho")) throw UsageError("rho-check needs a \"rho\" block");
    const auto rho = ctx.rho();
    const double R = get(ctx.config, "R", 0.25);
    const int levels = get_int(ctx.config, "levels", 30);
    const auto rep = growth::check_allowable(rho, R, growth::default_t_grid(R, levels));

    nlohmann::json doc = rep;
    doc["rho"] = rho;
    doc["allowable"] = rep.allowable();
    ctx.write_json("rho_report.json", doc);
    auto os = ctx.open("rho_samples.csv");
    os << "t,I\n";
    for (auto [t, I] : rep.samples) {
        os << t << ',';
        write_number(os, I);
        os << '\n';
    }
    std::cout << rho.name() << ": integrability " << growth::to_string(rep.integrability.verdict)
              << ", boundary divergence " << growth::to_string(rep.boundary_divergence.verdict)
              << (rep.allowable() ? ", allowable\n" : ", not allowable\n");
    return rep.allowable() ? kPass : kFail;
}

int cmd_map_analyze(RunContext& ctx) {
    if (!ctx.config.contains("map")) throw UsageError("map-analyze needs a \"map\" block");
    const auto g = ctx.grid(kAnalysisGrid);
    const auto map = map_from_spec(ctx.config["map"], g);
    const auto rho = ctx.rho();
    const double cut = get(ctx.config, "domain_cut", 0.9);

    const BeltramiField mu = field_of(map);
    const RealField D = mapcore::distortion_field(mu);
    {
        auto os = ctx.open("mu.lqcmu", false);
        write_mu(os, mu);
    }
    {
        auto os = ctx.open("distortion.csv");
        os << "r,theta,D,flags\n";
        for (int i = 0; i < map.grid.n_r; ++i)
            for (int j = 0; j < map.grid.n_theta; ++j) {
                const std::size_t k = map.grid.index(i, j);
                os << map.grid.radius(i) << ',' << map.grid.angle(j) << ',';
                write_number(os, D.values[k]);
                os << ',' << (D.flags.empty() ? 0 : int(D.flags[k])) << '\n';
            }
    }
    const auto kr = mapcore::k_rho(D, rho, cut);
    const auto kinv = mapcore::k_rho_inverse(D, map, rho, cut);
    const auto member = mapcore::membership_qc_rho(D, rho);
    {
        auto os = ctx.open("ring_ratio.csv");
        os << "r,ratio\n";
        for (std::size_t i = 0; i < member.ring_ratio.size(); ++i) {
            os << map.grid.radius(static_cast<int>(i)) << ',';
            write_number(os, member.ring_ratio[i]);
            os << '\n';
        }
    }
    std::vector<double> Ks{2.0, 4.0, 8.0};
    if (ctx.config.contains("david_K")) Ks = ctx.config["david_K"].get<std::vector<double>>();
    std::optional<double> C;
    if (ctx.config.contains("david_C")) C = ctx.config["david_C"].get<double>();
    else if (member.constant) C = *member.constant;
    {
        auto os = ctx.open("david.csv");
        os << "K,measure,bound\n";
        for (const auto& row : mapcore::david_measure_profile(D, Ks, C)) {
            os << row.K << ',' << row.measure << ',';
            if (row.bound) os << *row.bound; else os << "nan";
            os << '\n';
        }
    }
    nlohmann::json doc;
    doc["map"] = ctx.config["map"];
    doc["rho"] = rho;
    doc["grid"] = {map.grid.n_r, map.grid.n_theta, map.grid.r_max};
    doc["domain_cut"] = cut;
    doc["ess_sup_mu"] = mu.ess_sup();
    doc["k_rho"] = {{"value", kr.value}, {"location", complex_json(kr.location)},
                    {"attained_on_outer_ring", kr.attained_on_outer_ring}};
    doc["k_rho_inverse"] = {{"value", kinv.value}, {"location", complex_json(kinv.location)}};
    doc["membership"] = {{"member", member.constant.has_value()},
                         {"constant", member.constant ? nlohmann::json(*member.constant) : nlohmann::json()},
                         {"grid_sup", member.grid_sup},
                         {"message", member.message}};
    ctx.write_json("map_summary.json", doc);
    std::cout << "K^rho on |z| <= " << cut << ": " << kr.value << "; inverse " << kinv.value << "; "
              << (member.constant ? "member of QC_rho" : "not a member of QC_rho") << '\n';
    return member.constant ? kPass : kFail;
}

int cmd_modulus(RunContext& ctx) {
    const auto g = ctx.grid(kAnalysisGrid);
    const nlohmann::json mspec = ctx.config.value("map", nlohmann::json{{"kind", "identity"}});
    const bool identity = mspec.value("kind", "") == "identity";
    const auto rho = ctx.rho();
    std::vector<modulus::QuadrilateralSpec> quads{{1.0, 0.01, 0.1}, {1.0, 0.05, 0.3}};
    if (ctx.config.contains("quads")) quads = ctx.config["quads"].get<std::vector<modulus::QuadrilateralSpec>>();

    std::optional<DiskGridMap> map;
    if (!identity) map = map_from_spec(mspec, g);
    bool all = true;
    auto os = ctx.open("modulus.csv");
    os << "xi_angle,r,R,modulus,lower,bound,margin\n";
    for (const auto& q : quads) {
        const auto m = map ? modulus::quad_modulus_detail(*map, q) : modulus::quad_modulus_detail(q);
        const double bound = modulus::lemma_qs_lower_bound(rho, q.r, q.R);
        const double margin = m.lower() - bound;
        all = all && margin >= 0.0;
        os << std::arg(q.xi) << ',' << q.r << ',' << q.R << ',' << m.value << ',' << m.lower() << ',' << bound << ','
           << margin << '\n';
        std::cout << "Q(" << std::arg(q.xi) << ", " << q.r << ", " << q.R << "): modulus " << m.value << " (lower "
                  << m.lower() << "), bound " << bound << '\n';
    }
    if (ctx.config.contains("capacity")) {
        const auto& c = ctx.config["capacity"];
        const auto s = c.at("s").get<std::vector<double>>();
        const std::string src = c.value("source", "formula");
        if (src != "formula" && src != "oracle") throw UsageError("capacity \"source\" is formula or oracle");
        const auto table = modulus::build_capacity_table(
            s, src == "formula" ? modulus::TableSource::IdentityFormula : modulus::TableSource::GridOracle);
        auto ts = ctx.open("tau.csv");
        modulus::write_csv(ts, table);
    }
    return all ? kPass : kFail;
}

int cmd_qs_bound(RunContext& ctx) {
    const auto rho = ctx.rho();
    const nlohmann::json tg = ctx.config.value("t_grid", nlohmann::json::object());
    const double t_min = get(tg, "min", 0.05), t_max = get(tg, "max", kPi / 2);
    const int n = get_int(tg, "n", 32);
    if (n < 2) throw UsageError("t_grid \"n\" must be at least 2");
    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    {
        auto os = ctx.open("lambda.csv");
        os << "t,s,S,I,lambda\n";
        for (int k = 0; k < n; ++k) {
            const double t = t_min + (t_max - t_min) * k / (n - 1);
            const double lam = boundary::lambda_bound(rho, t);  // DomainError outside (0, pi/2]
            const double s = 2 * std::sin(t / 4), S = 2 * std::sin(3 * t / 4);
            const double I = growth::boundary_divergence_integral(rho, s, S).value;
            monotone = monotone && lam <= prev;
            prev = lam;
            os << t << ',' << s << ',' << S << ',' << I << ',';
            write_number(os, lam);
            os << '\n';
        }
    }
    std::cout << "lambda(t) table for " << rho.name() << (monotone ? ": nonincreasing in t\n" : ": NOT monotone\n");
    if (!ctx.config.contains("map")) return monotone ? kPass : kFail;

    const auto g = ctx.grid(kAnalysisGrid);
    const auto map = map_from_spec(ctx.config["map"], g);
    const nlohmann::json sp = ctx.config.value("samples", nlohmann::json::object());
    const int n_xi = get_int(sp, "n_xi", 5), n_t = get_int(sp, "n_t", 8);
    auto samples = boundary::sample_grid(n_xi, n_t, get(sp, "t_min", 0.05), get(sp, "t_max", kPi / 2));
    if (sp.value("random_xi", false)) {
        std::mt19937_64 gen(ctx.seed);
        std::uniform_real_distribution<double> U(0.0, kTwoPi);
        for (int a = 0; a < n_xi; ++a) {
            const double xi = U(gen);
            for (int b = 0; b < n_t; ++b) samples[a * n_t + b].first = xi;
        }
    }
    const auto rep = boundary::verify_qs_theorem(map, rho, samples);
    {
        auto os = ctx.open("qs_verification.csv");
        os << "xi_angle,t,ratio,lower,upper,holds,interpolation_error\n";
        for (const auto& s : rep.samples) {
            os << s.xi_angle << ',' << s.t << ',' << s.ratio << ',';
            write_number(os, 1.0 / s.bound);
            os << ',';
            write_number(os, s.bound);
            os << ',' << (s.holds ? 1 : 0) << ',' << s.interpolation_error << '\n';
        }
    }
    nlohmann::json doc = rep;
    doc["rho"] = rho;
    doc["lambda_monotone"] = monotone;
    ctx.write_json("qs_report.json", doc);
    for (const auto& s : rep.samples)
        if (!s.holds)
            std::cout << "violation at xi = " << s.xi_angle << ", t = " << s.t << ": ratio " << s.ratio << ", bound "
                      << s.bound << '\n';
    std::cout << (rep.all_hold ? "all samples within [1/lambda, lambda]\n" : "bound violated\n");
    return rep.all_hold && monotone ? kPass : kFail;
}

}  // namespace lqc::cli
