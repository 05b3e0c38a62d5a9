// Acceptance runner: one line per criterion, nonzero exit if any selected one fails.
//   acceptance               run all
//   acceptance --criterion N run one

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "lqc/beltrami.hpp"
#include "lqc/boundary.hpp"
#include "lqc/growth.hpp"
#include "lqc/mapcore.hpp"
#include "lqc/modulus.hpp"
#include "lqc/teich.hpp"

using namespace lqc;
using growth::GrowthFunction;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

using Criterion = std::function<void(Outcome&)>;

DiskGridMap sampled(const PolarGrid& g, std::function<cplx(cplx)> f, const char* name) {
    return DiskGridMap::from_function(g, std::move(f), name);
}

beltrami::SolverConfig fft(int n) {
    beltrami::SolverConfig c;
    c.fft_size = n;
    return c;
}

// 1
void radial_algebra(Outcome& o) {
    const PolarGrid g{256, 512, 1.0};
    double group = 0.0, inverse = 0.0;
    for (auto [a, b] : {std::pair{2.0, 3.0}, {0.5, 2.0}, {1.5, 1.5}}) {
        const mapcore::RadialMapSpec fa(a), fb(b), fab(a * b), fia(1 / a);
        for (int i = 0; i < g.n_r; ++i)
            for (int j = 0; j < g.n_theta; ++j) {
                const cplx z = g.node(i, j);
                group = std::max(group, std::abs(radial_eval(fa, radial_eval(fb, z)) - radial_eval(fab, z)));
                inverse = std::max(inverse, std::abs(radial_eval(fa, radial_eval(fia, z)) - z));
            }
    }
    o.detail << "group law " << group << ", inverse law " << inverse;
    o.require(group < 1e-12, "f_a o f_b = f_ab");
    o.require(inverse < 1e-12, "f_a o f_1/a = id");
}

// 2
void allowability(Outcome& o) {
    for (double a : {0.5, 1.0, 1.5, 1.99, 2.0, 3.0}) {
        const auto rep = growth::check_allowable(GrowthFunction::radial_family(a));
        const bool finite = rep.integrability.verdict == growth::IntegrabilityVerdict::Finite;
        o.detail << "a=" << a << ":" << growth::to_string(rep.integrability.verdict) << " ";
        o.require(finite == (a < 2), "verdict at a = " + std::to_string(a));
    }
}

// 3
void dilatation_order(Outcome& o) {
    const double alpha = 1.5;
    std::vector<double> errs;
    for (int n : {64, 128, 256}) {
        const PolarGrid g{n, 256, 1.0};
        const auto mu = mapcore::dilatation_field(sampled(g, [&](cplx z) { return mapcore::power_eval(alpha, z); }, "power"));
        double e = 0.0;
        for (int i = 0; i < g.n_r; ++i) {
            const double r = g.radius(i);
            if (r < 0.1 || r > 0.9) continue;
            for (int j = 0; j < g.n_theta; ++j)
                e = std::max(e, std::abs(mu.at(i, j) - mapcore::power_dilatation(alpha, g.node(i, j))));
        }
        errs.push_back(e);
    }
    const double p1 = std::log2(errs[0] / errs[1]), p2 = std::log2(errs[1] / errs[2]);
    o.detail << "errors " << errs[0] << " " << errs[1] << " " << errs[2] << ", orders " << p1 << " " << p2
             << " (0.1 <= r <= 0.9)";
    o.require(p1 >= 1.8 && p2 >= 1.8, "order >= 1.8");
}

// 4
void david_bound(Outcome& o) {
    const PolarGrid g{128, 256, 1.0};
    const auto D = mapcore::radial_distortion_field(mapcore::RadialMapSpec(1.5), g);
    const auto member = mapcore::membership_qc_rho(D, GrowthFunction::log_normalized());
    const double C = member.constant ? *member.constant : member.grid_sup;
    o.detail << "C=" << C << (member.constant ? " (member)" : " (grid sup, non-member)") << "; ";
    for (const auto& row : mapcore::david_measure_profile(D, {2.0, 4.0, 8.0}, C)) {
        o.detail << "K=" << row.K << ": " << row.measure << " vs " << *row.bound << " ";
        o.require(row.measure < *row.bound, "sigma{D > " + std::to_string(row.K) + "} < pi exp(-2K/C)");
    }
}

// 5
void beltrami_roundtrip(Outcome& o) {
    const PolarGrid g{128, 256, 1.0};
    const auto mu = BeltramiField::from_function(g, [](cplx) { return cplx(1.0 / 3.0); });
    const auto s = beltrami::solve_disk(mu, fft(512));
    const auto fd = mapcore::dilatation_field(s.map);
    double e = 0.0;
    for (int i = 0; i < g.rings_within(0.8); ++i)
        for (int j = 0; j < g.n_theta; ++j) e = std::max(e, std::abs(fd.at(i, j) - mu.at(i, j)));
    double pin = 0.0;
    const cplx targets[3] = {1.0, -1.0, kI};
    for (int k = 0; k < 3; ++k) pin = std::max(pin, std::abs(s.report.pinned_images[k] - targets[k]));
    o.detail << "reextraction " << e << ", circle " << s.report.circle_deviation << ", pins " << pin;
    o.require(s.report.converged, "converged");
    o.require(e < 1e-3, "reextraction on |z| <= 0.8");
    o.require(s.report.circle_deviation < 1e-3, "circle invariance");
    o.require(pin < 1e-6, "pinned points");
}

// 6
void exhaustion(Outcome& o) {
    const PolarGrid g{128, 256, 1.0};
    const mapcore::RadialMapSpec f15(1.5);
    const auto mu = BeltramiField::from_function(g, [&](cplx z) { return mapcore::radial_dilatation(f15, z); });
    const auto s = beltrami::solve_exhaustion(mu, GrowthFunction::radial_family(1.5), fft(256));
    o.require(s.report.converged, "converged");
    o.require(!s.report.difference_radii.empty() && std::abs(s.report.difference_radii.front() - 0.8) < 1e-12,
              "differences reported on |z| < 0.8");
    if (!s.report.stage_differences.empty()) {
        const auto& row = s.report.stage_differences.front();
        o.detail << "stage differences";
        for (double d : row) o.detail << " " << d;
        // The last entry compares the finest truncation with the untruncated stage.
        for (std::size_t k = 1; k + 1 < row.size(); ++k) o.require(row[k] <= 0.5 * row[k - 1], "halving per level");
    }
    double err = 0.0;
    for (int i = 0; i < g.rings_within(0.8); ++i)
        for (int j = 0; j < g.n_theta; ++j)
            err = std::max(err, std::abs(s.map.at(i, j) - mapcore::radial_eval(f15, g.node(i, j))));
    o.detail << "; closed-form error " << err;
    o.require(err < 5e-3, "within 5e-3 of f_1.5 on |z| < 0.8");
}

// 7
void teichmuller_self_consistency(Outcome& o) {
    const PolarGrid g{128, 256, 1.0};
    const auto rho = GrowthFunction::log_normalized();
    const auto s = beltrami::solve_teichmuller_type(HoloDensity::constant(), 1.5, rho, g, fft(256));
    const auto D = mapcore::distortion_field(s.map);
    const double k = mapcore::k_rho_inverse(D, s.map, rho, 0.9).value;
    o.detail << "K^rho(f^-1) on |z| <= 0.9: " << k << ", Picard steps " << s.report.picard_differences.size();
    if (s.report.equation_residual) o.detail << ", equation residual " << *s.report.equation_residual;
    o.detail << ", last Picard difference " << s.report.picard_differences.back()
             << ", solver converged flag " << (s.report.converged ? "true" : "false");
    o.require(std::abs(k - 1.5) <= 0.05 * 1.5, "within 5% of K0");
}

// 8
void special_functions(Outcome& o) {
    double e = 0.0;
    for (int k = 0; k < 50; ++k) {
        const double r = std::pow(10.0, -3.0 + 3.0 * (k + 0.5) / 50.0);
        e = std::max(e, std::abs(modulus::grotzsch_mu(r) * modulus::grotzsch_mu(std::sqrt((1 - r) * (1 + r))) -
                                 kPi * kPi / 4));
    }
    bool decreasing = true;
    double prev = modulus::tau_capacity(1e-6);
    for (int k = 1; k <= 200; ++k) {
        const double t = modulus::tau_capacity(1e-6 * std::pow(1e12, k / 200.0));
        decreasing = decreasing && t < prev;
        prev = t;
    }
    o.detail << "mu(r) mu(r') error " << e << "; ";
    o.require(e < 1e-10, "mu(r) mu(sqrt(1-r^2)) = pi^2/4");
    o.require(decreasing, "tau strictly decreasing");
    for (const auto& p : modulus::calibrate_tau()) {
        o.detail << "s=" << p.s << " rel " << p.relative_error << " ";
        o.require(p.relative_error < 0.02, "tau calibration at s = " + std::to_string(p.s));
    }
}

// 9
void modulus_lower_bound(Outcome& o) {
    for (double a : {0.0, 1.2, 1.5}) {
        const auto rho = a == 0.0 ? GrowthFunction::constant() : GrowthFunction::radial_family(a);
        std::function<cplx(cplx)> mu;
        if (a != 0.0) {
            const mapcore::RadialMapSpec spec(a);
            mu = [spec](cplx z) { return mapcore::radial_dilatation(spec, z); };
        }
        for (auto [r, R] : {std::pair{0.01, 0.1}, std::pair{0.05, 0.3}}) {
            const auto m = modulus::quad_modulus_detail(mu, modulus::QuadrilateralSpec{1.0, r, R});
            const double margin = m.lower() - modulus::lemma_qs_lower_bound(rho, r, R);
            o.detail << "a=" << a << " (" << r << "," << R << ") margin " << margin << "; ";
            o.require(margin >= 0.0, "nonnegative margin");
            if (a == 0.0 && r == 0.01) {
                const double expect = std::log(R / r) / kPi;
                o.detail << "identity modulus " << m.value << " vs " << expect << "; ";
                o.require(std::abs(m.value - expect) <= 0.05 * expect, "identity within 5% of log(R/r)/pi");
            }
        }
    }
}

// 10
void qs_bound(Outcome& o) {
    const PolarGrid g{128, 256, 1.0};
    const auto samples = boundary::sample_grid(5, 8, 0.05, kPi / 2);
    const auto c = GrowthFunction::constant();
    const mapcore::RadialMapSpec f15(1.5);
    struct Case {
        const char* name;
        DiskGridMap map;
        GrowthFunction rho;
    };
    const std::vector<Case> cases{
        {"identity", sampled(g, [](cplx z) { return z; }, "identity"), c},
        {"f_1.5", sampled(g, [&](cplx z) { return mapcore::radial_eval(f15, z); }, "f_1.5"),
         GrowthFunction::radial_family(1.5)},
        {"teichmuller K0=2", beltrami::solve_teichmuller_type(HoloDensity::constant(), 2.0, c, g, fft(256)).map, c},
    };
    for (const auto& k : cases) {
        const auto rep = boundary::verify_qs_theorem(k.map, k.rho, samples);
        double worst = 0.0;
        for (const auto& s : rep.samples) worst = std::max(worst, std::abs(std::log(s.ratio)) / std::log(s.bound));
        o.detail << k.name << ": " << rep.samples.size() << " samples, max log-ratio/log-bound " << worst << "; ";
        o.require(rep.samples.size() == 40, "5 x 8 samples");
        o.require(rep.all_hold, std::string("bound for ") + k.name);
    }
}

// 11
void reich_strebel(Outcome& o) {
    const PolarGrid g{128, 256, 1.0};
    using teich::BoundaryFixingTwist, teich::TwistCombination;
    const std::vector<TwistCombination> twists{
        {{BoundaryFixingTwist{0.3, 0.7, 0.0}}, {0.3}},
        {{BoundaryFixingTwist{0.1, 0.35, 0.0}}, {-0.8}},
        {teich::default_basis(), {0.5, -0.7, 0.9}},
    };
    const std::vector<HoloDensity> phis{HoloDensity({1.0}), HoloDensity({0.0, 1.0}), HoloDensity({0.0, 0.0, 1.0}),
                                        HoloDensity({1.0, 1.0})};
    double worst = 1e300;
    for (const auto& tw : twists)
        for (const auto& phi : phis) {
            const auto rs = teich::reich_strebel(teich::twist_map(g, tw), phi);
            worst = std::min(worst, rs.ratio);
            o.require(rs.ratio >= 1.0 - 2e-3, "ratio >= 1 - 2e-3");
        }
    o.detail << "min ratio over 12 pairs " << worst;
}

// 12
void local_extremality(Outcome& o) {
    const PolarGrid g{128, 256, 1.0};
    const auto c = GrowthFunction::constant();
    const auto f0 = beltrami::solve_teichmuller_type(HoloDensity::constant(), 2.0, c, g, fft(256)).map;
    const auto basis = teich::default_basis();
    const teich::SearchOptions opt;
    const auto res = teich::extremal_search(f0, c, {basis[0], basis[1]}, teich::CoefficientBox::symmetric(2, 0.5), opt);
    double dist = 0.0;
    for (double x : res.argmin) dist = std::max(dist, std::abs(x));
    o.detail << "argmin distance " << dist << ", K_min " << res.k_min << "; ";
    o.require(dist <= opt.line_tolerance, "argmin at c = 0");
    o.require(std::abs(res.k_min - 2.0) <= 0.1, "K_min within 5% of 2");
    double least = 1e300;
    for (std::size_t k = 0; k < basis.size(); ++k)
        for (double a : {0.05, 0.1, 0.2, -0.05, -0.1, -0.2}) {
            std::vector<double> cc(basis.size(), 0.0);
            cc[k] = a;
            const double v = teich::twist_objective(f0, c, basis, cc);
            least = std::min(least, v - res.k_at_zero);
            o.require(v > res.k_at_zero, "perturbation increases objective");
        }
    o.detail << "least increase over 18 perturbations " << least;
}

// 13
void spiral(Outcome& o) {
    const std::vector<double> eps{1e-2, 1e-3, 1e-4, 1e-5};
    try {
        boundary::boundary_trace([](cplx z) { return mapcore::spiral_eval(z); }, eps);
        o.require(false, "ExtensionError raised");
    } catch (const boundary::ExtensionError& e) {
        o.detail << "level differences";
        for (double d : e.level_differences) o.detail << " " << d;
        o.require(!e.level_differences.empty() && e.level_differences.back() >= 1e-3, "last pair does not settle");
    }
    // Angular offset of the image of 1 - eps grows without bound.
    o.detail << "; offsets";
    double prev = -1.0;
    for (double e : eps) {
        const double off = std::log(1.0 / e);  // unwrapped arg of f(1 - e)
        const cplx w = mapcore::spiral_eval(1.0 - e);
        o.require(std::abs(std::polar(1.0, off) - w / std::abs(w)) < 1e-9, "offset matches the sample");
        o.require(off > prev + 2.0, "offset diverges");
        o.detail << " " << off;
        prev = off;
    }
}

// 14
void determinism(Outcome& o) {
    const fs::path root = fs::temp_directory_path() / "lqc_acceptance_determinism";
    fs::remove_all(root);
    struct Run {
        const char* command;
        const char* config;
        std::vector<const char*> csvs;
    };
    const std::vector<Run> runs{
        {"rho-check", "rho_constant.json", {"rho_samples.csv"}},
        {"qs-bound", "qs_identity.json", {"lambda.csv", "qs_verification.csv"}},
        {"map-analyze", "analyze_f15.json", {"distortion.csv", "ring_ratio.csv", "david.csv"}},
        {"extremal-demo", "extremal_identity.json", {"search_log.csv"}},
    };
    for (const auto& r : runs) {
        std::string bytes[2];
        for (int k = 0; k < 2; ++k) {
            const fs::path out = root / (std::string(r.command) + std::to_string(k));
            const std::string cmd = std::string("\"") + LQC_CLI_BINARY + "\" " + r.command + " --config \"" +
                                    (fs::path(LQC_CONFIG_DIR) / r.config).string() + "\" --out \"" + out.string() +
                                    "\" --seed 11 --grid 64x128 > /dev/null 2>&1";
            const int status = std::system(cmd.c_str());
            o.require(status != -1 && WIFEXITED(status) && WEXITSTATUS(status) != 2, std::string(r.command) + " ran");
            for (const char* f : r.csvs) {
                std::ifstream is(out / f, std::ios::binary);
                o.require(bool(is), std::string(f) + " written");
                std::ostringstream ss;
                ss << is.rdbuf();
                bytes[k] += ss.str();
            }
        }
        const bool same = !bytes[0].empty() && bytes[0] == bytes[1];
        o.detail << r.command << ":" << bytes[0].size() << "B " << (same ? "identical" : "DIFFERENT") << " ";
        o.require(same, std::string(r.command) + " byte-identical");
    }
}

struct Entry {
    int id;
    const char* name;
    Criterion fn;
};

const std::vector<Entry>& criteria() {
    static const std::vector<Entry> list{
        {1, "radial-family algebra", radial_algebra},
        {2, "allowability classifier", allowability},
        {3, "dilatation convergence order", dilatation_order},
        {4, "David measure bound", david_bound},
        {5, "Beltrami roundtrip", beltrami_roundtrip},
        {6, "exhaustion convergence", exhaustion},
        {7, "Teichmuller-type self-consistency", teichmuller_self_consistency},
        {8, "special functions and tau calibration", special_functions},
        {9, "modulus lower bound", modulus_lower_bound},
        {10, "quasisymmetry bound", qs_bound},
        {11, "Reich-Strebel inequality", reich_strebel},
        {12, "local unique extremality", local_extremality},
        {13, "spiral non-extension", spiral},
        {14, "CLI determinism", determinism},
    };
    return list;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int k = 1; k < argc; ++k) {
        const std::string a = argv[k];
        if (a == "--criterion" && k + 1 < argc) only = std::atoi(argv[++k]);
        else {
            std::cerr << "usage: acceptance [--criterion N]\n";
            return 2;
        }
    }
    bool all = true, found = false;
    for (const auto& c : criteria()) {
        if (only && c.id != only) continue;
        found = true;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.fn(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "[exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << "criterion " << c.id << " " << c.name << ": " << (o.pass ? "PASS" : "FAIL") << " (" << secs
                  << " s) " << o.detail.str() << std::endl;
        all = all && o.pass;
    }
    if (!found) {
        std::cerr << "no criterion " << only << '\n';
        return 2;
    }
    return all ? 0 : 1;
}
