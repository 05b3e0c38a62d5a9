#include <algorithm>
#include <cmath>
#include <sstream>

#include "lqc/beltrami.hpp"

namespace lqc::beltrami {

double exhaustion_cutoff(double r, int n) {
    if (r <= 1.0 - 1.0 / n) return 1.0;
    const double u = 1.0 - r;
    if (u <= 1.0 / (double(n) * n)) return 0.0;
    const double t = -std::log(u) / std::log(double(n)) - 1.0;  // 0 at 1 - 1/n, 1 at 1 - 1/n^2
    return 1.0 - t * t * (3.0 - 2.0 * t);
}

namespace {

double sup_diff_within(const DiskGridMap& a, const DiskGridMap& b, double r) {
    const int n = a.grid.rings_within(r);
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < a.grid.n_theta; ++j) s = std::max(s, std::abs(a.at(i, j) - b.at(i, j)));
    return s;
}

}  // namespace

DiskSolution solve_exhaustion(const BeltramiField& mu, const growth::GrowthFunction& rho,
                              const SolverConfig& cfg) {
    cfg.validate();
    mu.validate();
    const PolarGrid& g = mu.grid;
    // |mu| <= (C rho - 1)/(C rho + 1) with C = sup D / rho, finite on the grid.
    double C = 1.0;
    for (int i = 0; i < g.n_r; ++i) {
        const double rr = rho(g.radius(i));
        for (int j = 0; j < g.n_theta; ++j) {
            const double a = std::abs(mu.at(i, j));
            C = std::max(C, (1.0 + a) / (1.0 - a) / rr);
        }
    }

    std::vector<DiskGridMap> stage_maps;
    const std::vector<int>& levels = cfg.exhaustion_levels;
    DiskSolution out;
    SolveReport& rep = out.report;
    std::vector<cplx> warm;
    bool all_ok = true;
    std::ostringstream msg;
    auto run_stage = [&](const BeltramiField& field, const std::string& label) {
        DiskSolution s = solve_disk(field, cfg, warm.empty() ? nullptr : &warm);
        StageReport st = s.report.stages.front();
        st.label = label;
        st.converged = s.report.converged;
        if (!s.report.converged) {
            all_ok = false;
            msg << label << ": " << s.report.message;
        }
        rep.stages.push_back(std::move(st));
        warm = s.omega;
        return s;
    };
    for (int n : levels) {
        BeltramiField mn(g);
        for (int i = 0; i < g.n_r; ++i) {
            const double c = exhaustion_cutoff(g.radius(i), n);
            for (int j = 0; j < g.n_theta; ++j) mn.at(i, j) = c * mu.at(i, j);
        }
        auto s = run_stage(mn, "n=" + std::to_string(n));
        stage_maps.push_back(std::move(s.map));
    }
    DiskSolution last = run_stage(mu, "full");
    stage_maps.push_back(last.map);

    rep.difference_radii = {0.8};
    for (int n : levels)
        if (1.0 - 1.0 / n != 0.8) rep.difference_radii.push_back(1.0 - 1.0 / n);
    std::sort(rep.difference_radii.begin(), rep.difference_radii.end());
    bool decreasing = true;
    for (double radius : rep.difference_radii) {
        std::vector<double> d;
        for (std::size_t k = 0; k + 1 < stage_maps.size(); ++k)
            d.push_back(sup_diff_within(stage_maps[k], stage_maps[k + 1], radius));
        // Only stage pairs whose coarser level already contains the disk are
        // expected to shrink.
        for (std::size_t k = 1; k < d.size(); ++k)
            if (1.0 - 1.0 / levels[k - 1] >= radius && d[k] > d[k - 1] * (1.0 + 1e-9) + 1e-12)
                decreasing = false;
        rep.stage_differences.push_back(std::move(d));
    }
    if (!decreasing) msg << "stage differences not decreasing on some Delta_j; ";
    rep.pinned_images = last.report.pinned_images;
    rep.image_of_origin = last.report.image_of_origin;
    rep.circle_deviation = last.report.circle_deviation;
    rep.converged = all_ok && decreasing;
    std::ostringstream head;
    head << "C = " << C << "; ";
    rep.message = head.str() + msg.str();
    out.map = std::move(last.map);
    out.map.source = "solve_exhaustion";
    out.omega = std::move(last.omega);
    return out;
}

}  // namespace lqc::beltrami

#include <Eigen/Eigenvalues>

#include "lqc/mapcore.hpp"

namespace lqc::beltrami {

cplx teichmuller_mu(const HoloDensity& phi0, double K0, const growth::GrowthFunction& rho,
                    cplx z, cplx w) {
    const cplx p = phi0(z);
    const double ap = std::abs(p);
    if (ap == 0.0) return 0.0;
    const double rw = std::min(std::abs(w), std::nextafter(1.0, 0.0));
    const double D = rho(rw) * K0;
    return ((D - 1.0) / (D + 1.0)) * (std::conj(p) / ap);
}

std::vector<cplx> zeros_in_disk(const HoloDensity& phi0) {
    const auto& c = phi0.coefficients();
    const int deg = static_cast<int>(c.size()) - 1;
    std::vector<cplx> out;
    if (deg < 1) return out;
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    for (int k = 0; k < deg; ++k) comp(0, k) = -c[deg - 1 - k] / c[deg];
    for (int k = 1; k < deg; ++k) comp(k, k - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    for (int k = 0; k < deg; ++k)
        if (std::abs(es.eigenvalues()[k]) <= 1.0 + 1e-12) out.push_back(es.eigenvalues()[k]);
    return out;
}

namespace {

// Below this gap rho(|f|) and the finite-difference dilatation are not resolved.
constexpr double kUnresolvedGap = 1e-6;

BeltramiField teich_field(const HoloDensity& phi0, double K0, const growth::GrowthFunction& rho,
                          const DiskGridMap& f) {
    const PolarGrid& g = f.grid;
    BeltramiField mu(g);
    for (int i = 0; i < g.n_r; ++i)
        for (int j = 0; j < g.n_theta; ++j)
            mu.at(i, j) = teichmuller_mu(phi0, K0, rho, g.node(i, j), f.at(i, j));
    return mu;
}

double equation_residual(const HoloDensity& phi0, double K0, const growth::GrowthFunction& rho,
                         const DiskGridMap& f) {
    const PolarGrid& g = f.grid;
    const auto mu_fd = mapcore::dilatation_field(f);
    const auto zeros = zeros_in_disk(phi0);
    const double exclusion = 2.0 * std::max(g.dr(), g.dtheta());
    double res = 0.0;
    for (int i = 0; i < g.rings_within(0.9); ++i)
        for (int j = 0; j < g.n_theta; ++j) {
            const cplx z = g.node(i, j);
            bool near_zero = false;
            for (const cplx& z0 : zeros) near_zero = near_zero || std::abs(z - z0) < exclusion;
            if (near_zero || mu_fd.flagged(g.index(i, j), kDegenerate)) continue;
            if (1.0 - std::abs(f.at(i, j)) < kUnresolvedGap) continue;
            res = std::max(res, std::abs(mu_fd.at(i, j) -
                                         teichmuller_mu(phi0, K0, rho, z, f.at(i, j))));
        }
    return res;
}

}  // namespace

DiskSolution solve_teichmuller_type(const HoloDensity& phi0, double K0,
                                    const growth::GrowthFunction& rho, const PolarGrid& grid,
                                    const SolverConfig& cfg) {
    if (!(K0 > 1.0)) throw PreconditionError("solve_teichmuller_type: K0 must exceed 1");
    cfg.validate();
    grid.validate();
    const bool constant_rho = rho.kind() == growth::Kind::Constant;
    DiskGridMap f = DiskGridMap::from_function(grid, [](cplx z) { return z; }, "identity");
    BeltramiField mu = teich_field(phi0, K0, rho, f);
    DiskSolution sol;
    std::vector<StageReport> all_stages;
    std::vector<double> diffs;
    bool ok = false;
    std::ostringstream msg;
    for (int it = 0; it < cfg.picard_max_iter; ++it) {
        sol = constant_rho ? solve_disk(mu, cfg) : solve_exhaustion(mu, rho, cfg);
        for (auto st : sol.report.stages) {
            st.label = "picard " + std::to_string(it + 1) + " " + st.label;
            all_stages.push_back(std::move(st));
        }
        if (!sol.report.converged) msg << "outer step " << it + 1 << ": " << sol.report.message;
        double d = 0.0;
        for (int i = 0; i < grid.rings_within(0.9); ++i)
            for (int j = 0; j < grid.n_theta; ++j)
                d = std::max(d, std::abs(sol.map.at(i, j) - f.at(i, j)));
        diffs.push_back(d);
        f = sol.map;
        BeltramiField next = teich_field(phi0, K0, rho, f);
        if (next.values == mu.values || d < cfg.picard_tol) {
            ok = sol.report.converged;
            break;
        }
        mu = std::move(next);
    }
    if (!ok && diffs.size() == static_cast<std::size_t>(cfg.picard_max_iter))
        msg << "Picard iteration did not converge in " << cfg.picard_max_iter << " steps; ";
    SolveReport rep = sol.report;
    rep.stages = std::move(all_stages);
    rep.picard_differences = diffs;
    rep.equation_residual = equation_residual(phi0, K0, rho, f);
    rep.converged = ok;
    rep.message = msg.str();
    sol.report = std::move(rep);
    sol.map.source = "solve_teichmuller_type";
    return sol;
}

}  // namespace lqc::beltrami
