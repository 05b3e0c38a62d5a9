#include "lqc/teich.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "lqc/mapcore.hpp"

namespace lqc::teich {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double smoothstep(double s) { return s * s * (3.0 - 2.0 * s); }
double smoothstep_slope(double s) { return 6.0 * s * (1.0 - s); }

// Unscaled bump on [0, 1]: up on [0, 1/2], down on [1/2, 1].
double bump(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return u <= 0.5 ? smoothstep(2 * u) : smoothstep(2 - 2 * u);
}
double bump_slope(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return u <= 0.5 ? 2 * smoothstep_slope(2 * u) : -2 * smoothstep_slope(2 - 2 * u);
}

// sup over [r1, r2] of |r b0'(u)| / (r2 - r1). On each half the product of a
// positive linear factor and a concave bump slope is unimodal.
double shear_scale(double r1, double r2) {
    const double w = r2 - r1;
    auto g = [&](double u) { return (r1 + w * u) * std::abs(bump_slope(u)) / w; };
    double best = 0.0;
    for (auto [lo, hi] : {std::pair{0.0, 0.5}, std::pair{0.5, 1.0}}) {
        double a = lo, b = hi;
        for (int it = 0; it < 200; ++it) {
            const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
            if (g(m1) < g(m2)) a = m1; else b = m2;
        }
        best = std::max(best, g(0.5 * (a + b)));
    }
    return best;
}

BeltramiField field_of(const DiskGridMap& f) {
    if (f.mu) {
        BeltramiField b(f.grid);
        b.values = *f.mu;
        return b;
    }
    return mapcore::dilatation_field(f);
}

struct Composed {
    DiskGridMap map;
    BeltramiField mu;
};

Composed compose(const DiskGridMap& f, const BeltramiField& mu_f, const TwistCombination& w) {
    const PolarGrid& g = f.grid;
    Composed out{f, mu_f};
    out.map.source = f.source + " o twist";
    if (!mu_f.flags.empty()) out.mu.flags = mu_f.flags;
    for (int i = 0; i < g.n_r; ++i) {
        const double r = g.radius(i);
        const double beta = w.beta(r), x = w.shear(r);
        if (beta == 0.0 && x == 0.0) continue;
        const cplx* frow = &f.values[g.index(i, 0)];
        const cplx* mrow = &mu_f.values[g.index(i, 0)];
        const cplx half(0.0, x / 2);
        const cplx tau = std::polar(1.0, -2 * beta) * (1.0 - half) / (1.0 + half);
        for (int j = 0; j < g.n_theta; ++j) {
            const double th = g.angle(j);
            const std::size_t k = g.index(i, j);
            out.map.values[k] = interpolate_periodic(frow, g.n_theta, th + beta);
            const cplx mf = interpolate_periodic(mrow, g.n_theta, th + beta);
            const cplx mw = half * std::polar(1.0, 2 * th) / (1.0 + half);
            out.mu.values[k] = (mw + tau * mf) / (1.0 + std::conj(mw) * tau * mf);
            if (!mu_f.flags.empty()) {
                const double pos = std::fmod(th + beta, kTwoPi) / g.dtheta();
                const int j0 = (static_cast<int>(std::floor(pos)) % g.n_theta + g.n_theta) % g.n_theta;
                const int j1 = (j0 + 1) % g.n_theta;
                out.mu.flags[k] = mu_f.flags[g.index(i, j0)] | mu_f.flags[g.index(i, j1)];
            }
        }
    }
    out.map.mu = out.mu.values;
    return out;
}

double objective(const DiskGridMap& f0, const BeltramiField& mu0, const growth::GrowthFunction& rho,
                 const TwistCombination& w, double cut) {
    if (!w.is_diffeomorphism(f0.grid)) return kInf;
    const Composed c = compose(f0, mu0, w);
    for (std::size_t k = 0; k < c.mu.values.size(); ++k) {
        if (c.mu.flagged(k, kDegenerate)) continue;
        if (!(std::abs(c.mu.values[k]) < 1.0)) return kInf;
    }
    const double v = mapcore::k_rho_inverse(mapcore::distortion_field(c.mu), c.map, rho, cut).value;
    return std::isfinite(v) ? v : kInf;
}

}  // namespace

// ---- normalization and classes -------------------------------------------------

Mobius normalizing_mobius(const boundary::BoundaryTrace& h) {
    return Mobius::normalizing(h(0.0), h(kPi), h(kPi / 2));
}

boundary::BoundaryTrace normalized_trace(const boundary::BoundaryTrace& h) { return boundary::normalized(h); }

DiskGridMap normalize_map(const DiskGridMap& map) {
    const Mobius M = normalizing_mobius(boundary::boundary_trace(map));
    DiskGridMap out = map;
    if (!out.mu) out.mu = mapcore::dilatation_field(map).values;
    for (auto& v : out.values) v = M(v);
    out.center = M(map.center);
    if (out.rim)
        for (auto& v : *out.rim) v = M(v);
    return out;
}

bool equivalent(const boundary::BoundaryTrace& f, const boundary::BoundaryTrace& g, double tol) {
    if (f.size() != g.size()) throw PreconditionError("equivalent: traces sampled differently");
    const auto a = normalized_trace(f), b = normalized_trace(g);
    double d = 0.0;
    for (int j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a.values[j] - b.values[j]));
    return d < tol;
}

bool equivalent(const DiskGridMap& f, const DiskGridMap& g, double tol) {
    return equivalent(boundary::boundary_trace(f), boundary::boundary_trace(g), tol);
}

TeichClass TeichClass::of(const DiskGridMap& map) {
    TeichClass c;
    c.trace = normalized_trace(boundary::boundary_trace(map));
    c.representatives.push_back(map);
    return c;
}

void TeichClass::add(const DiskGridMap& map) {
    const auto t = normalized_trace(boundary::boundary_trace(map));
    if (t.size() != trace.size()) throw PreconditionError("TeichClass: traces sampled differently");
    double d = 0.0;
    for (int j = 0; j < t.size(); ++j) d = std::max(d, std::abs(t.values[j] - trace.values[j]));
    if (!(d < 1e-3)) throw PreconditionError("TeichClass: representative has a different trace");
    representatives.push_back(map);
}

// ---- twists --------------------------------------------------------------------

void BoundaryFixingTwist::validate() const {
    if (!(r1 > 0.0 && r1 < r2 && r2 < 1.0)) throw PreconditionError("twist: need 0 < r1 < r2 < 1");
    if (!(std::abs(amplitude) < 1.0)) throw PreconditionError("twist: |amplitude| must be < 1");
}

double BoundaryFixingTwist::profile(double r) const {
    return bump((r - r1) / (r2 - r1)) / shear_scale(r1, r2);
}

double BoundaryFixingTwist::profile_slope(double r) const {
    return bump_slope((r - r1) / (r2 - r1)) / ((r2 - r1) * shear_scale(r1, r2));
}

void to_json(nlohmann::json& j, const BoundaryFixingTwist& t) {
    j = {{"r1", t.r1}, {"r2", t.r2}, {"amplitude", t.amplitude}};
}

void from_json(const nlohmann::json& j, BoundaryFixingTwist& t) {
    try {
        t.r1 = j.at("r1").get<double>();
        t.r2 = j.at("r2").get<double>();
        t.amplitude = j.value("amplitude", 0.0);
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError(std::string("twist JSON: ") + e.what());
    }
    t.validate();
}

std::vector<BoundaryFixingTwist> default_basis() {
    return {{0.1, 0.35, 0.0}, {0.4, 0.6, 0.0}, {0.65, 0.85, 0.0}};
}

double TwistCombination::beta(double r) const {
    double s = 0.0;
    for (std::size_t k = 0; k < basis.size(); ++k) s += coefficients[k] * basis[k].profile(r);
    return s;
}

double TwistCombination::shear(double r) const {
    double s = 0.0;
    for (std::size_t k = 0; k < basis.size(); ++k) s += coefficients[k] * r * basis[k].profile_slope(r);
    return s;
}

bool TwistCombination::is_diffeomorphism(const PolarGrid& g) const {
    if (coefficients.size() != basis.size()) throw PreconditionError("twist: coefficient count mismatch");
    for (int i = 0; i < g.n_r; ++i)
        if (!(std::abs(shear(g.radius(i))) < 1.0)) return false;
    return true;
}

cplx TwistCombination::dilatation(cplx z) const {
    const double r = std::abs(z);
    const cplx half(0.0, shear(r) / 2);
    const cplx e2 = r > 0.0 ? (z / r) * (z / r) : cplx(1.0);
    return half * e2 / (1.0 + half);
}

DiskGridMap twist_map(const PolarGrid& g, const TwistCombination& w) {
    if (!w.is_diffeomorphism(g)) throw PreconditionError("twist_map: not a diffeomorphism (|r beta'| >= 1)");
    DiskGridMap out(g);
    out.source = "twist";
    std::vector<cplx> mu(g.size());
    for (int i = 0; i < g.n_r; ++i) {
        const double r = g.radius(i), beta = w.beta(r);
        for (int j = 0; j < g.n_theta; ++j) {
            out.at(i, j) = std::polar(r, g.angle(j) + beta);
            mu[g.index(i, j)] = w.dilatation(g.node(i, j));
        }
    }
    std::vector<cplx> rim(g.n_theta);
    for (int j = 0; j < g.n_theta; ++j) rim[j] = std::polar(1.0, g.angle(j));
    if (g.r_max >= 1.0) out.rim = rim;
    out.mu = std::move(mu);
    return out;
}

DiskGridMap compose_with_twist(const DiskGridMap& f, const TwistCombination& w) {
    if (!w.is_diffeomorphism(f.grid))
        throw PreconditionError("compose_with_twist: not a diffeomorphism (|r beta'| >= 1)");
    return compose(f, field_of(f), w).map;
}

// ---- Reich-Strebel ratio ---------------------------------------------------------

ReichStrebel reich_strebel(const DiskGridMap& g, const HoloDensity& phi) {
    const auto h = boundary::boundary_trace(g);
    double dev = 0.0;
    for (int j = 0; j < h.size(); ++j) dev = std::max(dev, std::abs(h.values[j] - std::polar(1.0, h.angles[j])));
    if (!(dev < 1e-3)) throw PreconditionError("reich_strebel: boundary trace is not the identity");

    const BeltramiField mu = field_of(g);
    const PolarGrid& G = g.grid;
    std::vector<cplx> p(G.size());
    double pmax = 0.0;
    for (int i = 0; i < G.n_r; ++i)
        for (int j = 0; j < G.n_theta; ++j) {
            p[G.index(i, j)] = phi(G.node(i, j));
            pmax = std::max(pmax, std::abs(p[G.index(i, j)]));
        }
    if (!(pmax > 0.0)) throw PreconditionError("reich_strebel: phi vanishes on the grid");

    double num = 0.0, den = 0.0, excluded = 0.0, total = 0.0;
    for (int i = 0; i < G.n_r; ++i) {
        const double area = G.cell_area(i);
        for (int j = 0; j < G.n_theta; ++j) {
            const std::size_t k = G.index(i, j);
            total += area;
            const double a = std::abs(p[k]);
            if (a < 1e-9 * pmax || mu.flagged(k, kDegenerate)) {
                excluded += area;
                continue;
            }
            const cplx m = mu.values[k];
            num += area * a * std::norm(1.0 + m * p[k] / a) / (1.0 - std::norm(m));
            den += area * a;
        }
    }
    ReichStrebel out;
    out.ratio = num / den;
    out.excluded_fraction = excluded / total;
    out.flagged = out.excluded_fraction >= 0.01;
    return out;
}

double reich_strebel_ratio(const DiskGridMap& g, const HoloDensity& phi) { return reich_strebel(g, phi).ratio; }

// ---- extremal search -------------------------------------------------------------

CoefficientBox CoefficientBox::symmetric(std::size_t n, double half_width) {
    return {std::vector<double>(n, -half_width), std::vector<double>(n, half_width)};
}

void CoefficientBox::validate(std::size_t n) const {
    if (lower.size() != n || upper.size() != n) throw PreconditionError("coefficient box: size mismatch");
    for (std::size_t k = 0; k < n; ++k)
        if (!(lower[k] <= 0.0 && 0.0 <= upper[k]))
            throw PreconditionError("coefficient box: each interval must contain 0");
}

void to_json(nlohmann::json& j, const CoefficientBox& b) { j = {{"lower", b.lower}, {"upper", b.upper}}; }

void from_json(const nlohmann::json& j, CoefficientBox& b) {
    try {
        b.lower = j.at("lower").get<std::vector<double>>();
        b.upper = j.at("upper").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError(std::string("coefficient box JSON: ") + e.what());
    }
}

double twist_objective(const DiskGridMap& f0, const growth::GrowthFunction& rho,
                       const std::vector<BoundaryFixingTwist>& basis, const std::vector<double>& c,
                       double domain_cut) {
    return objective(f0, field_of(f0), rho, TwistCombination{basis, c}, domain_cut);
}

SearchResult extremal_search(const DiskGridMap& f0, const growth::GrowthFunction& rho,
                             const std::vector<BoundaryFixingTwist>& basis, const CoefficientBox& box,
                             const SearchOptions& opt) {
    const std::size_t n = basis.size();
    for (const auto& t : basis) t.validate();
    box.validate(n);
    if (!(opt.line_tolerance > 0.0) || opt.max_sweeps < 1) throw PreconditionError("extremal_search: bad options");
    const BeltramiField mu0 = field_of(f0);

    SearchResult res;
    int step = 0;
    auto eval = [&](const std::vector<double>& c, const std::string& note) {
        const double v = objective(f0, mu0, rho, TwistCombination{basis, c}, opt.domain_cut);
        res.log.push_back({step++, c, v, std::isfinite(v) ? note : note + " (rejected)"});
        return v;
    };

    std::vector<double> cur(n, 0.0);
    double best = eval(cur, "start");
    res.k_at_zero = best;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        bool improved = false;
        for (std::size_t k = 0; k < n; ++k) {
            const std::string tag = "line " + std::to_string(k + 1);
            std::vector<double> c = cur;
            auto at = [&](double x) {
                c[k] = x;
                return eval(c, tag);
            };
            double a = box.lower[k], b = box.upper[k];
            double x1 = b - g * (b - a), x2 = a + g * (b - a);
            double f1 = at(x1), f2 = at(x2);
            while (b - a > opt.line_tolerance) {
                if (f1 <= f2) {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - g * (b - a);
                    f1 = at(x1);
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + g * (b - a);
                    f2 = at(x2);
                }
            }
            const double xm = f1 <= f2 ? x1 : x2, fm = std::min(f1, f2);
            if (fm < best) {
                cur[k] = xm;
                best = fm;
                improved = true;
                res.log.push_back({step++, cur, best, tag + " accepted"});
            }
        }
        if (!improved) break;
    }
    res.argmin = cur;
    res.k_min = best;
    return res;
}

void write_search_log(std::ostream& os, const SearchResult& r) {
    const std::size_t n = r.argmin.size();
    os << "step";
    for (std::size_t k = 1; k <= n; ++k) os << ",c" << k;
    os << ",objective\n";
    const auto old = os.precision(17);
    for (const auto& row : r.log) {
        os << row.step;
        for (double c : row.c) os << ',' << c;
        os << ',';
        if (std::isfinite(row.objective)) os << row.objective; else os << "inf";
        os << '\n';
    }
    os.precision(old);
}

// ---- pseudo-metric -----------------------------------------------------------------

double extremal_value(const TeichClass& c, const growth::GrowthFunction& rho, const MetricConfig& cfg) {
    if (c.representatives.empty()) throw PreconditionError("extremal_value: class has no representative");
    return extremal_search(c.representatives.front(), rho, cfg.basis,
                           CoefficientBox::symmetric(cfg.basis.size(), cfg.half_width), cfg.search)
        .k_min;
}

double pseudo_metric(const TeichClass& f, const TeichClass& g, const growth::GrowthFunction& rho,
                     const MetricConfig& cfg) {
    return std::abs(extremal_value(f, rho, cfg) - extremal_value(g, rho, cfg));
}

}  // namespace lqc::teich
