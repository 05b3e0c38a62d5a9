#include <algorithm>
#include <cmath>

#include "lqc/fem.hpp"
#include "lqc/modulus.hpp"

namespace lqc::modulus {

namespace {

// Conformal map of the complement of E = [a, b] onto the unit disk, sending
// infinity to 0: inverse Joukowski followed by inversion.
struct SlitChart {
    cplx mid, rot;
    double half;

    SlitChart(cplx a, cplx b) : mid(0.5 * (a + b)), rot((b - a) / std::abs(b - a)), half(0.5 * std::abs(b - a)) {}

    cplx eta(cplx z) const {
        const cplx w = (z - mid) / (rot * half);
        const cplx zeta = w + std::sqrt(w - 1.0) * std::sqrt(w + 1.0);
        return 1.0 / zeta;
    }
    cplx deta(cplx z) const {
        const cplx w = (z - mid) / (rot * half);
        const cplx root = std::sqrt(w - 1.0) * std::sqrt(w + 1.0);
        const cplx zeta = w + root;
        // dzeta/dw = zeta / root, deta = -deta/zeta^2
        return -(1.0 / (zeta * root)) / (rot * half);
    }
};

// Slit image of the ray as a graph theta = g(s) over s = log|eta|, tabulated
// with its slope.
struct SlitGraph {
    std::vector<double> s, g, dg;  // ascending in s

    double value(double x, const std::vector<double>& col) const {
        if (x <= s.front()) return col.front();
        if (x >= s.back()) return col.back();
        const auto it = std::upper_bound(s.begin(), s.end(), x);
        const std::size_t k = static_cast<std::size_t>(it - s.begin());
        const double t = (x - s[k - 1]) / (s[k] - s[k - 1]);
        return (1 - t) * col[k - 1] + t * col[k];
    }
};

SlitGraph trace_slit(const SlitChart& chart, cplx c, cplx dir, double t_end) {
    const int n = 8000;
    std::vector<double> s(n + 1), g(n + 1), dg(n + 1);
    const double L = std::log1p(t_end);
    double prev_arg = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double t = std::expm1(L * k / n);
        const cplx z = c + t * dir;
        const cplx e = chart.eta(z);
        const cplx q = chart.deta(z) * dir / e;  // d log(eta) / dt
        if (!(q.real() < 0.0))
            throw PreconditionError("grid_capacity: slit image is not star-shaped about the image of infinity");
        double ang = std::arg(e);
        if (k > 0) ang = prev_arg + std::remainder(ang - prev_arg, kTwoPi);
        prev_arg = ang;
        s[n - k] = std::log(std::abs(e));
        g[n - k] = ang;
        dg[n - k] = q.imag() / q.real();
    }
    return {std::move(s), std::move(g), std::move(dg)};
}

double ray_exit(cplx c, cplx dir, double radius) {
    // |c + t dir| = radius, t >= 0
    const double bq = (std::conj(c) * dir).real();
    const double cq = std::norm(c) - radius * radius;
    return -bq + std::sqrt(bq * bq - cq);
}

// Energy on the sheared log-polar grid with n_theta cells around.
double slit_energy(const SlitGraph& G, double s_min, double s_c, int n_theta) {
    const double dth = kTwoPi / n_theta;
    const int n1 = std::max(2, static_cast<int>(std::ceil((s_c - s_min) / dth)));
    const int n2 = std::max(2, static_cast<int>(std::ceil(-s_c / dth)));
    fem::RectGrid grid;
    grid.x = fem::linspace(s_min, s_c, n1);
    const auto upper = fem::linspace(s_c, 0.0, n2);
    grid.x.insert(grid.x.end(), upper.begin() + 1, upper.end());
    grid.y = fem::linspace(0.0, kTwoPi, n_theta);
    grid.periodic_y = true;
    const double g_top = G.value(s_c, G.g);
    auto coef = [&](double s, double th) {
        const double g = s < s_c ? G.value(s, G.g) : g_top;
        const double dg = s < s_c ? G.value(s, G.dg) : 0.0;
        const cplx e = std::exp(cplx(s, th + g));
        return fem::pullback(e * cplx(1.0, dg), e * kI);
    };
    const int nx = static_cast<int>(grid.x.size());
    auto dir = [&](int i, int j) -> std::optional<double> {
        if (i == 0) return 1.0;
        if (i == nx - 1) return 0.0;
        if (j == 0 && i <= n1) return 1.0;
        return std::nullopt;
    };
    return fem::min_energy(grid, coef, dir).energy;
}

struct GridSeries {
    double extrapolated, finest, order;
};

GridSeries grid_series(const SlitGraph& G, double s_min, double s_c, const CapacityOptions& opt) {
    std::vector<double> m;
    for (int l = 0; l < opt.levels; ++l) m.push_back(slit_energy(G, s_min, s_c, opt.n_theta_start << l));
    GridSeries out{m.back(), m.back(), std::nan("")};
    if (m.size() >= 3) {
        const double d1 = m[m.size() - 3] - m[m.size() - 2], d2 = m[m.size() - 2] - m.back();
        if (d1 != 0.0 && d2 != 0.0 && d1 / d2 > 0.0) out.order = std::log2(d1 / d2);
    }
    if (m.size() >= 2) {
        const double p = (std::isfinite(out.order) && out.order > 0.5 && out.order < 3.0) ? out.order : 1.0;
        out.extrapolated = m.back() + (m.back() - m[m.size() - 2]) / (std::pow(2.0, p) - 1.0);
    }
    return out;
}

}  // namespace

CapacityResult grid_capacity(cplx a, cplx b, cplx c, const CapacityOptions& opt) {
    if (a == b || a == c) throw PreconditionError("grid_capacity: a must differ from b and c");
    if (opt.levels < 1 || opt.n_theta_start < 8) throw PreconditionError("grid_capacity: bad options");
    const SlitChart chart(a, b);
    {
        // c must not lie on E
        const cplx w = (c - chart.mid) / (chart.rot * chart.half);
        if (std::abs(w.imag()) < 1e-14 && std::abs(w.real()) <= 1.0)
            throw PreconditionError("grid_capacity: c lies on the segment [a, b]");
    }
    const cplx dir = (c - a) / std::abs(c - a);
    const double radius = opt.truncation_factor * std::max({std::abs(a), std::abs(b), std::abs(c)});
    if (!(radius > std::abs(c))) throw PreconditionError("grid_capacity: truncation radius inside c");
    const double t1 = ray_exit(c, dir, radius), t2 = ray_exit(c, dir, 2.0 * radius);
    const SlitGraph G = trace_slit(chart, c, dir, t2);
    const double s_c = std::log(std::abs(chart.eta(c)));
    const double s1 = std::log(std::abs(chart.eta(c + t1 * dir)));
    const double s2 = std::log(std::abs(chart.eta(c + t2 * dir)));

    const GridSeries m1 = grid_series(G, s1, s_c, opt);
    const GridSeries m2 = grid_series(G, s2, s_c, opt);
    CapacityResult out;
    out.finest = m1.finest;
    out.observed_order = m1.order;
    out.truncation_radius = radius;
    out.truncation_sensitivity = std::abs(m2.extrapolated - m1.extrapolated) / m1.extrapolated;
    out.truncation_warning = out.truncation_sensitivity > 0.02;
    // the truncation error decays like 1 / radius
    out.value = 2.0 * m2.extrapolated - m1.extrapolated;
    return out;
}

RingCheck ring_capacity_check(cplx a, cplx b, cplx c, const CapacityOptions& opt) {
    RingCheck rc;
    rc.detail = grid_capacity(a, b, c, opt);
    rc.measured = rc.detail.value;
    rc.bound = tau_capacity(std::abs(a - c) / std::abs(a - b));
    return rc;
}

}  // namespace lqc::modulus
