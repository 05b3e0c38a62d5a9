#include "lqc/mapcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lqc/fft.hpp"

namespace lqc::mapcore {

RadialMapSpec::RadialMapSpec(double a_) : a(a_) {
    if (!(a_ > 0.0) || !std::isfinite(a_)) throw DomainError("radial map: a must be positive");
}

namespace {

// (1 - (1-r)^a) / r and a (1-r)^{a-1}, accurate near both ends.
std::pair<double, double> radial_stretches(double a, double r) {
    if (r < 1e-12) return {a, a};
    const double logu = std::log1p(-r);
    const double angular = -std::expm1(a * logu) / r;
    const double radial = (r < 1.0) ? a * std::exp((a - 1.0) * logu) : (a < 1 ? HUGE_VAL : 0.0);
    return {angular, radial};
}

}  // namespace

cplx radial_eval(const RadialMapSpec& spec, cplx z) {
    const double r = std::abs(z);
    if (r > 1.0 + 1e-15) throw DomainError("radial_eval: |z| > 1");
    if (r == 0.0) return 0.0;
    const double R = (r >= 1.0) ? 1.0 : -std::expm1(spec.a * std::log1p(-r));
    return z * (R / r);
}

double radial_distortion(const RadialMapSpec& spec, double r) {
    if (!(r >= 0.0 && r < 1.0)) throw DomainError("radial_distortion: r must lie in [0,1)");
    const auto [angular, radial] = radial_stretches(spec.a, r);
    const double q = angular / radial;
    return std::max(q, 1.0 / q);
}

cplx radial_dilatation(const RadialMapSpec& spec, cplx z) {
    const double r = std::abs(z);
    if (!(r < 1.0)) throw DomainError("radial_dilatation: |z| must be < 1");
    if (r == 0.0) return 0.0;
    const auto [angular, radial] = radial_stretches(spec.a, r);
    const cplx e2 = (z / r) * (z / r);
    return e2 * ((radial - angular) / (radial + angular));
}

cplx spiral_eval(cplx z) {
    const double r = std::abs(z);
    if (!(r < 1.0)) throw DomainError("spiral_eval: |z| must be < 1");
    return z * std::polar(1.0, -std::log1p(-r));
}

cplx power_eval(double alpha, cplx z) {
    const double r = std::abs(z);
    if (r == 0.0) return 0.0;
    return z * std::pow(r, alpha - 1.0);
}

cplx power_dilatation(double alpha, cplx z) {
    const double r = std::abs(z);
    if (r == 0.0) return 0.0;
    const cplx e = z / r;
    return ((alpha - 1.0) / (alpha + 1.0)) * e * e;
}

Derivatives derivatives(const DiskGridMap& map) {
    const PolarGrid& g = map.grid;
    g.validate();
    if (map.values.size() != g.size()) throw PreconditionError("derivatives: size mismatch");
    const int nr = g.n_r, nt = g.n_theta;
    const double h = g.dr();
    Derivatives d{g, std::vector<cplx>(g.size()), std::vector<cplx>(g.size()), {}};
    std::vector<cplx> ftheta(g.size());
    std::vector<cplx> row(nt);
    for (int i = 0; i < nr; ++i) {
        std::copy_n(&map.values[g.index(i, 0)], nt, row.begin());
        fft::forward(row);
        for (int k = 0; k < nt; ++k) {
            const int m = fft::frequency(k, nt);
            row[k] *= (2 * m == nt) ? cplx(0.0) : cplx(0.0, m / static_cast<double>(nt));
        }
        fft::backward(row);
        std::copy(row.begin(), row.end(), &ftheta[g.index(i, 0)]);
    }
    const bool rim = map.rim.has_value();
    for (int i = 0; i < nr; ++i) {
        const double r = g.radius(i);
        for (int j = 0; j < nt; ++j) {
            const std::size_t k = g.index(i, j);
            cplx fr;
            if (i == 0) {
                fr = (map.at(1, j) - map.at(0, (j + nt / 2) % nt)) / (2.0 * h);
            } else if (i < nr - 1) {
                fr = (map.at(i + 1, j) - map.at(i - 1, j)) / (2.0 * h);
            } else if (rim) {
                const double gap = 1.0 - r;
                const cplx fm = map.at(i - 1, j), f0 = map.at(i, j), fp = (*map.rim)[j];
                fr = -gap / (h * (h + gap)) * fm + (gap - h) / (h * gap) * f0 +
                     h / (gap * (h + gap)) * fp;
            } else {
                fr = (3.0 * map.at(i, j) - 4.0 * map.at(i - 1, j) + map.at(i - 2, j)) / (2.0 * h);
                if (d.flags.empty()) d.flags.assign(g.size(), 0);
                d.flags[k] |= kOneSided;
            }
            const cplx e = std::polar(1.0, g.angle(j));
            const cplx ft_over_r = ftheta[k] / r;
            d.fz[k] = 0.5 * std::conj(e) * (fr - kI * ft_over_r);
            d.fzbar[k] = 0.5 * e * (fr + kI * ft_over_r);
        }
    }
    return d;
}

BeltramiField dilatation_field(const Derivatives& d) {
    BeltramiField mu(d.grid);
    if (!d.flags.empty()) mu.flags = d.flags;
    for (std::size_t k = 0; k < mu.values.size(); ++k) {
        const double a = std::abs(d.fz[k]);
        const double jac = std::norm(d.fz[k]) - std::norm(d.fzbar[k]);
        if (a < 1e-12 || !(jac > 0.0)) {
            mu.values[k] = 0.0;
            mu.set_flag(k, kDegenerate);
            continue;
        }
        mu.values[k] = d.fzbar[k] / d.fz[k];
    }
    return mu;
}

BeltramiField dilatation_field(const DiskGridMap& map) { return dilatation_field(derivatives(map)); }

std::vector<cplx> degenerate_nodes(const BeltramiField& mu) {
    std::vector<cplx> out;
    for (std::size_t k = 0; k < mu.values.size(); ++k)
        if (mu.flagged(k, kDegenerate))
            out.push_back(mu.grid.node(static_cast<int>(k / mu.grid.n_theta),
                                       static_cast<int>(k % mu.grid.n_theta)));
    return out;
}

RealField distortion_field(const BeltramiField& mu) {
    RealField D{mu.grid, std::vector<double>(mu.values.size()), mu.flags};
    for (std::size_t k = 0; k < mu.values.size(); ++k) {
        const double a = std::abs(mu.values[k]);
        D.values[k] = (1.0 + a) / (1.0 - a);
    }
    return D;
}

RealField distortion_field(const DiskGridMap& map) {
    return distortion_field(dilatation_field(map));
}

RealField radial_distortion_field(const RadialMapSpec& spec, const PolarGrid& g) {
    g.validate();
    RealField D{g, std::vector<double>(g.size()), {}};
    for (int i = 0; i < g.n_r; ++i) {
        const double v = radial_distortion(spec, g.radius(i));
        std::fill_n(&D.values[g.index(i, 0)], g.n_theta, v);
    }
    return D;
}

std::vector<cplx> tau_hat(const Derivatives& d) {
    std::vector<cplx> t(d.fz.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double a = std::abs(d.fz[k]);
        t[k] = a < 1e-12 ? cplx(0.0) : std::conj(d.fz[k]) / d.fz[k];
    }
    return t;
}

TransferredField inverse_dilatation(const BeltramiField& mu_f, const Derivatives& d,
                                    const DiskGridMap& map) {
    if (!(mu_f.grid == map.grid)) throw PreconditionError("inverse_dilatation: grid mismatch");
    TransferredField out{map.values, BeltramiField(map.grid)};
    const auto t = tau_hat(d);
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] == cplx(0.0) || mu_f.flagged(k, kDegenerate)) {
            out.field.set_flag(k, kDegenerate);
            continue;
        }
        out.field.values[k] = -mu_f.values[k] / t[k];
    }
    return out;
}

TransferredField inverse_dilatation(const BeltramiField& mu_f, const DiskGridMap& map) {
    return inverse_dilatation(mu_f, derivatives(map), map);
}

BeltramiField composition_dilatation(const BeltramiField& mu_g_at_image,
                                     const BeltramiField& mu_f, const DiskGridMap& f) {
    if (!(mu_g_at_image.grid == f.grid) || !(mu_f.grid == f.grid))
        throw PreconditionError("composition_dilatation: grid mismatch");
    const Derivatives d = derivatives(f);
    const auto t = tau_hat(d);
    const auto inv = inverse_dilatation(mu_f, d, f);
    BeltramiField out(f.grid);
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (inv.field.flagged(k, kDegenerate) || mu_g_at_image.flagged(k, kDegenerate)) {
            out.set_flag(k, kDegenerate);
            continue;
        }
        const cplx mg = mu_g_at_image.values[k];
        const cplx mi = inv.field.values[k];
        const cplx den = 1.0 - std::conj(mi) * mg;
        if (std::abs(den) < 1e-12) {
            out.set_flag(k, kDegenerate);
            continue;
        }
        out.values[k] = t[k] * (mg - mi) / den;
    }
    return out;
}

KRho k_rho(const RealField& D, const growth::GrowthFunction& rho, double domain_cut) {
    const PolarGrid& g = D.grid;
    const int n = g.rings_within(domain_cut);
    KRho out;
    out.value = 0.0;
    int best_ring = -1;
    for (int i = 0; i < n; ++i) {
        const double rr = rho(g.radius(i));
        for (int j = 0; j < g.n_theta; ++j) {
            const std::size_t k = g.index(i, j);
            if (!D.flags.empty() && (D.flags[k] & kDegenerate)) continue;
            const double v = D.values[k] / rr;
            ++out.nodes_used;
            if (v > out.value) {
                out.value = v;
                out.location = g.node(i, j);
                best_ring = i;
            }
        }
    }
    out.attained_on_outer_ring = best_ring >= 0 && best_ring == n - 1;
    // rho(0) = 1 and D >= 1, so the supremum over the disk is at least the
    // value at the origin, which no cell-centred node samples.
    if (out.value < 1.0) {
        out.value = 1.0;
        out.location = 0.0;
        out.attained_on_outer_ring = false;
    }
    return out;
}

KRho k_rho(const BeltramiField& mu, const growth::GrowthFunction& rho, double domain_cut) {
    return k_rho(distortion_field(mu), rho, domain_cut);
}

KRho k_rho(const DiskGridMap& map, const growth::GrowthFunction& rho, double domain_cut) {
    return k_rho(distortion_field(map), rho, domain_cut);
}

KRho k_rho_inverse(const RealField& D, const DiskGridMap& f, const growth::GrowthFunction& rho,
                   double domain_cut) {
    if (!(D.grid == f.grid)) throw PreconditionError("k_rho_inverse: grid mismatch");
    KRho out;
    out.value = 0.0;
    double outer_image_radius = 0.0;
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        if (!D.flags.empty() && (D.flags[k] & kDegenerate)) continue;
        const double w = std::abs(f.values[k]);
        if (w > domain_cut || w >= 1.0) continue;
        outer_image_radius = std::max(outer_image_radius, w);
        const double v = D.values[k] / rho(w);
        ++out.nodes_used;
        if (v > out.value) {
            out.value = v;
            out.location = f.values[k];
        }
    }
    out.attained_on_outer_ring =
        out.nodes_used > 0 && std::abs(out.location) > outer_image_radius - D.grid.dr();
    if (out.value < 1.0) {
        out.value = 1.0;
        out.location = f.center;
        out.attained_on_outer_ring = false;
    }
    return out;
}

Membership membership_qc_rho(const RealField& D, const growth::GrowthFunction& rho) {
    const PolarGrid& g = D.grid;
    Membership m;
    m.ring_ratio.assign(g.n_r, 0.0);
    for (int i = 0; i < g.n_r; ++i) {
        const double rr = rho(g.radius(i));
        for (int j = 0; j < g.n_theta; ++j) {
            const std::size_t k = g.index(i, j);
            if (!D.flags.empty() && (D.flags[k] & kDegenerate)) continue;
            m.ring_ratio[i] = std::max(m.ring_ratio[i], D.values[k] / rr);
        }
    }
    m.grid_sup = *std::max_element(m.ring_ratio.begin(), m.ring_ratio.end());
    const int tail = std::max(2, g.n_r / 10);
    const int start = g.n_r - tail;
    bool monotone = true;
    for (int i = start + 1; i < g.n_r; ++i)
        if (!(m.ring_ratio[i] > m.ring_ratio[i - 1])) monotone = false;
    const double growth = m.ring_ratio.back() / m.ring_ratio[start];
    if (monotone && growth > 2.0) {
        std::ostringstream os;
        os << "D/rho grows monotonically by a factor " << growth << " over the outer " << tail
           << " rings";
        m.message = os.str();
        return m;
    }
    m.constant = m.grid_sup;
    return m;
}

std::vector<DavidRow> david_measure_profile(const RealField& D, const std::vector<double>& K_grid,
                                            std::optional<double> C) {
    for (std::size_t k = 1; k < K_grid.size(); ++k)
        if (!(K_grid[k] > K_grid[k - 1]))
            throw PreconditionError("david_measure_profile: K grid must be increasing");
    const PolarGrid& g = D.grid;
    std::vector<DavidRow> rows;
    for (double K : K_grid) {
        double area = 0.0;
        for (int i = 0; i < g.n_r; ++i) {
            int count = 0;
            for (int j = 0; j < g.n_theta; ++j)
                if (D.values[g.index(i, j)] > K) ++count;
            area += count * g.cell_area(i);
        }
        DavidRow row{K, area, std::nullopt};
        if (C) row.bound = kPi * std::exp(-2.0 * K / *C);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace lqc::mapcore
