#include <algorithm>
#include <cmath>

#include "lqc/fem.hpp"
#include "lqc/mapcore.hpp"
#include "lqc/modulus.hpp"

namespace lqc::modulus {

void QuadrilateralSpec::validate() const {
    if (std::abs(std::abs(xi) - 1.0) > 1e-12) throw PreconditionError("QuadrilateralSpec: xi must be unimodular");
    if (!(r > 0.0 && r < R && R < 2.0)) throw PreconditionError("QuadrilateralSpec: need 0 < r < R < 2");
}

QuadrilateralSpec QuadrilateralSpec::rotated(double alpha) const {
    QuadrilateralSpec q = *this;
    q.xi = xi * std::polar(1.0, alpha);
    return q;
}

void to_json(nlohmann::json& j, const QuadrilateralSpec& q) {
    j = {{"xi_angle", std::arg(q.xi)}, {"r", q.r}, {"R", q.R}};
}

void from_json(const nlohmann::json& j, QuadrilateralSpec& q) {
    try {
        q.xi = std::polar(1.0, j.at("xi_angle").get<double>());
        q.r = j.at("r").get<double>();
        q.R = j.at("R").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError(std::string("QuadrilateralSpec JSON: ") + e.what());
    }
    q.validate();
}

double lemma_qs_lower_bound(const growth::GrowthFunction& rho, double r, double R) {
    if (!(r > 0.0 && r < R && R < 2.0)) throw PreconditionError("lemma_qs_lower_bound: need 0 < r < R < 2");
    return growth::boundary_divergence_integral(rho, r, R).value;
}

namespace {

// Energy of the family joining the arcs (primal) or the circular sides.
double quad_energy(const std::function<cplx(cplx)>& mu, const QuadrilateralSpec& Q, int n_v, bool conjugate) {
    const double s0 = std::log(Q.r), s1 = std::log(Q.R);
    const double theta_max = std::acos(Q.r / 2.0);
    const int n_s = std::max(4, static_cast<int>(std::ceil((s1 - s0) * n_v / (2.0 * theta_max))));
    fem::RectGrid grid;
    grid.x = fem::linspace(s0, s1, n_s);
    grid.y = fem::linspace(-1.0, 1.0, n_v);
    auto coef = [&](double s, double v) {
        const double t = std::exp(s);
        const double th = std::acos(t / 2.0);
        const double dth = -t / (2.0 * std::sqrt(1.0 - t * t / 4.0));
        const cplx e = std::exp(cplx(s, v * th));
        const cplx dz_ds = -Q.xi * e * cplx(1.0, v * dth);
        const cplx dz_dv = -Q.xi * e * cplx(0.0, th);
        if (!mu) return fem::pullback(dz_ds, dz_dv);
        const cplx z = Q.xi * (1.0 - e);
        return fem::pullback(dz_ds, dz_dv, fem::dilatation_tensor(mu(z)));
    };
    const int nx = n_s + 1, ny = n_v + 1;
    auto dir = [&](int i, int j) -> std::optional<double> {
        if (conjugate) {
            if (i == 0) return 0.0;
            if (i == nx - 1) return 1.0;
        } else {
            if (j == 0) return 0.0;
            if (j == ny - 1) return 1.0;
        }
        return std::nullopt;
    };
    return fem::min_energy(grid, coef, dir).energy;
}

}  // namespace

ModulusResult quad_modulus_detail(const std::function<cplx(cplx)>& mu, const QuadrilateralSpec& Q,
                                  const ModulusOptions& opt) {
    Q.validate();
    if (opt.n_v_start < 2 || opt.n_v_max < opt.n_v_start) throw PreconditionError("quad_modulus: bad options");
    ModulusResult res;
    for (int n = opt.n_v_start; n <= opt.n_v_max; n *= 2) {
        res.n_v.push_back(n);
        res.levels.push_back(quad_energy(mu, Q, n, false));
        const std::size_t k = res.levels.size();
        if (k >= 2 && std::abs(res.levels[k - 1] - res.levels[k - 2]) < opt.rel_tol * res.levels[k - 1]) break;
    }
    const std::size_t k = res.levels.size();
    res.value = res.levels.back();
    res.observed_order = std::nan("");
    if (k >= 3) {
        const double d1 = res.levels[k - 3] - res.levels[k - 2], d2 = res.levels[k - 2] - res.levels[k - 1];
        if (d1 / d2 > 0.0) res.observed_order = std::log2(d1 / d2);
    }
    res.conjugate = quad_energy(mu, Q, res.n_v.back(), true);
    return res;
}

ModulusResult quad_modulus_detail(const QuadrilateralSpec& Q, const ModulusOptions& opt) {
    return quad_modulus_detail(std::function<cplx(cplx)>{}, Q, opt);
}

double quad_modulus(const QuadrilateralSpec& Q, const ModulusOptions& opt) {
    return quad_modulus_detail(Q, opt).value;
}

double quad_modulus(const std::function<cplx(cplx)>& mu, const QuadrilateralSpec& Q, const ModulusOptions& opt) {
    return quad_modulus_detail(mu, Q, opt).value;
}

ModulusResult quad_modulus_detail(const DiskGridMap& f, const QuadrilateralSpec& Q, const ModulusOptions& opt) {
    const BeltramiField field = mapcore::dilatation_field(f);
    DiskGridMap sampler(field.grid);
    sampler.values = field.values;
    for (int j = 0; j < field.grid.n_theta; ++j) sampler.center += field.at(0, j) / double(field.grid.n_theta);
    auto mu = [&](cplx z) {
        const cplx m = sampler.sample(z);
        const double a = std::abs(m);
        constexpr double cap = 1.0 - 1e-9;
        return a > cap ? m * (cap / a) : m;
    };
    return quad_modulus_detail(mu, Q, opt);
}

double quad_modulus(const DiskGridMap& f, const QuadrilateralSpec& Q, const ModulusOptions& opt) {
    return quad_modulus_detail(f, Q, opt).value;
}

}  // namespace lqc::modulus
