#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lqc/mapcore.hpp"

using namespace lqc;
using namespace lqc::mapcore;
using growth::GrowthFunction;

namespace {

double sup_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, std::abs(a[k] - b[k]));
    return s;
}

// Max |mu_fd - mu_exact| over rings with lo <= r <= hi.
double mu_error(const BeltramiField& mu, const std::function<cplx(cplx)>& exact, double lo,
                double hi) {
    double e = 0.0;
    for (int i = 0; i < mu.grid.n_r; ++i) {
        const double r = mu.grid.radius(i);
        if (r < lo || r > hi) continue;
        for (int j = 0; j < mu.grid.n_theta; ++j)
            e = std::max(e, std::abs(mu.at(i, j) - exact(mu.grid.node(i, j))));
    }
    return e;
}

// Cartesian central-difference Wirtinger quotient of an analytic formula.
cplx cartesian_mu(const std::function<cplx(cplx)>& f, cplx z, double h = 1e-5) {
    const cplx fx = (f(z + h) - f(z - h)) / (2 * h);
    const cplx fy = (f(z + cplx(0, h)) - f(z - cplx(0, h))) / (2 * h);
    return (0.5 * (fx + kI * fy)) / (0.5 * (fx - kI * fy));
}

}  // namespace

TEST_CASE("radial group and inverse laws") {
    const PolarGrid g{256, 512, 1.0};
    for (auto [a, b] : {std::pair{2.0, 3.0}, {0.5, 2.0}, {1.5, 1.5}}) {
        const RadialMapSpec fa(a), fb(b), fab(a * b);
        double e = 0.0;
        for (int i = 0; i < g.n_r; ++i)
            for (int j = 0; j < g.n_theta; ++j) {
                const cplx z = g.node(i, j);
                e = std::max(e, std::abs(radial_eval(fa, radial_eval(fb, z)) - radial_eval(fab, z)));
            }
        CHECK(e < 1e-12);
    }
    CHECK(std::abs(radial_eval(RadialMapSpec(2), radial_eval(RadialMapSpec(3), 0.5)) -
                   (1 - std::pow(0.5, 6))) < 1e-15);
    for (double a : {2.0, 3.0, 1.5, 0.5}) {
        double e = 0.0;
        for (int i = 0; i < g.n_r; ++i)
            for (int j = 0; j < g.n_theta; j += 7) {
                const cplx z = g.node(i, j);
                e = std::max(e, std::abs(radial_eval(RadialMapSpec(a),
                                                     radial_eval(RadialMapSpec(1 / a), z)) - z));
            }
        CHECK(e < 1e-12);
    }
    CHECK(radial_eval(RadialMapSpec(1), cplx(0.3, 0.4)) == cplx(0.3, 0.4));
    CHECK(std::abs(radial_eval(RadialMapSpec(3), std::polar(1.0, 0.7)) - std::polar(1.0, 0.7)) <
          1e-15);
    CHECK_THROWS_AS(RadialMapSpec(0.0), DomainError);
}

TEST_CASE("spiral map") {
    CHECK(spiral_eval(0.0) == cplx(0.0));
    CHECK(std::abs(std::abs(spiral_eval(std::polar(0.7, 1.0))) - 0.7) < 1e-15);
    const double r = 1 - std::exp(-2 * kPi);
    CHECK(std::abs(spiral_eval(r) - cplx(r, 0)) < 1e-12);
    CHECK_THROWS_AS(spiral_eval(1.0), DomainError);
}

TEST_CASE("closed-form dilatations agree with Cartesian differences") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.05, 0.9), ang(0, kTwoPi);
    for (int k = 0; k < 20; ++k) {
        const cplx z = std::polar(u(gen), ang(gen));
        CHECK(std::abs(power_dilatation(1.5, z) -
                       cartesian_mu([](cplx w) { return power_eval(1.5, w); }, z)) < 1e-8);
        const RadialMapSpec s(1.5);
        CHECK(std::abs(radial_dilatation(s, z) -
                       cartesian_mu([&](cplx w) { return radial_eval(s, w); }, z)) < 1e-8);
        const double D = radial_distortion(s, std::abs(z));
        const double m = std::abs(radial_dilatation(s, z));
        CHECK(D == doctest::Approx((1 + m) / (1 - m)).epsilon(1e-10));
    }
    const double A = (1 - std::pow(0.5, 1.5)) / (1.5 * 0.5 * std::pow(0.5, 0.5));
    CHECK(radial_distortion(RadialMapSpec(1.5), 0.5) ==
          doctest::Approx(std::max(A, 1 / A)).epsilon(1e-14));
}

TEST_CASE("dilatation of identity, affine and rotated maps") {
    const PolarGrid g{64, 128, 1.0};
    const auto id = DiskGridMap::from_function(g, [](cplx z) { return z; }, "identity");
    const auto mu0 = dilatation_field(id);
    CHECK(mu0.ess_sup() < 1e-10);
    const auto D0 = distortion_field(mu0);
    for (double v : D0.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));

    const auto aff = DiskGridMap::from_function(
        g, [](cplx z) { return (z + 0.3 * std::conj(z)) / 1.3; }, "affine");
    const auto mua = dilatation_field(aff);
    CHECK(mu_error(mua, [](cplx) { return cplx(0.3); }, 0.0, 1.0) < 1e-10);
    CHECK(degenerate_nodes(mua).empty());

    const auto mu5 = BeltramiField::from_function(g, [](cplx) { return cplx(0.5); });
    for (double v : distortion_field(mu5).values) CHECK(v == doctest::Approx(3.0));
}

TEST_CASE("degenerate Jacobians are flagged, not filled in") {
    const PolarGrid g{16, 32, 1.0};
    const auto flip = DiskGridMap::from_function(g, [](cplx z) { return std::conj(z); }, "flip");
    const auto mu = dilatation_field(flip);
    CHECK(degenerate_nodes(mu).size() == g.size());
    CHECK(mu.ess_sup() == 0.0);
}

TEST_CASE("power map dilatation converges at second order on the annulus") {
    const double alpha = 1.5;
    std::vector<double> errs;
    for (int n : {64, 128, 256}) {
        const PolarGrid g{n, 256, 1.0};
        const auto m = DiskGridMap::from_function(
            g, [&](cplx z) { return power_eval(alpha, z); }, "power");
        errs.push_back(mu_error(dilatation_field(m),
                                [&](cplx z) { return power_dilatation(alpha, z); }, 0.1, 0.9));
    }
    const double p1 = std::log2(errs[0] / errs[1]), p2 = std::log2(errs[1] / errs[2]);
    CAPTURE(errs[0]);
    CAPTURE(errs[2]);
    CHECK(p1 >= 1.8);
    CHECK(p2 >= 1.8);
}

TEST_CASE("inverse dilatation of the power map") {
    const double alpha = 1.5;
    // Oracle: dilatation_field of the sampled inverse map, read at f(z);
    // the discrepancy must shrink at second order.
    std::vector<double> errs;
    for (int n : {64, 128}) {
        const PolarGrid g{n, 256, 1.0};
        const auto f = DiskGridMap::from_function(
            g, [&](cplx z) { return power_eval(alpha, z); }, "power");
        const auto mu = dilatation_field(f);
        const auto inv = inverse_dilatation(mu, f);
        const auto finv = DiskGridMap::from_function(
            g, [&](cplx z) { return power_eval(1 / alpha, z); }, "inverse");
        DiskGridMap mu_inv_as_map(g);
        mu_inv_as_map.values = dilatation_field(finv).values;
        double e = 0.0, e_exact = 0.0;
        for (int i = 0; i < g.n_r; ++i) {
            if (g.radius(i) < 0.2 || g.radius(i) > 0.9) continue;
            for (int j = 0; j < g.n_theta; ++j) {
                const std::size_t k = g.index(i, j);
                CHECK(std::abs(std::abs(inv.field.values[k]) - std::abs(mu.values[k])) < 1e-15);
                e = std::max(e, std::abs(inv.field.values[k] - mu_inv_as_map.sample(inv.points[k])));
                e_exact = std::max(e_exact, std::abs(inv.field.values[k] -
                                                     power_dilatation(1 / alpha, inv.points[k])));
            }
        }
        CHECK(e_exact < 5e-4);
        errs.push_back(e);
    }
    CHECK(errs[1] < 1e-3);
    CHECK(errs[0] / errs[1] > 3.0);

    const PolarGrid g{64, 128, 1.0};
    const auto id = DiskGridMap::from_function(g, [](cplx z) { return z; }, "identity");
    CHECK(inverse_dilatation(dilatation_field(id), id).field.ess_sup() < 1e-10);
}

TEST_CASE("composition dilatation") {
    const PolarGrid g{128, 256, 1.0};
    const double a1 = 1.5, a2 = 0.8;
    const auto f = DiskGridMap::from_function(g, [&](cplx z) { return power_eval(a1, z); }, "f");
    const auto mu_f = dilatation_field(f);

    // mu_g = mu_{f^{-1}} gives a conformal composite, exactly.
    const auto inv = inverse_dilatation(mu_f, f);
    CHECK(composition_dilatation(inv.field, mu_f, f).ess_sup() < 1e-10);
    CHECK(composition_dilatation(inv.field, mu_f, f).ess_sup() == 0.0);

    // Conformal f: |mu_{g o f}| = |mu_g o f|.
    const auto rot = DiskGridMap::from_function(
        g, [](cplx z) { return std::polar(1.0, 0.4) * z; }, "rotation");
    const auto mu_g_rot = BeltramiField::from_function(
        g, [&](cplx z) { return power_dilatation(a2, std::polar(1.0, 0.4) * z); });
    const auto comp_rot = composition_dilatation(mu_g_rot, dilatation_field(rot), rot);
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(std::abs(std::abs(comp_rot.values[k]) - std::abs(mu_g_rot.values[k])) < 1e-9);

    // Two power maps: g o f = power(a1 a2); oracle is the composite sampled directly.
    BeltramiField mu_g_at_image(g);
    for (std::size_t k = 0; k < g.size(); ++k)
        mu_g_at_image.values[k] = power_dilatation(a2, f.values[k]);
    const auto comp = composition_dilatation(mu_g_at_image, mu_f, f);
    const auto direct = dilatation_field(DiskGridMap::from_function(
        g, [&](cplx z) { return power_eval(a1 * a2, z); }, "composite"));
    CHECK(mu_error(comp, [&](cplx z) {
        const int i = g.rings_within(std::abs(z)) - 1;
        const int j = static_cast<int>(std::lround(std::arg(z) / g.dtheta() + g.n_theta)) %
                      g.n_theta;
        return direct.at(i, j);
    }, 0.1, 0.9) < 1e-4);
}

TEST_CASE("k_rho examples and rotation invariance") {
    const PolarGrid g{64, 128, 1.0};
    const auto rot = DiskGridMap::from_function(g, [](cplx z) { return kI * z; }, "rotation");
    CHECK(k_rho(rot, GrowthFunction::log_normalized(), 0.99).value ==
          doctest::Approx(1.0).epsilon(1e-9));
    const auto aff = DiskGridMap::from_function(
        g, [](cplx z) { return (z + 0.5 * std::conj(z)) / 1.5; }, "affine");
    CHECK(k_rho(aff, GrowthFunction::constant(), 1.0).value == doctest::Approx(3.0).epsilon(1e-9));

    const RadialMapSpec s(1.5);
    const auto exactD = radial_distortion_field(s, g);
    CHECK(k_rho(exactD, GrowthFunction::radial_family(1.5), 1.0).value ==
          doctest::Approx(1.0).epsilon(1e-12));
    const auto fdD = distortion_field(
        DiskGridMap::from_function(g, [&](cplx z) { return radial_eval(s, z); }, "radial"));
    CHECK(k_rho(fdD, GrowthFunction::radial_family(1.5), 0.9).value ==
          doctest::Approx(1.0).epsilon(2e-3));

    auto f = [](cplx z) { return z + 0.2 * z * std::conj(z) + 0.1 * z * z; };
    const auto base = DiskGridMap::from_function(g, f, "f");
    const auto post = DiskGridMap::from_function(
        g, [&](cplx z) { return std::polar(1.0, 1.1) * f(z); }, "post");
    const auto pre = DiskGridMap::from_function(
        g, [&](cplx z) { return f(std::polar(1.0, 5 * g.dtheta()) * z); }, "pre");
    const auto rho = GrowthFunction::log_normalized();
    const double k0 = k_rho(base, rho, 0.9).value;
    CHECK(std::abs(k_rho(post, rho, 0.9).value - k0) < 1e-12);
    CHECK(std::abs(k_rho(pre, rho, 0.9).value - k0) < 1e-12);
}

TEST_CASE("membership") {
    const PolarGrid g{256, 64, 1.0};
    const auto aff = DiskGridMap::from_function(
        g, [](cplx z) { return (z + 0.5 * std::conj(z)) / 1.5; }, "affine");
    const auto m = membership_qc_rho(distortion_field(aff), GrowthFunction::constant());
    REQUIRE(m.constant);
    CHECK(*m.constant == doctest::Approx(3.0).epsilon(1e-9));

    const auto m3 = membership_qc_rho(radial_distortion_field(RadialMapSpec(3), g),
                                      GrowthFunction::constant());
    CHECK_FALSE(m3.constant);
    CHECK_FALSE(m3.message.empty());

    const auto m15 = membership_qc_rho(radial_distortion_field(RadialMapSpec(1.5), g),
                                       GrowthFunction::radial_family(1.5));
    REQUIRE(m15.constant);
    CHECK(*m15.constant == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("David measure profile") {
    const PolarGrid g{128, 64, 1.0};
    const auto id = DiskGridMap::from_function(g, [](cplx z) { return z; }, "identity");
    CHECK(david_measure_profile(distortion_field(id), {2.0})[0].measure == 0.0);

    const auto D = radial_distortion_field(RadialMapSpec(1.5), g);
    const auto rows = david_measure_profile(D, {1.5, 2, 4, 8, 16}, 2.0);
    for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].measure <= rows[k - 1].measure);
    REQUIRE(rows[0].bound);
    CHECK(*rows[1].bound == doctest::Approx(kPi * std::exp(-2.0)));
    // Oracle: D > K exactly on r > r_K with r_K found by bisection on the
    // closed form; the cell sum must agree within one ring of area.
    for (const auto& row : rows) {
        double lo = 0.0, hi = 1.0 - 1e-15;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (radial_distortion(RadialMapSpec(1.5), mid) > row.K ? hi : lo) = mid;
        }
        const double exact = kPi * (1 - hi * hi);
        CHECK(std::abs(row.measure - exact) <= kTwoPi * g.dr() + 1e-12);
    }
    CHECK_THROWS_AS(david_measure_profile(D, {2, 1}), PreconditionError);
}

TEST_CASE("grid io roundtrip and interpolation") {
    const PolarGrid g{32, 64, 1.0};
    auto f = [](cplx z) { return z + 0.2 * z * std::conj(z) + 0.1 * z * z; };
    const auto m = DiskGridMap::from_function(g, f, "f");
    std::stringstream ss;
    write_grid(ss, m);
    const auto back = read_grid(ss);
    CHECK(back.grid == g);
    CHECK(sup_diff(back.values, m.values) == 0.0);

    auto mu = BeltramiField::from_function(g, [](cplx z) { return 0.3 * z; });
    std::stringstream sm;
    write_mu(sm, mu);
    CHECK(sup_diff(read_mu(sm).values, mu.values) == 0.0);

    std::stringstream bad("LQCGRID v2 3 4 1\n");
    CHECK_THROWS_AS(read_grid(bad), PreconditionError);
    std::stringstream shortfile("LQCMU v1 3 4 1\n0 0\n");
    CHECK_THROWS_AS(read_mu(shortfile), PreconditionError);
    CHECK_THROWS_AS((PolarGrid{8, 30, 1.0}.validate()), PreconditionError);

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0), ang(0, kTwoPi);
    const PolarGrid fine{128, 256, 1.0};
    const auto mf = DiskGridMap::from_function(fine, f, "f");
    for (int k = 0; k < 200; ++k) {
        const cplx z = std::polar(std::sqrt(u(gen)), ang(gen));
        CHECK(std::abs(mf.sample(z) - f(z)) < 1e-6);
    }
    CHECK(mf.sample(0.0) == f(0.0));
    CHECK(std::abs(mf.sample(1.0) - f(1.0)) < 1e-14);
}
