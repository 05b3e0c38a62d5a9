#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lqc/beltrami.hpp"
#include "lqc/mapcore.hpp"
#include "lqc/teich.hpp"

using namespace lqc;
using namespace lqc::teich;

namespace {

const PolarGrid kGrid{128, 256, 1.0};

DiskGridMap identity_map() { return DiskGridMap::from_function(kGrid, [](cplx z) { return z; }, "identity"); }

DiskGridMap radial_map(double a) {
    const mapcore::RadialMapSpec spec(a);
    return DiskGridMap::from_function(kGrid, [spec](cplx z) { return mapcore::radial_eval(spec, z); }, "radial");
}

// Fixes 1, -1, i on the circle but moves other boundary points.
DiskGridMap wiggle_map() {
    return DiskGridMap::from_function(
        kGrid, [](cplx z) { return std::polar(std::abs(z), std::arg(z) + 0.2 * std::abs(z) * std::sin(2 * std::arg(z))); },
        "wiggle");
}

const DiskGridMap& teich_map() {
    static const DiskGridMap f = [] {
        beltrami::SolverConfig cfg;
        cfg.fft_size = 256;
        return beltrami::solve_teichmuller_type(HoloDensity::constant(), 2.0, growth::GrowthFunction::constant(), kGrid,
                                                cfg)
            .map;
    }();
    return f;
}

TwistCombination single(double amplitude, double r1 = 0.3, double r2 = 0.7) {
    return {{BoundaryFixingTwist{r1, r2, 0.0}}, {amplitude}};
}

}  // namespace

TEST_CASE("twist profiles") {
    for (const auto& t : default_basis()) {
        double shear = 0.0;
        for (int k = 0; k <= 4000; ++k) {
            const double r = t.r1 + (t.r2 - t.r1) * k / 4000.0;
            shear = std::max(shear, std::abs(r * t.profile_slope(r)));
        }
        CHECK(shear == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(t.profile(t.r1) == 0.0);
        CHECK(t.profile(t.r2) == 0.0);
        CHECK(t.profile_slope(t.r1) == 0.0);
        CHECK(t.profile(0.5 * (t.r1 + t.r2)) > 0.0);
        // C1 across the midpoint knot
        const double m = 0.5 * (t.r1 + t.r2), h = 1e-7;
        CHECK(std::abs(t.profile_slope(m - h) - t.profile_slope(m + h)) < 1e-4);
    }
    CHECK_THROWS_AS((BoundaryFixingTwist{0.5, 0.4, 0.0}.validate()), PreconditionError);
    CHECK_THROWS_AS((BoundaryFixingTwist{0.3, 0.7, 1.0}.validate()), PreconditionError);
    CHECK(single(0.99).is_diffeomorphism(kGrid));
    CHECK_FALSE(single(1.2).is_diffeomorphism(kGrid));
    CHECK_THROWS_AS(twist_map(kGrid, single(1.2)), PreconditionError);

    // Analytic dilatation against finite differences of the sampled twist.
    const auto w = twist_map(kGrid, single(0.3));
    const auto fd = mapcore::dilatation_field(w);
    double err = 0.0;
    for (int i = 0; i < kGrid.rings_within(0.9); ++i)
        for (int j = 0; j < kGrid.n_theta; ++j) err = std::max(err, std::abs(fd.at(i, j) - (*w.mu)[kGrid.index(i, j)]));
    CHECK(err < 1e-2);
    const auto tw = single(0.3);
    const double x = tw.shear(0.4);
    CHECK(x != 0.0);
    CHECK(std::abs(tw.dilatation(cplx(0.0, 0.4)) + cplx(0.0, x / 2) / cplx(1.0, x / 2)) < 1e-15);

    const nlohmann::json j = BoundaryFixingTwist{0.2, 0.4, 0.1};
    CHECK(j.get<BoundaryFixingTwist>().r2 == 0.4);
    CHECK_THROWS_AS((nlohmann::json{{"r1", 0.2}}.get<BoundaryFixingTwist>()), PreconditionError);
}

TEST_CASE("normalize_map") {
    const auto rot = DiskGridMap::from_function(kGrid, [](cplx z) { return kI * z; }, "rotation");
    const auto n = normalize_map(rot);
    double err = 0.0;
    for (int i = 0; i < kGrid.n_r; ++i)
        for (int j = 0; j < kGrid.n_theta; ++j) err = std::max(err, std::abs(n.at(i, j) - kGrid.node(i, j)));
    CHECK(err < 1e-12);

    const auto& f = teich_map();
    const auto same = normalize_map(f);
    err = 0.0;
    for (std::size_t k = 0; k < f.values.size(); ++k) err = std::max(err, std::abs(same.values[k] - f.values[k]));
    CHECK(err < 1e-10);

    const Mobius M = Mobius::disk_automorphism(cplx(0.2, -0.1), 0.4);
    DiskGridMap moved = f;
    for (auto& v : moved.values) v = M(v);
    for (auto& v : *moved.rim) v = M(v);
    moved.center = M(f.center);
    const auto back = normalize_map(moved);
    REQUIRE(back.mu);
    CHECK(*back.mu == *f.mu);
    err = 0.0;
    for (std::size_t k = 0; k < f.values.size(); ++k) err = std::max(err, std::abs(back.values[k] - f.values[k]));
    CHECK(err < 1e-10);

    // Without a stored field the finite-difference field of the input is kept.
    const auto wn = normalize_map(DiskGridMap::from_function(kGrid, [&](cplx z) { return M(z); }, "mobius"));
    REQUIRE(wn.mu);
    for (std::size_t k = 0; k < wn.values.size(); ++k) CHECK(std::abs(wn.values[k] - kGrid.node(k / 256, k % 256)) < 1e-10);
}

TEST_CASE("Teichmuller equivalence") {
    const auto id = identity_map();
    const auto f15 = radial_map(1.5);
    const auto wig = wiggle_map();
    const auto mob = DiskGridMap::from_function(kGrid, [](cplx z) { return (z - 0.3) / (1.0 - 0.3 * z); }, "mobius");

    CHECK(equivalent(f15, id));
    CHECK(equivalent(id, id));
    CHECK_FALSE(equivalent(id, wig));
    CHECK_FALSE(equivalent(wig, id));
    // A disk automorphism is its own normalizing correction's inverse, so
    // after normalization its trace is the identity.
    CHECK(equivalent(id, mob));
    CHECK(equivalent(wig, compose_with_twist(wig, single(0.4))));
    CHECK(equivalent(f15, compose_with_twist(f15, single(-0.6, 0.2, 0.5))));

    // transitivity within 2 tol
    const auto w2 = compose_with_twist(wig, single(0.5, 0.1, 0.4));
    CHECK(equivalent(wig, w2));
    CHECK(equivalent(compose_with_twist(wig, single(0.4)), w2, 2e-3));

    auto cls = TeichClass::of(wig);
    cls.add(w2);
    CHECK(cls.representatives.size() == 2);
    CHECK_THROWS_AS(cls.add(id), PreconditionError);
    CHECK(std::abs(cls.trace(0.0) - 1.0) < 1e-6);
    CHECK(std::abs(cls.trace(kPi) + 1.0) < 1e-6);
    CHECK(std::abs(cls.trace(kPi / 2) - kI) < 1e-6);
}

TEST_CASE("Reich-Strebel ratio") {
    const auto id = identity_map();
    CHECK(reich_strebel_ratio(id, HoloDensity::constant()) == doctest::Approx(1.0).epsilon(1e-14));

    const auto w = twist_map(kGrid, single(0.3));
    const double r1 = reich_strebel_ratio(w, HoloDensity::constant());
    CHECK(r1 >= 1.0 - 1e-3);
    CHECK(reich_strebel_ratio(w, HoloDensity::constant(3.7)) == doctest::Approx(r1).epsilon(1e-13));

    const std::vector<HoloDensity> phis{HoloDensity({1.0}), HoloDensity({0.0, 1.0}), HoloDensity({0.0, 0.0, 1.0}),
                                        HoloDensity({1.0, 1.0})};
    const std::vector<TwistCombination> twists{single(0.3), single(-0.8, 0.1, 0.35),
                                               TwistCombination{default_basis(), {0.5, -0.7, 0.9}}};
    for (const auto& tw : twists)
        for (const auto& phi : phis) {
            const auto rs = reich_strebel(twist_map(kGrid, tw), phi);
            INFO("ratio " << rs.ratio);
            CHECK(rs.ratio >= 1.0 - 2e-3);
            CHECK_FALSE(rs.flagged);
        }

    const auto mob = DiskGridMap::from_function(kGrid, [](cplx z) { return (z - 0.3) / (1.0 - 0.3 * z); }, "mobius");
    CHECK_THROWS_AS(reich_strebel_ratio(mob, HoloDensity::constant()), PreconditionError);
}

TEST_CASE("extremal search on the Teichmuller-type map") {
    const auto c = growth::GrowthFunction::constant();
    const auto& f0 = teich_map();
    const auto basis = default_basis();

    const double k0 = mapcore::k_rho_inverse(mapcore::distortion_field(BeltramiField::from_function(
                                                 kGrid, [](cplx) { return cplx(1.0 / 3.0); })),
                                             f0, c, 0.9)
                          .value;
    CHECK(twist_objective(f0, c, basis, {0.0, 0.0, 0.0}) == k0);

    const SearchOptions opt;
    const auto res = extremal_search(f0, c, {basis[0], basis[1]}, CoefficientBox::symmetric(2, 0.5), opt);
    for (double x : res.argmin) CHECK(std::abs(x) <= opt.line_tolerance);
    CHECK(res.k_min == doctest::Approx(2.0).epsilon(0.05));
    CHECK(res.k_at_zero == k0);

    for (std::size_t k = 0; k < basis.size(); ++k)
        for (double a : {0.05, 0.1, 0.2, -0.05, -0.1, -0.2}) {
            std::vector<double> cc(basis.size(), 0.0);
            cc[k] = a;
            CHECK(twist_objective(f0, c, basis, cc) > k0);
        }

    // Post-composition by a rotation or a disk automorphism leaves D/rho alone
    // when rho is constant.
    const Mobius M = Mobius::disk_automorphism(cplx(0.25, 0.1), 1.1);
    DiskGridMap moved = f0;
    for (auto& v : moved.values) v = M(v);
    for (auto& v : *moved.rim) v = M(v);
    moved.center = M(f0.center);
    CHECK(twist_objective(normalize_map(moved), c, basis, {0.0, 0.0, 0.0}) ==
          twist_objective(f0, c, basis, {0.0, 0.0, 0.0}));

    const auto rho15 = growth::GrowthFunction::radial_family(1.5);
    const auto f15 = radial_map(1.5);
    DiskGridMap spun = f15;
    for (auto& v : spun.values) v *= kI;  // exact in floating point
    CHECK(twist_objective(spun, rho15, basis, {0.0, 0.0, 0.0}) == twist_objective(f15, rho15, basis, {0.0, 0.0, 0.0}));

    // Candidates outside the diffeomorphism range are scored +inf and logged.
    const auto wide = extremal_search(f0, c, {basis[1]}, CoefficientBox{{-0.2}, {3.0}}, opt);
    bool rejected = false;
    for (const auto& row : wide.log) rejected = rejected || !std::isfinite(row.objective);
    CHECK(rejected);
    CHECK(std::abs(wide.argmin[0]) <= opt.line_tolerance);

    std::ostringstream os;
    write_search_log(os, wide);
    CHECK(os.str().rfind("step,c1,objective\n0,0,", 0) == 0);
    CHECK(os.str().find(",inf\n") != std::string::npos);
}

TEST_CASE("extremal search on the identity and the pseudo-metric") {
    const auto c = growth::GrowthFunction::constant();
    const auto id = identity_map();
    const auto r = extremal_search(id, c, default_basis(), CoefficientBox::symmetric(3, 0.5));
    CHECK(r.k_min == doctest::Approx(1.0).epsilon(1e-12));
    for (double x : r.argmin) CHECK(x == 0.0);

    const auto cid = TeichClass::of(id);
    const auto ct = TeichClass::of(teich_map());
    const auto cw = TeichClass::of(wiggle_map());
    CHECK(pseudo_metric(cid, cid, c) == 0.0);
    const double d = pseudo_metric(cid, ct, c);
    CHECK(d == doctest::Approx(1.0).epsilon(0.05));
    CHECK(pseudo_metric(ct, cid, c) == d);
    const double a = pseudo_metric(cid, cw, c), b = pseudo_metric(cw, ct, c);
    CHECK(d <= a + b + 1e-15);
    CHECK_THROWS_AS(extremal_value(TeichClass{}, c), PreconditionError);

    CHECK_THROWS_AS(extremal_search(id, c, default_basis(), CoefficientBox::symmetric(2, 0.5)), PreconditionError);
    CHECK_THROWS_AS(extremal_search(id, c, default_basis(), CoefficientBox{{0.1, -1, -1}, {1, 1, 1}}),
                    PreconditionError);
    const nlohmann::json j = CoefficientBox::symmetric(2, 0.3);
    CHECK(j.get<CoefficientBox>().upper[1] == 0.3);
}
