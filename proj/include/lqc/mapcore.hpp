#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lqc/grid.hpp"
#include "lqc/growth.hpp"

namespace lqc::mapcore {

/// Radial stretch f_a(r e^{i theta}) = [1 - (1 - r)^a] e^{i theta}.
struct RadialMapSpec {
    double a = 1.0;
    explicit RadialMapSpec(double a_);
};

cplx radial_eval(const RadialMapSpec& spec, cplx z);
/// Exact distortion of f_a at radius r: max(q, 1/q) with q the ratio of
/// angular stretch (1-(1-r)^a)/r to radial stretch a (1-r)^{a-1}.
double radial_distortion(const RadialMapSpec& spec, double r);
/// Exact complex dilatation of f_a at z.
cplx radial_dilatation(const RadialMapSpec& spec, cplx z);

/// Spiral r e^{i(theta + log(1/(1-r)))}; DomainError for |z| >= 1.
cplx spiral_eval(cplx z);

/// Power map z |z|^{alpha - 1} and its dilatation ((alpha-1)/(alpha+1)) z / conj(z).
cplx power_eval(double alpha, cplx z);
cplx power_dilatation(double alpha, cplx z);

/// Wirtinger derivatives of a grid map.
struct Derivatives {
    PolarGrid grid;
    std::vector<cplx> fz;
    std::vector<cplx> fzbar;
    std::vector<std::uint8_t> flags;
};

/// Radial derivative by central differences (through the origin for ring 0,
/// with the rim or a one-sided stencil on the last ring, which is flagged);
/// angular derivative spectrally per ring.
Derivatives derivatives(const DiskGridMap& map);

/// mu = f_zbar / f_z. Nodes with non-positive Jacobian or |f_z| < 1e-12 get
/// value 0 and the kDegenerate flag.
BeltramiField dilatation_field(const DiskGridMap& map);
BeltramiField dilatation_field(const Derivatives& d);

/// Node positions of degenerate flags.
std::vector<cplx> degenerate_nodes(const BeltramiField& mu);

/// D = (1 + |mu|) / (1 - |mu|).
RealField distortion_field(const BeltramiField& mu);
RealField distortion_field(const DiskGridMap& map);
/// Exact distortion of f_a on the grid.
RealField radial_distortion_field(const RadialMapSpec& spec, const PolarGrid& g);

/// Dilatation of a grid map paired with the sample points where it lives.
struct TransferredField {
    std::vector<cplx> points;  // image points f(z_ij), radius-major like the source grid
    BeltramiField field;       // values at those points, indexed like the source grid
};

/// tau_hat = conj(f_z) / f_z per node (0 where f_z vanishes).
std::vector<cplx> tau_hat(const Derivatives& d);

/// mu_{f^{-1}}(f(z)) = -mu_f(z) / tau_hat(z). Nodes with |f_z| < 1e-12 are
/// flagged degenerate.
TransferredField inverse_dilatation(const BeltramiField& mu_f, const DiskGridMap& map);
TransferredField inverse_dilatation(const BeltramiField& mu_f, const Derivatives& d,
                                    const DiskGridMap& map);

/// mu_{g o f}(z) from mu_g sampled at f(z) (indexed like f's grid):
///   tau_hat (mu_g - mu_{f^{-1}}) / (1 - conj(mu_{f^{-1}}) mu_g),
/// where mu_{f^{-1}} is inverse_dilatation(mu_f, f). Identical to
/// (mu_f + tau_hat mu_g) / (1 + conj(mu_f) tau_hat mu_g); the first form is
/// exactly zero when mu_g equals mu_{f^{-1}}. Denominators below 1e-12 are
/// flagged degenerate.
BeltramiField composition_dilatation(const BeltramiField& mu_g_at_image,
                                     const BeltramiField& mu_f, const DiskGridMap& f);

struct KRho {
    double value = 1.0;
    bool attained_on_outer_ring = false;
    cplx location{0.0, 0.0};
    int nodes_used = 0;
};

/// sup of D(z) / rho(|z|) over unflagged nodes with |z| <= domain_cut, never
/// below 1 (the value D(0)/rho(0) >= 1 at the origin, which is not a node).
KRho k_rho(const RealField& distortion, const growth::GrowthFunction& rho, double domain_cut);
KRho k_rho(const BeltramiField& mu, const growth::GrowthFunction& rho, double domain_cut);
KRho k_rho(const DiskGridMap& map, const growth::GrowthFunction& rho, double domain_cut);

/// K^rho of the inverse map through the transfer D_{f^{-1}}(f(z)) = D_f(z),
/// with rho evaluated at |f(z)|; nodes with |f(z)| > domain_cut are skipped.
KRho k_rho_inverse(const RealField& distortion_f, const DiskGridMap& f,
                   const growth::GrowthFunction& rho, double domain_cut);

struct Membership {
    std::optional<double> constant;  // least grid constant C when membership looks finite
    double grid_sup = 1.0;           // sup of D / rho over all nodes, reported either way
    std::vector<double> ring_ratio;  // per-ring sup of D / rho
    std::string message;
};

/// Non-membership is declared when the ring-wise sup of D/rho increases
/// monotonically through the outer 10% of rings by an overall factor > 2.
Membership membership_qc_rho(const RealField& distortion, const growth::GrowthFunction& rho);

struct DavidRow {
    double K;
    double measure;
    std::optional<double> bound;  // pi exp(-2K/C) when C is supplied
};

/// Area of {D > K} by polar-cell sums, for each K.
std::vector<DavidRow> david_measure_profile(const RealField& distortion,
                                            const std::vector<double>& K_grid,
                                            std::optional<double> C = std::nullopt);

}  // namespace lqc::mapcore
