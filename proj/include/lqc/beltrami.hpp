#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lqc/grid.hpp"
#include "lqc/growth.hpp"
#include "lqc/holo.hpp"

namespace lqc::beltrami {

struct SolverConfig {
    int fft_size = 512;                 // Cartesian FFT size for the plane solver
    double neumann_tol = 1e-10;
    int neumann_max_iter = 2000;
    std::vector<int> exhaustion_levels = {8, 16, 32, 64, 128};
    double picard_tol = 1e-6;
    int picard_max_iter = 40;

    /// Throws PreconditionError on invalid values.
    void validate() const;
};

void to_json(nlohmann::json& j, const SolverConfig& c);
/// Missing fields keep their defaults; wrong types or values throw PreconditionError.
SolverConfig solver_config_from_json(const nlohmann::json& j);

struct StageReport {
    std::string label;
    int iterations = 0;
    std::vector<double> residuals;  // sup |f_zbar - mu f_z| after each Neumann step
    bool converged = false;
};

struct SolveReport {
    std::vector<StageReport> stages;
    std::array<cplx, 3> pinned_images{};  // images of 1, -1, i
    cplx image_of_origin{0.0, 0.0};
    double circle_deviation = 0.0;       // sup | |f| - 1 | on the boundary samples
    /// Exhaustion: sup differences between consecutive stages on the disks
    /// |z| < difference_radii[j], indexed [j][stage pair]; the last pair
    /// compares the finest level with the untruncated stage.
    std::vector<double> difference_radii;
    std::vector<std::vector<double>> stage_differences;
    /// Picard: sup |f^(n+1) - f^(n)| on Delta_0.9 per outer iteration.
    std::vector<double> picard_differences;
    /// Teichmuller-type solve: sup over |z| <= 0.9 of |mu_f - mu_eq(f)| with
    /// mu_f re-extracted by finite differences, excluding two cells around
    /// zeros of phi0 and nodes with 1 - |f| < 1e-6.
    std::optional<double> equation_residual;
    bool converged = false;
    std::string message;

    int total_iterations() const;
};

void to_json(nlohmann::json& j, const SolveReport& r);

/// Residual list check: nonincreasing after the first step, with a relative
/// slack at the floating-point floor.
bool residuals_nonincreasing(const std::vector<double>& res, double floor = 1e-13);

// ---- plane solver on a Cartesian patch -------------------------------------

/// Square Cartesian patch [-half_width, half_width]^2 with n nodes per side,
/// node (row y, column x) at index y * n + x.
struct PlanePatch {
    int n = 0;
    double half_width = 1.0;
    std::vector<cplx> values;

    double spacing() const { return 2.0 * half_width / (n - 1); }
    cplx node(int row, int col) const {
        return {-half_width + col * spacing(), -half_width + row * spacing()};
    }
    /// Bicubic Lagrange interpolation; throws DomainError outside the patch.
    cplx sample(cplx z) const;
};

struct BeurlingResult {
    std::vector<cplx> values;
    bool support_warning = false;  // energy in the outer 10% exceeded 1e-8 of the total
    double boundary_energy_fraction = 0.0;
};

/// Fourier multiplier conj(k)/k (k = kx + i ky, zero mode mapped to 0) on
/// the n-by-n field embedded with zero padding in an fft_size-by-fft_size
/// periodic grid; the result is cropped back to n-by-n.
BeurlingResult beurling_transform(const std::vector<cplx>& field, int n, int fft_size);

struct CompactSolution {
    DiskGridMap map;     // f on the polar grid of mu
    PlanePatch patch;    // f on the Cartesian patch [-1, 1]^2
    SolveReport report;
    double rim_deviation = 0.0;  // max |f(z) - z| on the patch boundary
};

/// Principal solution f = z + C h, h = mu (S h + 1), for mu supported in the
/// disk. The patch has fft_size/2 nodes per side; transforms use 2x padding.
CompactSolution solve_compact(const BeltramiField& mu, const SolverConfig& cfg = {});

// ---- disk solver -------------------------------------------------------------

/// Precomputed radial integration weights for the disk operators of a grid.
class DiskOperator;

struct DiskSolution {
    DiskGridMap map;
    SolveReport report;
    std::vector<cplx> omega;  // converged density, usable as a warm start
};

/// Normalized solution of f_zbar = mu f_z mapping the disk onto itself with
/// 1, -1, i fixed. Writes f = P exp(psi), P = z + mu0 zbar (mu0 the dilatation
/// at the origin), psi = psi0 + T omega with psi0 holomorphic and T the
/// solution operator of d/dzbar with Re T omega = 0 on the circle; so |f| = 1
/// there by construction (this is the symmetric extension across the circle).
/// The density omega solves omega = a + mu Pi omega by Neumann iteration.
DiskSolution solve_disk(const BeltramiField& mu, const SolverConfig& cfg = {},
                        const std::vector<cplx>* warm_start = nullptr);

/// Smooth cutoff of the exhaustion: 1 on |z| <= 1 - 1/n, 0 on |z| >= 1 - 1/n^2,
/// a C^1 smoothstep in log(1 - |z|) / log(1/n) between.
double exhaustion_cutoff(double r, int n);

DiskSolution solve_exhaustion(const BeltramiField& mu, const growth::GrowthFunction& rho,
                              const SolverConfig& cfg = {});

/// Teichmuller-type dilatation at a node:
/// ((rho(|w|) K0 - 1) / (rho(|w|) K0 + 1)) conj(phi0(z)) / |phi0(z)|, zero where phi0 vanishes.
cplx teichmuller_mu(const HoloDensity& phi0, double K0, const growth::GrowthFunction& rho,
                    cplx z, cplx w);

/// Zeros of phi0 inside the closed disk (companion-matrix eigenvalues).
std::vector<cplx> zeros_in_disk(const HoloDensity& phi0);

/// Picard iteration on the Teichmuller-type equation: f^(0) = identity,
/// mu^(n) = teichmuller_mu(.., z, f^(n)(z)), f^(n+1) = solve_exhaustion(mu^(n)).
/// Stops when sup |f^(n+1) - f^(n)| < picard_tol on |z| <= 0.9, or at once
/// when mu^(n+1) equals mu^(n) (constant rho). For constant rho the field is
/// uniformly bounded away from 1 and the stage is a single solve_disk call.
DiskSolution solve_teichmuller_type(const HoloDensity& phi0, double K0,
                                    const growth::GrowthFunction& rho, const PolarGrid& grid,
                                    const SolverConfig& cfg = {});

}  // namespace lqc::beltrami
