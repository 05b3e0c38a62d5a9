#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lqc/common.hpp"

namespace lqc {

/// Polar lattice with cell-centred radii r_i = (i + 1/2) r_max / n_r and
/// angles theta_j = 2 pi j / n_theta. No node sits at r = 0 or r = 1.
struct PolarGrid {
    int n_r = 256;
    int n_theta = 512;
    double r_max = 1.0;

    double dr() const { return r_max / n_r; }
    double dtheta() const { return kTwoPi / n_theta; }
    double radius(int i) const { return (i + 0.5) * dr(); }
    double angle(int j) const { return j * dtheta(); }
    cplx node(int i, int j) const { return std::polar(radius(i), angle(j)); }
    std::size_t size() const { return static_cast<std::size_t>(n_r) * n_theta; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_theta + j; }
    /// Number of rings with radius <= r.
    int rings_within(double r) const;
    /// Area of the polar cell around ring i.
    double cell_area(int i) const { return radius(i) * dr() * dtheta(); }

    /// Throws PreconditionError unless n_r >= 3, n_theta >= 4 is divisible by
    /// 4 (so 1, i, -1 are grid angles) and 0 < r_max <= 1.
    void validate() const;
    bool operator==(const PolarGrid& o) const {
        return n_r == o.n_r && n_theta == o.n_theta && r_max == o.r_max;
    }
};

/// Per-node flags shared by the grid fields.
enum NodeFlag : std::uint8_t {
    kOneSided = 1,    // derivative used a one-sided radial stencil
    kDegenerate = 2,  // Jacobian non-positive or |f_z| tiny; value not computed
};

/// Discrete self-map of the closed disk sampled on a polar grid.
struct DiskGridMap {
    PolarGrid grid;
    std::vector<cplx> values;         // radius-major
    std::string source = "samples";
    cplx center{0.0, 0.0};            // f(0)
    std::optional<std::vector<cplx>> rim;  // f(e^{i theta_j}) when known
    /// Dilatation the map was built from, if any (solver input or closed form).
    std::optional<std::vector<cplx>> mu;

    DiskGridMap() = default;
    explicit DiskGridMap(const PolarGrid& g);

    static DiskGridMap from_function(const PolarGrid& g, const std::function<cplx(cplx)>& f,
                                     std::string source, bool with_rim = true);

    cplx& at(int i, int j) { return values[grid.index(i, j)]; }
    const cplx& at(int i, int j) const { return values[grid.index(i, j)]; }

    /// Interpolated f(z) for |z| <= 1: cubic Lagrange in angle and in radius,
    /// continuing through the origin (f(-r, theta) = f(r, theta + pi)) and
    /// using the rim when present. Outside r_max without a rim the outermost
    /// rings are extrapolated.
    cplx sample(cplx z) const;
};

/// Complex dilatation samples on a polar grid.
struct BeltramiField {
    PolarGrid grid;
    std::vector<cplx> values;
    std::vector<std::uint8_t> flags;  // NodeFlag bits, empty when none set

    BeltramiField() = default;
    explicit BeltramiField(const PolarGrid& g);
    static BeltramiField from_function(const PolarGrid& g, const std::function<cplx(cplx)>& mu);

    cplx& at(int i, int j) { return values[grid.index(i, j)]; }
    const cplx& at(int i, int j) const { return values[grid.index(i, j)]; }
    bool flagged(std::size_t k, std::uint8_t bit) const {
        return !flags.empty() && (flags[k] & bit);
    }
    void set_flag(std::size_t k, std::uint8_t bit);

    /// max |mu| over nodes not flagged degenerate.
    double ess_sup() const;
    /// max |mu| over nodes with radius <= r.
    double sup_within(double r) const;
    /// Throws PreconditionError when some unflagged |mu| >= 1 or is not finite.
    void validate() const;
};

/// Real scalar field on a polar grid (distortion, ratios).
struct RealField {
    PolarGrid grid;
    std::vector<double> values;
    std::vector<std::uint8_t> flags;
};

/// LQCGRID v1 / LQCMU v1 text formats.
void write_grid(std::ostream& os, const DiskGridMap& map);
DiskGridMap read_grid(std::istream& is);
void write_mu(std::ostream& os, const BeltramiField& mu);
BeltramiField read_mu(std::istream& is);

/// Periodic 4-point Lagrange interpolation of row (length n, spacing 2 pi/n)
/// at angle theta.
cplx interpolate_periodic(const cplx* row, int n, double theta);

}  // namespace lqc
