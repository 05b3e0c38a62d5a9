#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lqc/boundary.hpp"
#include "lqc/grid.hpp"
#include "lqc/growth.hpp"
#include "lqc/holo.hpp"
#include "lqc/mobius.hpp"

namespace lqc::teich {

/// Post-composes with the disk automorphism sending (h(1), h(-1), h(i)) to
/// (1, -1, i). The dilatation is carried over unchanged: the stored field when
/// present, otherwise the finite-difference field of the input.
DiskGridMap normalize_map(const DiskGridMap& map);
/// The correcting automorphism used by normalize_map.
Mobius normalizing_mobius(const boundary::BoundaryTrace& h);
/// Trace with the correcting automorphism applied.
boundary::BoundaryTrace normalized_trace(const boundary::BoundaryTrace& h);

/// Normalized traces agree within tol in sup norm.
bool equivalent(const DiskGridMap& f, const DiskGridMap& g, double tol = 1e-3);
bool equivalent(const boundary::BoundaryTrace& f, const boundary::BoundaryTrace& g, double tol = 1e-3);

struct TeichClass {
    boundary::BoundaryTrace trace;  // normalized
    std::vector<DiskGridMap> representatives;

    /// Class of a single map.
    static TeichClass of(const DiskGridMap& map);
    /// Adds a representative; PreconditionError when its normalized trace
    /// differs from the class trace by 1e-3 or more.
    void add(const DiskGridMap& map);
};

/// w(r e^{i theta}) = r e^{i (theta + beta(r))} with beta = amplitude * b on
/// [r1, r2]. The profile b is a C1 piecewise cubic bump vanishing to first
/// order at both ends, scaled so that sup |r b'(r)| = 1; w is therefore a
/// diffeomorphism exactly when |amplitude| < 1.
struct BoundaryFixingTwist {
    double r1 = 0.3;
    double r2 = 0.7;
    double amplitude = 0.0;

    void validate() const;  // 0 < r1 < r2 < 1 and |amplitude| < 1
    double profile(double r) const;        // b(r)
    double profile_slope(double r) const;  // b'(r)
    double beta(double r) const { return amplitude * profile(r); }
    /// r beta'(r).
    double shear(double r) const { return amplitude * r * profile_slope(r); }
};
void to_json(nlohmann::json& j, const BoundaryFixingTwist& t);
void from_json(const nlohmann::json& j, BoundaryFixingTwist& t);

/// Three profiles with disjoint supports inside the disk of radius 0.85.
std::vector<BoundaryFixingTwist> default_basis();

/// Combined twist sum_k c_k * basis_k (amplitudes of the basis are ignored).
/// beta and shear add; PreconditionError when sup |r beta'| >= 1.
struct TwistCombination {
    std::vector<BoundaryFixingTwist> basis;
    std::vector<double> coefficients;

    double beta(double r) const;
    double shear(double r) const;
    bool is_diffeomorphism(const PolarGrid& g) const;
    /// Dilatation of w: (i x / 2) e^{2 i theta} / (1 + i x / 2), x = r beta'.
    cplx dilatation(cplx z) const;
};

/// The twist itself on a grid, with rim (identity) and analytic dilatation.
DiskGridMap twist_map(const PolarGrid& g, const TwistCombination& w);
/// f o w on f's grid. Rings where beta vanishes are copied; others are
/// interpolated along the ring. The dilatation is composed analytically from
/// the twist and the field of f (stored or finite-difference).
DiskGridMap compose_with_twist(const DiskGridMap& f, const TwistCombination& w);

struct ReichStrebel {
    double ratio = 1.0;
    double excluded_fraction = 0.0;  // area share of cells with |phi| < 1e-9 max|phi|
    bool flagged = false;            // excluded_fraction >= 1%
};
/// [int |phi| |1 + mu phi/|phi||^2 / (1 - |mu|^2)] / [int |phi|] over the
/// polar cells of g. PreconditionError unless g's trace is the identity to
/// 1e-3.
ReichStrebel reich_strebel(const DiskGridMap& g, const HoloDensity& phi);
double reich_strebel_ratio(const DiskGridMap& g, const HoloDensity& phi);

struct SearchOptions {
    double line_tolerance = 1e-3;  // golden-section bracket width
    int max_sweeps = 3;
    double domain_cut = 0.9;       // K^rho of the inverse on |f(z)| <= cut
};

struct CoefficientBox {
    std::vector<double> lower;
    std::vector<double> upper;
    static CoefficientBox symmetric(std::size_t n, double half_width);
    void validate(std::size_t n) const;
};
void to_json(nlohmann::json& j, const CoefficientBox& b);
void from_json(const nlohmann::json& j, CoefficientBox& b);

struct SearchLogRow {
    int step = 0;
    std::vector<double> c;
    double objective = 0.0;  // +inf for rejected candidates
    std::string note;
};

struct SearchResult {
    std::vector<double> argmin;
    double k_min = 0.0;
    double k_at_zero = 0.0;
    std::vector<SearchLogRow> log;
};

/// c -> K^rho of (f0 o w_c)^{-1} through the transfer formula. +inf when the
/// twist is not a diffeomorphism or the composed dilatation reaches 1.
double twist_objective(const DiskGridMap& f0, const growth::GrowthFunction& rho,
                       const std::vector<BoundaryFixingTwist>& basis, const std::vector<double>& c,
                       double domain_cut = 0.9);

/// Coordinate descent from c = 0 with a golden-section search per
/// coordinate; a line minimum is accepted only when it improves the current
/// value.
SearchResult extremal_search(const DiskGridMap& f0, const growth::GrowthFunction& rho,
                             const std::vector<BoundaryFixingTwist>& basis, const CoefficientBox& box,
                             const SearchOptions& opt = {});

/// CSV "step,c1,...,cn,objective".
void write_search_log(std::ostream& os, const SearchResult& r);

struct MetricConfig {
    std::vector<BoundaryFixingTwist> basis = default_basis();
    double half_width = 0.5;
    SearchOptions search;
};
/// |F([f]) - F([g])| with F the extremal_search minimum from the first
/// representative of each class.
double pseudo_metric(const TeichClass& f, const TeichClass& g, const growth::GrowthFunction& rho,
                     const MetricConfig& cfg = {});
double extremal_value(const TeichClass& c, const growth::GrowthFunction& rho, const MetricConfig& cfg = {});

}  // namespace lqc::teich
