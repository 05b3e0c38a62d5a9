#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "lqc/grid.hpp"
#include "lqc/growth.hpp"

namespace lqc::modulus {

// ---- special functions --------------------------------------------------------

double agm(double a, double b);
/// Complete elliptic integral of the first kind with modulus r (not r^2).
double elliptic_k(double r);
/// Modulus of the Grotzsch ring: mu(r) = (pi/2) K(sqrt(1 - r^2)) / K(r).
double grotzsch_mu(double r);

/// Constant c in tau(s) = c * pi / mu(1 / sqrt(1 + s)). The Teichmuller ring
/// C \ ([-1,0] u [s,inf)) has modulus 2 mu(1/sqrt(1+s)) and capacity 2 pi / modulus,
/// giving c = 1; calibrate_tau() checks this against the grid oracle.
inline constexpr double kTauConstant = 1.0;

/// Capacity of the Teichmuller ring; strictly decreasing in s.
double tau_capacity(double s);
/// Inverse of tau_capacity by bisection in log s (relative 1e-12). RangeError
/// outside [tau(1e12), tau(1e-12)].
double tau_inverse(double v);

struct TauCalibrationPoint {
    double s = 0.0;
    double formula = 0.0;
    double oracle = 0.0;
    double relative_error = 0.0;
};
/// Formula against grid_capacity on the Teichmuller ring at s = 0.5, 1, 2.
std::vector<TauCalibrationPoint> calibrate_tau();
/// Cached result of calibrate_tau(): every point within 2%.
bool tau_calibrated();

enum class TableSource { IdentityFormula, GridOracle };
std::string to_string(TableSource s);

struct CapacityTable {
    std::vector<double> s_values;
    std::vector<double> tau_values;
    TableSource source = TableSource::IdentityFormula;
};
/// Throws NumericalError when the formula is requested but calibration fails,
/// and when the tabulated values are not strictly decreasing.
CapacityTable build_capacity_table(const std::vector<double>& s_values,
                                   TableSource source = TableSource::IdentityFormula);
/// CSV with header "s,tau".
void write_csv(std::ostream& os, const CapacityTable& t);

// ---- quadrilateral moduli ----------------------------------------------------

/// Q(xi, r, R) = { z in D : r <= |z - xi| <= R }.
struct QuadrilateralSpec {
    cplx xi{1.0, 0.0};
    double r = 0.01;
    double R = 0.1;
    void validate() const;
    QuadrilateralSpec rotated(double alpha) const;
};
void to_json(nlohmann::json& j, const QuadrilateralSpec& q);
void from_json(const nlohmann::json& j, QuadrilateralSpec& q);

struct ModulusOptions {
    int n_v_start = 16;   // cells across the quadrilateral at the first level
    int n_v_max = 256;
    double rel_tol = 2e-3;  // stop when a refinement changes the value less than this
};

struct ModulusResult {
    double value = 0.0;        // primal energy at the finest level (an upper estimate)
    double conjugate = 0.0;    // modulus of the family joining the circular sides
    std::vector<int> n_v;      // levels used
    std::vector<double> levels;
    double observed_order = 0.0;  // from the last three levels, NaN with fewer
    /// 1 / conjugate: the dual energy gives a lower estimate of value.
    double lower() const { return 1.0 / conjugate; }
};

/// Modulus of the family joining the two arcs of Q n dD in the image of Q
/// under a map with dilatation mu (empty function = identity). Solves the
/// mixed problem in coordinates s = log|z - xi|, v = phi / theta(s) with
/// z = xi (1 - e^{s + i phi}), theta = acos(e^s / 2).
ModulusResult quad_modulus_detail(const std::function<cplx(cplx)>& mu, const QuadrilateralSpec& Q,
                                  const ModulusOptions& opt = {});
ModulusResult quad_modulus_detail(const QuadrilateralSpec& Q, const ModulusOptions& opt = {});
double quad_modulus(const QuadrilateralSpec& Q, const ModulusOptions& opt = {});
double quad_modulus(const std::function<cplx(cplx)>& mu, const QuadrilateralSpec& Q,
                    const ModulusOptions& opt = {});
/// Dilatation of the sampled map by finite differences, interpolated on Q.
double quad_modulus(const DiskGridMap& f, const QuadrilateralSpec& Q, const ModulusOptions& opt = {});
ModulusResult quad_modulus_detail(const DiskGridMap& f, const QuadrilateralSpec& Q,
                                  const ModulusOptions& opt = {});

/// int_r^R dt / (t rho*(t)), shared with the growth module.
double lemma_qs_lower_bound(const growth::GrowthFunction& rho, double r, double R);

// ---- ring capacity -----------------------------------------------------------

struct CapacityOptions {
    int n_theta_start = 32;
    int levels = 3;                  // doublings, Richardson on the last two
    double truncation_factor = 20.0;  // F cut at this times max(|a|, |b|, |c|)
};

struct CapacityResult {
    double value = 0.0;        // extrapolated in the grid and in the truncation
    double finest = 0.0;       // finest grid, truncation radius as given
    double observed_order = 0.0;
    double truncation_radius = 0.0;
    double truncation_sensitivity = 0.0;  // relative change when the radius doubles
    bool truncation_warning = false;      // sensitivity above 2%
};

/// Capacity of the condenser with plates E = [a, b] and F = the ray from c
/// directed away from a, i.e. the modulus of the curves joining E and F. The
/// complement of E is mapped onto the unit disk (inverse Joukowski, then
/// inversion) so that F becomes a slit ending at 0; the slit is straightened
/// by a shear of log-polar coordinates and the energy solved on a Q1 grid.
/// PreconditionError when the slit is not star-shaped about 0.
CapacityResult grid_capacity(cplx a, cplx b, cplx c, const CapacityOptions& opt = {});

struct RingCheck {
    double measured = 0.0;
    double bound = 0.0;
    CapacityResult detail;
};
/// measured = grid_capacity(a, b, c), bound = tau(|a - c| / |a - b|).
RingCheck ring_capacity_check(cplx a, cplx b, cplx c, const CapacityOptions& opt = {});

}  // namespace lqc::modulus
