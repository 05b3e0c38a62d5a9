#pragma once

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

#include "lqc/common.hpp"

namespace lqc::growth {

enum class Kind { Constant, LogNormalized, RadialFamily, PowerLaw, UserTable };

/// Radial growth bound rho : [0,1) -> [1, inf) for the distortion of a disk map.
///
/// Built-in kinds:
///   constant        rho = 1
///   logNormalized   rho = 1 + log(1/(1-r))
///   radialFamily(a) rho = max(A, 1/A), A = (1-(1-r)^a) / (a r (1-r)^(a-1)),
///                   the distortion of the radial stretch f_a, with A(0) = 1
///   powerLaw(beta)  rho = (1-r)^(-beta)
///   userTable       piecewise-linear through (r, value) samples, flat outside
class GrowthFunction {
public:
    static GrowthFunction constant();
    static GrowthFunction log_normalized();
    static GrowthFunction radial_family(double a);
    static GrowthFunction power_law(double beta);
    static GrowthFunction user_table(std::vector<std::pair<double, double>> samples);

    Kind kind() const { return kind_; }
    double parameter() const { return param_; }
    const std::vector<std::pair<double, double>>& samples() const { return samples_; }
    std::string name() const;

    /// rho(r) for r in [0, 1). Throws DomainError otherwise.
    double operator()(double r) const;

    /// rho(1 - u) for u in (0, 1], evaluated without forming 1 - u, so the
    /// boundary behaviour stays resolved down to u ~ 1e-300.
    double at_complement(double u) const;

private:
    GrowthFunction(Kind k, double p) : kind_(k), param_(p) {}
    double radial_profile(double r, double u) const;

    Kind kind_;
    double param_;
    std::vector<std::pair<double, double>> samples_;
};

void to_json(nlohmann::json& j, const GrowthFunction& rho);
GrowthFunction growth_from_json(const nlohmann::json& j);

/// Value with a quadrature error estimate.
struct Estimate {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
};

/// Angular integral of rho(|xi + r e^{i theta}|) over the arc of the circle
/// S(xi, r) lying inside the unit disk, xi = e^{i xi_angle}.
Estimate rho_star(const GrowthFunction& rho, double r, double xi_angle = 0.0);

/// I(t) = int_t^R dr / (r rho*(r)). Throws DomainError unless 0 < t < R < 2.
Estimate boundary_divergence_integral(const GrowthFunction& rho, double t, double R);

enum class IntegrabilityVerdict { Finite, Divergent, Inconclusive };
enum class DivergenceVerdict { Divergent, Convergent, Inconclusive };

struct AllowabilityReport {
    bool normalization_ok = false;
    struct {
        IntegrabilityVerdict verdict = IntegrabilityVerdict::Inconclusive;
        double value = 0.0;
        double tail_exponent = 0.0;
        std::string message;
    } integrability;
    struct {
        DivergenceVerdict verdict = DivergenceVerdict::Inconclusive;
        double slope_estimate = 0.0;
        std::string message;
    } boundary_divergence;
    double R_used = 0.25;
    std::vector<std::pair<double, double>> samples;  // (t, I(t))

    bool allowable() const {
        return normalization_ok && integrability.verdict == IntegrabilityVerdict::Finite &&
               boundary_divergence.verdict == DivergenceVerdict::Divergent;
    }
};

void to_json(nlohmann::json& j, const AllowabilityReport& rep);

std::string to_string(IntegrabilityVerdict v);
std::string to_string(DivergenceVerdict v);

/// Default t-grid: R * 2^{-k}, k = 1..levels.
std::vector<double> default_t_grid(double R, int levels = 30);

/// Checks conditions (i) rho(0) = 1, (ii) int_0^1 rho < inf and
/// (iii) I(t) -> inf as t -> 0 on the given strictly decreasing t-grid.
AllowabilityReport check_allowable(const GrowthFunction& rho, double R = 0.25,
                                   std::vector<double> t_grid = {});

}  // namespace lqc::growth
