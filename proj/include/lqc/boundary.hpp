#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "lqc/grid.hpp"
#include "lqc/growth.hpp"

namespace lqc::boundary {

/// Circle homeomorphism sampled at theta_j = 2 pi j / n.
struct BoundaryTrace {
    std::vector<double> angles;
    std::vector<cplx> values;
    bool monotone = false;

    int size() const { return static_cast<int>(values.size()); }
    /// h(e^{i phi}) by linear interpolation of the unwrapped argument.
    cplx operator()(double phi) const;
    /// Unwrapped argument of h at phi (continuous, increases by 2 pi per turn
    /// when monotone).
    double lift(double phi) const;
    /// Largest argument step between neighbouring samples.
    double max_step() const;
};

/// Thrown when the radial limits do not settle.
struct ExtensionError : DomainError {
    std::vector<double> epsilons;
    std::vector<double> level_differences;  // sup-norm change between consecutive levels
    ExtensionError(std::vector<double> eps, std::vector<double> diffs);
};

inline constexpr int kDefaultTraceSamples = 4096;
std::vector<double> default_epsilons();  // 1e-2, 1e-3, 1e-4 and 0

/// Samples f((1 - eps) e^{i theta}) / |.| for each eps (decreasing), and
/// accepts when the two levels nearest the circle differ by < 1e-3 in sup
/// norm. The trace is the last level. ExtensionError otherwise.
BoundaryTrace boundary_trace(const DiskGridMap& map, const std::vector<double>& epsilons = default_epsilons(),
                             int n_samples = kDefaultTraceSamples);
BoundaryTrace boundary_trace(const std::function<cplx(cplx)>& map,
                             const std::vector<double>& epsilons = default_epsilons(),
                             int n_samples = kDefaultTraceSamples);

/// Trace of h^{-1} on the same angular grid (monotone traces only).
BoundaryTrace inverse_trace(const BoundaryTrace& h);
/// Trace post-composed with the disk automorphism sending h(1), h(-1), h(i)
/// to 1, -1, i.
BoundaryTrace normalized(const BoundaryTrace& h);
/// theta -> -theta conjugate: conj(h(e^{-i theta})).
BoundaryTrace reflected(const BoundaryTrace& h);

/// |h(xi e^{it}) - h(xi)| / |h(xi) - h(xi e^{-it})|.
double lambda_qs(const BoundaryTrace& h, double xi_angle, double t);
/// Interpolation error estimate of lambda_qs: sample spacing times the local
/// slope of the ratio in t.
double lambda_qs_error(const BoundaryTrace& h, double xi_angle, double t);

/// lambda(t) = 1 / tau^{-1}(2 / I), I = int_s^S dr / (r rho*(r)),
/// s = 2 sin(t/4), S = 2 sin(3t/4), reported as max(lambda, 1/lambda).
/// +infinity when 2 / I is outside the range of tau. DomainError for t outside
/// (0, pi/2].
double lambda_bound(const growth::GrowthFunction& rho, double t);

struct QsSample {
    double xi_angle = 0.0;
    double t = 0.0;
    double ratio = 0.0;        // lambda_{h^{-1}}(xi, t)
    double bound = 0.0;        // lambda(t)
    double lower_margin = 0.0;  // ratio - 1/bound
    double upper_margin = 0.0;  // bound - ratio
    double interpolation_error = 0.0;
    bool holds = false;
};

struct QsReport {
    std::vector<QsSample> samples;
    bool all_hold = false;
    double inverse_k_rho = 0.0;  // K^rho of the inverse by transfer (|f| <= 0.95)
    bool monotone_trace = false;
};

/// Two-sided check 1/lambda(t) <= lambda_{h^{-1}}(xi, t) <= lambda(t) on the
/// normalized trace of the map.
QsReport verify_qs_theorem(const DiskGridMap& map, const growth::GrowthFunction& rho,
                           const std::vector<std::pair<double, double>>& samples);
/// Same with a trace already in hand, used as given (inverse_k_rho left at 0).
QsReport verify_qs_theorem(const BoundaryTrace& h, const growth::GrowthFunction& rho,
                           const std::vector<std::pair<double, double>>& samples);

/// n_xi equally spaced angles by n_t values of t spread over [t_min, t_max].
std::vector<std::pair<double, double>> sample_grid(int n_xi, int n_t, double t_min = 0.05,
                                                   double t_max = kPi / 2);

void write_csv(std::ostream& os, const BoundaryTrace& h);  // theta,re,im
void to_json(nlohmann::json& j, const QsSample& s);
void to_json(nlohmann::json& j, const QsReport& r);

}  // namespace lqc::boundary
