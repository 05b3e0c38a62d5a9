#pragma once

#include <functional>
#include <vector>

namespace lqc::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;   // estimated absolute error
    bool converged = false;
    int evaluations = 0;
};

struct Options {
    double rel_tol = 1e-9;
    double abs_tol = 1e-14;
    int max_subdivisions = 4000;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
/// Interval endpoints are never evaluated, so integrable endpoint
/// singularities are tolerated.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts = {});

/// Tanh-sinh (double exponential) integration over [a, b] for integrands with
/// endpoint singularities. f receives (x, x - a, b - x); the two distances are
/// computed without cancellation so f can resolve the singular behaviour.
Result integrate_tanh_sinh(const std::function<double(double, double, double)>& f, double a,
                           double b, const Options& opts = {});

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

}  // namespace lqc::quad
