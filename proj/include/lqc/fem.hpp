#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "lqc/common.hpp"

namespace lqc::fem {

/// Symmetric 2x2 coefficient {a11, a12, a22}.
using Tensor = std::array<double, 3>;

/// Tensor-product grid x[0..nx-1] by y[0..ny-1]. With periodic_y the last
/// y node is identified with the first.
struct RectGrid {
    std::vector<double> x;
    std::vector<double> y;
    bool periodic_y = false;
};

struct EnergyResult {
    double energy = 0.0;
    std::vector<double> u;  // nodal values, index i * ny + j
};

/// Minimizes the Dirichlet energy  int grad(u)^T A grad(u)  over bilinear
/// elements with the prescribed nodal values (nullopt = free). A is sampled
/// at 2x2 Gauss points of every cell.
EnergyResult min_energy(const RectGrid& grid,
                        const std::function<Tensor(double, double)>& coefficient,
                        const std::function<std::optional<double>(int, int)>& dirichlet);

/// Coefficient of the energy |grad_z u|^2 G pulled back through a
/// parameterization with Jacobian columns dz/dx and dz/dy:
/// |det J| J^{-1} G J^{-T}. G is {1, 0, 1} for the Euclidean energy.
Tensor pullback(cplx dz_dx, cplx dz_dy, const Tensor& G = {1.0, 0.0, 1.0});

/// Energy tensor of the image metric of a map with complex dilatation mu:
/// |det Df| Df^{-1} Df^{-T}, which depends on mu only (det = 1).
Tensor dilatation_tensor(cplx mu);

/// Evenly spaced nodes from a to b with n cells.
std::vector<double> linspace(double a, double b, int n);

}  // namespace lqc::fem
