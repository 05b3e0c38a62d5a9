#include "lqc/fem.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>

namespace lqc::fem {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n + 1);
    for (int k = 0; k <= n; ++k) v[k] = a + (b - a) * k / n;
    v[n] = b;
    return v;
}

Tensor pullback(cplx dz_dx, cplx dz_dy, const Tensor& G) {
    // J = [[Re dx, Re dy], [Im dx, Im dy]]
    const double j11 = dz_dx.real(), j12 = dz_dy.real(), j21 = dz_dx.imag(), j22 = dz_dy.imag();
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0) throw NumericalError("pullback: singular parameterization");
    // J^{-1} = adj / det
    const double i11 = j22 / det, i12 = -j12 / det, i21 = -j21 / det, i22 = j11 / det;
    // M = J^{-1} G
    const double m11 = i11 * G[0] + i12 * G[1], m12 = i11 * G[1] + i12 * G[2];
    const double m21 = i21 * G[0] + i22 * G[1], m22 = i21 * G[1] + i22 * G[2];
    const double a = std::abs(det);
    return {a * (m11 * i11 + m12 * i12), a * (m11 * i21 + m12 * i22), a * (m21 * i21 + m22 * i22)};
}

Tensor dilatation_tensor(cplx mu) {
    // Df for f_z = 1, f_zbar = mu: columns f_x = 1 + mu, f_y = i (1 - mu).
    const cplx fx = 1.0 + mu, fy = kI * (1.0 - mu);
    const double j11 = fx.real(), j12 = fy.real(), j21 = fx.imag(), j22 = fy.imag();
    const double det = j11 * j22 - j12 * j21;
    if (!(det > 0.0)) throw DomainError("dilatation_tensor: |mu| must be < 1");
    // det * Df^{-1} Df^{-T} = adj adj^T / det
    const double a11 = j22, a12 = -j12, a21 = -j21, a22 = j11;
    return {(a11 * a11 + a12 * a12) / det, (a11 * a21 + a12 * a22) / det,
            (a21 * a21 + a22 * a22) / det};
}

EnergyResult min_energy(const RectGrid& grid,
                        const std::function<Tensor(double, double)>& coefficient,
                        const std::function<std::optional<double>(int, int)>& dirichlet) {
    const int nx = static_cast<int>(grid.x.size()), ny = static_cast<int>(grid.y.size());
    if (nx < 2 || ny < 2) throw PreconditionError("min_energy: grid needs at least 2x2 nodes");
    const int ny_eff = grid.periodic_y ? ny - 1 : ny;
    auto canon = [&](int i, int j) { return i * ny_eff + (grid.periodic_y && j == ny - 1 ? 0 : j); };
    const int n_nodes = nx * ny_eff;

    std::vector<double> value(n_nodes, 0.0);
    std::vector<int> free_index(n_nodes, -1);
    int n_free = 0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny_eff; ++j) {
            const auto d = dirichlet(i, j);
            if (d) value[canon(i, j)] = *d;
            else free_index[canon(i, j)] = n_free++;
        }

    const double gp = 0.5 / std::sqrt(3.0);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n_free) * 9);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);
    std::vector<std::array<double, 16>> cell_k;  // kept for the energy
    cell_k.reserve(static_cast<std::size_t>(nx - 1) * (ny - 1));

    for (int i = 0; i + 1 < nx; ++i)
        for (int j = 0; j + 1 < ny; ++j) {
            const double hx = grid.x[i + 1] - grid.x[i], hy = grid.y[j + 1] - grid.y[j];
            std::array<double, 16> K{};
            for (double qx : {0.5 - gp, 0.5 + gp})
                for (double qy : {0.5 - gp, 0.5 + gp}) {
                    const Tensor A = coefficient(grid.x[i] + qx * hx, grid.y[j] + qy * hy);
                    // local nodes: (0,0), (1,0), (0,1), (1,1) in (x, y)
                    const double gx[4] = {-(1 - qy) / hx, (1 - qy) / hx, -qy / hx, qy / hx};
                    const double gy[4] = {-(1 - qx) / hy, -qx / hy, (1 - qx) / hy, qx / hy};
                    const double w = 0.25 * hx * hy;
                    for (int a = 0; a < 4; ++a)
                        for (int b = 0; b < 4; ++b)
                            K[a * 4 + b] += w * (A[0] * gx[a] * gx[b] + A[1] * (gx[a] * gy[b] + gy[a] * gx[b]) +
                                                 A[2] * gy[a] * gy[b]);
                }
            const int node[4] = {canon(i, j), canon(i + 1, j), canon(i, j + 1), canon(i + 1, j + 1)};
            for (int a = 0; a < 4; ++a) {
                const int fa = free_index[node[a]];
                if (fa < 0) continue;
                for (int b = 0; b < 4; ++b) {
                    const int fb = free_index[node[b]];
                    if (fb >= 0) trip.emplace_back(fa, fb, K[a * 4 + b]);
                    else rhs[fa] -= K[a * 4 + b] * value[node[b]];
                }
            }
            cell_k.push_back(K);
        }

    if (n_free > 0) {
        Eigen::SparseMatrix<double> S(n_free, n_free);
        S.setFromTriplets(trip.begin(), trip.end());
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(S);
        if (solver.info() != Eigen::Success) throw NumericalError("min_energy: factorization failed");
        const Eigen::VectorXd sol = solver.solve(rhs);
        for (int k = 0; k < n_nodes; ++k)
            if (free_index[k] >= 0) value[k] = sol[free_index[k]];
    }

    EnergyResult out;
    std::size_t c = 0;
    for (int i = 0; i + 1 < nx; ++i)
        for (int j = 0; j + 1 < ny; ++j, ++c) {
            const int node[4] = {canon(i, j), canon(i + 1, j), canon(i, j + 1), canon(i + 1, j + 1)};
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) out.energy += value[node[a]] * cell_k[c][a * 4 + b] * value[node[b]];
        }
    out.u.resize(static_cast<std::size_t>(nx) * ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) out.u[static_cast<std::size_t>(i) * ny + j] = value[canon(i, j)];
    return out;
}

}  // namespace lqc::fem
