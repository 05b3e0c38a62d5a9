#include <algorithm>
#include <cmath>

#include "lqc/beltrami.hpp"
#include "lqc/fft.hpp"

namespace lqc::beltrami {

namespace {

void lagrange4(const double* x, double t, double* w) {
    for (int a = 0; a < 4; ++a) {
        w[a] = 1.0;
        for (int b = 0; b < 4; ++b)
            if (b != a) w[a] *= (t - x[b]) / (x[a] - x[b]);
    }
}

// Signed angular frequency vector kx + i ky of padded bin (row, col).
cplx wave_vector(int row, int col, int N, double period) {
    const double s = kTwoPi / period;
    return {s * fft::frequency(col, N), s * fft::frequency(row, N)};
}

// Field of size n x n copied into the corner of an N x N zero array.
std::vector<cplx> embed(const std::vector<cplx>& field, int n, int N) {
    std::vector<cplx> out(static_cast<std::size_t>(N) * N, 0.0);
    for (int y = 0; y < n; ++y)
        std::copy_n(&field[static_cast<std::size_t>(y) * n], n, &out[static_cast<std::size_t>(y) * N]);
    return out;
}

std::vector<cplx> crop(const std::vector<cplx>& padded, int n, int N) {
    std::vector<cplx> out(static_cast<std::size_t>(n) * n);
    for (int y = 0; y < n; ++y)
        std::copy_n(&padded[static_cast<std::size_t>(y) * N], n, &out[static_cast<std::size_t>(y) * n]);
    return out;
}

// Applies the multiplier m(kx + i ky) in place on the periodic N x N array.
template <class M>
void apply_multiplier(std::vector<cplx>& a, int N, double period, M m) {
    fft::forward_2d(a, N, N);
    const double norm = 1.0 / (static_cast<double>(N) * N);
    for (int y = 0; y < N; ++y)
        for (int x = 0; x < N; ++x) {
            const cplx k = wave_vector(y, x, N, period);
            auto& v = a[static_cast<std::size_t>(y) * N + x];
            v = (k == cplx{}) ? cplx{} : v * m(k) * norm;
        }
    fft::backward_2d(a, N, N);
}

double boundary_fraction(const std::vector<cplx>& field, int n) {
    const int band = std::max(1, n / 10);
    double total = 0.0, outer = 0.0;
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const double e = std::norm(field[static_cast<std::size_t>(y) * n + x]);
            total += e;
            if (y < band || x < band || y >= n - band || x >= n - band) outer += e;
        }
    return total > 0.0 ? outer / total : 0.0;
}

}  // namespace

cplx PlanePatch::sample(cplx z) const {
    const double h = spacing();
    const double u = (z.real() + half_width) / h, v = (z.imag() + half_width) / h;
    const double slack = 1e-9;
    if (u < -slack || v < -slack || u > n - 1 + slack || v > n - 1 + slack)
        throw DomainError("PlanePatch::sample: point outside the patch");
    const int cx = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, n - 4);
    const int cy = std::clamp(static_cast<int>(std::floor(v)) - 1, 0, n - 4);
    double xs[4], ys[4], wx[4], wy[4];
    for (int a = 0; a < 4; ++a) {
        xs[a] = cx + a;
        ys[a] = cy + a;
    }
    lagrange4(xs, u, wx);
    lagrange4(ys, v, wy);
    cplx out = 0.0;
    for (int b = 0; b < 4; ++b)
        for (int a = 0; a < 4; ++a)
            out += wy[b] * wx[a] * values[static_cast<std::size_t>(cy + b) * n + cx + a];
    return out;
}

BeurlingResult beurling_transform(const std::vector<cplx>& field, int n, int fft_size) {
    if (n < 1 || fft_size < n || field.size() != static_cast<std::size_t>(n) * n)
        throw PreconditionError("beurling_transform: field must be n*n with n <= fft_size");
    BeurlingResult res;
    res.boundary_energy_fraction = boundary_fraction(field, n);
    res.support_warning = res.boundary_energy_fraction > 1e-8;
    auto padded = embed(field, n, fft_size);
    apply_multiplier(padded, fft_size, 1.0, [](cplx k) { return std::conj(k) / k; });
    res.values = crop(padded, n, fft_size);
    return res;
}

CompactSolution solve_compact(const BeltramiField& mu, const SolverConfig& cfg) {
    cfg.validate();
    mu.validate();
    const PolarGrid& g = mu.grid;
    const double k = mu.ess_sup();
    if (!(k < 1.0)) throw PreconditionError("solve_compact: ess_sup of mu must be < 1");
    const int outer = std::max(1, g.n_r / 20);
    for (int i = g.n_r - outer; i < g.n_r; ++i)
        for (int j = 0; j < g.n_theta; ++j)
            if (std::abs(mu.at(i, j)) > 1e-12)
                throw PreconditionError("solve_compact: mu must vanish near the rim (compact support)");

    const int N = cfg.fft_size;
    const int n = N / 2;
    PlanePatch patch{n, g.r_max, std::vector<cplx>(static_cast<std::size_t>(n) * n)};
    const double h = patch.spacing();
    const double period = N * h;

    // mu on the padded Cartesian grid, zero outside the disk.
    DiskGridMap mu_map(g);
    mu_map.values = mu.values;
    for (int j = 0; j < g.n_theta; ++j) mu_map.center += mu.at(0, j) / double(g.n_theta);
    std::vector<cplx> mu_c(static_cast<std::size_t>(N) * N, 0.0);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const cplx z = patch.node(y, x);
            if (std::abs(z) < g.r_max) mu_c[static_cast<std::size_t>(y) * N + x] = mu_map.sample(z);
        }

    std::vector<cplx> hden(mu_c.size(), 0.0), sh;
    StageReport stage{"compact", 0, {}, false};
    double fz_sup = 1.0;
    for (int it = 0; it < cfg.neumann_max_iter; ++it) {
        sh = hden;
        apply_multiplier(sh, N, period, [](cplx kv) { return std::conj(kv) / kv; });
        double res = 0.0;
        fz_sup = 0.0;
        for (std::size_t q = 0; q < hden.size(); ++q) {
            const cplx fz = 1.0 + sh[q];
            const cplx next = mu_c[q] * fz;
            res = std::max(res, std::abs(next - hden[q]));
            fz_sup = std::max(fz_sup, std::abs(fz));
            hden[q] = next;
        }
        stage.residuals.push_back(res);
        stage.iterations = it + 1;
        if (res <= cfg.neumann_tol * (1.0 + fz_sup)) {
            stage.converged = true;
            break;
        }
    }

    // Cauchy transform: periodic solve of u_zbar = h - mean(h), then m*zbar
    // restores the mean so that u_zbar = h exactly.
    cplx mean = 0.0;
    for (const cplx& v : hden) mean += v;
    mean /= static_cast<double>(hden.size());
    std::vector<cplx> u = hden;
    apply_multiplier(u, N, period, [](cplx kv) { return cplx{0.0, -2.0} / kv; });
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const cplx z = patch.node(y, x);
            patch.values[static_cast<std::size_t>(y) * n + x] =
                u[static_cast<std::size_t>(y) * N + x] + mean * std::conj(z);
        }
    // Constant of integration: f - z averages to zero on the patch boundary.
    cplx shift = 0.0;
    int count = 0;
    for (int t = 0; t < n; ++t)
        for (int idx : {t, (n - 1) * n + t, t * n, t * n + n - 1}) {
            shift += patch.values[idx];
            ++count;
        }
    shift /= static_cast<double>(count);
    double rim_dev = 0.0;
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            cplx& v = patch.values[static_cast<std::size_t>(y) * n + x];
            v -= shift;
            if (y == 0 || x == 0 || y == n - 1 || x == n - 1) rim_dev = std::max(rim_dev, std::abs(v));
            v += patch.node(y, x);
        }

    CompactSolution out;
    out.map = DiskGridMap(g);
    out.map.source = "solve_compact";
    for (int i = 0; i < g.n_r; ++i)
        for (int j = 0; j < g.n_theta; ++j) out.map.at(i, j) = patch.sample(g.node(i, j));
    out.map.center = patch.sample(0.0);
    if (g.r_max == 1.0) {
        std::vector<cplx> rim(g.n_theta);
        for (int j = 0; j < g.n_theta; ++j) rim[j] = patch.sample(std::polar(1.0, g.angle(j)));
        out.map.rim = std::move(rim);
    }
    out.map.mu = mu.values;

    SolveReport& rep = out.report;
    const bool monotone = residuals_nonincreasing(stage.residuals);
    rep.stages.push_back(stage);
    rep.pinned_images = {patch.sample(1.0), patch.sample(-1.0), patch.sample(kI)};
    rep.image_of_origin = out.map.center;
    rep.converged = stage.converged && monotone;
    if (!stage.converged) rep.message = "Neumann iteration hit neumann_max_iter";
    else if (!monotone) rep.message = "residual history not monotone";
    out.patch = std::move(patch);
    out.rim_deviation = rim_dev;
    return out;
}

}  // namespace lqc::beltrami
