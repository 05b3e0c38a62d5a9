#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "lqc/beltrami.hpp"
#include "lqc/fft.hpp"
#include "lqc/mobius.hpp"

namespace lqc::beltrami {

// Fourier-mode form of the disk operators. For omega = sum_n omega_n(r) e^{in theta}
// and T omega = -(1/pi) int [omega/(zeta - z) + z conj(omega)/(1 - conj(zeta) z)] dA:
//   (T omega)_m(r) = -2 r^m int_r^1 s^-m omega_{m+1}(s) ds               m >= 0
//                  =  2 r^m int_0^r s^-m omega_{m+1}(s) ds               m < 0
//                    - 2 r^m int_0^1 s^m conj(omega_{1-m}(s)) ds         m >= 1
// and Pi = d/dz T maps mode m of T to mode m-1:
//   (Pi omega)_{m-1} = omega_{m+1} - 2m r^{m-1} int_r^1 s^-m omega_{m+1}  m >= 0
//                    = omega_{m+1} + 2m r^{m-1} int_0^r s^-m omega_{m+1}  m < 0
//                      - 2m r^{m-1} int_0^1 s^m conj(omega_{1-m})        m >= 1
// Radial profiles are piecewise linear between rings (constant on [0, r_0]
// and [r_{n-1}, 1]) and integrated exactly against the power weights. The
// scaled integrals r^m int_r^1 s^-m and r^m int_0^r s^-m are accumulated ring
// by ring so every factor stays <= 1.
class DiskOperator {
public:
    explicit DiskOperator(const PolarGrid& g);

    /// T omega on the grid and on the rim, and Pi omega on the grid.
    void apply(const std::vector<cplx>& omega, std::vector<cplx>& T, std::vector<cplx>& rimT,
               std::vector<cplx>& Pi) const;

    const PolarGrid grid;

private:
    int n_, N_, H_;
    // Outer-to-inner recursion (index [m * n + i]), m in [0, H-1].
    std::vector<double> kw0_, kw1_, ke_, klast_;
    // Inner-to-outer recursion (index [p * n + i]), p in [1, H].
    std::vector<double> lw_prev_, lw_cur_, le_, l0_, lrim_e_, lrim_w_;
    std::vector<double> pow_;  // r_i^m, index [m * n + i], m in [0, H]
};

namespace {

// int_1^Q x^s dx with L = log Q
double power_integral(double s, double L) {
    if (s == -1.0) return L;
    return std::expm1((s + 1.0) * L) / (s + 1.0);
}

int bin_of(int mode, int N) { return ((mode % N) + N) % N; }

}  // namespace

DiskOperator::DiskOperator(const PolarGrid& g)
    : grid(g), n_(g.n_r), N_(g.n_theta), H_(g.n_theta / 2) {
    const int n = n_, H = H_;
    const double h = g.dr();
    kw0_.assign(static_cast<std::size_t>(H) * n, 0.0);
    kw1_ = kw0_;
    ke_ = kw0_;
    klast_.assign(H, 0.0);
    lw_prev_.assign(static_cast<std::size_t>(H + 1) * n, 0.0);
    lw_cur_ = lw_prev_;
    le_ = lw_prev_;
    l0_.assign(H + 1, 0.0);
    lrim_e_ = l0_;
    lrim_w_ = l0_;
    pow_.assign(static_cast<std::size_t>(H + 1) * n, 0.0);

    for (int m = 0; m < H; ++m) {
        for (int i = 0; i + 1 < n; ++i) {
            const double ri = g.radius(i);
            const double L = std::log(g.radius(i + 1) / ri);
            const double m0 = ri * power_integral(-m, L);
            const double m1 = ri * ri / h * (power_integral(1.0 - m, L) - power_integral(-m, L));
            const std::size_t k = static_cast<std::size_t>(m) * n + i;
            kw0_[k] = m0 - m1;
            kw1_[k] = m1;
            ke_[k] = std::exp(-m * L);
        }
        const double rl = g.radius(n - 1);
        klast_[m] = rl * power_integral(-m, -std::log(rl));
    }
    for (int p = 1; p <= H; ++p) {
        for (int i = 1; i < n; ++i) {
            const double ri = g.radius(i);
            const double lq = std::log(g.radius(i - 1) / ri);
            const double a1 = -std::expm1((p + 1.0) * lq) / (p + 1.0);  // int_q^1 x^p
            const double a2 = -std::expm1((p + 2.0) * lq) / (p + 2.0);  // int_q^1 x^{p+1}
            const double n0 = ri * a1;
            const double n1 = ri * ri / h * (a1 - a2);
            const std::size_t k = static_cast<std::size_t>(p) * n + i;
            lw_cur_[k] = n0 - n1;
            lw_prev_[k] = n1;
            le_[k] = std::exp(p * lq);
        }
        const double r0 = g.radius(0);
        const double rl = g.radius(n - 1);
        l0_[p] = r0 / (p + 1.0);
        lrim_e_[p] = std::pow(rl, p);
        lrim_w_[p] = -std::expm1((p + 1.0) * std::log(rl)) / (p + 1.0);
    }
    for (int m = 0; m <= H; ++m)
        for (int i = 0; i < n; ++i)
            pow_[static_cast<std::size_t>(m) * n + i] = std::pow(g.radius(i), m);
}

void DiskOperator::apply(const std::vector<cplx>& omega, std::vector<cplx>& T,
                         std::vector<cplx>& rimT, std::vector<cplx>& Pi) const {
    const int n = n_, N = N_, H = H_;
    // Mode-major coefficient arrays: [bin * n + i].
    std::vector<cplx> W(static_cast<std::size_t>(N) * n), Tm(W.size(), 0.0), Pm(W.size(), 0.0);
    std::vector<cplx> rim(N, 0.0);
    std::vector<cplx> row(N);
    for (int i = 0; i < n; ++i) {
        std::copy_n(&omega[grid.index(i, 0)], N, row.begin());
        fft::forward(row);
        for (int b = 0; b < N; ++b) W[static_cast<std::size_t>(b) * n + i] = row[b] / double(N);
    }
    std::vector<cplx> acc(n);
    for (int mode = 1 - H; mode <= H; ++mode) {  // omega mode
        const cplx* w = &W[static_cast<std::size_t>(bin_of(mode, N)) * n];
        const int m = mode - 1;                 // T mode
        cplx* t = &Tm[static_cast<std::size_t>(bin_of(m, N)) * n];
        const bool pi_ok = m - 1 > -H;          // Pi mode inside the band
        cplx* pi = &Pm[static_cast<std::size_t>(bin_of(m - 1, N)) * n];
        if (m >= 0) {
            const std::size_t base = static_cast<std::size_t>(m) * n;
            acc[n - 1] = klast_[m] * w[n - 1];
            for (int i = n - 2; i >= 0; --i)
                acc[i] = kw0_[base + i] * w[i] + kw1_[base + i] * w[i + 1] + ke_[base + i] * acc[i + 1];
            for (int i = 0; i < n; ++i) {
                t[i] = -2.0 * acc[i];
                pi[i] = w[i] - (2.0 * m / grid.radius(i)) * acc[i];
            }
        } else {
            const int p = -m;
            const std::size_t base = static_cast<std::size_t>(p) * n;
            acc[0] = l0_[p] * w[0];
            for (int i = 1; i < n; ++i)
                acc[i] = le_[base + i] * acc[i - 1] + lw_prev_[base + i] * w[i - 1] +
                         lw_cur_[base + i] * w[i];
            for (int i = 0; i < n; ++i) {
                t[i] = 2.0 * acc[i];
                if (pi_ok) pi[i] = w[i] - (2.0 * p / grid.radius(i)) * acc[i];
            }
            rim[bin_of(m, N)] = 2.0 * (lrim_e_[p] * acc[n - 1] + lrim_w_[p] * w[n - 1]);
        }
    }
    // Reflection terms, m in [1, H-1], source mode 1 - m.
    for (int m = 1; m < H; ++m) {
        const cplx* w = &W[static_cast<std::size_t>(bin_of(1 - m, N)) * n];
        const std::size_t base = static_cast<std::size_t>(m) * n;
        cplx a = l0_[m] * std::conj(w[0]);
        for (int i = 1; i < n; ++i)
            a = le_[base + i] * a + lw_prev_[base + i] * std::conj(w[i - 1]) +
                lw_cur_[base + i] * std::conj(w[i]);
        const cplx C = lrim_e_[m] * a + lrim_w_[m] * std::conj(w[n - 1]);
        cplx* t = &Tm[static_cast<std::size_t>(bin_of(m, N)) * n];
        cplx* pi = &Pm[static_cast<std::size_t>(bin_of(m - 1, N)) * n];
        const double* pw = &pow_[static_cast<std::size_t>(m) * n];
        const double* pw1 = &pow_[static_cast<std::size_t>(m - 1) * n];
        for (int i = 0; i < n; ++i) {
            t[i] -= 2.0 * pw[i] * C;
            pi[i] -= 2.0 * m * pw1[i] * C;
        }
        rim[bin_of(m, N)] -= 2.0 * C;
    }
    T.assign(grid.size(), 0.0);
    Pi.assign(grid.size(), 0.0);
    for (int i = 0; i < n; ++i) {
        for (int b = 0; b < N; ++b) row[b] = Tm[static_cast<std::size_t>(b) * n + i];
        fft::backward(row);
        std::copy(row.begin(), row.end(), &T[grid.index(i, 0)]);
        for (int b = 0; b < N; ++b) row[b] = Pm[static_cast<std::size_t>(b) * n + i];
        fft::backward(row);
        std::copy(row.begin(), row.end(), &Pi[grid.index(i, 0)]);
    }
    fft::backward(rim);
    rimT = std::move(rim);
}

namespace {

std::shared_ptr<const DiskOperator> operator_for(const PolarGrid& g) {
    static std::mutex mtx;
    static std::map<std::tuple<int, int>, std::shared_ptr<const DiskOperator>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_tuple(g.n_r, g.n_theta);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto op = std::make_shared<const DiskOperator>(g);
    cache.emplace(key, op);
    return op;
}

}  // namespace

DiskSolution solve_disk(const BeltramiField& mu, const SolverConfig& cfg,
                        const std::vector<cplx>* warm_start) {
    cfg.validate();
    mu.validate();
    const PolarGrid& g = mu.grid;
    if (g.r_max != 1.0) throw PreconditionError("solve_disk: mu must cover the whole disk (r_max = 1)");
    for (std::size_t k = 0; k < mu.values.size(); ++k)
        if (mu.flagged(k, kDegenerate))
            throw PreconditionError("solve_disk: mu has degenerate (unset) nodes");
    const auto op = operator_for(g);
    const int N = g.n_theta;
    const std::size_t size = g.size();

    cplx mu0 = 0.0;
    for (int j = 0; j < N; ++j) mu0 += mu.at(0, j);
    mu0 /= double(N);
    const cplx cm0 = std::conj(mu0);

    std::vector<cplx> P(size), psi0(size), a(size), omega(size), next(size);
    std::vector<cplx> T, rimT, Pi;
    std::vector<cplx> dpsi0(size);
    for (int i = 0; i < g.n_r; ++i)
        for (int j = 0; j < N; ++j) {
            const std::size_t k = g.index(i, j);
            const cplx z = g.node(i, j);
            const cplx q = 1.0 + cm0 * z * z;
            P[k] = z + mu0 * std::conj(z);
            psi0[k] = -std::log(q);
            dpsi0[k] = -2.0 * cm0 * z / q;
            a[k] = (mu.values[k] - mu0) / P[k] + mu.values[k] * dpsi0[k];
        }
    if (warm_start && warm_start->size() == size)
        omega = *warm_start;
    else
        omega = a;

    StageReport stage;
    stage.label = "disk";
    bool done = false;
    for (int it = 0; it < cfg.neumann_max_iter; ++it) {
        op->apply(omega, T, rimT, Pi);
        double res = 0.0, fz_sup = 0.0;
        for (std::size_t k = 0; k < size; ++k) {
            next[k] = a[k] + mu.values[k] * Pi[k];
            const cplx e = std::exp(psi0[k] + T[k]);
            res = std::max(res, std::abs(P[k] * e) * std::abs(next[k] - omega[k]));
            fz_sup = std::max(fz_sup, std::abs(e * (1.0 + P[k] * (dpsi0[k] + Pi[k]))));
        }
        stage.residuals.push_back(res);
        ++stage.iterations;
        const bool small = res <= cfg.neumann_tol * (1.0 + fz_sup);
        if (small) {
            done = true;
            break;  // omega is the last density used in T and Pi
        }
        std::swap(omega, next);
        if (!std::isfinite(res)) break;
    }

    DiskSolution sol;
    sol.omega = omega;
    DiskGridMap F(g);
    F.source = "solve_disk";
    std::vector<cplx> rim(N);
    for (std::size_t k = 0; k < size; ++k) F.values[k] = P[k] * std::exp(psi0[k] + T[k]);
    double circle_dev = 0.0;
    for (int j = 0; j < N; ++j) {
        const cplx e = std::polar(1.0, g.angle(j));
        const cplx Pb = e + mu0 * std::conj(e);
        rim[j] = Pb * std::exp(-std::log(1.0 + cm0 * e * e) + rimT[j]);
        circle_dev = std::max(circle_dev, std::abs(std::abs(rim[j]) - 1.0));
    }
    F.center = 0.0;
    const Mobius M = Mobius::normalizing(rim[0], rim[N / 2], rim[N / 4]);
    for (auto& v : F.values) v = M(v);
    for (auto& v : rim) v = M(v);
    F.center = M(F.center);
    F.rim = std::move(rim);
    F.mu = mu.values;

    SolveReport& rep = sol.report;
    rep.pinned_images = {(*F.rim)[0], (*F.rim)[N / 2], (*F.rim)[N / 4]};
    rep.image_of_origin = F.center;
    rep.circle_deviation = circle_dev;
    stage.converged = done && residuals_nonincreasing(stage.residuals);
    std::ostringstream msg;
    if (!done) msg << "Neumann iteration did not reach tolerance in " << stage.iterations << " steps; ";
    else if (!stage.converged) msg << "residual history not monotone; ";
    if (circle_dev > 1e-4) msg << "circle invariance violated (" << circle_dev << "); ";
    rep.converged = stage.converged && circle_dev <= 1e-4;
    rep.message = msg.str();
    rep.stages.push_back(std::move(stage));
    sol.map = std::move(F);
    return sol;
}

}  // namespace lqc::beltrami
