#include "lqc/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "lqc/mapcore.hpp"
#include "lqc/mobius.hpp"
#include "lqc/modulus.hpp"

namespace lqc::boundary {

namespace {

std::vector<double> unwrap(const std::vector<cplx>& v) {
    std::vector<double> a(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        a[k] = std::arg(v[k]);
        if (k > 0) a[k] = a[k - 1] + std::remainder(a[k] - a[k - 1], kTwoPi);
    }
    return a;
}

bool is_monotone(const std::vector<cplx>& v) {
    if (v.size() < 3) return false;
    const auto a = unwrap(v);
    for (std::size_t k = 1; k < a.size(); ++k)
        if (!(a[k] > a[k - 1])) return false;
    const double closing = a.front() + kTwoPi;
    return closing > a.back() && std::abs(closing - a.back()) < kPi;
}

BoundaryTrace make_trace(std::vector<cplx> values) {
    BoundaryTrace h;
    const int n = static_cast<int>(values.size());
    h.angles.resize(n);
    for (int j = 0; j < n; ++j) h.angles[j] = kTwoPi * j / n;
    h.values = std::move(values);
    h.monotone = is_monotone(h.values);
    return h;
}

BoundaryTrace trace_levels(const std::function<cplx(cplx)>& f, const std::vector<double>& eps, int n) {
    if (eps.empty() || n < 8) throw PreconditionError("boundary_trace: need epsilons and at least 8 samples");
    for (std::size_t k = 0; k < eps.size(); ++k)
        if (!(eps[k] >= 0.0 && eps[k] < 1.0) || (k > 0 && !(eps[k] < eps[k - 1])))
            throw PreconditionError("boundary_trace: epsilons must be decreasing in [0, 1)");
    std::vector<cplx> prev, cur(n);
    std::vector<double> diffs;
    for (double e : eps) {
        for (int j = 0; j < n; ++j) {
            const cplx w = f(std::polar(1.0 - e, kTwoPi * j / n));
            const double a = std::abs(w);
            if (!(a > 0.0)) throw NumericalError("boundary_trace: map vanishes near the circle");
            cur[j] = w / a;
        }
        if (!prev.empty()) {
            double d = 0.0;
            for (int j = 0; j < n; ++j) d = std::max(d, std::abs(cur[j] - prev[j]));
            diffs.push_back(d);
        }
        prev = cur;
    }
    // Smooth maps move by O(eps) between coarse levels; only the pair nearest
    // the circle decides.
    if (!diffs.empty() && !(diffs.back() < 1e-3)) throw ExtensionError(eps, diffs);
    return make_trace(std::move(cur));
}

}  // namespace

ExtensionError::ExtensionError(std::vector<double> eps, std::vector<double> diffs)
    : DomainError([&] {
          std::ostringstream m;
          m << "no continuous extension detected: level differences";
          for (double d : diffs) m << ' ' << d;
          return m.str();
      }()),
      epsilons(std::move(eps)),
      level_differences(std::move(diffs)) {}

std::vector<double> default_epsilons() { return {1e-2, 1e-3, 1e-4, 0.0}; }

double BoundaryTrace::lift(double phi) const {
    const int n = size();
    if (n == 0) throw PreconditionError("BoundaryTrace: empty");
    // Unwrapped samples, cached per call; traces are small enough.
    const auto a = unwrap(values);
    const double turns = std::floor(phi / kTwoPi);
    const double x = (phi - turns * kTwoPi) / kTwoPi * n;
    int j = static_cast<int>(std::floor(x));
    if (j >= n) j = n - 1;
    const double w = x - j;
    const double a0 = a[j];
    const double a1 = j + 1 < n ? a[j + 1] : a[0] + kTwoPi;
    return (1 - w) * a0 + w * a1 + turns * kTwoPi;
}

cplx BoundaryTrace::operator()(double phi) const { return std::polar(1.0, lift(phi)); }

double BoundaryTrace::max_step() const {
    const auto a = unwrap(values);
    double m = a.front() + kTwoPi - a.back();
    for (std::size_t k = 1; k < a.size(); ++k) m = std::max(m, a[k] - a[k - 1]);
    return m;
}

BoundaryTrace boundary_trace(const DiskGridMap& map, const std::vector<double>& epsilons, int n_samples) {
    map.grid.validate();
    const double reach = map.rim ? 1.0 : map.grid.r_max;
    if (1.0 - epsilons.back() > reach + 1e-12)
        throw PreconditionError("boundary_trace: map not defined up to radius 1 - min(epsilons)");
    return trace_levels([&](cplx z) { return map.sample(z); }, epsilons, n_samples);
}

BoundaryTrace boundary_trace(const std::function<cplx(cplx)>& map, const std::vector<double>& epsilons,
                             int n_samples) {
    return trace_levels(map, epsilons, n_samples);
}

BoundaryTrace inverse_trace(const BoundaryTrace& h) {
    if (!h.monotone) throw PreconditionError("inverse_trace: trace is not monotone");
    const int n = h.size();
    const auto a = unwrap(h.values);
    // Extended lift over one and a bit turns so every target is bracketed.
    std::vector<double> th, la;
    for (int k = -1; k <= 1; ++k)
        for (int j = 0; j < n; ++j) {
            th.push_back(h.angles[j] + k * kTwoPi);
            la.push_back(a[j] + k * kTwoPi);
        }
    std::vector<cplx> out(n);
    for (int j = 0; j < n; ++j) {
        // lift of phi_j into [a_0, a_0 + 2 pi)
        const double phi = kTwoPi * j / n;
        const double target = phi + kTwoPi * std::ceil((a.front() - phi) / kTwoPi);
        // first index with la >= target
        const auto it = std::lower_bound(la.begin(), la.end(), target);
        const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(it - la.begin()), 1, la.size() - 1);
        const double w = (target - la[k - 1]) / (la[k] - la[k - 1]);
        out[j] = std::polar(1.0, (1 - w) * th[k - 1] + w * th[k]);
    }
    return make_trace(std::move(out));
}

BoundaryTrace normalized(const BoundaryTrace& h) {
    const Mobius M = Mobius::normalizing(h(0.0), h(kPi), h(kPi / 2));
    BoundaryTrace out = h;
    for (auto& v : out.values) {
        v = M(v);
        v /= std::abs(v);
    }
    return out;
}

BoundaryTrace reflected(const BoundaryTrace& h) {
    const int n = h.size();
    std::vector<cplx> out(n);
    for (int j = 0; j < n; ++j) out[j] = std::conj(h.values[(n - j) % n]);
    return make_trace(std::move(out));
}

double lambda_qs(const BoundaryTrace& h, double xi_angle, double t) {
    if (!(t > 0.0 && t < kPi)) throw DomainError("lambda_qs: t must lie in (0, pi)");
    if (!h.monotone) throw PreconditionError("lambda_qs: trace is not monotone");
    const cplx c = h(xi_angle);
    const double num = std::abs(h(xi_angle + t) - c);
    const double den = std::abs(c - h(xi_angle - t));
    if (den < 1e-14) throw NumericalError("lambda_qs: degenerate denominator");
    return num / den;
}

double lambda_qs_error(const BoundaryTrace& h, double xi_angle, double t) {
    const double step = kTwoPi / h.size();
    const double dt = std::min(step, 0.5 * std::min(t, kPi - t));
    const double slope = (lambda_qs(h, xi_angle, t + dt) - lambda_qs(h, xi_angle, t - dt)) / (2 * dt);
    return step * std::abs(slope);
}

double lambda_bound(const growth::GrowthFunction& rho, double t) {
    if (!(t > 0.0 && t <= kPi / 2)) throw DomainError("lambda_bound: t must lie in (0, pi/2]");
    const double s = 2.0 * std::sin(t / 4.0), S = 2.0 * std::sin(3.0 * t / 4.0);
    const double I = growth::boundary_divergence_integral(rho, s, S).value;
    double inv;
    try {
        inv = modulus::tau_inverse(2.0 / I);
    } catch (const RangeError&) {
        return std::numeric_limits<double>::infinity();
    }
    const double lambda = 1.0 / inv;
    return std::max(lambda, 1.0 / lambda);
}

std::vector<std::pair<double, double>> sample_grid(int n_xi, int n_t, double t_min, double t_max) {
    std::vector<std::pair<double, double>> out;
    for (int a = 0; a < n_xi; ++a)
        for (int b = 0; b < n_t; ++b)
            out.emplace_back(kTwoPi * a / n_xi, n_t == 1 ? t_min : t_min + (t_max - t_min) * b / (n_t - 1));
    return out;
}

QsReport verify_qs_theorem(const BoundaryTrace& h, const growth::GrowthFunction& rho,
                           const std::vector<std::pair<double, double>>& samples) {
    QsReport rep;
    rep.monotone_trace = h.monotone;
    const BoundaryTrace g = inverse_trace(h);
    rep.all_hold = true;
    for (auto [xi, t] : samples) {
        QsSample s;
        s.xi_angle = xi;
        s.t = t;
        s.ratio = lambda_qs(g, xi, t);
        s.bound = lambda_bound(rho, t);
        s.lower_margin = s.ratio - 1.0 / s.bound;
        s.upper_margin = s.bound - s.ratio;
        s.interpolation_error = lambda_qs_error(g, xi, t);
        s.holds = s.lower_margin >= 0.0 && s.upper_margin >= 0.0;
        rep.all_hold = rep.all_hold && s.holds;
        rep.samples.push_back(s);
    }
    return rep;
}

QsReport verify_qs_theorem(const DiskGridMap& map, const growth::GrowthFunction& rho,
                           const std::vector<std::pair<double, double>>& samples) {
    const BoundaryTrace h = normalized(boundary_trace(map));
    QsReport rep = verify_qs_theorem(h, rho, samples);
    rep.inverse_k_rho = mapcore::k_rho_inverse(mapcore::distortion_field(map), map, rho, 0.95).value;
    return rep;
}

void write_csv(std::ostream& os, const BoundaryTrace& h) {
    os << "theta,re,im\n";
    os.precision(17);
    for (int j = 0; j < h.size(); ++j) os << h.angles[j] << ',' << h.values[j].real() << ',' << h.values[j].imag() << '\n';
}

void to_json(nlohmann::json& j, const QsSample& s) {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json("inf"); };
    j = {{"xi_angle", s.xi_angle}, {"t", s.t}, {"ratio", s.ratio}, {"bound", num(s.bound)},
         {"lower_margin", s.lower_margin}, {"upper_margin", num(s.upper_margin)},
         {"interpolation_error", s.interpolation_error}, {"holds", s.holds}};
}

void to_json(nlohmann::json& j, const QsReport& r) {
    j = {{"samples", r.samples}, {"all_hold", r.all_hold}, {"inverse_k_rho", r.inverse_k_rho},
         {"monotone_trace", r.monotone_trace}};
}

}  // namespace lqc::boundary
