#include "lqc/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "lqc/quadrature.hpp"

namespace lqc::growth {

GrowthFunction GrowthFunction::constant() { return {Kind::Constant, 0.0}; }
GrowthFunction GrowthFunction::log_normalized() { return {Kind::LogNormalized, 0.0}; }

GrowthFunction GrowthFunction::radial_family(double a) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw DomainError("radialFamily: parameter a must be positive");
    return {Kind::RadialFamily, a};
}

GrowthFunction GrowthFunction::power_law(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw DomainError("powerLaw: parameter beta must be positive");
    return {Kind::PowerLaw, beta};
}

GrowthFunction GrowthFunction::user_table(std::vector<std::pair<double, double>> samples) {
    if (samples.empty()) throw PreconditionError("userTable: no samples");
    std::sort(samples.begin(), samples.end());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto [r, v] = samples[i];
        if (!(r >= 0.0 && r < 1.0)) throw PreconditionError("userTable: radius outside [0,1)");
        if (!(v >= 1.0)) throw PreconditionError("userTable: values must be >= 1");
        if (i > 0 && v < samples[i - 1].second)
            throw PreconditionError("userTable: values must be nondecreasing in r");
        if (i > 0 && r == samples[i - 1].first)
            throw PreconditionError("userTable: duplicate radius");
    }
    GrowthFunction g{Kind::UserTable, 0.0};
    g.samples_ = std::move(samples);
    return g;
}

std::string GrowthFunction::name() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Constant: return "constant";
        case Kind::LogNormalized: return "logNormalized";
        case Kind::RadialFamily: os << "radialFamily(a=" << param_ << ")"; return os.str();
        case Kind::PowerLaw: os << "powerLaw(beta=" << param_ << ")"; return os.str();
        case Kind::UserTable: os << "userTable(" << samples_.size() << " samples)"; return os.str();
    }
    return "unknown";
}

// r and u = 1 - r are both passed so each can be used where it is accurate.
double GrowthFunction::radial_profile(double r, double u) const {
    const double a = param_;
    if (a == 1.0) return 1.0;
    if (r < 1e-8) {
        // A(r) = 1 + (a-1) r / 2 + O(r^2)
        const double A = 1.0 + 0.5 * (a - 1.0) * r;
        return std::max(A, 1.0 / A);
    }
    const double logu = (u > 0.5) ? std::log1p(-r) : std::log(u);
    const double num = -std::expm1(a * logu);                 // 1 - u^a
    const double den = a * r * std::exp((a - 1.0) * logu);  // a r u^(a-1)
    const double A = num / den;
    return std::max(A, 1.0 / A);
}

double GrowthFunction::operator()(double r) const {
    if (!(r >= 0.0 && r < 1.0)) throw DomainError("eval_rho: r must lie in [0,1)");
    switch (kind_) {
        case Kind::Constant: return 1.0;
        case Kind::LogNormalized: return 1.0 - std::log1p(-r);
        case Kind::RadialFamily: return radial_profile(r, 1.0 - r);
        case Kind::PowerLaw: return std::exp(-param_ * std::log1p(-r));
        case Kind::UserTable: {
            if (r <= samples_.front().first) return samples_.front().second;
            if (r >= samples_.back().first) return samples_.back().second;
            auto it = std::upper_bound(samples_.begin(), samples_.end(), r,
                                       [](double x, const auto& s) { return x < s.first; });
            const auto& [r1, v1] = *it;
            const auto& [r0, v0] = *(it - 1);
            return v0 + (v1 - v0) * (r - r0) / (r1 - r0);
        }
    }
    return 1.0;
}

double GrowthFunction::at_complement(double u) const {
    if (!(u > 0.0 && u <= 1.0)) throw DomainError("rho: complement u must lie in (0,1]");
    switch (kind_) {
        case Kind::LogNormalized: return 1.0 - std::log(u);
        case Kind::RadialFamily: return radial_profile(1.0 - u, u);
        case Kind::PowerLaw: return std::exp(-param_ * std::log(u));
        default: return (*this)(std::min(1.0 - u, std::nextafter(1.0, 0.0)));
    }
}

void to_json(nlohmann::json& j, const GrowthFunction& rho) {
    switch (rho.kind()) {
        case Kind::Constant: j = {{"kind", "constant"}}; break;
        case Kind::LogNormalized: j = {{"kind", "logNormalized"}}; break;
        case Kind::RadialFamily: j = {{"kind", "radialFamily"}, {"a", rho.parameter()}}; break;
        case Kind::PowerLaw: j = {{"kind", "powerLaw"}, {"beta", rho.parameter()}}; break;
        case Kind::UserTable: {
            j = {{"kind", "userTable"}};
            auto arr = nlohmann::json::array();
            for (const auto& [r, v] : rho.samples()) arr.push_back({r, v});
            j["samples"] = arr;
            break;
        }
    }
}

GrowthFunction growth_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw PreconditionError("growth function JSON needs a string field \"kind\"");
    const std::string kind = j["kind"];
    if (kind == "constant") return GrowthFunction::constant();
    if (kind == "logNormalized") return GrowthFunction::log_normalized();
    if (kind == "radialFamily") {
        if (!j.contains("a") || !j["a"].is_number())
            throw PreconditionError("radialFamily needs numeric \"a\"");
        return GrowthFunction::radial_family(j["a"].get<double>());
    }
    if (kind == "powerLaw") {
        if (!j.contains("beta") || !j["beta"].is_number())
            throw PreconditionError("powerLaw needs numeric \"beta\"");
        return GrowthFunction::power_law(j["beta"].get<double>());
    }
    if (kind == "userTable") {
        if (!j.contains("samples") || !j["samples"].is_array())
            throw PreconditionError("userTable needs \"samples\": [[r, value], ...]");
        std::vector<std::pair<double, double>> s;
        for (const auto& p : j["samples"]) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                throw PreconditionError("userTable samples must be [r, value] pairs");
            s.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
        return GrowthFunction::user_table(std::move(s));
    }
    throw PreconditionError("unknown growth function kind: " + kind);
}

Estimate rho_star(const GrowthFunction& rho, double r, double xi_angle) {
    if (!(r > 0.0 && r < 2.0)) throw DomainError("rho_star: r must lie in (0,2)");
    // |xi + r e^{i theta}| < 1  <=>  cos(theta - xi_angle) < -r/2, an arc with
    // end angles xi_angle +- theta0. At angular distance d from the nearer end,
    // 1 - |z|^2 = 2 r sin(theta0) sin(d) - 2 r^2 sin^2(d/2), which stays
    // accurate where the arc meets the unit circle.
    const double theta0 = std::acos(-0.5 * r);
    const double s0 = std::sin(theta0);
    auto integrand = [&](double, double da, double db) {
        const double d = std::min(da, db);
        const double sh = std::sin(0.5 * d);
        const double one_minus_sq = 2.0 * r * (s0 * std::sin(d) - r * sh * sh);
        if (!(one_minus_sq > 0.0)) return 0.0;
        const double modulus = std::sqrt(std::max(0.0, 1.0 - one_minus_sq));
        return rho.at_complement(std::min(1.0, one_minus_sq / (1.0 + modulus)));
    };
    quad::Options opts;
    opts.rel_tol = 1e-12;
    const auto res =
        quad::integrate_tanh_sinh(integrand, xi_angle + theta0, xi_angle + kTwoPi - theta0, opts);
    return {res.value, res.error, res.converged};
}

Estimate boundary_divergence_integral(const GrowthFunction& rho, double t, double R) {
    if (!(t > 0.0)) throw DomainError("boundary_divergence_integral: t must be positive");
    if (!(R < 2.0)) throw DomainError("boundary_divergence_integral: R must be < 2");
    if (!(t < R)) throw DomainError("boundary_divergence_integral: requires t < R");
    bool inner_ok = true;
    auto integrand = [&](double x) {
        const auto rs = rho_star(rho, std::exp(x));
        inner_ok = inner_ok && rs.converged;
        return 1.0 / rs.value;
    };
    quad::Options opts;
    opts.rel_tol = 1e-10;
    const auto res = quad::integrate(integrand, std::log(t), std::log(R), opts);
    return {res.value, res.error, res.converged && inner_ok};
}

std::string to_string(IntegrabilityVerdict v) {
    switch (v) {
        case IntegrabilityVerdict::Finite: return "finite";
        case IntegrabilityVerdict::Divergent: return "divergent";
        default: return "inconclusive";
    }
}

std::string to_string(DivergenceVerdict v) {
    switch (v) {
        case DivergenceVerdict::Divergent: return "divergent";
        case DivergenceVerdict::Convergent: return "convergent";
        default: return "inconclusive";
    }
}

std::vector<double> default_t_grid(double R, int levels) {
    std::vector<double> t;
    for (int k = 1; k <= levels; ++k) t.push_back(std::ldexp(R, -k));
    return t;
}

namespace {

// Local power-law exponent p of rho(1-u) ~ C u^{-p} between u1 > u2.
double tail_exponent(const GrowthFunction& rho, double u1, double u2) {
    return (std::log(rho.at_complement(u2)) - std::log(rho.at_complement(u1))) /
           (std::log(u1) - std::log(u2));
}

void check_integrability(const GrowthFunction& rho, AllowabilityReport& rep) {
    auto& out = rep.integrability;
    const double p_far = tail_exponent(rho, 1e-6, 1e-9);
    const double p_near = tail_exponent(rho, 1e-9, 1e-12);
    out.tail_exponent = p_near;
    constexpr double kDivergentExponent = 1.0 - 2e-3;
    if (p_near >= kDivergentExponent && p_far >= kDivergentExponent - 0.05) {
        out.verdict = IntegrabilityVerdict::Divergent;
        out.message = "rho(1-u) grows at least like 1/u near the boundary";
        out.value = std::numeric_limits<double>::infinity();
        return;
    }
    if (p_near >= kDivergentExponent || std::abs(p_near - p_far) > 0.25) {
        out.verdict = IntegrabilityVerdict::Inconclusive;
        std::ostringstream os;
        os << "unstable boundary exponent estimate (" << p_far << " vs " << p_near << ")";
        out.message = os.str();
        return;
    }
    // int_0^1 rho(r) dr = int_0^inf rho(1 - e^{-x}) e^{-x} dx, truncated at X
    // with the power-law tail added analytically.
    const double p = std::max(p_near, 0.0);
    const double X = std::min(700.0, 40.0 / std::max(1.0 - p, 1e-3));
    quad::Options opts;
    opts.rel_tol = 1e-10;
    opts.max_subdivisions = 20000;
    const auto body = quad::integrate(
        [&](double x) { return rho.at_complement(std::exp(-x)) * std::exp(-x); }, 0.0, X, opts);
    const double uX = std::exp(-X);
    const double tail = rho.at_complement(uX) * uX / (1.0 - p);
    out.value = body.value + tail;
    if (!body.converged) {
        out.verdict = IntegrabilityVerdict::Inconclusive;
        out.message = "quadrature of int rho did not converge";
        return;
    }
    out.verdict = IntegrabilityVerdict::Finite;
}

void check_divergence(const GrowthFunction& rho, const std::vector<double>& t_grid,
                      AllowabilityReport& rep) {
    auto& out = rep.boundary_divergence;
    const double R = rep.R_used;
    double I = 0.0;
    double prev_t = R;
    bool quad_ok = true;
    for (double t : t_grid) {
        const auto piece = boundary_divergence_integral(rho, t, prev_t);
        quad_ok = quad_ok && piece.converged;
        I += piece.value;
        rep.samples.emplace_back(t, I);
        prev_t = t;
    }
    const std::size_t n = rep.samples.size();
    if (n < 4) {
        out.message = "t-grid too short to classify";
        return;
    }
    // Least-squares slope of I against log(1/t) over the trailing half.
    const std::size_t start = n / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(n - start);
    for (std::size_t k = start; k < n; ++k) {
        const double x = -std::log(rep.samples[k].first);
        const double y = rep.samples[k].second;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    out.slope_estimate = slope;
    const double last_increment = rep.samples[n - 1].second - rep.samples[n - 2].second;
    const double prev_increment = rep.samples[n - 2].second - rep.samples[n - 3].second;
    if (!quad_ok) {
        out.message = "rho* quadrature did not converge on part of the grid";
        return;
    }
    if (slope > 0.05 && last_increment > 0.0) {
        out.verdict = DivergenceVerdict::Divergent;
        return;
    }
    if (last_increment < 1e-6 && prev_increment < 1e-6) {
        out.verdict = DivergenceVerdict::Convergent;
        return;
    }
    std::ostringstream os;
    os << "slope " << slope << " below 0.05 but increments (" << last_increment
       << ") still above 1e-6";
    out.message = os.str();
}

}  // namespace

AllowabilityReport check_allowable(const GrowthFunction& rho, double R,
                                   std::vector<double> t_grid) {
    if (!(R > 0.0 && R < 2.0)) throw DomainError("check_allowable: R must lie in (0,2)");
    if (t_grid.empty()) t_grid = default_t_grid(R);
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        if (!(t_grid[k] > 0.0 && t_grid[k] < R))
            throw PreconditionError("check_allowable: t-grid values must lie in (0, R)");
        if (k > 0 && !(t_grid[k] < t_grid[k - 1]))
            throw PreconditionError("check_allowable: t-grid must be strictly decreasing");
    }
    AllowabilityReport rep;
    rep.R_used = R;
    rep.normalization_ok = std::abs(rho(0.0) - 1.0) < 1e-12;
    check_integrability(rho, rep);
    if (rep.integrability.verdict == IntegrabilityVerdict::Divergent) {
        // rho(1-u) >= c/u makes the arc integral infinite on every circle, so
        // 1/rho* vanishes and I(t) stays 0.
        rep.boundary_divergence.verdict = DivergenceVerdict::Convergent;
        rep.boundary_divergence.message = "rho* is infinite on every circle; I(t) = 0";
        for (double t : t_grid) rep.samples.emplace_back(t, 0.0);
        return rep;
    }
    check_divergence(rho, t_grid, rep);
    return rep;
}

void to_json(nlohmann::json& j, const AllowabilityReport& rep) {
    j = nlohmann::json::object();
    j["normalization_ok"] = rep.normalization_ok;
    nlohmann::json integ = {{"verdict", to_string(rep.integrability.verdict)},
                            {"tail_exponent", rep.integrability.tail_exponent}};
    if (rep.integrability.verdict == IntegrabilityVerdict::Finite)
        integ["value"] = rep.integrability.value;
    if (!rep.integrability.message.empty()) integ["message"] = rep.integrability.message;
    j["integrability"] = integ;
    nlohmann::json div = {{"verdict", to_string(rep.boundary_divergence.verdict)},
                          {"slope_estimate", rep.boundary_divergence.slope_estimate}};
    if (!rep.boundary_divergence.message.empty())
        div["message"] = rep.boundary_divergence.message;
    j["boundary_divergence"] = div;
    j["R_used"] = rep.R_used;
    j["allowable"] = rep.allowable();
}

}  // namespace lqc::growth
