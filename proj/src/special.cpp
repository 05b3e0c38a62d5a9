#include <cmath>
#include <mutex>
#include <ostream>
#include <sstream>

#include "lqc/modulus.hpp"

namespace lqc::modulus {

double agm(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0)) throw DomainError("agm: arguments must be nonnegative");
    for (int k = 0; k < 64 && std::abs(a - b) > 1e-16 * a; ++k) {
        const double m = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = m;
    }
    return 0.5 * (a + b);
}

double elliptic_k(double r) {
    if (!(r >= 0.0 && r < 1.0)) throw DomainError("elliptic_k: modulus must lie in [0, 1)");
    return kPi / (2.0 * agm(1.0, std::sqrt((1.0 - r) * (1.0 + r))));
}

namespace {

// mu(r) with r' = sqrt(1 - r^2) supplied to keep precision near both ends.
double mu_pair(double r, double rc) { return 0.5 * kPi * agm(1.0, rc) / agm(1.0, r); }

}  // namespace

double grotzsch_mu(double r) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("grotzsch_mu: r must lie in (0, 1)");
    return mu_pair(r, std::sqrt((1.0 - r) * (1.0 + r)));
}

double tau_capacity(double s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("tau_capacity: s must be positive and finite");
    const double r = 1.0 / std::sqrt(1.0 + s);
    const double rc = std::sqrt(s / (1.0 + s));
    return kTauConstant * kPi / mu_pair(r, rc);
}

double tau_inverse(double v) {
    constexpr double lo_s = 1e-12, hi_s = 1e12;
    const double top = tau_capacity(lo_s), bottom = tau_capacity(hi_s);
    if (!(v >= bottom && v <= top)) {
        std::ostringstream msg;
        msg << "tau_inverse: value " << v << " outside computed range [" << bottom << ", " << top << "]";
        throw RangeError(msg.str());
    }
    double lo = std::log(lo_s), hi = std::log(hi_s);
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (tau_capacity(std::exp(mid)) > v) lo = mid;
        else hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

std::vector<TauCalibrationPoint> calibrate_tau() {
    std::vector<TauCalibrationPoint> out;
    for (double s : {0.5, 1.0, 2.0}) {
        TauCalibrationPoint p;
        p.s = s;
        p.formula = tau_capacity(s);
        p.oracle = grid_capacity(0.0, -1.0, s).value;
        p.relative_error = std::abs(p.formula - p.oracle) / p.oracle;
        out.push_back(p);
    }
    return out;
}

bool tau_calibrated() {
    static std::once_flag once;
    static bool ok = false;
    std::call_once(once, [] {
        ok = true;
        for (const auto& p : calibrate_tau()) ok = ok && p.relative_error <= 0.02;
    });
    return ok;
}

std::string to_string(TableSource s) {
    return s == TableSource::IdentityFormula ? "identity_formula" : "grid_oracle";
}

CapacityTable build_capacity_table(const std::vector<double>& s_values, TableSource source) {
    for (std::size_t k = 0; k < s_values.size(); ++k)
        if (!(s_values[k] > 0.0) || (k > 0 && !(s_values[k] > s_values[k - 1])))
            throw PreconditionError("build_capacity_table: s values must be positive and increasing");
    if (source == TableSource::IdentityFormula && !tau_calibrated())
        throw NumericalError("build_capacity_table: tau formula disagrees with the grid oracle by more than 2%");
    CapacityTable t;
    t.source = source;
    t.s_values = s_values;
    for (double s : s_values)
        t.tau_values.push_back(source == TableSource::IdentityFormula ? tau_capacity(s)
                                                                      : grid_capacity(0.0, -1.0, s).value);
    for (std::size_t k = 1; k < t.tau_values.size(); ++k)
        if (!(t.tau_values[k] < t.tau_values[k - 1]))
            throw NumericalError("build_capacity_table: tabulated tau is not strictly decreasing");
    return t;
}

void write_csv(std::ostream& os, const CapacityTable& t) {
    os << "s,tau\n";
    os.precision(17);
    for (std::size_t k = 0; k < t.s_values.size(); ++k) os << t.s_values[k] << ',' << t.tau_values[k] << '\n';
}

}  // namespace lqc::modulus
