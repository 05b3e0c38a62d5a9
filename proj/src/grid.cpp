#include "lqc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace lqc {

int PolarGrid::rings_within(double r) const {
    int n = 0;
    while (n < n_r && radius(n) <= r) ++n;
    return n;
}

void PolarGrid::validate() const {
    if (n_r < 3) throw PreconditionError("grid: need at least 3 rings");
    if (n_theta < 4 || n_theta % 4 != 0)
        throw PreconditionError("grid: n_theta must be a positive multiple of 4");
    if (!(r_max > 0.0 && r_max <= 1.0)) throw PreconditionError("grid: r_max must lie in (0,1]");
}

DiskGridMap::DiskGridMap(const PolarGrid& g) : grid(g), values(g.size()) {}

DiskGridMap DiskGridMap::from_function(const PolarGrid& g, const std::function<cplx(cplx)>& f,
                                       std::string source, bool with_rim) {
    g.validate();
    DiskGridMap m(g);
    m.source = std::move(source);
    for (int i = 0; i < g.n_r; ++i)
        for (int j = 0; j < g.n_theta; ++j) m.at(i, j) = f(g.node(i, j));
    m.center = f(cplx(0.0, 0.0));
    if (with_rim) {
        std::vector<cplx> rim(g.n_theta);
        for (int j = 0; j < g.n_theta; ++j) rim[j] = f(std::polar(1.0, g.angle(j)));
        m.rim = std::move(rim);
    }
    return m;
}

namespace {

// Lagrange weights for nodes x[0..3] at t.
void lagrange4(const double* x, double t, double* w) {
    for (int a = 0; a < 4; ++a) {
        double v = 1.0;
        for (int b = 0; b < 4; ++b)
            if (b != a) v *= (t - x[b]) / (x[a] - x[b]);
        w[a] = v;
    }
}

double wrap_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0) t += kTwoPi;
    return t;
}

}  // namespace

cplx interpolate_periodic(const cplx* row, int n, double theta) {
    const double h = kTwoPi / n;
    const double s = wrap_angle(theta) / h;
    int j = static_cast<int>(std::floor(s));
    const double t = s - j;
    if (t == 0.0) return row[((j % n) + n) % n];
    const double x[4] = {-1.0, 0.0, 1.0, 2.0};
    double w[4];
    lagrange4(x, t, w);
    cplx v = 0.0;
    for (int a = 0; a < 4; ++a) v += w[a] * row[(((j - 1 + a) % n) + n) % n];
    return v;
}

cplx DiskGridMap::sample(cplx z) const {
    const double r = std::abs(z);
    if (r == 0.0) return center;
    const double theta = std::arg(z);
    const int n = grid.n_r;
    const int nt = grid.n_theta;
    // Virtual radial nodes: two mirrored rings, the grid rings, and the rim.
    const int n_virtual = n + 2 + (rim ? 1 : 0);
    auto node_radius = [&](int k) {
        if (k < 2) return -grid.radius(1 - k);
        if (k < n + 2) return grid.radius(k - 2);
        return 1.0;
    };
    auto node_value = [&](int k) {
        if (k < 2) return interpolate_periodic(&values[grid.index(1 - k, 0)], nt, theta + kPi);
        if (k < n + 2) return interpolate_periodic(&values[grid.index(k - 2, 0)], nt, theta);
        return interpolate_periodic(rim->data(), nt, theta);
    };
    int k = 1;
    while (k + 1 < n_virtual - 1 && node_radius(k + 1) <= r) ++k;
    int first = std::clamp(k - 1, 0, n_virtual - 4);
    double x[4], w[4];
    for (int a = 0; a < 4; ++a) x[a] = node_radius(first + a);
    lagrange4(x, r, w);
    cplx v = 0.0;
    for (int a = 0; a < 4; ++a) v += w[a] * node_value(first + a);
    return v;
}

BeltramiField::BeltramiField(const PolarGrid& g) : grid(g), values(g.size()) {}

BeltramiField BeltramiField::from_function(const PolarGrid& g,
                                           const std::function<cplx(cplx)>& mu) {
    g.validate();
    BeltramiField f(g);
    for (int i = 0; i < g.n_r; ++i)
        for (int j = 0; j < g.n_theta; ++j) f.at(i, j) = mu(g.node(i, j));
    return f;
}

void BeltramiField::set_flag(std::size_t k, std::uint8_t bit) {
    if (flags.empty()) flags.assign(values.size(), 0);
    flags[k] |= bit;
}

double BeltramiField::ess_sup() const {
    double s = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k)
        if (!flagged(k, kDegenerate)) s = std::max(s, std::abs(values[k]));
    return s;
}

double BeltramiField::sup_within(double r) const {
    double s = 0.0;
    const int n = grid.rings_within(r);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < grid.n_theta; ++j) {
            const std::size_t k = grid.index(i, j);
            if (!flagged(k, kDegenerate)) s = std::max(s, std::abs(values[k]));
        }
    return s;
}

void BeltramiField::validate() const {
    grid.validate();
    if (values.size() != grid.size()) throw PreconditionError("mu: size does not match grid");
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (flagged(k, kDegenerate)) continue;
        const double a = std::abs(values[k]);
        if (!(a < 1.0)) {
            std::ostringstream os;
            os << "mu: |mu| = " << a << " >= 1 at ring " << k / grid.n_theta << ", angle index "
               << k % grid.n_theta;
            throw PreconditionError(os.str());
        }
    }
}

namespace {

void write_values(std::ostream& os, const char* tag, const PolarGrid& g,
                  const std::vector<cplx>& v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s v1 %d %d %.17g\n", tag, g.n_r, g.n_theta, g.r_max);
    os << buf;
    for (const cplx& c : v) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", c.real(), c.imag());
        os << buf;
    }
}

std::pair<PolarGrid, std::vector<cplx>> read_values(std::istream& is, const std::string& tag) {
    std::string line;
    if (!std::getline(is, line)) throw PreconditionError(tag + ": empty input");
    std::istringstream hs(line);
    std::string t, version;
    PolarGrid g;
    if (!(hs >> t >> version >> g.n_r >> g.n_theta >> g.r_max) || t != tag || version != "v1")
        throw PreconditionError(tag + ": bad header line '" + line + "'");
    g.validate();
    std::vector<cplx> v(g.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        double re, im;
        if (!(is >> re >> im)) {
            std::ostringstream os;
            os << tag << ": expected " << v.size() << " values, got " << k;
            throw PreconditionError(os.str());
        }
        v[k] = {re, im};
    }
    return {g, std::move(v)};
}

}  // namespace

void write_grid(std::ostream& os, const DiskGridMap& map) {
    write_values(os, "LQCGRID", map.grid, map.values);
}

DiskGridMap read_grid(std::istream& is) {
    auto [g, v] = read_values(is, "LQCGRID");
    DiskGridMap m(g);
    m.values = std::move(v);
    m.source = "file";
    // f(0) from the innermost ring average
    cplx s = 0.0;
    for (int j = 0; j < g.n_theta; ++j) s += m.at(0, j);
    m.center = s / static_cast<double>(g.n_theta);
    return m;
}

void write_mu(std::ostream& os, const BeltramiField& mu) {
    write_values(os, "LQCMU", mu.grid, mu.values);
}

BeltramiField read_mu(std::istream& is) {
    auto [g, v] = read_values(is, "LQCMU");
    BeltramiField f(g);
    f.values = std::move(v);
    f.validate();
    return f;
}

}  // namespace lqc
