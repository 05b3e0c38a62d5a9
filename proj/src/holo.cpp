#include "lqc/holo.hpp"

#include <algorithm>
#include <cmath>

#include "lqc/quadrature.hpp"

namespace lqc {

HoloDensity::HoloDensity(std::vector<cplx> coefficients, int quadrature_order)
    : coeffs_(std::move(coefficients)), order_(quadrature_order) {
    while (!coeffs_.empty() && coeffs_.back() == cplx(0.0)) coeffs_.pop_back();
    if (coeffs_.empty()) throw PreconditionError("HoloDensity: all coefficients are zero");
    if (order_ < 4) throw PreconditionError("HoloDensity: quadrature order must be >= 4");
}

cplx HoloDensity::operator()(cplx z) const {
    cplx v = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * z + *it;
    return v;
}

HoloDensity HoloDensity::scaled(double s) const {
    auto c = coeffs_;
    for (auto& x : c) x *= s;
    return HoloDensity(std::move(c), order_);
}

double HoloDensity::l1_norm() const {
    const auto rule = quad::gauss_legendre(order_);
    const int n_theta = 4 * order_;
    double total = 0.0;
    for (int k = 0; k < order_; ++k) {
        const double r = 0.5 * (rule.nodes[k] + 1.0);
        double ring = 0.0;
        for (int j = 0; j < n_theta; ++j)
            ring += std::abs((*this)(std::polar(r, kTwoPi * j / n_theta)));
        total += 0.5 * rule.weights[k] * r * ring * kTwoPi / n_theta;
    }
    return total;
}

double HoloDensity::sup_norm() const {
    double s = 0.0;
    for (int j = 0; j < 4096; ++j) s = std::max(s, std::abs((*this)(std::polar(1.0, kTwoPi * j / 4096))));
    return s;
}

}  // namespace lqc
