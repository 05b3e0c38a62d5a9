#pragma once

#include <vector>

#include "lqc/common.hpp"

namespace lqc {

/// Polynomial phi(z) = sum_j c_j z^j standing in for an integrable
/// holomorphic function on the disk.
class HoloDensity {
public:
    explicit HoloDensity(std::vector<cplx> coefficients, int quadrature_order = 64);

    static HoloDensity constant(cplx c = 1.0) { return HoloDensity({c}); }

    cplx operator()(cplx z) const;
    const std::vector<cplx>& coefficients() const { return coeffs_; }
    int quadrature_order() const { return order_; }
    HoloDensity scaled(double s) const;

    /// int_Delta |phi| dA by Gauss-Legendre in r times the trapezoid rule in
    /// theta (4 * order angles).
    double l1_norm() const;
    /// max |phi| over the closed disk, estimated on the boundary circle
    /// (maximum principle) with 4096 samples.
    double sup_norm() const;

private:
    std::vector<cplx> coeffs_;
    int order_;
};

}  // namespace lqc
