#pragma once

#include <array>

#include "lqc/common.hpp"

namespace lqc {

/// z -> (a z + b) / (c z + d).
struct Mobius {
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

    cplx operator()(cplx z) const { return (a * z + b) / (c * z + d); }
    Mobius operator*(const Mobius& o) const {  // (this o o)(z) = this(o(z))
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mobius inverse() const { return {d, -b, -c, a}; }

    /// Sends (z1, z2, z3) to (0, infinity, 1).
    static Mobius to_zero_inf_one(cplx z1, cplx z2, cplx z3) {
        return {z3 - z2, -z1 * (z3 - z2), z3 - z1, -z2 * (z3 - z1)};
    }
    /// The unique Mobius map with z_k -> w_k.
    static Mobius from_triples(const std::array<cplx, 3>& z, const std::array<cplx, 3>& w) {
        return to_zero_inf_one(w[0], w[1], w[2]).inverse() * to_zero_inf_one(z[0], z[1], z[2]);
    }
    /// Disk automorphism z -> e^{i phi} (z - p) / (1 - conj(p) z).
    static Mobius disk_automorphism(cplx p, double phi = 0.0) {
        const cplx e = std::polar(1.0, phi);
        return {e, -e * p, -std::conj(p), 1.0};
    }
    /// Disk automorphism taking boundary points (h1, h_{-1}, h_i) to (1, -1, i).
    static Mobius normalizing(cplx h1, cplx hm1, cplx hi) {
        return from_triples({h1, hm1, hi}, {cplx(1.0), cplx(-1.0), cplx(0.0, 1.0)});
    }
};

}  // namespace lqc
