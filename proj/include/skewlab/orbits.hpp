#pragma once

#include "skewlab/skew.hpp"

namespace skewlab {

// Periodic point of the skew product: z1 has base period m, w1 is fixed by
// the fiber return map over z1. A and B are the base and vertical
// multipliers of the cycle.
struct PeriodicOrbit {
    cplx z1{0.0};
    cplx w1{0.0};
    int m = 1;
    cplx A{0.0};
    cplx B{0.0};
    bool repelling = false;     // |A| > 1 and |B| > 1
    bool vertical_like = false; // |B| > |A|
};

inline PeriodicOrbit make_periodic_orbit(const SkewProduct& f, cplx z1, cplx w1, int m) {
    PeriodicOrbit o;
    o.z1 = z1;
    o.w1 = w1;
    o.m = m;
    OrbitJacobian J = orbit_jacobian(f, z1, w1, m);
    o.A = J.dp;
    o.B = J.dQdw;
    o.repelling = std::abs(o.A) > 1.0 && std::abs(o.B) > 1.0;
    o.vertical_like = std::abs(o.B) > std::abs(o.A);
    return o;
}

} // namespace skewlab
