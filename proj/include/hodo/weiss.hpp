#pragma once

#include "hodo/model.hpp"

namespace hodo {

// Quadrature controls for the Weiss energy. Nodes live in coordinates
// normalized by the radius, so W of a homogeneous field is r-independent up
// to rounding regardless of resolution.
struct WeissQuadrature {
    int radial = 32;      // Gauss-Legendre points in the radial direction
    int angular = 256;    // base angular resolution (3D product rule)
    int depth = 24;       // max recursion depth of the adaptive angular rule
    double tol = 1e-9;    // relative tolerance of the adaptive angular rule
};

// W(u, x0, r) = r^{-(n+2k-2)} int_{B_r} (|Du|^2 + 2/(1+q) |u|^{1+q})
//             - k r^{-(n+2k-1)} int_{dB_r} |u|^2
double weiss_energy(const FieldClosure& u, const Vec& x0, double r, double q,
                    const WeissQuadrature& quad = {});

// Energy of the half-space solutions, a constant depending only on (n, q);
// computed once by quadrature on the exact profile and cached.
double omega_q(int n, double q);

}  // namespace hodo
