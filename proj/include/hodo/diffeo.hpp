#pragma once

#include <vector>

#include "hodo/model.hpp"

namespace hodo {

// One-parameter family of diffeomorphisms Phi_a(z) = (phi_{a,z}(1), z_n) from
//   phi'(t) = a ((3/4)^2 - |phi|^2)_+^3 eta(z_n),  phi(0) = z'.
// eta is a smooth cutoff, 1 for |z_n| <= 1/4 and 0 for |z_n| >= 1/2.

double diffeo_cutoff(double zn);

// fixed-step classical RK4 (512 steps by default)
Vec diffeo_phi(const Vec& a, const Vec& z, int steps = 512);
Vec diffeo_apply(const Vec& a, const Vec& z, int steps = 512);

// step-doubling adaptive RK4 reference integration to the given tolerance
Vec diffeo_phi_reference(const Vec& a, const Vec& z, double tol = 1e-12);

struct DiffeoCheck {
    double identity_error = 0;        // max |Phi_0(z) - z|
    double support_error = 0;         // max |Phi_a(z) - z| outside the support box
    double plane_error = 0;           // max |(Phi_a(z))_n| on {z_n = 0}
    double vertical_deriv_error = 0;  // max |d_{z_n} Phi_a - e_n| for |z_n| <= 1/4
    double reference_error = 0;       // max deviation from the adaptive reference
    bool pass = false;
};

DiffeoCheck diffeo_check(const Vec& a, int n, double tol);

}  // namespace hodo
