#pragma once

#include <functional>
#include <vector>

#include "hodo/grid.hpp"
#include "hodo/model.hpp"

namespace hodo {

// ---- 1D degenerate ODE  x u'' + gamma u' = f on (0,1) --------------------

// Explicit solve via u'(x) = x^{-gamma} int_0^x t^{gamma-1} f(t) dt with
// u(0) = 0; x u'' recovered from the equation itself.
struct Ode1DSolution {
    std::function<double(double)> du;
    std::function<double(double)> u;
    std::function<double(double)> x_d2u;
    double sup_f = 0, sup_du = 0, sup_xd2u = 0;  // sampled on a fixed grid
};

Ode1DSolution solve_ode_1d(double gamma, const std::function<double(double)>& f);

// 1D Green's function of d/dx (x^gamma d/dx . ): (1-gamma)^{-1} max(x,y)^{1-gamma},
// log(max(x,y)) when gamma = 1.
double green_1d(double gamma, double x, double y);

// Canonical representative |x-y| / sqrt(|x-y| + x_n + y_n) of the intrinsic
// metric class, and the weighted ball-measure surrogate (x_n + r^2)^{gamma+n/2} r^n.
double intrinsic_distance(const Vec& x, const Vec& y);
double ball_measure(const Vec& x, double r, double gamma);

// ---- linear degenerate solver on graded half-space grids -----------------

// y_n Lap u + gamma d_n u = f with Dirichlet data on the non-degenerate sides
// (tangential extremes and the top). The degenerate edge y_n = 0 carries no
// boundary condition: the equation row there is gamma d_n u = f.
Field solve_deg_linear_nd(double gamma, const Field& f, const std::function<double(const Vec&)>& bc);

// Applies the operator at every non-Dirichlet node (one-sided at y_n = 0);
// used for residual verification.
Field apply_deg_operator(double gamma, const Field& u);

// Discrete || grad u ||_{L^p} + || y_n D^k u ||_{L^p} on the grid (k = 2 or 3).
double wkp_star_norm(const Field& u, int k, double p);

// ---- direct nonlinear solver ----------------------------------------------

struct DirectSolveOptions {
    double damping = 0.5;
    double tol = 1e-9;          // successive-change stopping threshold
    int maxit = 4000;
    double delta = -1;          // regularization |u| > delta; default h^2
};

// Fixed-point iteration u <- Lap^{-1}( |u|^{q-1} u chi_{|u|>delta} ) with
// Dirichlet data on the whole box boundary.
Field solve_direct_nonlinear(const ModelConstants& cnst, const std::function<Vec(const Vec&)>& bc,
                             const HalfSpaceGrid& grid, const DirectSolveOptions& opt = {});

// ---- free boundary ---------------------------------------------------------

// Max of |Lap u - |u|^{q-1} u chi| over interior nodes, second derivatives by
// the grid's own stencils (the right residual notion for sampled solutions).
double grid_residual_max(const Field& u, double q);

// Interface of {|u| > threshold} by edge crossings (marching-squares style in
// 2D, edge points in 3D).
std::vector<Vec> extract_free_boundary(const Field& u, double threshold);

struct RegularVerdict {
    bool regular_consistent = false;
    std::vector<std::pair<double, double>> weiss_values;  // (r, W)
    double omega = 0;
};

// Compares W(u, x0, r) at the smallest reliable radii against the half-space
// energy omega_q. x0 must lie on the extracted interface.
RegularVerdict classify_regular(const Field& u, double q, const Vec& x0,
                                const std::vector<double>& radii, double tol = 5e-3);

}  // namespace hodo
