#pragma once

#include <functional>
#include <vector>

namespace hodo {

struct QuadNode {
    double x, w;
};

// Gauss-Legendre nodes/weights on [a,b].
std::vector<QuadNode> gauss_legendre(int npts, double a, double b);

// Recursive adaptive Simpson. Tolerance is absolute; max_depth caps recursion.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 30);

// Composite Gauss-Legendre over geometrically shrinking panels toward a,
// for integrands with an algebraic singularity at the left endpoint.
double graded_panel_integral(const std::function<double(double)>& f, double a, double b,
                             int panels, int pts_per_panel);

}  // namespace hodo
