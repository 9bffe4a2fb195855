#include "hodo/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace hodo {

std::vector<QuadNode> gauss_legendre(int npts, double a, double b) {
    if (npts < 1) throw std::invalid_argument("gauss_legendre: npts must be >= 1");
    std::vector<QuadNode> nodes(static_cast<size_t>(npts));
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < npts; ++i) {
        // Newton on P_n from the Chebyshev-like initial guess
        double x = std::cos(M_PI * (i + 0.75) / (npts + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < npts; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = npts * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[static_cast<size_t>(i)].x = mid - half * x;
        nodes[static_cast<size_t>(i)].w = 2.0 * half / ((1.0 - x * x) * pp * pp);
    }
    return nodes;
}

namespace {

double simpson(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                    double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(fa, flm, fm, a, m);
    double right = simpson(fm, frm, fb, m, b);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1)
           + adaptive_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = simpson(fa, fm, fb, a, b);
    return adaptive_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double graded_panel_integral(const std::function<double(double)>& f, double a, double b,
                             int panels, int pts_per_panel) {
    if (!(b > a)) return 0.0;
    double sum = 0.0;
    double hi = b;
    for (int k = 0; k < panels; ++k) {
        double lo = (k == panels - 1) ? a : a + (hi - a) * 0.5;
        for (auto& nd : gauss_legendre(pts_per_panel, lo, hi)) sum += nd.w * f(nd.x);
        hi = lo;
        if (hi <= a) break;
    }
    return sum;
}

}  // namespace hodo
