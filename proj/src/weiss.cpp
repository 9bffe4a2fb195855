#include "hodo/weiss.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "hodo/quadrature.hpp"

namespace hodo {

namespace {

double bulk_integrand(const FieldClosure& u, const Vec& x, double q) {
    Vec uv = u.value(x);
    Mat g = u.grad ? u.grad(x) : fd_gradient(u, x, 1e-6);
    double s = 0;
    for (auto& row : g)
        for (double c : row) s += c * c;
    double mag = norm2(uv);
    if (mag > 0) s += 2.0 / (1.0 + q) * std::pow(mag, 1.0 + q);
    return s;
}

double boundary_integrand(const FieldClosure& u, const Vec& x) {
    Vec uv = u.value(x);
    double mag = norm2(uv);
    return mag * mag;
}

}  // namespace

double weiss_energy(const FieldClosure& u, const Vec& x0, double r, double q,
                    const WeissQuadrature& quad) {
    if (!(r > 0)) throw std::invalid_argument("weiss_energy: r must be > 0");
    const int n = u.n;
    auto [kappa, alpha] = kappa_alpha(q);
    (void)alpha;

    // The adaptive angular tolerance is calibrated to the integrand scale, so
    // the r^{-(n+2k-2)} prefactor does not amplify a fixed absolute error.
    auto integrate_circle = [&](const std::function<double(double)>& fn) {
        double scale = 0;
        for (int i = 0; i < 64; ++i) scale = std::max(scale, std::fabs(fn(2.0 * M_PI * i / 64.0)));
        if (scale == 0) return 0.0;
        const int panels = 16;
        double acc = 0, len = 2.0 * M_PI / panels;
        for (int i = 0; i < panels; ++i)
            acc += adaptive_simpson(fn, i * len, (i + 1) * len, quad.tol * scale * len, quad.depth);
        return acc;
    };

    double bulk = 0, bdry = 0;
    if (n == 2) {
        auto radial = gauss_legendre(quad.radial, 0.0, 1.0);
        auto along_angle = [&](double theta) {
            double c = std::cos(theta), s = std::sin(theta);
            double acc = 0;
            for (auto& nd : radial) {
                Vec x = {x0[0] + r * nd.x * c, x0[1] + r * nd.x * s};
                acc += nd.w * bulk_integrand(u, x, q) * nd.x;
            }
            return acc;
        };
        bulk = r * r * integrate_circle(along_angle);
        auto rim = [&](double theta) {
            Vec x = {x0[0] + r * std::cos(theta), x0[1] + r * std::sin(theta)};
            return boundary_integrand(u, x);
        };
        bdry = r * integrate_circle(rim);
    } else if (n == 3) {
        // midpoint product rule in both angles, radial Gauss-Legendre
        auto radial = gauss_legendre(quad.radial, 0.0, 1.0);
        int nphi = std::max(8, quad.angular / 2);
        int nth = std::max(16, quad.angular);
        double dphi = M_PI / nphi, dth = 2.0 * M_PI / nth;
        for (int ip = 0; ip < nphi; ++ip) {
            double phi = (ip + 0.5) * dphi;
            double sp = std::sin(phi), cp = std::cos(phi);
            for (int it = 0; it < nth; ++it) {
                double th = (it + 0.5) * dth;
                Vec w = {sp * std::cos(th), sp * std::sin(th), cp};
                double acc = 0;
                for (auto& nd : radial) {
                    Vec x = {x0[0] + r * nd.x * w[0], x0[1] + r * nd.x * w[1], x0[2] + r * nd.x * w[2]};
                    acc += nd.w * bulk_integrand(u, x, q) * nd.x * nd.x;
                }
                bulk += acc * sp * dphi * dth;
                Vec xb = {x0[0] + r * w[0], x0[1] + r * w[1], x0[2] + r * w[2]};
                bdry += boundary_integrand(u, xb) * sp * dphi * dth;
            }
        }
        bulk *= r * r * r;
        bdry *= r * r;
    } else {
        throw std::invalid_argument("weiss_energy: only n in {2,3} is supported");
    }

    if (!std::isfinite(bulk) || !std::isfinite(bdry))
        throw std::runtime_error("weiss_energy: quadrature produced non-finite values");
    return std::pow(r, -(n + 2.0 * kappa - 2.0)) * bulk - kappa * std::pow(r, -(n + 2.0 * kappa - 1.0)) * bdry;
}

double omega_q(int n, double q) {
    static std::map<std::pair<int, long long>, double> cache;
    static std::mutex mtx;
    long long key = static_cast<long long>(std::llround(q * 1e12));
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find({n, key});
        if (it != cache.end()) return it->second;
    }
    ModelConstants cnst(q, n, 1);
    Vec nu(static_cast<size_t>(n), 0.0);
    nu.back() = 1.0;
    HalfSpaceSolution hs(cnst, nu, {1.0});
    WeissQuadrature quad;
    quad.radial = 48;
    quad.angular = 1024;
    quad.tol = 1e-11;
    double w = weiss_energy(hs.closure(), Vec(static_cast<size_t>(n), 0.0), 1.0, q, quad);
    std::lock_guard<std::mutex> lock(mtx);
    cache[{n, key}] = w;
    return w;
}

}  // namespace hodo
