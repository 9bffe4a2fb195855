#include "hodo/model.hpp"

namespace hodo {

Vec pde_residual(const FieldClosure& u, double q, const Vec& x) {
    Vec uv = u.value(x);
    Ten3 H = u.hess ? u.hess(x) : fd_hessian(u, x, 1e-5);
    const size_t m = uv.size();
    const size_t n = x.size();
    Vec res(m, 0.0);
    double mag = norm2(uv);
    for (size_t j = 0; j < m; ++j) {
        double lap = 0;
        for (size_t i = 0; i < n; ++i) lap += H[j][i][i];
        res[j] = lap;
        if (mag > 0) res[j] -= std::pow(mag, q - 1.0) * uv[j];
    }
    return res;
}

FieldClosure rescale_blowup(const FieldClosure& u, double r, const ModelConstants& cnst) {
    if (!(r > 0)) throw std::invalid_argument("rescale_blowup: r must be > 0");
    double kappa = cnst.kappa;
    FieldClosure f;
    f.n = u.n;
    f.m = u.m;
    double s0 = std::pow(r, -kappa);
    f.value = [=](const Vec& x) {
        Vec y(x.size());
        for (size_t i = 0; i < x.size(); ++i) y[i] = r * x[i];
        Vec v = u.value(y);
        for (auto& c : v) c *= s0;
        return v;
    };
    if (u.grad) {
        double s1 = std::pow(r, 1.0 - kappa);
        f.grad = [=](const Vec& x) {
            Vec y(x.size());
            for (size_t i = 0; i < x.size(); ++i) y[i] = r * x[i];
            Mat g = u.grad(y);
            for (auto& row : g)
                for (auto& c : row) c *= s1;
            return g;
        };
    }
    if (u.hess) {
        double s2 = std::pow(r, 2.0 - kappa);
        f.hess = [=](const Vec& x) {
            Vec y(x.size());
            for (size_t i = 0; i < x.size(); ++i) y[i] = r * x[i];
            Ten3 H = u.hess(y);
            for (auto& mat : H)
                for (auto& row : mat)
                    for (auto& c : row) c *= s2;
            return H;
        };
    }
    return f;
}

Vec boundary_limit_deficit(const HalfSpaceSolution& h, const Vec& x, int axis) {
    double t = dot(x, h.nu);
    if (!(t > 0)) throw std::domain_error("boundary_limit_deficit: x must satisfy x.nu > 0");
    Vec uv = h.eval(x);
    Mat g = h.gradient(x);
    double mag = norm2(uv);
    double w = std::pow(mag, -(1.0 + h.constants.q) / 2.0);
    double limit = h.constants.kappa * std::pow(h.constants.alpha, 1.0 / h.constants.kappa)
                   * h.nu[static_cast<size_t>(axis)];
    Vec out(uv.size());
    for (size_t j = 0; j < uv.size(); ++j)
        out[j] = w * g[j][static_cast<size_t>(axis)] - limit * h.e[j];
    return out;
}

Mat fd_gradient(const FieldClosure& u, const Vec& x, double h) {
    const size_t n = x.size();
    Vec probe = x;
    Mat g(static_cast<size_t>(u.m), Vec(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        probe[i] = x[i] + h;
        Vec up = u.value(probe);
        probe[i] = x[i] - h;
        Vec um = u.value(probe);
        probe[i] = x[i];
        for (size_t j = 0; j < up.size(); ++j) g[j][i] = (up[j] - um[j]) / (2 * h);
    }
    return g;
}

Ten3 fd_hessian(const FieldClosure& u, const Vec& x, double h) {
    const size_t n = x.size();
    Vec u0 = u.value(x);
    const size_t m = u0.size();
    Ten3 H(m, Mat(n, Vec(n, 0.0)));
    Vec probe = x;
    for (size_t i = 0; i < n; ++i) {
        probe[i] = x[i] + h;
        Vec up = u.value(probe);
        probe[i] = x[i] - h;
        Vec um = u.value(probe);
        probe[i] = x[i];
        for (size_t j = 0; j < m; ++j) H[j][i][i] = (up[j] - 2 * u0[j] + um[j]) / (h * h);
    }
    for (size_t i = 0; i < n; ++i) {
        for (size_t k = i + 1; k < n; ++k) {
            Vec q = x;
            q[i] += h;
            q[k] += h;
            Vec upp = u.value(q);
            q[k] -= 2 * h;
            Vec upm = u.value(q);
            q[i] -= 2 * h;
            Vec umm = u.value(q);
            q[k] += 2 * h;
            Vec ump = u.value(q);
            for (size_t j = 0; j < m; ++j) {
                double v = (upp[j] - upm[j] - ump[j] + umm[j]) / (4 * h * h);
                H[j][i][k] = v;
                H[j][k][i] = v;
            }
        }
    }
    return H;
}

}  // namespace hodo
