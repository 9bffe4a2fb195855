#include "hodo/diffeo.hpp"

#include <cmath>
#include <stdexcept>

namespace hodo {

double diffeo_cutoff(double zn) {
    double t = std::fabs(zn);
    if (t <= 0.25) return 1.0;
    if (t >= 0.5) return 0.0;
    double s = (t - 0.25) / 0.25;  // in (0,1) across the transition band
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

namespace {

Vec rhs(const Vec& a, const Vec& phi, double eta) {
    double s = 0;
    for (double c : phi) s += c * c;
    double cut = 0.5625 - s;  // (3/4)^2 - |phi|^2
    double f = cut > 0 ? cut * cut * cut * eta : 0.0;
    Vec out(phi.size());
    for (size_t i = 0; i < phi.size(); ++i) out[i] = a[i] * f;
    return out;
}

Vec rk4_integrate(const Vec& a, Vec phi, double eta, double t0, double t1, int steps) {
    double h = (t1 - t0) / steps;
    const size_t d = phi.size();
    for (int s = 0; s < steps; ++s) {
        Vec k1 = rhs(a, phi, eta);
        Vec tmp(d);
        for (size_t i = 0; i < d; ++i) tmp[i] = phi[i] + 0.5 * h * k1[i];
        Vec k2 = rhs(a, tmp, eta);
        for (size_t i = 0; i < d; ++i) tmp[i] = phi[i] + 0.5 * h * k2[i];
        Vec k3 = rhs(a, tmp, eta);
        for (size_t i = 0; i < d; ++i) tmp[i] = phi[i] + h * k3[i];
        Vec k4 = rhs(a, tmp, eta);
        for (size_t i = 0; i < d; ++i) phi[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    return phi;
}

}  // namespace

Vec diffeo_phi(const Vec& a, const Vec& z, int steps) {
    if (a.size() + 1 != z.size()) throw std::invalid_argument("diffeo_phi: a must have n-1 entries");
    Vec phi(z.begin(), z.end() - 1);
    return rk4_integrate(a, std::move(phi), diffeo_cutoff(z.back()), 0.0, 1.0, steps);
}

Vec diffeo_apply(const Vec& a, const Vec& z, int steps) {
    Vec out = diffeo_phi(a, z, steps);
    out.push_back(z.back());
    return out;
}

Vec diffeo_phi_reference(const Vec& a, const Vec& z, double tol) {
    Vec phi(z.begin(), z.end() - 1);
    double eta = diffeo_cutoff(z.back());
    double t = 0;
    double h = 0.05;
    while (t < 1.0) {
        if (t + h > 1.0) h = 1.0 - t;
        Vec one = rk4_integrate(a, phi, eta, t, t + h, 1);
        Vec two = rk4_integrate(a, phi, eta, t, t + h, 2);
        double err = 0;
        for (size_t i = 0; i < phi.size(); ++i) err = std::max(err, std::fabs(one[i] - two[i]));
        if (err < tol * h || h < 1e-12) {
            phi = two;
            t += h;
            if (err < tol * h / 32) h *= 2;
        } else {
            h *= 0.5;
        }
    }
    return phi;
}

DiffeoCheck diffeo_check(const Vec& a, int n, double tol) {
    if (static_cast<int>(a.size()) != n - 1)
        throw std::invalid_argument("diffeo_check: a must have n-1 entries");
    DiffeoCheck out;
    Vec zero_a(a.size(), 0.0);

    // sample points in [-1,1]^n
    std::vector<Vec> samples;
    int per_axis = n == 2 ? 9 : 5;
    std::vector<int> idx(static_cast<size_t>(n), 0);
    while (true) {
        Vec z(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            z[static_cast<size_t>(i)] = -1.0 + 2.0 * idx[static_cast<size_t>(i)] / (per_axis - 1);
        samples.push_back(z);
        int axis = 0;
        while (axis < n && ++idx[static_cast<size_t>(axis)] == per_axis) idx[static_cast<size_t>(axis++)] = 0;
        if (axis == n) break;
    }

    for (const auto& z : samples) {
        Vec id = diffeo_apply(zero_a, z);
        for (int i = 0; i < n; ++i)
            out.identity_error = std::max(out.identity_error, std::fabs(id[static_cast<size_t>(i)] - z[static_cast<size_t>(i)]));

        Vec im = diffeo_apply(a, z);
        out.plane_error = std::max(out.plane_error, std::fabs(im.back() - z.back()));

        double zp = 0;
        for (int i = 0; i < n - 1; ++i) zp += z[static_cast<size_t>(i)] * z[static_cast<size_t>(i)];
        bool outside = std::sqrt(zp) > 0.75 || std::fabs(z.back()) > 0.5;
        if (outside)
            for (int i = 0; i < n; ++i)
                out.support_error = std::max(out.support_error, std::fabs(im[static_cast<size_t>(i)] - z[static_cast<size_t>(i)]));

        if (std::fabs(z.back()) <= 0.20) {
            double h = 0.02;  // stays within the eta == 1 plateau
            Vec zp1 = z, zm1 = z;
            zp1.back() += h;
            zm1.back() -= h;
            Vec fp = diffeo_apply(a, zp1), fm = diffeo_apply(a, zm1);
            for (int i = 0; i < n; ++i) {
                double d = (fp[static_cast<size_t>(i)] - fm[static_cast<size_t>(i)]) / (2 * h);
                double expect = (i == n - 1) ? 1.0 : 0.0;
                out.vertical_deriv_error = std::max(out.vertical_deriv_error, std::fabs(d - expect));
            }
        }

        Vec ref = diffeo_phi_reference(a, z);
        Vec got = diffeo_phi(a, z);
        for (size_t i = 0; i < ref.size(); ++i)
            out.reference_error = std::max(out.reference_error, std::fabs(ref[i] - got[i]));
    }

    out.pass = out.identity_error <= tol && out.support_error <= tol && out.plane_error <= tol
               && out.vertical_deriv_error <= tol && out.reference_error <= tol;
    return out;
}

}  // namespace hodo
