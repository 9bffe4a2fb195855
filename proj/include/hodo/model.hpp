#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hodo/rational.hpp"

namespace hodo {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;          // [component][axis] or square
using Ten3 = std::vector<std::vector<std::vector<double>>>;  // [component][axis][axis]

inline double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

// kappa = 2/(1-q), alpha = (kappa(kappa-1))^{-kappa/2}
inline std::pair<double, double> kappa_alpha(double q) {
    if (!(q >= 0.0 && q < 1.0)) throw std::domain_error("kappa_alpha: q must be in [0,1)");
    if (1.0 - q < 1e-9) throw std::overflow_error("kappa_alpha: kappa overflows as q -> 1");
    double kappa = 2.0 / (1.0 - q);
    double alpha = std::pow(kappa * (kappa - 1.0), -kappa / 2.0);
    return {kappa, alpha};
}

template <class T>
struct ModelConstantsT {
    T q, kappa, alpha;
    int n;  // spatial dimension >= 2
    int m;  // target dimension >= 1

    ModelConstantsT(T q_, int n_, int m_) : q(std::move(q_)), n(n_), m(m_) {
        if (n < 2) throw std::invalid_argument("ModelConstants: n must be >= 2");
        if (m < 1) throw std::invalid_argument("ModelConstants: m must be >= 1");
        compute();
    }

private:
    void compute();
};

template <>
inline void ModelConstantsT<double>::compute() {
    auto [k, a] = kappa_alpha(q);
    kappa = k;
    alpha = a;
}

// Exact mode needs kappa even so the exponent -kappa/2 is an integer
// (q = 0 and q = 1/2 are the cases used in tests).
template <>
inline void ModelConstantsT<Rational>::compute() {
    if (!(Rational(0) <= q && q < Rational(1)))
        throw std::domain_error("ModelConstants<Rational>: q must be in [0,1)");
    kappa = Rational(2) / (Rational(1) - q);
    if (!kappa.is_integer() || (static_cast<long long>(kappa.num()) % 2) != 0)
        throw std::domain_error("ModelConstants<Rational>: alpha is irrational unless kappa is an even integer");
    long long khalf = static_cast<long long>(kappa.num()) / 2;
    alpha = (kappa * (kappa - Rational(1))).pow_int(-khalf);
}

using ModelConstants = ModelConstantsT<double>;

// A smooth vector field given by callbacks; gradient/Hessian may be absent.
struct FieldClosure {
    int n = 0, m = 0;
    std::function<Vec(const Vec&)> value;
    std::function<Mat(const Vec&)> grad;   // grad[j][i] = d_i u^j
    std::function<Ten3(const Vec&)> hess;  // hess[j][i][k] = d_ik u^j
};

// u(x) = alpha max(x.nu, 0)^kappa e
struct HalfSpaceSolution {
    ModelConstants constants;
    Vec nu;  // unit vector in R^n
    Vec e;   // unit vector in R^m

    HalfSpaceSolution(ModelConstants c, Vec nu_, Vec e_)
        : constants(std::move(c)), nu(std::move(nu_)), e(std::move(e_)) {
        if (static_cast<int>(nu.size()) != constants.n || static_cast<int>(e.size()) != constants.m)
            throw std::invalid_argument("HalfSpaceSolution: dimension mismatch");
        if (std::fabs(norm2(nu) - 1.0) > 1e-12 || std::fabs(norm2(e) - 1.0) > 1e-12)
            throw std::invalid_argument("HalfSpaceSolution: nu and e must be unit vectors");
    }

    Vec eval(const Vec& x) const {
        double t = dot(x, nu);
        Vec out(e.size(), 0.0);
        if (t <= 0) return out;
        double f = constants.alpha * std::pow(t, constants.kappa);
        for (size_t j = 0; j < e.size(); ++j) out[j] = f * e[j];
        return out;
    }

    Mat gradient(const Vec& x) const {
        double t = dot(x, nu);
        Mat out(e.size(), Vec(nu.size(), 0.0));
        if (t <= 0) return out;
        double f = constants.alpha * constants.kappa * std::pow(t, constants.kappa - 1.0);
        for (size_t j = 0; j < e.size(); ++j)
            for (size_t i = 0; i < nu.size(); ++i) out[j][i] = f * e[j] * nu[i];
        return out;
    }

    Ten3 hessian(const Vec& x) const {
        double t = dot(x, nu);
        Ten3 out(e.size(), Mat(nu.size(), Vec(nu.size(), 0.0)));
        if (t <= 0) return out;
        double f = constants.alpha * constants.kappa * (constants.kappa - 1.0) * std::pow(t, constants.kappa - 2.0);
        for (size_t j = 0; j < e.size(); ++j)
            for (size_t i = 0; i < nu.size(); ++i)
                for (size_t k = 0; k < nu.size(); ++k) out[j][i][k] = f * e[j] * nu[i] * nu[k];
        return out;
    }

    FieldClosure closure() const {
        FieldClosure f;
        f.n = constants.n;
        f.m = constants.m;
        f.value = [*this](const Vec& x) { return eval(x); };
        f.grad = [*this](const Vec& x) { return gradient(x); };
        f.hess = [*this](const Vec& x) { return hessian(x); };
        return f;
    }
};

// Delta u - |u|^{q-1} u chi_{|u|>0}, with the convention 0 where u vanishes.
Vec pde_residual(const FieldClosure& u, double q, const Vec& x);

// u_r(x) = u(rx)/r^kappa
FieldClosure rescale_blowup(const FieldClosure& u, double r, const ModelConstants& cnst);

// |u(x)|^{-(1+q)/2} d_i u(x) - kappa alpha^{1/kappa} (nu . e_i) e; identically
// zero on exact half-space profiles at interior points.
Vec boundary_limit_deficit(const HalfSpaceSolution& h, const Vec& x, int axis);

// Centered finite-difference gradient/Hessian closures for fields that only
// provide values.
Mat fd_gradient(const FieldClosure& u, const Vec& x, double h);
Ten3 fd_hessian(const FieldClosure& u, const Vec& x, double h);

}  // namespace hodo
