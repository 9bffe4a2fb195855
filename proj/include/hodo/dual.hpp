#pragma once

#include <stdexcept>
#include <vector>

#include "hodo/series.hpp"

namespace hodo {

// Forward-mode scalar carrying a value and a gradient with respect to a fixed
// set of seed variables. Used to read first derivatives of the analytic
// coefficient functionals at a point.
template <class T>
struct Dual {
    T v{};
    std::vector<T> g;

    Dual() = default;
    Dual(T value, size_t nseeds) : v(std::move(value)), g(nseeds, T{}) {}

    static Dual seed(T value, size_t nseeds, size_t which) {
        Dual d(std::move(value), nseeds);
        d.g[which] = scalar_traits<T>::from_int(1);
        return d;
    }

    Dual operator-() const {
        Dual r = *this;
        r.v = -r.v;
        for (auto& x : r.g) x = -x;
        return r;
    }

    friend Dual operator+(const Dual& a, const Dual& b) {
        Dual r = a;
        r.v = r.v + b.v;
        for (size_t i = 0; i < r.g.size(); ++i) r.g[i] = r.g[i] + b.g[i];
        return r;
    }
    friend Dual operator-(const Dual& a, const Dual& b) { return a + (-b); }
    friend Dual operator*(const Dual& a, const Dual& b) {
        Dual r(a.v * b.v, a.g.size());
        for (size_t i = 0; i < r.g.size(); ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
        return r;
    }
};

// Ring adapters: the coefficient recipes are written once against a generic
// scalar-like type S and instantiated with Series<T> (formal mode), Dual<T>
// (point derivatives) and plain T (pointwise evaluation).

template <class T>
Series<T> ring_const(const Series<T>& proto, const T& c) {
    return Series<T>::constant(proto.dim(), proto.order(), c);
}
template <class T>
Dual<T> ring_const(const Dual<T>& proto, const T& c) {
    return Dual<T>(c, proto.g.size());
}
inline double ring_const(const double&, const double& c) { return c; }
inline Rational ring_const(const Rational&, const Rational& c) { return c; }

template <class T>
Series<T> ring_scale(const Series<T>& a, const T& c) {
    return a.scaled(c);
}
template <class T>
Dual<T> ring_scale(const Dual<T>& a, const T& c) {
    Dual<T> r = a;
    r.v = r.v * c;
    for (auto& x : r.g) x = x * c;
    return r;
}
inline double ring_scale(double a, double c) { return a * c; }
inline Rational ring_scale(const Rational& a, const Rational& c) { return a * c; }

template <class T>
Series<T> ring_outer(const Outer1D<T>& f, const Series<T>& x) {
    return x.compose_outer(f);
}
template <class T>
Dual<T> ring_outer(const Outer1D<T>& f, const Dual<T>& x) {
    Dual<T> r(f.deriv(0, x.v), x.g.size());
    T d1 = f.deriv(1, x.v);
    for (size_t i = 0; i < r.g.size(); ++i) r.g[i] = d1 * x.g[i];
    return r;
}
inline double ring_outer(const Outer1D<double>& f, double x) { return f.deriv(0, x); }
inline Rational ring_outer(const Outer1D<Rational>& f, const Rational& x) { return f.deriv(0, x); }

}  // namespace hodo
