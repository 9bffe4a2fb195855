#pragma once

#include <utility>
#include <vector>

#include "hodo/coefficients.hpp"
#include "hodo/model.hpp"

namespace hodo {

// The Legendre function v = (v^1,...,v^m) of the partial hodograph transform,
// in formal (truncated series) representation on the half-ball in y.
template <class T>
struct LegendreStateT {
    ModelConstantsT<T> constants;
    std::vector<Series<T>> v;  // m components, dim n

    LegendreStateT(ModelConstantsT<T> c, std::vector<Series<T>> comps)
        : constants(std::move(c)), v(std::move(comps)) {
        if (static_cast<int>(v.size()) != constants.m)
            throw std::invalid_argument("LegendreState: expected m components");
        for (auto& s : v)
            if (s.dim() != constants.n) throw std::invalid_argument("LegendreState: series dim must equal n");
    }

    int order() const { return v[0].order(); }
};

using LegendreState = LegendreStateT<double>;

template <class T>
struct SystemCoefficientsT {
    std::vector<Series<T>> a;  // a_1..a_n
    Series<T> b, c, vstar;     // vstar = |v'|_* = (1 + sum (v^j/alpha)^2)^{1/2}
};

using SystemCoefficients = SystemCoefficientsT<double>;

namespace detail {

template <class T>
StateArgs<Series<T>> legendre_args(const LegendreStateT<T>& st, int work_order) {
    StateArgs<Series<T>> args;
    const int n = st.constants.n;
    for (auto& comp : st.v) args.v.push_back(comp.truncated(work_order));
    args.grad.resize(st.v.size());
    for (size_t i = 0; i < st.v.size(); ++i)
        for (int k = 0; k < n; ++k)
            args.grad[i].push_back(st.v[i].differentiate(k).truncated(work_order));
    return args;
}

}  // namespace detail

// The derived coefficients a_l, b, c of the transformed system, as truncated
// series through order s-2 (gradients of v are only known that far).
template <class T>
SystemCoefficientsT<T> coefficients(const LegendreStateT<T>& st) {
    const int n = st.constants.n;
    int w = std::max(0, st.order() - 2);
    auto args = detail::legendre_args(st, w);
    double denom0 = 1.0 + scalar_traits<T>::to_double(args.grad[0].back().value_at_origin());
    if (denom0 < 0.1)
        throw std::runtime_error("coefficients: transform degenerate, 1 + d_n v^1 < 0.1");
    SystemCoefficientsT<T> out{{},
                               coeff_b(args, st.constants),
                               coeff_c(args, st.constants),
                               Series<T>(n, w)};
    for (int ell = 0; ell < n; ++ell) out.a.push_back(coeff_a(ell, args, st.constants));
    PowOuter<T> half(scalar_traits<T>::from_fraction(1, 2));
    out.vstar = ring_outer(half, coeff_vstar_sq(args, st.constants));
    return out;
}

// Pointwise coefficients at a sampled state (grid mode).
struct PointCoefficients {
    Vec a;
    double b, c, vstar;
};

inline PointCoefficients coefficients_at(const StateArgs<double>& args, const ModelConstants& cnst) {
    double denom = 1.0 + args.grad[0].back();
    if (denom < 0.1) throw std::runtime_error("coefficients_at: transform degenerate, 1 + d_n v^1 < 0.1");
    PointCoefficients out;
    for (int ell = 0; ell < cnst.n; ++ell) out.a.push_back(coeff_a(ell, args, cnst));
    out.b = coeff_b(args, cnst);
    out.c = coeff_c(args, cnst);
    out.vstar = std::sqrt(coeff_vstar_sq(args, cnst));
    return out;
}

// Residual series of the transformed degenerate system:
//   component 1:  L v^1 + 2(kappa-1) d_n v^1 - b
//   component j:  L v^j + 2 kappa d_n v^j + kappa sum_l a_l d_l v^j + c d_n v^j
// with L = y_n (Lap + sum_l a_l d_l d_n). Valid through weighted order s-2.
template <class T>
std::vector<Series<T>> residual_system(const LegendreStateT<T>& st) {
    const int n = st.constants.n;
    const int w = std::max(0, st.order() - 2);
    auto coef = coefficients(st);
    T one = scalar_traits<T>::from_int(1);
    T two = scalar_traits<T>::from_int(2);

    std::vector<Series<T>> out;
    for (int j = 0; j < st.constants.m; ++j) {
        const auto& vj = st.v[static_cast<size_t>(j)];
        // y_n * (Lap v^j + sum_l a_l d_l d_n v^j); everything known to order w
        Series<T> inner(n, std::max(0, w - 2));
        if (w >= 2) {
            for (int k = 0; k < n; ++k)
                inner = inner + vj.differentiate(k).differentiate(k).truncated(w - 2);
            for (int ell = 0; ell < n; ++ell) {
                Series<T> mixed = vj.differentiate(ell).differentiate(n - 1).truncated(w - 2);
                inner = inner + coef.a[static_cast<size_t>(ell)].truncated(w - 2) * mixed;
            }
        }
        Series<T> res = inner.shifted_vertical(w);
        Series<T> dn = vj.differentiate(n - 1).truncated(w);
        if (j == 0) {
            res = res + dn.scaled(two * (st.constants.kappa - one)) - coef.b;
        } else {
            res = res + dn.scaled(two * st.constants.kappa) + coef.c * dn;
            for (int ell = 0; ell < n; ++ell)
                res = res
                      + (coef.a[static_cast<size_t>(ell)] * vj.differentiate(ell).truncated(w))
                            .scaled(st.constants.kappa);
        }
        out.push_back(std::move(res));
    }
    return out;
}

// v_r(y) = (v^1(ry)/r, v^2(ry), ..., v^m(ry)); the system is invariant under
// this scaling.
template <class T>
LegendreStateT<T> rescale_legendre(const LegendreStateT<T>& st, const T& r) {
    if (!(scalar_traits<T>::to_double(r) > 0))
        throw std::invalid_argument("rescale_legendre: r must be > 0");
    std::vector<Series<T>> comps;
    for (size_t j = 0; j < st.v.size(); ++j) {
        Series<T> s(st.v[j].dim(), st.v[j].order());
        for (auto& [mu, val] : st.v[j].coefficients()) {
            T f = scalar_traits<T>::from_int(1);
            for (int t = 0; t < mu.total(); ++t) f = f * r;
            if (j == 0) f = f / r;
            s.set(mu, val * f);
        }
        comps.push_back(std::move(s));
    }
    return LegendreStateT<T>(st.constants, std::move(comps));
}

// ---- double-only sampled operations -------------------------------------

// y = T(x) = (x', (u^1/alpha)^{1/kappa}) sampled over given x points.
struct TransformSample {
    Vec x, y;
};
std::vector<TransformSample> forward_transform(const FieldClosure& u, const ModelConstants& cnst,
                                               const std::vector<Vec>& points);

// Legendre functions sampled on a y-grid by inverting the vertical component
// of T along each line x' = y'.
struct LegendreSamples {
    std::vector<Vec> points;       // y samples
    std::vector<Vec> values;       // v(y), m entries each
};
LegendreSamples legendre_from_solution(const FieldClosure& u, const ModelConstants& cnst,
                                       const std::vector<Vec>& ypoints);

// Solves x_n = y_n + v^1(x', y_n) by safeguarded Newton and rebuilds
//   u^1 = alpha y_n^kappa,  u^j = y_n^kappa v^j,
// with exact gradient/Hessian closures obtained by implicit differentiation
// of the transform. u = 0 where no root with y_n >= 0 exists.
FieldClosure inverse_reconstruct(const LegendreState& st);

// Height of the free-boundary graph x_n = v^1(x', 0).
double free_boundary_height(const LegendreState& st, const Vec& xprime);

// Residual of the original system at sample points (exact derivatives when
// the closure provides them, finite differences otherwise).
std::vector<Vec> residual_original(const FieldClosure& u, double q, const std::vector<Vec>& points);

// Residual of the reconstructed field evaluated in extended precision.
// Deep dyadic shells decay below the double-precision evaluation floor
// (~1e-20 absolute); this path keeps the measurement honest down there.
Vec reconstruction_residual(const LegendreState& st, const Vec& x);

}  // namespace hodo
