#pragma once

#include <vector>

#include "hodo/dual.hpp"
#include "hodo/model.hpp"

namespace hodo {

// State of the Legendre function at which the coefficient functionals are
// evaluated: component values and the full gradient. The entries are ring
// elements, so the same formulas run on truncated series (formal mode), dual
// numbers (point derivatives) and plain scalars (pointwise grid mode).
template <class S>
struct StateArgs {
    std::vector<S> v;                    // v[i] = v^{i+1}
    std::vector<std::vector<S>> grad;    // grad[i][k] = d_k v^{i+1}
};

// 1 + d_n v^1
template <class S, class T>
S coeff_denom(const StateArgs<S>& st, const ModelConstantsT<T>&) {
    const S& dn = st.grad[0].back();
    return ring_const(dn, scalar_traits<T>::from_int(1)) + dn;
}

// |grad v^1|^2
template <class S, class T>
S coeff_grad1_sq(const StateArgs<S>& st, const ModelConstantsT<T>&) {
    S acc = st.grad[0][0] * st.grad[0][0];
    for (size_t k = 1; k < st.grad[0].size(); ++k) acc = acc + st.grad[0][k] * st.grad[0][k];
    return acc;
}

// a_l = -2 d_l v^1 / (1 + d_n v^1)                       for l < n
// a_n = -2 d_n v^1 / (1 + d_n v^1) + |grad v^1|^2 / (1 + d_n v^1)^2
template <class S, class T>
S coeff_a(int ell, const StateArgs<S>& st, const ModelConstantsT<T>& c) {
    const int n = static_cast<int>(st.grad[0].size());
    S D = coeff_denom(st, c);
    PowOuter<T> inv(scalar_traits<T>::from_int(-1));
    S Dinv = ring_outer(inv, D);
    S first = ring_scale(st.grad[0][static_cast<size_t>(ell)] * Dinv, scalar_traits<T>::from_int(-2));
    if (ell < n - 1) return first;
    PowOuter<T> inv2(scalar_traits<T>::from_int(-2));
    return first + coeff_grad1_sq(st, c) * ring_outer(inv2, D);
}

// |v'|_*^2 = 1 + sum_{j>=2} (v^j / alpha)^2
template <class S, class T>
S coeff_vstar_sq(const StateArgs<S>& st, const ModelConstantsT<T>& c) {
    S acc = ring_const(st.grad[0][0], scalar_traits<T>::from_int(1));
    T inva2 = scalar_traits<T>::from_int(1) / (c.alpha * c.alpha);
    for (size_t j = 1; j < st.v.size(); ++j) acc = acc + ring_scale(st.v[j] * st.v[j], inva2);
    return acc;
}

// b = (k-1) [ |grad v^1|^2 + (1 - |v'|_*^{q-1}) (1 + d_n v^1)^2 ] / (1 + d_n v^1)
template <class S, class T>
S coeff_b(const StateArgs<S>& st, const ModelConstantsT<T>& c) {
    S D = coeff_denom(st, c);
    PowOuter<T> inv(scalar_traits<T>::from_int(-1));
    S Dinv = ring_outer(inv, D);
    T one = scalar_traits<T>::from_int(1);
    T half_qm1 = (c.q - one) / scalar_traits<T>::from_int(2);
    PowOuter<T> star_pow(half_qm1);  // t -> t^{(q-1)/2} applied to |v'|_*^2
    S star = ring_outer(star_pow, coeff_vstar_sq(st, c));
    S one_minus_star = ring_const(star, one) - star;
    S inner = coeff_grad1_sq(st, c) + one_minus_star * D * D;
    return ring_scale(inner * Dinv, c.kappa - one);
}

// c = kappa a_n - (b - 2(kappa-1) d_n v^1) / (1 + d_n v^1)
template <class S, class T>
S coeff_c(const StateArgs<S>& st, const ModelConstantsT<T>& c) {
    const int n = static_cast<int>(st.grad[0].size());
    S D = coeff_denom(st, c);
    PowOuter<T> inv(scalar_traits<T>::from_int(-1));
    S Dinv = ring_outer(inv, D);
    T one = scalar_traits<T>::from_int(1);
    T two_km1 = scalar_traits<T>::from_int(2) * (c.kappa - one);
    S num = coeff_b(st, c) - ring_scale(st.grad[0].back(), two_km1);
    return ring_scale(coeff_a(n - 1, st, c), c.kappa) - num * Dinv;
}

}  // namespace hodo
