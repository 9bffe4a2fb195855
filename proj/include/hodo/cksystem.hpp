#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hodo/coefficients.hpp"

namespace hodo {

// An analytic functional of (v, grad v), evaluable on truncated series, dual
// numbers and plain scalars through one generic definition.
template <class T>
struct AnalyticFn {
    virtual ~AnalyticFn() = default;
    virtual Series<T> eval(const StateArgs<Series<T>>& st) const = 0;
    virtual Dual<T> eval(const StateArgs<Dual<T>>& st) const = 0;
    virtual T eval(const StateArgs<T>& st) const = 0;
};

template <class T, class F>
struct AnalyticFnImpl final : AnalyticFn<T> {
    explicit AnalyticFnImpl(F fn) : f(std::move(fn)) {}
    F f;
    Series<T> eval(const StateArgs<Series<T>>& st) const override { return f(st); }
    Dual<T> eval(const StateArgs<Dual<T>>& st) const override { return f(st); }
    T eval(const StateArgs<T>& st) const override { return f(st); }
};

template <class T, class F>
std::shared_ptr<AnalyticFn<T>> make_analytic_fn(F f) {
    return std::make_shared<AnalyticFnImpl<T, F>>(std::move(f));
}

// The abstract system of Cauchy-Kowalevski type:
//   y_n d_n^2 v^j + gamma_j d_n v^j = y_n sum_{k,l} A^j_{kl}(grad v) d_kl v^j + g^j(v, grad v)
// with the structural conditions A^j_{nn}(0) = 0 and d_{v_n^i} g^j(0,0) = 0.
template <class T>
struct GeneralDegenerateSystem {
    int m = 1;
    int n = 2;
    std::vector<T> gamma;  // gamma_j > 1
    // A[j][k*n + l]; null entry means the coefficient is identically zero
    std::vector<std::vector<std::shared_ptr<AnalyticFn<T>>>> A;
    std::vector<std::shared_ptr<AnalyticFn<T>>> g;  // null = zero source

    const AnalyticFn<T>* coefA(int j, int k, int l) const {
        auto& p = A[static_cast<size_t>(j)][static_cast<size_t>(k * n + l)];
        return p ? p.get() : nullptr;
    }
};

// Zero state with the right shapes, for checking the structural conditions.
template <class T>
StateArgs<T> zero_state(int m, int n) {
    StateArgs<T> st;
    st.v.assign(static_cast<size_t>(m), T{});
    st.grad.assign(static_cast<size_t>(m), std::vector<T>(static_cast<size_t>(n), T{}));
    return st;
}

template <class T>
StateArgs<Dual<T>> dual_state_vertical_seeds(const StateArgs<T>& point, int m, int n) {
    StateArgs<Dual<T>> st;
    size_t seeds = static_cast<size_t>(m);
    st.v.reserve(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) st.v.emplace_back(point.v[static_cast<size_t>(i)], seeds);
    st.grad.assign(static_cast<size_t>(m), {});
    for (int i = 0; i < m; ++i) {
        auto& row = st.grad[static_cast<size_t>(i)];
        for (int k = 0; k < n; ++k) {
            if (k == n - 1)
                row.push_back(Dual<T>::seed(point.grad[static_cast<size_t>(i)][static_cast<size_t>(k)], seeds,
                                            static_cast<size_t>(i)));
            else
                row.emplace_back(point.grad[static_cast<size_t>(i)][static_cast<size_t>(k)], seeds);
        }
    }
    return st;
}

// Verifies A^j_{nn}(0) = 0 and d_{v_n^i} g^j(0,0) = 0; throws if violated.
template <class T>
void validate_structure(const GeneralDegenerateSystem<T>& sys) {
    auto zero = zero_state<T>(sys.m, sys.n);
    for (int j = 0; j < sys.m; ++j) {
        if (!(scalar_traits<T>::to_double(sys.gamma[static_cast<size_t>(j)]) > 1.0))
            throw std::invalid_argument("GeneralDegenerateSystem: gamma_" + std::to_string(j + 1) + " must be > 1");
        if (auto* ann = sys.coefA(j, sys.n - 1, sys.n - 1)) {
            T v = ann->eval(zero);
            if (std::abs(scalar_traits<T>::to_double(v)) > 1e-14)
                throw std::invalid_argument("GeneralDegenerateSystem: A^j_nn(0) != 0 for j = " + std::to_string(j + 1));
        }
        if (sys.g[static_cast<size_t>(j)]) {
            auto dz = dual_state_vertical_seeds<T>(zero, sys.m, sys.n);
            Dual<T> gv = sys.g[static_cast<size_t>(j)]->eval(dz);
            for (int i = 0; i < sys.m; ++i)
                if (std::abs(scalar_traits<T>::to_double(gv.g[static_cast<size_t>(i)])) > 1e-14)
                    throw std::invalid_argument("GeneralDegenerateSystem: d_{v_n^" + std::to_string(i + 1) + "} g^"
                                                + std::to_string(j + 1) + "(0,0) != 0");
        }
    }
}

// The transformed model system: gamma_1 = 2(kappa-1), gamma_j = 2kappa, the
// tangential Laplacian and the hodograph coefficients a_l moved to the right
// side, g^1 = b and g^j = -kappa sum_l a_l d_l v^j - c d_n v^j.
template <class T>
GeneralDegenerateSystem<T> instantiate_model(const ModelConstantsT<T>& cnst) {
    GeneralDegenerateSystem<T> sys;
    sys.m = cnst.m;
    sys.n = cnst.n;
    const int n = cnst.n;
    T one = scalar_traits<T>::from_int(1);
    T two = scalar_traits<T>::from_int(2);
    sys.gamma.assign(static_cast<size_t>(cnst.m), two * cnst.kappa);
    sys.gamma[0] = two * (cnst.kappa - one);
    sys.A.assign(static_cast<size_t>(cnst.m),
                 std::vector<std::shared_ptr<AnalyticFn<T>>>(static_cast<size_t>(n * n)));
    sys.g.assign(static_cast<size_t>(cnst.m), nullptr);

    for (int j = 0; j < cnst.m; ++j) {
        for (int k = 0; k < n - 1; ++k) {
            sys.A[static_cast<size_t>(j)][static_cast<size_t>(k * n + k)] =
                make_analytic_fn<T>([](const auto& st) {
                    return ring_const(st.grad[0][0], scalar_traits<T>::from_int(-1));
                });
        }
        for (int ell = 0; ell < n; ++ell) {
            sys.A[static_cast<size_t>(j)][static_cast<size_t>(ell * n + (n - 1))] =
                make_analytic_fn<T>([ell, cnst](const auto& st) {
                    auto a = coeff_a(ell, st, cnst);
                    return ring_scale(a, scalar_traits<T>::from_int(-1));
                });
        }
    }
    sys.g[0] = make_analytic_fn<T>([cnst](const auto& st) { return coeff_b(st, cnst); });
    for (int j = 1; j < cnst.m; ++j) {
        sys.g[static_cast<size_t>(j)] = make_analytic_fn<T>([j, cnst, n](const auto& st) {
            auto acc = ring_scale(coeff_c(st, cnst) * st.grad[static_cast<size_t>(j)].back(),
                                  scalar_traits<T>::from_int(-1));
            for (int ell = 0; ell < n; ++ell) {
                auto term = coeff_a(ell, st, cnst) * st.grad[static_cast<size_t>(j)][static_cast<size_t>(ell)];
                acc = acc - ring_scale(term, cnst.kappa);
            }
            return acc;
        });
    }
    return sys;
}

}  // namespace hodo
