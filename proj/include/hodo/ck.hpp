#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hodo/cksystem.hpp"
#include "hodo/linalg.hpp"

namespace hodo {

// Analytic Cauchy data v0 : R^{n-1} -> R^m prescribing the trace v(.,0).
// Stored as full-dimension series whose vertical index is identically zero,
// so the weighted-order bookkeeping matches the interior series.
template <class T>
struct CauchyData {
    std::vector<Series<T>> v0;  // m components, dim n, mu_n = 0 throughout

    int m() const { return static_cast<int>(v0.size()); }
    int tangential_dim() const { return v0.empty() ? 0 : v0[0].dim() - 1; }

    void validate() const {
        for (auto& s : v0)
            for (auto& [mu, val] : s.coefficients())
                if (mu.vertical() != 0)
                    throw std::invalid_argument("CauchyData: data must not involve the vertical variable");
    }

    // smallness certificate max(|v0(0)|, |grad' v0(0)|)
    double epsilon0() const {
        double e = 0;
        for (auto& s : v0) {
            e = std::max(e, std::abs(scalar_traits<T>::to_double(s.value_at_origin())));
            for (int k = 0; k + 1 < s.dim(); ++k)
                e = std::max(e, std::abs(scalar_traits<T>::to_double(s.get(MultiIndex::unit(s.dim(), k)))));
        }
        return e;
    }
};

template <class T>
struct CKOptions {
    double smallness_max = 0.2;     // reject data with epsilon0 above this
    double newton_tol = 1e-14;
    int newton_maxit = 60;
    std::optional<std::vector<T>> first_order_seed;  // exact mode: verified root of the first-order system
};

template <class T>
struct CKResult {
    std::vector<Series<T>> v;      // m components, dim n, truncated at the requested order
    std::vector<T> first_order;    // p = d_n v(0)
};

namespace detail {

template <class T>
StateArgs<T> point_state(const GeneralDegenerateSystem<T>& sys, const CauchyData<T>& data,
                         const std::vector<T>& p) {
    StateArgs<T> st = zero_state<T>(sys.m, sys.n);
    for (int i = 0; i < sys.m; ++i) {
        const auto& s = data.v0[static_cast<size_t>(i)];
        st.v[static_cast<size_t>(i)] = s.value_at_origin();
        for (int k = 0; k < sys.n - 1; ++k)
            st.grad[static_cast<size_t>(i)][static_cast<size_t>(k)] = s.get(MultiIndex::unit(s.dim(), k));
        st.grad[static_cast<size_t>(i)][static_cast<size_t>(sys.n - 1)] = p[static_cast<size_t>(i)];
    }
    return st;
}

template <class T>
std::vector<T> first_order_residual(const GeneralDegenerateSystem<T>& sys, const CauchyData<T>& data,
                                    const std::vector<T>& p) {
    auto st = point_state(sys, data, p);
    std::vector<T> F(static_cast<size_t>(sys.m), T{});
    for (int j = 0; j < sys.m; ++j) {
        T gval = sys.g[static_cast<size_t>(j)] ? sys.g[static_cast<size_t>(j)]->eval(st) : T{};
        F[static_cast<size_t>(j)] = sys.gamma[static_cast<size_t>(j)] * p[static_cast<size_t>(j)] - gval;
    }
    return F;
}

}  // namespace detail

// Solves gamma_j p_j = g^j(v0(0), grad' v0(0), p) for the small root p, the
// trace of d_n v on {y_n = 0} at the origin. Damped Newton from p = 0; in
// exact-rational mode the iteration must land on an exact root (which it does
// when g does not depend on d_n v, or when a verified seed is supplied).
template <class T>
std::vector<T> solve_first_order_point(const GeneralDegenerateSystem<T>& sys, const CauchyData<T>& data,
                                       const CKOptions<T>& opt = {}) {
    if (data.m() != sys.m) throw std::invalid_argument("solve_first_order: component count mismatch");
    data.validate();
    if (data.epsilon0() > opt.smallness_max)
        throw std::runtime_error("solve_first_order: smallness violated, epsilon0 = "
                                 + std::to_string(data.epsilon0()) + " exceeds "
                                 + std::to_string(opt.smallness_max));

    std::vector<T> p(static_cast<size_t>(sys.m), T{});
    if (opt.first_order_seed) {
        p = *opt.first_order_seed;
        auto F = detail::first_order_residual(sys, data, p);
        for (auto& f : F)
            if (std::abs(scalar_traits<T>::to_double(f)) > (scalar_traits<T>::exact ? 0.0 : opt.newton_tol))
                throw std::invalid_argument("solve_first_order: supplied seed is not a root");
        return p;
    }

    auto fnorm = [](const std::vector<T>& F) {
        double s = 0;
        for (auto& f : F) s = std::max(s, std::abs(scalar_traits<T>::to_double(f)));
        return s;
    };

    auto F = detail::first_order_residual(sys, data, p);
    double res = fnorm(F);
    for (int it = 0; it < opt.newton_maxit; ++it) {
        if (scalar_traits<T>::exact) {
            bool all_zero = true;
            for (auto& f : F) all_zero = all_zero && scalar_traits<T>::is_zero(f);
            if (all_zero) return p;
        } else if (res <= opt.newton_tol) {
            return p;
        }
        // Jacobian gamma_j delta_ij - d_{v_n^i} g^j at the current point
        auto st = detail::point_state(sys, data, p);
        auto dual = dual_state_vertical_seeds<T>(st, sys.m, sys.n);
        std::vector<T> J(static_cast<size_t>(sys.m * sys.m), T{});
        for (int j = 0; j < sys.m; ++j) {
            Dual<T> gv(T{}, static_cast<size_t>(sys.m));
            if (sys.g[static_cast<size_t>(j)]) gv = sys.g[static_cast<size_t>(j)]->eval(dual);
            for (int i = 0; i < sys.m; ++i) {
                T val = (i == j) ? sys.gamma[static_cast<size_t>(j)] : T{};
                val = val - gv.g[static_cast<size_t>(i)];
                J[static_cast<size_t>(j * sys.m + i)] = val;
            }
        }
        std::vector<T> step;
        try {
            step = solve_dense<T>(J, F);
        } catch (const std::runtime_error&) {
            throw std::runtime_error("solve_first_order: singular Jacobian (violated smallness)");
        }
        double lambda = 1.0;
        for (int back = 0; back < 40; ++back) {
            std::vector<T> cand = p;
            T lam = scalar_traits<T>::exact ? scalar_traits<T>::from_int(1)
                                            : scalar_traits<T>::from_fraction(static_cast<long long>(lambda * (1 << 20)), 1 << 20);
            for (int i = 0; i < sys.m; ++i)
                cand[static_cast<size_t>(i)] = cand[static_cast<size_t>(i)] - lam * step[static_cast<size_t>(i)];
            auto Fc = detail::first_order_residual(sys, data, cand);
            double rc = fnorm(Fc);
            if (rc < res || scalar_traits<T>::exact) {
                p = cand;
                F = Fc;
                res = rc;
                break;
            }
            lambda *= 0.5;
            if (back == 39) throw std::runtime_error("solve_first_order: Newton stalled (data too large)");
        }
    }
    if (scalar_traits<T>::exact)
        throw std::runtime_error("solve_first_order: exact mode did not reach an exact root; supply a seed");
    if (res > opt.newton_tol * 1e3)
        throw std::runtime_error("solve_first_order: Newton did not converge (data too large)");
    return p;
}

namespace detail {

template <class T>
StateArgs<Series<T>> series_state(const std::vector<Series<T>>& v, int work_order) {
    StateArgs<Series<T>> st;
    const int n = v[0].dim();
    for (auto& comp : v) st.v.push_back(comp.truncated(work_order));
    st.grad.resize(v.size());
    for (size_t i = 0; i < v.size(); ++i)
        for (int k = 0; k < n; ++k)
            st.grad[i].push_back(v[i].differentiate(k).truncated(work_order));
    return st;
}

// Residual series of the abstract system at the current truncation, valid
// through weighted order work_order (components with higher order are not
// touched). v must hold every coefficient of weighted order <= work_order + 2
// except the vertical unknowns the caller is about to solve for.
template <class T>
std::vector<Series<T>> system_residual(const GeneralDegenerateSystem<T>& sys,
                                       const std::vector<Series<T>>& v, int work_order) {
    const int n = sys.n;
    auto st = series_state(v, work_order);
    int prod_order = work_order - 2;
    StateArgs<Series<T>> stp;
    if (prod_order >= 0) stp = series_state(v, prod_order);

    std::vector<Series<T>> R;
    for (int j = 0; j < sys.m; ++j) {
        const auto& vj = v[static_cast<size_t>(j)];
        Series<T> res = vj.differentiate(n - 1).differentiate(n - 1).shifted_vertical(work_order);
        res = res + vj.differentiate(n - 1).truncated(work_order).scaled(sys.gamma[static_cast<size_t>(j)]);
        if (prod_order >= 0) {
            for (int k = 0; k < n; ++k) {
                for (int l = 0; l < n; ++l) {
                    const auto* fn = sys.coefA(j, k, l);
                    if (!fn) continue;
                    Series<T> akl = fn->eval(stp);
                    Series<T> dkl = vj.differentiate(k).differentiate(l).truncated(prod_order);
                    res = res - (akl * dkl).shifted_vertical(work_order);
                }
            }
        }
        if (sys.g[static_cast<size_t>(j)]) res = res - sys.g[static_cast<size_t>(j)]->eval(st);
        R.push_back(std::move(res));
    }
    return R;
}

}  // namespace detail

// Order-by-order Taylor construction of the unique formal solution with the
// given Cauchy data: at each multi-index mu the vertical coefficients
// V^j_{mu+e_n} solve the m x m system
//   [(mu_n + gamma_j) d_ij - mu_n A^j_nn(grad v(0)) d_ij - d_{v_n^i} g^j(0)] x = -R_mu,
// with R_mu the residual of the current truncation. The right-hand side is
// obtained by full series re-substitution rather than incremental l.o.t.
// bookkeeping.
template <class T>
CKResult<T> ck_expand(const GeneralDegenerateSystem<T>& sys, const CauchyData<T>& data, int order,
                      const CKOptions<T>& opt = {}) {
    if (order < 1) throw std::invalid_argument("ck_expand: order must be >= 1");
    if (data.tangential_dim() != sys.n - 1)
        throw std::invalid_argument("ck_expand: data must have n-1 tangential variables");
    const int n = sys.n;

    // The recursion indexes derivative coefficients V^{jn}_mu by the weighted
    // order of mu (that is how the convergence norms count them), so the
    // component series carry vertical coefficients up to weighted order s + 2.
    const int vorder = order + 2;

    CKResult<T> out;
    out.first_order = solve_first_order_point(sys, data, opt);

    // seed: tangential trace plus the first-order vertical derivative
    for (int j = 0; j < sys.m; ++j) {
        Series<T> comp = data.v0[static_cast<size_t>(j)].extended(vorder);
        MultiIndex en = MultiIndex::unit(n, n - 1);
        comp.set(en, out.first_order[static_cast<size_t>(j)]);
        out.v.push_back(comp);
    }

    // matrix blocks depend on mu only through mu_n
    auto st0 = detail::point_state(sys, data, out.first_order);
    auto dual0 = dual_state_vertical_seeds<T>(st0, sys.m, sys.n);
    std::vector<T> ann(static_cast<size_t>(sys.m), T{});
    std::vector<T> gn(static_cast<size_t>(sys.m * sys.m), T{});
    for (int j = 0; j < sys.m; ++j) {
        if (auto* f = sys.coefA(j, n - 1, n - 1)) ann[static_cast<size_t>(j)] = f->eval(st0);
        if (sys.g[static_cast<size_t>(j)]) {
            Dual<T> gv = sys.g[static_cast<size_t>(j)]->eval(dual0);
            for (int i = 0; i < sys.m; ++i) gn[static_cast<size_t>(j * sys.m + i)] = gv.g[static_cast<size_t>(i)];
        }
    }

    for (int w = 1; w <= order; ++w) {
        auto R = detail::system_residual(sys, out.v, w);
        for (const auto& mu : indices_of_order(n, w)) {
            MultiIndex target = mu.plus(n - 1, +1);
            int mun = mu.vertical();
            std::vector<T> M(static_cast<size_t>(sys.m * sys.m), T{});
            for (int j = 0; j < sys.m; ++j)
                for (int i = 0; i < sys.m; ++i) {
                    T val = -gn[static_cast<size_t>(j * sys.m + i)];
                    if (i == j)
                        val = val + sys.gamma[static_cast<size_t>(j)] + scalar_traits<T>::from_int(mun)
                              - scalar_traits<T>::from_int(mun) * ann[static_cast<size_t>(j)];
                    M[static_cast<size_t>(j * sys.m + i)] = val;
                }
            std::vector<T> rhs(static_cast<size_t>(sys.m), T{});
            for (int j = 0; j < sys.m; ++j) rhs[static_cast<size_t>(j)] = -R[static_cast<size_t>(j)].get(mu);
            std::vector<T> x;
            try {
                x = solve_dense<T>(M, rhs);
            } catch (const std::runtime_error&) {
                throw std::runtime_error("ck_expand: singular block at mu = " + mu.str()
                                         + " (violated structural conditions)");
            }
            for (int j = 0; j < sys.m; ++j) out.v[static_cast<size_t>(j)].set(target, x[static_cast<size_t>(j)]);
        }
    }
    return out;
}

template <class T>
struct FirstOrderSolution {
    std::vector<T> p;                     // d_n v(0)
    std::vector<Series<T>> tangential;    // d_n v on {y_n = 0} through the order
};

template <class T>
std::vector<Series<T>> vertical_trace_series(const CKResult<T>& res);

// The implicit first-order solve together with the tangential series of
// d_n v on the boundary, as determined by the recursion.
template <class T>
FirstOrderSolution<T> solve_first_order(const GeneralDegenerateSystem<T>& sys, const CauchyData<T>& data,
                                        int order, const CKOptions<T>& opt = {}) {
    auto res = ck_expand(sys, data, order, opt);
    return {res.first_order, vertical_trace_series(res)};
}

// Trace of d_n v on {y_n = 0}: the full tangential series as determined by
// the recursion, in the same vertical-index-zero representation as the data.
template <class T>
std::vector<Series<T>> vertical_trace_series(const CKResult<T>& res) {
    std::vector<Series<T>> out;
    const int n = res.v[0].dim();
    for (auto& comp : res.v) {
        Series<T> dn = comp.differentiate(n - 1);
        Series<T> trace(n, dn.order());
        for (auto& [mu, val] : dn.coefficients())
            if (mu.vertical() == 0) trace.set(mu, val);
        out.push_back(trace);
    }
    return out;
}

struct ConvergenceReport {
    std::vector<std::vector<double>> partial_sums;  // [component*dim+axis][order]
    std::vector<double> aggregate;                  // max over derivatives, per order
    double radius_estimate = 0;                     // empirical analyticity radius
    bool within_bound = true;                       // all sums <= C0 * eps0
    double bound = 0;
};

// Per-order partial sums of the weighted coefficient norms of all d_k v^j,
// with a geometric-tail fit of the empirical convergence radius.
template <class T>
ConvergenceReport convergence_diagnostics(const std::vector<Series<T>>& v, const NormParams& p,
                                          double C0, double eps0) {
    ConvergenceReport rep;
    rep.bound = C0 * eps0;
    const int n = v[0].dim();
    size_t norders = static_cast<size_t>(p.s) + 1;
    rep.aggregate.assign(norders, 0.0);
    for (auto& comp : v) {
        for (int k = 0; k < n; ++k) {
            auto sums = weighted_norm_by_order(comp.differentiate(k), p);
            sums.resize(norders, sums.empty() ? 0.0 : sums.back());
            for (size_t t = 0; t < norders; ++t) rep.aggregate[t] = std::max(rep.aggregate[t], sums[t]);
            rep.partial_sums.push_back(std::move(sums));
        }
    }
    for (double s : rep.aggregate)
        if (s > rep.bound) rep.within_bound = false;

    // Increments of the aggregate behave like (R/rho)^t up to polynomial
    // factors; the tail ratios estimate the geometric rate best.
    std::vector<double> inc;
    for (size_t t = 1; t < norders; ++t) inc.push_back(rep.aggregate[t] - rep.aggregate[t - 1]);
    double logsum = 0;
    int cnt = 0;
    size_t first = inc.size() > 4 ? inc.size() - 3 : 1;
    for (size_t t = first; t < inc.size(); ++t) {
        if (inc[t] > 0 && inc[t - 1] > 0) {
            logsum += std::log(inc[t] / inc[t - 1]);
            ++cnt;
        }
    }
    if (cnt == 0)
        rep.radius_estimate = std::numeric_limits<double>::infinity();
    else
        rep.radius_estimate = p.R / std::exp(logsum / cnt);
    return rep;
}

}  // namespace hodo
