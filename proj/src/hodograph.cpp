#include "hodo/hodograph.hpp"

#include <cmath>
#include <memory>

namespace hodo {

namespace {

// Differentiated copies of the Legendre series, shared by the reconstruction
// closures.
struct SeriesJet {
    Series<double> f;
    std::vector<Series<double>> d;
    std::vector<std::vector<Series<double>>> dd;

    explicit SeriesJet(const Series<double>& s) : f(s) {
        const int n = s.dim();
        for (int i = 0; i < n; ++i) d.push_back(s.differentiate(i));
        dd.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) dd[static_cast<size_t>(i)].push_back(d[static_cast<size_t>(i)].differentiate(k));
    }
};

struct ReconstructionData {
    ModelConstants cnst;
    std::vector<SeriesJet> jets;  // one per component

    explicit ReconstructionData(const LegendreState& st) : cnst(st.constants) {
        for (auto& comp : st.v) jets.emplace_back(comp);
    }
};

// Root of t + v^1(x', t) = x_n with t >= 0; returns -1 when the point lies in
// the dead zone {u = 0}.
double solve_vertical(const ReconstructionData& rd, const Vec& x) {
    const int n = rd.cnst.n;
    Vec y(x.begin(), x.end());
    auto psi = [&](double t) {
        y[static_cast<size_t>(n - 1)] = t;
        return t + rd.jets[0].f.evaluate_d(y) - x[static_cast<size_t>(n - 1)];
    };
    auto dpsi = [&](double t) {
        y[static_cast<size_t>(n - 1)] = t;
        return 1.0 + rd.jets[0].d[static_cast<size_t>(n - 1)].evaluate_d(y);
    };

    double f0 = psi(0.0);
    if (f0 >= 0) return f0 == 0.0 ? 0.0 : -1.0;

    // expanding bracket: starting at the coefficient-sum bound overshoots
    // wildly once the series has been rescaled back to a small radius
    double xn = x[static_cast<size_t>(n - 1)];
    double hi = std::max(xn, 0.0) + std::max(1e-9, std::fabs(xn));
    for (int k = 0; k < 80 && psi(hi) < 0; ++k) hi *= 2.0;
    if (psi(hi) < 0) throw std::runtime_error("inverse_reconstruct: no bracket for the vertical root");

    double lo = 0.0;
    double t = std::min(std::max(x[static_cast<size_t>(n - 1)], 0.0), hi);
    double tol = 1e-14 * std::max(1.0, std::fabs(x[static_cast<size_t>(n - 1)]));
    for (int it = 0; it < 100; ++it) {
        double ft = psi(t);
        if (std::fabs(ft) < tol) return t;
        if (ft > 0)
            hi = t;
        else
            lo = t;
        double fp = dpsi(t);
        if (fp < 0.1)
            throw std::runtime_error("inverse_reconstruct: transform degenerate, 1 + d_n v^1 < 0.1");
        double next = t - ft / fp;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - t) < 1e-16 * std::max(1.0, t)) return next;
        t = next;
    }
    throw std::runtime_error("inverse_reconstruct: Newton did not converge");
}

struct Jet2 {
    double val;
    Vec grad;
    Mat hess;
};

// 2-jet of w(x) = s(x', y_n(x)) given y_n's own 2-jet.
Jet2 pullback(const SeriesJet& s, const Vec& y, const Vec& g, const Mat& h, int n) {
    Jet2 out;
    out.val = s.f.evaluate_d(y);
    out.grad.assign(static_cast<size_t>(n), 0.0);
    out.hess.assign(static_cast<size_t>(n), Vec(static_cast<size_t>(n), 0.0));
    Vec dv(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) dv[static_cast<size_t>(i)] = s.d[static_cast<size_t>(i)].evaluate_d(y);
    double dn = dv[static_cast<size_t>(n - 1)];
    for (int i = 0; i < n; ++i) {
        double tang = (i < n - 1) ? dv[static_cast<size_t>(i)] : 0.0;
        out.grad[static_cast<size_t>(i)] = tang + dn * g[static_cast<size_t>(i)];
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double acc = dn * h[static_cast<size_t>(i)][static_cast<size_t>(j)]
                         + s.dd[static_cast<size_t>(n - 1)][static_cast<size_t>(n - 1)].evaluate_d(y)
                               * g[static_cast<size_t>(i)] * g[static_cast<size_t>(j)];
            if (i < n - 1 && j < n - 1)
                acc += s.dd[static_cast<size_t>(i)][static_cast<size_t>(j)].evaluate_d(y);
            if (i < n - 1)
                acc += s.dd[static_cast<size_t>(i)][static_cast<size_t>(n - 1)].evaluate_d(y) * g[static_cast<size_t>(j)];
            if (j < n - 1)
                acc += s.dd[static_cast<size_t>(j)][static_cast<size_t>(n - 1)].evaluate_d(y) * g[static_cast<size_t>(i)];
            out.hess[static_cast<size_t>(i)][static_cast<size_t>(j)] = acc;
        }
    }
    return out;
}

}  // namespace

std::vector<TransformSample> forward_transform(const FieldClosure& u, const ModelConstants& cnst,
                                               const std::vector<Vec>& points) {
    std::vector<TransformSample> out;
    out.reserve(points.size());
    const int n = cnst.n;
    for (const auto& x : points) {
        Vec uv = u.value(x);
        double u1 = uv[0];
        if (u1 < -1e-12 * (1.0 + std::fabs(u1)))
            throw std::runtime_error("forward_transform: negative u^1 sample at " + std::to_string(x[0]));
        double yn = u1 <= 0 ? 0.0 : std::pow(u1 / cnst.alpha, 1.0 / cnst.kappa);
        if (u1 > 0 && u.grad) {
            Mat g = u.grad(x);
            if (g[0][static_cast<size_t>(n - 1)] <= 0)
                throw std::runtime_error("forward_transform: vanishing vertical derivative (non-invertible)");
        }
        TransformSample s;
        s.x = x;
        s.y.assign(x.begin(), x.end());
        s.y[static_cast<size_t>(n - 1)] = yn;
        out.push_back(std::move(s));
    }
    return out;
}

LegendreSamples legendre_from_solution(const FieldClosure& u, const ModelConstants& cnst,
                                       const std::vector<Vec>& ypoints) {
    const int n = cnst.n;
    LegendreSamples out;
    auto util = [&](const Vec& x) {
        double u1 = u.value(x)[0];
        return u1 <= 0 ? 0.0 : std::pow(u1 / cnst.alpha, 1.0 / cnst.kappa);
    };
    for (const auto& y : ypoints) {
        double yn = y[static_cast<size_t>(n - 1)];
        if (yn < 0) throw std::invalid_argument("legendre_from_solution: y_n must be >= 0");
        double target = std::max(yn, 1e-9);  // ratio v^j extends continuously to y_n = 0
        Vec x(y.begin(), y.end());
        auto psi = [&](double xn) {
            x[static_cast<size_t>(n - 1)] = xn;
            return util(x) - target;
        };
        // bracket the monotone vertical profile
        double lo = target, hi = target;
        for (int k = 0; k < 200 && psi(lo) > 0; ++k) lo -= std::max(0.25 * std::fabs(lo), 0.05);
        for (int k = 0; k < 200 && psi(hi) < 0; ++k) hi += std::max(0.25 * std::fabs(hi), 0.05);
        if (psi(lo) > 0 || psi(hi) < 0)
            throw std::runtime_error("legendre_from_solution: inversion failure (no bracket)");
        double xn = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            double f = psi(xn);
            if (f > 0)
                hi = xn;
            else
                lo = xn;
            double next = 0.5 * (lo + hi);
            if (std::fabs(hi - lo) < 1e-15 * std::max(1.0, std::fabs(xn))) break;
            xn = next;
        }
        x[static_cast<size_t>(n - 1)] = xn;
        Vec uv = u.value(x);
        Vec v(static_cast<size_t>(cnst.m), 0.0);
        v[0] = xn - target;
        for (int j = 1; j < cnst.m; ++j)
            v[static_cast<size_t>(j)] = cnst.alpha * uv[static_cast<size_t>(j)] / uv[0];
        // report against the requested y_n, not the inset one
        if (yn != target) v[0] = xn - yn;
        out.points.push_back(y);
        out.values.push_back(std::move(v));
    }
    return out;
}

FieldClosure inverse_reconstruct(const LegendreState& st) {
    auto rd = std::make_shared<ReconstructionData>(st);
    const int n = st.constants.n;
    const int m = st.constants.m;
    const double alpha = st.constants.alpha;
    const double kappa = st.constants.kappa;

    FieldClosure f;
    f.n = n;
    f.m = m;

    auto vertical_jet = [rd, n](const Vec& x, double t, Vec& g, Mat& h) {
        Vec y(x.begin(), x.end());
        y[static_cast<size_t>(n - 1)] = t;
        const auto& j1 = rd->jets[0];
        double D = 1.0 + j1.d[static_cast<size_t>(n - 1)].evaluate_d(y);
        g.assign(static_cast<size_t>(n), 0.0);
        for (int i = 0; i < n - 1; ++i)
            g[static_cast<size_t>(i)] = -j1.d[static_cast<size_t>(i)].evaluate_d(y) / D;
        g[static_cast<size_t>(n - 1)] = 1.0 / D;
        h.assign(static_cast<size_t>(n), Vec(static_cast<size_t>(n), 0.0));
        double vnn = j1.dd[static_cast<size_t>(n - 1)][static_cast<size_t>(n - 1)].evaluate_d(y);
        for (int i = 0; i < n; ++i) {
            for (int jx = 0; jx < n; ++jx) {
                double acc = vnn * g[static_cast<size_t>(i)] * g[static_cast<size_t>(jx)];
                if (i < n - 1 && jx < n - 1)
                    acc += j1.dd[static_cast<size_t>(i)][static_cast<size_t>(jx)].evaluate_d(y);
                if (i < n - 1)
                    acc += j1.dd[static_cast<size_t>(i)][static_cast<size_t>(n - 1)].evaluate_d(y)
                           * g[static_cast<size_t>(jx)];
                if (jx < n - 1)
                    acc += j1.dd[static_cast<size_t>(jx)][static_cast<size_t>(n - 1)].evaluate_d(y)
                           * g[static_cast<size_t>(i)];
                h[static_cast<size_t>(i)][static_cast<size_t>(jx)] = -acc / D;
            }
        }
        return y;
    };

    f.value = [rd, n, m, alpha, kappa](const Vec& x) {
        Vec out(static_cast<size_t>(m), 0.0);
        double t = solve_vertical(*rd, x);
        if (t <= 0) return out;
        Vec y(x.begin(), x.end());
        y[static_cast<size_t>(n - 1)] = t;
        double tk = std::pow(t, kappa);
        out[0] = alpha * tk;
        for (int j = 1; j < m; ++j)
            out[static_cast<size_t>(j)] = tk * rd->jets[static_cast<size_t>(j)].f.evaluate_d(y);
        return out;
    };

    f.grad = [rd, n, m, alpha, kappa, vertical_jet](const Vec& x) {
        Mat out(static_cast<size_t>(m), Vec(static_cast<size_t>(n), 0.0));
        double t = solve_vertical(*rd, x);
        if (t <= 0) return out;
        Vec g;
        Mat h;
        Vec y = vertical_jet(x, t, g, h);
        double tk1 = std::pow(t, kappa - 1.0);
        for (int i = 0; i < n; ++i) out[0][static_cast<size_t>(i)] = alpha * kappa * tk1 * g[static_cast<size_t>(i)];
        double tk = tk1 * t;
        for (int j = 1; j < m; ++j) {
            Jet2 vj = pullback(rd->jets[static_cast<size_t>(j)], y, g, h, n);
            for (int i = 0; i < n; ++i)
                out[static_cast<size_t>(j)][static_cast<size_t>(i)] =
                    kappa * tk1 * g[static_cast<size_t>(i)] * vj.val + tk * vj.grad[static_cast<size_t>(i)];
        }
        return out;
    };

    f.hess = [rd, n, m, alpha, kappa, vertical_jet](const Vec& x) {
        Ten3 out(static_cast<size_t>(m), Mat(static_cast<size_t>(n), Vec(static_cast<size_t>(n), 0.0)));
        double t = solve_vertical(*rd, x);
        if (t <= 0) return out;
        Vec g;
        Mat h;
        Vec y = vertical_jet(x, t, g, h);
        double tk2 = std::pow(t, kappa - 2.0);
        double tk1 = tk2 * t, tk = tk1 * t;
        for (int i = 0; i < n; ++i)
            for (int jx = 0; jx < n; ++jx)
                out[0][static_cast<size_t>(i)][static_cast<size_t>(jx)] =
                    alpha * kappa * (kappa - 1.0) * tk2 * g[static_cast<size_t>(i)] * g[static_cast<size_t>(jx)]
                    + alpha * kappa * tk1 * h[static_cast<size_t>(i)][static_cast<size_t>(jx)];
        for (int j = 1; j < m; ++j) {
            Jet2 vj = pullback(rd->jets[static_cast<size_t>(j)], y, g, h, n);
            for (int i = 0; i < n; ++i)
                for (int jx = 0; jx < n; ++jx)
                    out[static_cast<size_t>(j)][static_cast<size_t>(i)][static_cast<size_t>(jx)] =
                        kappa * (kappa - 1.0) * tk2 * g[static_cast<size_t>(i)] * g[static_cast<size_t>(jx)] * vj.val
                        + kappa * tk1
                              * (h[static_cast<size_t>(i)][static_cast<size_t>(jx)] * vj.val
                                 + g[static_cast<size_t>(i)] * vj.grad[static_cast<size_t>(jx)]
                                 + g[static_cast<size_t>(jx)] * vj.grad[static_cast<size_t>(i)])
                        + tk * vj.hess[static_cast<size_t>(i)][static_cast<size_t>(jx)];
        }
        return out;
    };

    return f;
}

double free_boundary_height(const LegendreState& st, const Vec& xprime) {
    Vec y(xprime.begin(), xprime.end());
    y.push_back(0.0);
    return st.v[0].evaluate_d(y);
}

std::vector<Vec> residual_original(const FieldClosure& u, double q, const std::vector<Vec>& points) {
    std::vector<Vec> out;
    out.reserve(points.size());
    for (const auto& x : points) out.push_back(pde_residual(u, q, x));
    return out;
}

namespace {

using LD = long double;

LD eval_ld(const Series<double>& s, const std::vector<LD>& y) {
    LD sum = 0;
    for (auto& [mu, v] : s.coefficients()) {
        LD term = static_cast<LD>(v) / static_cast<LD>(multifactorial_u64(mu));
        for (int i = 0; i < s.dim(); ++i)
            for (int k = 0; k < mu[i]; ++k) term *= y[static_cast<size_t>(i)];
        sum += term;
    }
    return sum;
}

}  // namespace

Vec reconstruction_residual(const LegendreState& st, const Vec& x) {
    const int n = st.constants.n;
    const int m = st.constants.m;
    // constants rebuilt in extended precision: the double rounding of alpha
    // alone leaves a relative 1e-17 residual floor on exact profiles
    const LD q = st.constants.q;
    const LD kappa = 2.0L / (1.0L - q);
    const LD alpha = std::pow(kappa * (kappa - 1.0L), -kappa / 2.0L);
    SeriesJet j1(st.v[0]);

    std::vector<LD> y(x.begin(), x.end());
    auto psi = [&](LD t) {
        y[static_cast<size_t>(n - 1)] = t;
        return t + eval_ld(j1.f, y) - static_cast<LD>(x[static_cast<size_t>(n - 1)]);
    };
    LD f0 = psi(0.0L);
    if (f0 >= 0) return Vec(static_cast<size_t>(m), 0.0);
    LD t = std::max<LD>(x[static_cast<size_t>(n - 1)], 0.0L);
    for (int it = 0; it < 200; ++it) {
        LD ft = psi(t);
        LD fp = 1.0L + eval_ld(j1.d[static_cast<size_t>(n - 1)], y);
        if (fp < 0.1L) throw std::runtime_error("reconstruction_residual: transform degenerate");
        LD next = t - ft / fp;
        if (next < 0) next = t / 2;
        if (std::fabs(static_cast<double>(next - t)) < 1e-19 * std::max(1.0, std::fabs(static_cast<double>(t)))) {
            t = next;
            break;
        }
        t = next;
    }
    if (t <= 0) return Vec(static_cast<size_t>(m), 0.0);
    y[static_cast<size_t>(n - 1)] = t;

    // vertical jet
    LD D = 1.0L + eval_ld(j1.d[static_cast<size_t>(n - 1)], y);
    std::vector<LD> g(static_cast<size_t>(n));
    for (int i = 0; i < n - 1; ++i) g[static_cast<size_t>(i)] = -eval_ld(j1.d[static_cast<size_t>(i)], y) / D;
    g[static_cast<size_t>(n - 1)] = 1.0L / D;
    std::vector<std::vector<LD>> h(static_cast<size_t>(n), std::vector<LD>(static_cast<size_t>(n), 0.0L));
    LD vnn = eval_ld(j1.dd[static_cast<size_t>(n - 1)][static_cast<size_t>(n - 1)], y);
    for (int i = 0; i < n; ++i)
        for (int jx = 0; jx < n; ++jx) {
            LD acc = vnn * g[static_cast<size_t>(i)] * g[static_cast<size_t>(jx)];
            if (i < n - 1 && jx < n - 1) acc += eval_ld(j1.dd[static_cast<size_t>(i)][static_cast<size_t>(jx)], y);
            if (i < n - 1) acc += eval_ld(j1.dd[static_cast<size_t>(i)][static_cast<size_t>(n - 1)], y) * g[static_cast<size_t>(jx)];
            if (jx < n - 1) acc += eval_ld(j1.dd[static_cast<size_t>(jx)][static_cast<size_t>(n - 1)], y) * g[static_cast<size_t>(i)];
            h[static_cast<size_t>(i)][static_cast<size_t>(jx)] = -acc / D;
        }

    LD tk2 = std::pow(t, kappa - 2.0L);
    LD tk1 = tk2 * t, tk = tk1 * t;

    // values and Laplacians of all components
    std::vector<LD> uval(static_cast<size_t>(m), 0.0L), ulap(static_cast<size_t>(m), 0.0L);
    uval[0] = alpha * tk;
    for (int i = 0; i < n; ++i)
        ulap[0] += alpha * kappa * (kappa - 1.0L) * tk2 * g[static_cast<size_t>(i)] * g[static_cast<size_t>(i)]
                   + alpha * kappa * tk1 * h[static_cast<size_t>(i)][static_cast<size_t>(i)];
    for (int jc = 1; jc < m; ++jc) {
        SeriesJet jj(st.v[static_cast<size_t>(jc)]);
        LD vj = eval_ld(jj.f, y);
        LD djn = eval_ld(jj.d[static_cast<size_t>(n - 1)], y);
        uval[static_cast<size_t>(jc)] = tk * vj;
        for (int i = 0; i < n; ++i) {
            LD gi = g[static_cast<size_t>(i)];
            LD dvi = ((i < n - 1) ? eval_ld(jj.d[static_cast<size_t>(i)], y) : 0.0L) + djn * gi;
            LD d2;
            {
                LD acc = eval_ld(jj.dd[static_cast<size_t>(n - 1)][static_cast<size_t>(n - 1)], y) * gi * gi
                         + djn * h[static_cast<size_t>(i)][static_cast<size_t>(i)];
                if (i < n - 1) {
                    acc += eval_ld(jj.dd[static_cast<size_t>(i)][static_cast<size_t>(i)], y);
                    acc += 2.0L * eval_ld(jj.dd[static_cast<size_t>(i)][static_cast<size_t>(n - 1)], y) * gi;
                }
                d2 = acc;
            }
            ulap[static_cast<size_t>(jc)] += kappa * (kappa - 1.0L) * tk2 * gi * gi * vj
                                             + kappa * tk1 * (h[static_cast<size_t>(i)][static_cast<size_t>(i)] * vj + 2.0L * gi * dvi)
                                             + tk * d2;
        }
    }

    LD mag2 = 0;
    for (auto& c : uval) mag2 += c * c;
    LD mag = std::sqrt(mag2);
    Vec out(static_cast<size_t>(m), 0.0);
    for (int jc = 0; jc < m; ++jc) {
        LD r = ulap[static_cast<size_t>(jc)];
        if (mag > 0) r -= std::pow(mag, q - 1.0L) * uval[static_cast<size_t>(jc)];
        out[static_cast<size_t>(jc)] = static_cast<double>(r);
    }
    return out;
}

}  // namespace hodo
