#include "hodo/theorem12.hpp"

#include <cmath>
#include <limits>

namespace hodo {

namespace {

double coefficient_sum(const Series<double>& s, bool skip_constant) {
    double acc = 0;
    for (auto& [mu, v] : s.coefficients()) {
        if (skip_constant && mu.is_zero()) continue;
        acc += std::fabs(v) / static_cast<double>(multifactorial_u64(mu));
    }
    return acc;
}

CauchyData<double> scale_data(const CauchyData<double>& data, double r) {
    CauchyData<double> out;
    for (size_t j = 0; j < data.v0.size(); ++j) {
        Series<double> s(data.v0[j].dim(), data.v0[j].order());
        for (auto& [mu, val] : data.v0[j].coefficients()) {
            double f = std::pow(r, mu.total());
            if (j == 0) f /= r;
            s.set(mu, val * f);
        }
        out.v0.push_back(std::move(s));
    }
    return out;
}

}  // namespace

Theorem12Result theorem12_from_data(const ModelConstants& cnst, const CauchyData<double>& data,
                                    const Theorem12Options& opt) {
    data.validate();
    auto sys = instantiate_model(cnst);

    // invariant rescaling until the data are inside the perturbative regime
    double scale = 1.0;
    CauchyData<double> small = data;
    auto proxy = [&](const CauchyData<double>& d) {
        double acc = coefficient_sum(d.v0[0], false);
        for (size_t j = 1; j < d.v0.size(); ++j) acc = std::max(acc, coefficient_sum(d.v0[j], true));
        return acc;
    };
    // A constant offset of v^1 is scaling-invariant (the surface must pass
    // through the origin), so stop as soon as halving stops helping.
    for (int halvings = 0; proxy(small) > opt.data_norm_target && halvings < 40; ++halvings) {
        auto next = scale_data(data, scale * 0.5);
        if (proxy(next) >= proxy(small)) break;
        scale *= 0.5;
        small = std::move(next);
    }

    CKOptions<double> ck_opt;
    ck_opt.smallness_max = opt.smallness_max;
    auto res = ck_expand(sys, small, opt.order, ck_opt);

    Theorem12Result out{LegendreState(cnst, res.v), {}, res.first_order, scale, {}, 0, {}, {}, 0};
    NormParams np(opt.R, opt.r, opt.order);
    double eps = std::max({small.epsilon0(), proxy(small), 1e-12});
    double c0 = opt.C0;
    if (c0 <= 0) {
        // calibrate C0 as twice the order-1 norm relative to the data size
        auto rep1 = convergence_diagnostics(res.v, np, 1.0, 1.0);
        c0 = 2.0 * std::max(rep1.aggregate[std::min<size_t>(1, rep1.aggregate.size() - 1)], eps) / eps;
    }
    out.C0_used = c0;
    out.diagnostics = convergence_diagnostics(res.v, np, c0, eps);

    // back to the original coordinates, then reconstruct
    if (scale != 1.0) out.legendre = rescale_legendre(out.legendre, 1.0 / scale);
    out.u = inverse_reconstruct(out.legendre);

    // residual decay on dyadic shells |x| = 2^{-k}
    const int n = cnst.n;
    for (int k = opt.shells_from; k <= opt.shells_to; ++k) {
        double rho = std::pow(2.0, -k);
        double worst = 0;
        for (int s = 0; s < opt.shell_samples; ++s) {
            Vec x(static_cast<size_t>(n), 0.0);
            if (n == 2) {
                double th = M_PI * (s + 0.5) / opt.shell_samples;  // upper half circle
                x[0] = rho * std::cos(th);
                x[1] = rho * std::sin(th);
            } else {
                double th = 2.0 * M_PI * (s + 0.5) / opt.shell_samples;
                double ph = M_PI * ((s * 7) % opt.shell_samples + 0.5) / opt.shell_samples / 2.0;
                x[0] = rho * std::cos(th) * std::sin(ph);
                x[1] = rho * std::sin(th) * std::sin(ph);
                x[2] = rho * std::cos(ph);
            }
            for (double c : reconstruction_residual(out.legendre, x)) worst = std::max(worst, std::fabs(c));
        }
        out.shell_radii.push_back(rho);
        out.shell_residual.push_back(worst);
    }

    // least-squares slope of log residual against log radius
    int cnt = 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < out.shell_radii.size(); ++i) {
        if (out.shell_residual[i] <= 1e-300) continue;
        double lx = std::log(out.shell_radii[i]);
        double ly = std::log(out.shell_residual[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++cnt;
    }
    if (cnt >= 2)
        out.residual_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    else
        out.residual_slope = std::numeric_limits<double>::infinity();
    return out;
}

Theorem12Result theorem12_solve(const ModelConstants& cnst, const Series<double>& phi,
                                const std::vector<Series<double>>& Vplus,
                                const Theorem12Options& opt) {
    if (phi.dim() != cnst.n) throw std::invalid_argument("theorem12_solve: phi must be a dim-n series");
    if (std::fabs(phi.value_at_origin()) > 1e-14)
        throw std::invalid_argument("theorem12_solve: surface must pass through the origin, phi(0) = 0");
    for (int k = 0; k < cnst.n - 1; ++k)
        if (std::fabs(phi.get(MultiIndex::unit(cnst.n, k))) > 1e-14)
            throw std::invalid_argument(
                "theorem12_solve: rotate the domain so that grad phi(0) = 0 before calling");
    if (static_cast<int>(Vplus.size()) != cnst.m)
        throw std::invalid_argument("theorem12_solve: V_plus needs m components");

    // Householder reflection in the target space taking V_plus(0) to e_1
    Vec v0(static_cast<size_t>(cnst.m), 0.0);
    for (int j = 0; j < cnst.m; ++j) v0[static_cast<size_t>(j)] = Vplus[static_cast<size_t>(j)].value_at_origin();
    if (std::fabs(norm2(v0) - 1.0) > 1e-10)
        throw std::invalid_argument("theorem12_solve: V_plus(0) must be a unit vector");
    Vec w = v0;
    w[0] -= 1.0;
    double wn = norm2(w);
    Mat Q(static_cast<size_t>(cnst.m), Vec(static_cast<size_t>(cnst.m), 0.0));
    for (int i = 0; i < cnst.m; ++i) Q[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1.0;
    if (wn > 1e-14)
        for (int i = 0; i < cnst.m; ++i)
            for (int j = 0; j < cnst.m; ++j)
                Q[static_cast<size_t>(i)][static_cast<size_t>(j)] -=
                    2.0 * w[static_cast<size_t>(i)] * w[static_cast<size_t>(j)] / (wn * wn);

    // rotated boundary direction series and the Cauchy data of the proof:
    // v0^1 = phi, v0^j = alpha (QV)^j / (QV)^1
    std::vector<Series<double>> rot;
    for (int i = 0; i < cnst.m; ++i) {
        Series<double> acc(cnst.n, Vplus[0].order());
        for (int j = 0; j < cnst.m; ++j)
            acc = acc + Vplus[static_cast<size_t>(j)].scaled(Q[static_cast<size_t>(i)][static_cast<size_t>(j)]);
        rot.push_back(std::move(acc));
    }
    PowOuter<double> inv(-1.0);
    Series<double> lead_inv = rot[0].compose_outer(inv);

    CauchyData<double> data;
    data.v0.push_back(phi);
    for (int j = 1; j < cnst.m; ++j)
        data.v0.push_back((rot[static_cast<size_t>(j)] * lead_inv).scaled(cnst.alpha));

    auto result = theorem12_from_data(cnst, data, opt);

    // undo the target rotation on the reconstructed field (Q is involutive)
    FieldClosure rotated = result.u;
    int m = cnst.m;
    result.u.value = [rotated, Q, m](const Vec& x) {
        Vec v = rotated.value(x);
        Vec out(static_cast<size_t>(m), 0.0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                out[static_cast<size_t>(i)] += Q[static_cast<size_t>(j)][static_cast<size_t>(i)] * v[static_cast<size_t>(j)];
        return out;
    };
    if (rotated.grad)
        result.u.grad = [rotated, Q, m](const Vec& x) {
            Mat g = rotated.grad(x);
            Mat out(static_cast<size_t>(m), Vec(g[0].size(), 0.0));
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    for (size_t a = 0; a < g[0].size(); ++a)
                        out[static_cast<size_t>(i)][a] += Q[static_cast<size_t>(j)][static_cast<size_t>(i)] * g[static_cast<size_t>(j)][a];
            return out;
        };
    if (rotated.hess)
        result.u.hess = [rotated, Q, m](const Vec& x) {
            Ten3 h = rotated.hess(x);
            Ten3 out(static_cast<size_t>(m), Mat(h[0].size(), Vec(h[0].size(), 0.0)));
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    for (size_t a = 0; a < h[0].size(); ++a)
                        for (size_t b = 0; b < h[0].size(); ++b)
                            out[static_cast<size_t>(i)][a][b] += Q[static_cast<size_t>(j)][static_cast<size_t>(i)] * h[static_cast<size_t>(j)][a][b];
            return out;
        };
    return result;
}

}  // namespace hodo
