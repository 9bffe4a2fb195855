#include "hodo/degenerate.hpp"

#include <algorithm>
#include <cmath>

#include "hodo/linalg.hpp"
#include "hodo/quadrature.hpp"
#include "hodo/weiss.hpp"

namespace hodo {

// ---- 1D degenerate ODE ----------------------------------------------------

Ode1DSolution solve_ode_1d(double gamma, const std::function<double(double)>& f) {
    if (!(gamma > 1.0)) throw std::invalid_argument("solve_ode_1d: gamma must be > 1");

    auto du = [gamma, f](double x) {
        if (x <= 0) return f(0.0) / gamma;  // limit value
        // int_0^x t^{gamma-1} f dt, panels graded toward the endpoint t = 0
        double integral = graded_panel_integral(
            [&](double t) { return std::pow(t, gamma - 1.0) * f(t); }, 0.0, x, 40, 12);
        return integral * std::pow(x, -gamma);
    };
    auto u = [du](double x) {
        if (x <= 0) return 0.0;
        return graded_panel_integral(du, 0.0, x, 16, 10);
    };
    auto xd2 = [gamma, f, du](double x) { return f(x) - gamma * du(x); };

    Ode1DSolution out;
    out.du = du;
    out.u = u;
    out.x_d2u = xd2;
    for (int i = 0; i <= 100; ++i) {
        double x = static_cast<double>(i) / 100.0;
        out.sup_f = std::max(out.sup_f, std::fabs(f(x)));
        out.sup_du = std::max(out.sup_du, std::fabs(du(x)));
        out.sup_xd2u = std::max(out.sup_xd2u, std::fabs(xd2(x)));
    }
    return out;
}

double green_1d(double gamma, double x, double y) {
    if (!(x > 0) || !(y > 0)) throw std::domain_error("green_1d: arguments must be positive");
    double t = std::max(x, y);
    if (gamma == 1.0) return std::log(t);
    return std::pow(t, 1.0 - gamma) / (1.0 - gamma);
}

double intrinsic_distance(const Vec& x, const Vec& y) {
    if (x.back() < 0 || y.back() < 0)
        throw std::domain_error("intrinsic_distance: points must lie in the closed half-space");
    double d2 = 0;
    for (size_t i = 0; i < x.size(); ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
    double d = std::sqrt(d2);
    if (d == 0) return 0;
    return d / std::sqrt(d + x.back() + y.back());
}

double ball_measure(const Vec& x, double r, double gamma) {
    if (!(r > 0)) throw std::domain_error("ball_measure: r must be > 0");
    if (x.back() < 0) throw std::domain_error("ball_measure: x_n must be >= 0");
    double n = static_cast<double>(x.size());
    return std::pow(x.back() + r * r, gamma + n / 2.0) * std::pow(r, n);
}

// ---- grid stencils ----------------------------------------------------------

namespace {

struct StencilEntry {
    size_t node;
    double coef;
};

void d1_weights(const std::vector<double>& t, int k, double& wm, double& w0, double& wp) {
    double hm = t[static_cast<size_t>(k)] - t[static_cast<size_t>(k - 1)];
    double hp = t[static_cast<size_t>(k + 1)] - t[static_cast<size_t>(k)];
    wm = -hp / (hm * (hm + hp));
    w0 = (hp - hm) / (hm * hp);
    wp = hm / (hp * (hm + hp));
}

void d2_weights(const std::vector<double>& t, int k, double& wm, double& w0, double& wp) {
    double hm = t[static_cast<size_t>(k)] - t[static_cast<size_t>(k - 1)];
    double hp = t[static_cast<size_t>(k + 1)] - t[static_cast<size_t>(k)];
    wm = 2.0 / (hm * (hm + hp));
    w0 = -2.0 / (hm * hp);
    wp = 2.0 / (hp * (hm + hp));
}

// one-sided second-order first derivative at the left end
void d1_onesided(const std::vector<double>& t, double& w0, double& w1, double& w2) {
    double h1 = t[1] - t[0], h2 = t[2] - t[1];
    w0 = -(2.0 * h1 + h2) / (h1 * (h1 + h2));
    w1 = (h1 + h2) / (h1 * h2);
    w2 = -h1 / (h2 * (h1 + h2));
}

bool is_tangential_boundary(const HalfSpaceGrid& g, const std::vector<int>& idx) {
    for (int a = 0; a < g.dim() - 1; ++a)
        if (idx[static_cast<size_t>(a)] == 0 || idx[static_cast<size_t>(a)] == g.count(a) - 1) return true;
    return false;
}

// stencil of y_n Lap + gamma d_n at a non-Dirichlet node (one-sided row at y_n = 0)
std::vector<StencilEntry> deg_row(const HalfSpaceGrid& g, double gamma, const std::vector<int>& idx) {
    const int n = g.dim();
    const auto& tv = g.axis(n - 1).nodes;
    int iv = idx[static_cast<size_t>(n - 1)];
    std::vector<StencilEntry> row;
    auto push = [&](int axis, int shift, double c) {
        auto j = idx;
        j[static_cast<size_t>(axis)] += shift;
        row.push_back({g.flat(j), c});
    };
    if (iv == 0) {
        double w0, w1, w2;
        d1_onesided(tv, w0, w1, w2);
        push(n - 1, 0, gamma * w0);
        push(n - 1, 1, gamma * w1);
        push(n - 1, 2, gamma * w2);
        return row;
    }
    double yn = tv[static_cast<size_t>(iv)];
    for (int a = 0; a < n - 1; ++a) {
        const auto& t = g.axis(a).nodes;
        double h = t[1] - t[0];
        push(a, -1, yn / (h * h));
        push(a, 0, -2.0 * yn / (h * h));
        push(a, 1, yn / (h * h));
    }
    double m2, c2, p2, m1, c1, p1;
    d2_weights(tv, iv, m2, c2, p2);
    d1_weights(tv, iv, m1, c1, p1);
    push(n - 1, -1, yn * m2 + gamma * m1);
    push(n - 1, 0, yn * c2 + gamma * c1);
    push(n - 1, 1, yn * p2 + gamma * p1);
    return row;
}

}  // namespace

Field apply_deg_operator(double gamma, const Field& u) {
    const auto& g = u.grid();
    Field out(g, 1);
    for (size_t nd = 0; nd < g.node_count(); ++nd) {
        auto idx = g.unflat(nd);
        if (is_tangential_boundary(g, idx)) continue;
        if (idx[static_cast<size_t>(g.dim() - 1)] == g.count(g.dim() - 1) - 1) continue;
        double acc = 0;
        for (auto& e : deg_row(g, gamma, idx)) acc += e.coef * u.at(e.node, 0);
        out.at(nd, 0) = acc;
    }
    return out;
}

Field solve_deg_linear_nd(double gamma, const Field& f, const std::function<double(const Vec&)>& bc) {
    if (!(gamma > 0)) throw std::invalid_argument("solve_deg_linear_nd: gamma must be > 0");
    const auto& g = f.grid();
    const int n = g.dim();

    std::vector<long> eq(g.node_count(), -1);
    std::vector<size_t> nodes;
    for (size_t nd = 0; nd < g.node_count(); ++nd) {
        auto idx = g.unflat(nd);
        bool dirichlet = is_tangential_boundary(g, idx) || idx[static_cast<size_t>(n - 1)] == g.count(n - 1) - 1;
        if (!dirichlet) {
            eq[nd] = static_cast<long>(nodes.size());
            nodes.push_back(nd);
        }
    }

    size_t stride0 = g.node_count() / static_cast<size_t>(g.count(0));
    int band = static_cast<int>(stride0);
    BandedMatrix A(static_cast<int>(nodes.size()), band, band);
    std::vector<double> rhs(nodes.size(), 0.0);

    for (size_t r = 0; r < nodes.size(); ++r) {
        auto idx = g.unflat(nodes[r]);
        rhs[r] = f.at(nodes[r], 0);
        for (auto& e : deg_row(g, gamma, idx)) {
            if (eq[e.node] >= 0)
                A.at(static_cast<int>(r), static_cast<int>(eq[e.node])) += e.coef;
            else
                rhs[r] -= e.coef * bc(g.point(g.unflat(e.node)));
        }
    }
    A.factor();
    auto x = A.solve(rhs);

    Field out(g, 1);
    for (size_t nd = 0; nd < g.node_count(); ++nd) {
        if (eq[nd] >= 0)
            out.at(nd, 0) = x[static_cast<size_t>(eq[nd])];
        else
            out.at(nd, 0) = bc(g.point(g.unflat(nd)));
    }
    return out;
}

// ---- weighted Sobolev norm --------------------------------------------------

namespace {

std::vector<double> axis_weights(const std::vector<double>& t) {
    std::vector<double> w(t.size());
    for (size_t i = 0; i < t.size(); ++i) {
        double lo = i == 0 ? t[0] : 0.5 * (t[i - 1] + t[i]);
        double hi = i + 1 == t.size() ? t.back() : 0.5 * (t[i] + t[i + 1]);
        w[i] = hi - lo;
    }
    return w;
}

double fd1(const Field& u, const std::vector<int>& idx, int axis, int comp) {
    const auto& g = u.grid();
    const auto& t = g.axis(axis).nodes;
    int k = idx[static_cast<size_t>(axis)];
    auto at = [&](int kk) {
        auto j = idx;
        j[static_cast<size_t>(axis)] = kk;
        return u.at(g.flat(j), comp);
    };
    if (k == 0) return (at(1) - at(0)) / (t[1] - t[0]);
    if (k == g.count(axis) - 1)
        return (at(k) - at(k - 1)) / (t[static_cast<size_t>(k)] - t[static_cast<size_t>(k - 1)]);
    double wm, w0, wp;
    d1_weights(t, k, wm, w0, wp);
    return wm * at(k - 1) + w0 * at(k) + wp * at(k + 1);
}

double fd2(const Field& u, const std::vector<int>& idx, int axis, int comp) {
    const auto& g = u.grid();
    const auto& t = g.axis(axis).nodes;
    int k = idx[static_cast<size_t>(axis)];
    if (k == 0 || k == g.count(axis) - 1) return 0.0;  // edge rows excluded from D^2
    auto at = [&](int kk) {
        auto j = idx;
        j[static_cast<size_t>(axis)] = kk;
        return u.at(g.flat(j), comp);
    };
    double wm, w0, wp;
    d2_weights(t, k, wm, w0, wp);
    return wm * at(k - 1) + w0 * at(k) + wp * at(k + 1);
}

}  // namespace

double wkp_star_norm(const Field& u, int k, double p) {
    if (k != 2) throw std::invalid_argument("wkp_star_norm: only k = 2 is implemented");
    if (!(p >= 1)) throw std::invalid_argument("wkp_star_norm: p must be >= 1");
    const auto& g = u.grid();
    const int n = g.dim();
    std::vector<std::vector<double>> w;
    for (int a = 0; a < n; ++a) w.push_back(axis_weights(g.axis(a).nodes));

    double grad_int = 0, d2_int = 0;
    for (size_t nd = 0; nd < g.node_count(); ++nd) {
        auto idx = g.unflat(nd);
        double wt = 1;
        for (int a = 0; a < n; ++a) wt *= w[static_cast<size_t>(a)][static_cast<size_t>(idx[static_cast<size_t>(a)])];
        double yn = g.axis(n - 1).nodes[static_cast<size_t>(idx[static_cast<size_t>(n - 1)])];
        for (int c = 0; c < u.components(); ++c) {
            for (int a = 0; a < n; ++a) grad_int += wt * std::pow(std::fabs(fd1(u, idx, a, c)), p);
            for (int a = 0; a < n; ++a)
                for (int b2 = 0; b2 < n; ++b2) {
                    double d2;
                    if (a == b2) {
                        d2 = fd2(u, idx, a, c);
                    } else {
                        // mixed derivative by nested first differences
                        auto j = idx;
                        const auto& t = g.axis(a).nodes;
                        int ka = idx[static_cast<size_t>(a)];
                        if (ka == 0 || ka == g.count(a) - 1) {
                            d2 = 0;
                        } else {
                            j[static_cast<size_t>(a)] = ka + 1;
                            double fp = fd1(u, j, b2, c);
                            j[static_cast<size_t>(a)] = ka - 1;
                            double fm = fd1(u, j, b2, c);
                            d2 = (fp - fm) / (t[static_cast<size_t>(ka + 1)] - t[static_cast<size_t>(ka - 1)]);
                        }
                    }
                    d2_int += wt * std::pow(std::fabs(yn * d2), p);
                }
        }
    }
    return std::pow(grad_int, 1.0 / p) + std::pow(d2_int, 1.0 / p);
}

// ---- direct nonlinear solver --------------------------------------------------

Field solve_direct_nonlinear(const ModelConstants& cnst, const std::function<Vec(const Vec&)>& bc,
                             const HalfSpaceGrid& grid, const DirectSolveOptions& opt) {
    const int n = grid.dim();
    const int m = cnst.m;
    const double q = cnst.q;

    double h = grid.axis(0).nodes[1] - grid.axis(0).nodes[0];
    double delta = opt.delta > 0 ? opt.delta : h * h;

    // interior-node numbering for the plain Laplacian with full Dirichlet data
    std::vector<long> eq(grid.node_count(), -1);
    std::vector<size_t> nodes;
    for (size_t nd = 0; nd < grid.node_count(); ++nd) {
        auto idx = grid.unflat(nd);
        bool boundary = false;
        for (int a = 0; a < n; ++a)
            if (idx[static_cast<size_t>(a)] == 0 || idx[static_cast<size_t>(a)] == grid.count(a) - 1) boundary = true;
        if (!boundary) {
            eq[nd] = static_cast<long>(nodes.size());
            nodes.push_back(nd);
        }
    }
    size_t stride0 = grid.node_count() / static_cast<size_t>(grid.count(0));
    BandedMatrix A(static_cast<int>(nodes.size()), static_cast<int>(stride0), static_cast<int>(stride0));

    struct BcEntry {
        size_t bcnode;
        double coef;
    };
    std::vector<std::vector<BcEntry>> rows(nodes.size());
    for (size_t r = 0; r < nodes.size(); ++r) {
        auto idx = grid.unflat(nodes[r]);
        for (int a = 0; a < n; ++a) {
            const auto& t = grid.axis(a).nodes;
            int ka = idx[static_cast<size_t>(a)];
            double wm, w0, wp;
            d2_weights(t, ka, wm, w0, wp);
            double ws[3] = {wm, w0, wp};
            for (int s = -1; s <= 1; ++s) {
                auto j = idx;
                j[static_cast<size_t>(a)] += s;
                size_t nd = grid.flat(j);
                double c = ws[s + 1];
                if (eq[nd] >= 0)
                    A.at(static_cast<int>(r), static_cast<int>(eq[nd])) += c;
                else
                    rows[r].push_back({nd, c});
            }
        }
    }
    A.factor();

    Field u(grid, m);
    std::vector<Vec> bcvals(grid.node_count());
    for (size_t nd = 0; nd < grid.node_count(); ++nd) {
        auto idx = grid.unflat(nd);
        bool boundary = eq[nd] < 0;
        if (boundary) {
            bcvals[nd] = bc(grid.point(idx));
            for (int c = 0; c < m; ++c) u.at(nd, c) = bcvals[nd][static_cast<size_t>(c)];
        }
    }

    std::vector<double> rhs(nodes.size());
    double omega = opt.damping;
    double best = 1e300;
    int stall = 0;
    for (int it = 0; it < opt.maxit; ++it) {
        double change = 0;
        std::vector<std::vector<double>> znew(static_cast<size_t>(m));
        for (int c = 0; c < m; ++c) {
            for (size_t r = 0; r < nodes.size(); ++r) {
                size_t nd = nodes[r];
                // continuous delta-regularization: |u|^{q-1} u above the
                // threshold, delta^{q-1} u below (a hard cutoff makes the
                // active set flicker and the iteration limit-cycle)
                double mag = std::max(u.magnitude(nd), delta);
                rhs[r] = std::pow(mag, q - 1.0) * u.at(nd, c);
                for (auto& e : rows[r]) rhs[r] -= e.coef * bcvals[e.bcnode][static_cast<size_t>(c)];
            }
            znew[static_cast<size_t>(c)] = A.solve(rhs);
        }
        for (size_t r = 0; r < nodes.size(); ++r) {
            for (int c = 0; c < m; ++c) {
                double old = u.at(nodes[r], c);
                double nxt = (1.0 - omega) * old + omega * znew[static_cast<size_t>(c)][r];
                change = std::max(change, std::fabs(nxt - old));
                u.at(nodes[r], c) = nxt;
            }
        }
        if (change < opt.tol) return u;
        // halve the damping when the change stops decreasing, which breaks
        // the two-cycle the flat q-profiles can otherwise fall into
        if (change < best * 0.995) {
            best = change;
            stall = 0;
        } else if (++stall >= 30) {
            omega = std::max(0.5 * omega, 1.0 / 64.0);
            best = change;
            stall = 0;
        }
    }
    throw std::runtime_error("solve_direct_nonlinear: fixed-point iteration did not converge");
}

// ---- free boundary -----------------------------------------------------------

double grid_residual_max(const Field& u, double q) {
    const auto& g = u.grid();
    const int n = g.dim();
    double worst = 0;
    for (size_t nd = 0; nd < g.node_count(); ++nd) {
        auto idx = g.unflat(nd);
        bool interior = true;
        for (int a = 0; a < n; ++a)
            if (idx[static_cast<size_t>(a)] == 0 || idx[static_cast<size_t>(a)] == g.count(a) - 1)
                interior = false;
        if (!interior) continue;
        double mag = u.magnitude(nd);
        for (int c = 0; c < u.components(); ++c) {
            double lap = 0;
            for (int a = 0; a < n; ++a) lap += fd2(u, idx, a, c);
            double r = lap;
            if (mag > 0) r -= std::pow(mag, q - 1.0) * u.at(nd, c);
            worst = std::max(worst, std::fabs(r));
        }
    }
    return worst;
}

std::vector<Vec> extract_free_boundary(const Field& u, double threshold) {
    const auto& g = u.grid();
    const int n = g.dim();
    std::vector<Vec> pts;
    for (size_t nd = 0; nd < g.node_count(); ++nd) {
        auto idx = g.unflat(nd);
        double s0 = u.magnitude(nd) - threshold;
        for (int a = 0; a < n; ++a) {
            if (idx[static_cast<size_t>(a)] + 1 >= g.count(a)) continue;
            auto j = idx;
            j[static_cast<size_t>(a)] += 1;
            double s1 = u.magnitude(g.flat(j)) - threshold;
            if ((s0 < 0) == (s1 < 0)) continue;
            if (s0 == s1) continue;
            double t = s0 / (s0 - s1);
            Vec p = g.point(idx);
            const auto& ax = g.axis(a).nodes;
            p[static_cast<size_t>(a)] += t * (ax[static_cast<size_t>(idx[static_cast<size_t>(a)]) + 1]
                                              - ax[static_cast<size_t>(idx[static_cast<size_t>(a)])]);
            pts.push_back(std::move(p));
        }
    }
    return pts;
}

RegularVerdict classify_regular(const Field& u, double q, const Vec& x0,
                                const std::vector<double>& radii, double tol) {
    const auto& g = u.grid();
    double maxmag = 0;
    for (size_t nd = 0; nd < g.node_count(); ++nd) maxmag = std::max(maxmag, u.magnitude(nd));
    double thr = 1e-10 * maxmag;
    auto interface = extract_free_boundary(u, thr);
    if (interface.empty()) throw std::runtime_error("classify_regular: no free boundary in the field");

    double cell = 0;
    for (int a = 0; a < g.dim(); ++a) {
        const auto& t = g.axis(a).nodes;
        for (size_t i = 1; i < t.size(); ++i) cell = std::max(cell, t[i] - t[i - 1]);
    }
    double dist = 1e300;
    for (auto& p : interface) {
        double d2 = 0;
        for (size_t i = 0; i < p.size(); ++i) d2 += (p[i] - x0[i]) * (p[i] - x0[i]);
        dist = std::min(dist, std::sqrt(d2));
    }
    if (dist > 2.0 * cell)
        throw std::runtime_error("classify_regular: x0 is not on the extracted interface");

    RegularVerdict out;
    out.omega = omega_q(g.dim(), q);
    FieldClosure uc = grid_closure(u);
    bool ok = true;
    int used = 0;
    std::vector<double> sorted = radii;
    std::sort(sorted.begin(), sorted.end());
    for (double r : sorted) {
        if (r < 3.0 * cell) continue;  // below the reliable resolution
        bool inside = true;
        for (int a = 0; a < g.dim(); ++a) {
            const auto& t = g.axis(a).nodes;
            if (x0[static_cast<size_t>(a)] - r < t.front() || x0[static_cast<size_t>(a)] + r > t.back())
                inside = false;
        }
        if (!inside) continue;
        WeissQuadrature quad;
        quad.radial = 16;
        quad.tol = 1e-7;
        double W = weiss_energy(uc, x0, r, q, quad);
        out.weiss_values.emplace_back(r, W);
        ok = ok && std::fabs(W - out.omega) < tol;
        if (++used >= 3) break;
    }
    if (out.weiss_values.empty())
        throw std::runtime_error("classify_regular: no reliable radius available");
    out.regular_consistent = ok;
    return out;
}

}  // namespace hodo
