#include <cmath>
#include <random>

#include "doctest.h"
#include "hodo/hodograph.hpp"

using namespace hodo;

namespace {

// Legendre data of the exact half-space alpha (x.nu)_+^kappa e: affine v^1,
// constant v^j. beta = (e.e_1)^{1/kappa} accounts for target rotation.
LegendreState tilted_halfspace_state(const ModelConstants& cnst, const Vec& nu, const Vec& e, int order) {
    double c1 = e[0];
    double beta = std::pow(c1, 1.0 / cnst.kappa);
    double nun = nu.back();
    std::vector<Series<double>> comps;
    Series<double> v1(cnst.n, order);
    for (int k = 0; k < cnst.n - 1; ++k)
        v1.set(MultiIndex::unit(cnst.n, k), -nu[static_cast<size_t>(k)] / nun);
    v1.set(MultiIndex::unit(cnst.n, cnst.n - 1), 1.0 / (beta * nun) - 1.0);
    comps.push_back(v1);
    for (int j = 1; j < cnst.m; ++j)
        comps.push_back(Series<double>::constant(cnst.n, order, cnst.alpha * e[static_cast<size_t>(j)] / c1));
    return LegendreState(cnst, comps);
}

LegendreState synthetic_state(const ModelConstants& cnst, int order) {
    std::vector<Series<double>> comps;
    Series<double> v1(cnst.n, order);
    v1.set(MultiIndex::unit(cnst.n, 0), 0.03);
    v1.set(MultiIndex::unit(cnst.n, cnst.n - 1), 0.02);
    {
        MultiIndex sq(cnst.n);
        sq[0] = 2;
        v1.set(sq, 2.0 * 0.015);  // derivative value of 0.015 y1^2
    }
    comps.push_back(v1);
    for (int j = 1; j < cnst.m; ++j) {
        Series<double> vj = Series<double>::constant(cnst.n, order, 0.01 * j);
        vj.set(MultiIndex::unit(cnst.n, 0), 0.005);
        comps.push_back(vj);
    }
    return LegendreState(cnst, comps);
}

double max_abs(const Series<double>& s) {
    double m = 0;
    for (auto& [mu, v] : s.coefficients()) m = std::max(m, std::fabs(v));
    return m;
}

}  // namespace

TEST_CASE("forward transform is the identity on the flat half-space") {
    ModelConstants cnst(0.5, 2, 1);
    HalfSpaceSolution hs(cnst, {0.0, 1.0}, {1.0});
    auto cl = hs.closure();
    auto samples = forward_transform(cl, cnst, {{0.2, 0.7}, {-0.4, 0.3}, {0.5, 0.01}});
    for (auto& s : samples) {
        CHECK(s.y[0] == doctest::Approx(s.x[0]));
        CHECK(s.y[1] == doctest::Approx(s.x[1]).epsilon(1e-12));
    }
    // dead zone collapses to y_n = 0
    auto dead = forward_transform(cl, cnst, {{0.1, -0.5}});
    CHECK(dead[0].y[1] == 0.0);

    // error paths: negative u^1 sample and a vanishing vertical derivative
    FieldClosure neg;
    neg.n = 2;
    neg.m = 1;
    neg.value = [](const Vec&) { return Vec{-0.1}; };
    CHECK_THROWS_AS(forward_transform(neg, cnst, {{0.0, 0.5}}), std::runtime_error);

    FieldClosure flat_top;
    flat_top.n = 2;
    flat_top.m = 1;
    flat_top.value = [](const Vec&) { return Vec{0.3}; };
    flat_top.grad = [](const Vec&) { return Mat(1, Vec(2, 0.0)); };
    CHECK_THROWS_AS(forward_transform(flat_top, cnst, {{0.0, 0.5}}), std::runtime_error);
}

TEST_CASE("legendre functions of tilted and rotated half-spaces") {
    ModelConstants cnst(0.5, 2, 2);
    Vec nu = {0.28, 0.96};
    Vec e = {0.8, 0.6};
    HalfSpaceSolution hs(cnst, nu, e);
    auto cl = hs.closure();

    std::vector<Vec> ypts = {{0.05, 0.3}, {-0.1, 0.5}, {0.2, 0.08}};
    auto samples = legendre_from_solution(cl, cnst, ypts);

    auto exact = tilted_halfspace_state(cnst, nu, e, 4);
    for (size_t i = 0; i < ypts.size(); ++i) {
        double v1 = exact.v[0].evaluate_d(ypts[i]);
        CHECK(samples.values[i][0] == doctest::Approx(v1).epsilon(1e-9));
        // v^j = alpha (e.e_j)/(e.e_1), constant
        CHECK(samples.values[i][1] == doctest::Approx(cnst.alpha * 0.6 / 0.8).epsilon(1e-12));
    }

    // flat profile: v identically zero
    HalfSpaceSolution flat(cnst, {0.0, 1.0}, {1.0, 0.0});
    auto fs = legendre_from_solution(flat.closure(), cnst, ypts);
    for (auto& v : fs.values) {
        CHECK(std::fabs(v[0]) < 1e-9);
        CHECK(std::fabs(v[1]) < 1e-12);
    }
}

TEST_CASE("inverse reconstruction of v = 0 is the flat half-space") {
    ModelConstants cnst(0.5, 2, 1);
    LegendreState zero(cnst, {Series<double>(2, 6)});
    auto u = inverse_reconstruct(zero);
    CHECK(u.value({0.3, 0.5})[0] == doctest::Approx(cnst.alpha * std::pow(0.5, 4.0)));
    CHECK(u.value({0.3, -0.2})[0] == 0.0);

    // constant v^1 shifts the free boundary to x_n = const
    Series<double> c(2, 6);
    c.set(MultiIndex{0, 0}, 0.25);
    LegendreState shifted(cnst, {c});
    auto us = inverse_reconstruct(shifted);
    CHECK(us.value({0.1, 0.20})[0] == 0.0);
    CHECK(us.value({0.1, 0.25})[0] == doctest::Approx(0.0));
    CHECK(us.value({0.1, 0.50})[0] == doctest::Approx(cnst.alpha * std::pow(0.25, 4.0)).epsilon(1e-12));
}

TEST_CASE("reconstruct-then-legendre roundtrip") {
    ModelConstants cnst(0.5, 2, 2);
    auto st = synthetic_state(cnst, 4);
    auto u = inverse_reconstruct(st);

    std::vector<Vec> ypts;
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> t(-0.3, 0.3), v(0.05, 0.4);
    for (int i = 0; i < 40; ++i) ypts.push_back({t(rng), v(rng)});
    auto samples = legendre_from_solution(u, cnst, ypts);
    for (size_t i = 0; i < ypts.size(); ++i) {
        for (int j = 0; j < cnst.m; ++j) {
            double expect = st.v[static_cast<size_t>(j)].evaluate_d(ypts[i]);
            CHECK(samples.values[i][static_cast<size_t>(j)]
                  == doctest::Approx(expect).epsilon(1e-9));
        }
    }

    // forward transform recovers y on the reconstructed field
    auto fwd = forward_transform(u, cnst, {{0.1, 0.3}, {-0.2, 0.4}});
    for (auto& s : fwd) {
        // y solves x_n = y_n + v^1(x', y_n)
        Vec y = s.y;
        double lhs = y[1] + st.v[0].evaluate_d(y);
        CHECK(lhs == doctest::Approx(s.x[1]).epsilon(1e-10));
    }
}

TEST_CASE("free boundary of the reconstruction sits at x_n = v^1(x',0)") {
    ModelConstants cnst(0.5, 2, 1);
    auto st = synthetic_state(cnst, 4);
    auto u = inverse_reconstruct(st);
    for (double x1 : {-0.2, 0.0, 0.15}) {
        double fb = free_boundary_height(st, {x1});
        CHECK(u.value({x1, fb - 1e-12})[0] == 0.0);
        CHECK(u.value({x1, fb + 1e-6})[0] > 0.0);
        // bisection against the value closure agrees with the graph height
        double lo = fb - 0.1, hi = fb + 0.1;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            if (u.value({x1, mid})[0] > 0)
                hi = mid;
            else
                lo = mid;
        }
        CHECK(0.5 * (lo + hi) == doctest::Approx(fb).epsilon(1e-10));
    }
}

TEST_CASE("reconstruction closures match finite differences") {
    ModelConstants cnst(0.5, 2, 2);
    auto st = synthetic_state(cnst, 4);
    auto u = inverse_reconstruct(st);
    Vec x = {0.12, 0.4};
    auto g = u.grad(x);
    auto gfd = fd_gradient(u, x, 1e-6);
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i)
            CHECK(g[static_cast<size_t>(j)][static_cast<size_t>(i)]
                  == doctest::Approx(gfd[static_cast<size_t>(j)][static_cast<size_t>(i)]).epsilon(1e-6));
    auto H = u.hess(x);
    auto Hfd = fd_hessian(u, x, 1e-4);
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k)
                CHECK(H[static_cast<size_t>(j)][static_cast<size_t>(i)][static_cast<size_t>(k)]
                      == doctest::Approx(Hfd[static_cast<size_t>(j)][static_cast<size_t>(i)][static_cast<size_t>(k)])
                             .epsilon(1e-5));
}

TEST_CASE("derived coefficients: vanishing, hand-computed, and vstar cases") {
    ModelConstants cnst(0.5, 2, 2);

    LegendreState zero(cnst, {Series<double>(2, 6), Series<double>(2, 6)});
    auto cz = coefficients(zero);
    for (auto& a : cz.a) CHECK(max_abs(a) < 1e-15);
    CHECK(max_abs(cz.b) < 1e-15);
    CHECK(max_abs(cz.c) < 1e-15);
    CHECK(cz.vstar.get(MultiIndex{0, 0}) == doctest::Approx(1.0));

    // v^1 = eps y1: a_1 = -2 eps, a_n = eps^2, b = (k-1) eps^2, c = eps^2
    double eps = 0.05;
    Series<double> v1(2, 6);
    v1.set(MultiIndex{1, 0}, eps);
    LegendreState lin(cnst, {v1, Series<double>(2, 6)});
    auto cl = coefficients(lin);
    CHECK(cl.a[0].get(MultiIndex{0, 0}) == doctest::Approx(-2.0 * eps));
    CHECK(cl.a[1].get(MultiIndex{0, 0}) == doctest::Approx(eps * eps));
    CHECK(cl.b.get(MultiIndex{0, 0}) == doctest::Approx((cnst.kappa - 1.0) * eps * eps));
    CHECK(cl.c.get(MultiIndex{0, 0}) == doctest::Approx(eps * eps));

    // v' with v^2 = alpha: vstar = sqrt(2), b = (k-1)(1 - 2^{(q-1)/2})
    LegendreState rot(cnst, {Series<double>(2, 6), Series<double>::constant(2, 6, cnst.alpha)});
    auto cr = coefficients(rot);
    CHECK(cr.vstar.get(MultiIndex{0, 0}) == doctest::Approx(std::sqrt(2.0)));
    CHECK(cr.b.get(MultiIndex{0, 0})
          == doctest::Approx((cnst.kappa - 1.0) * (1.0 - std::pow(2.0, (cnst.q - 1.0) / 2.0))));

    // coefficient smallness: ||v^1||_{C^1} <= eps0 gives ||a||_inf <= 5 eps0
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        double eps0 = 0.02;
        Series<double> w1(2, 4);
        w1.set(MultiIndex{1, 0}, eps0 * coef(rng));
        w1.set(MultiIndex{0, 1}, eps0 * coef(rng));
        w1.set(MultiIndex{2, 0}, eps0 * coef(rng));
        LegendreState s(cnst, {w1, Series<double>(2, 4)});
        auto cs = coefficients(s);
        for (auto& a : cs.a) {
            double sup = 0;
            for (double t1 = -1; t1 <= 1; t1 += 0.25)
                for (double t2 = 0; t2 <= 1; t2 += 0.25) sup = std::max(sup, std::fabs(a.evaluate_d({t1, t2})));
            CHECK(sup <= 5.0 * eps0);
        }
    }

    // degenerate guard
    Series<double> bad(2, 6);
    bad.set(MultiIndex{0, 1}, -0.95);
    LegendreState badstate(cnst, {bad, Series<double>(2, 6)});
    CHECK_THROWS_AS(coefficients(badstate), std::runtime_error);
}

TEST_CASE("pointwise coefficients match the series constant terms at the origin") {
    ModelConstants cnst(0.5, 2, 2);
    auto st = synthetic_state(cnst, 6);
    auto coef = coefficients(st);
    StateArgs<double> args;
    for (auto& comp : st.v) args.v.push_back(comp.value_at_origin());
    args.grad.resize(st.v.size());
    for (size_t i = 0; i < st.v.size(); ++i)
        for (int k = 0; k < 2; ++k)
            args.grad[i].push_back(st.v[i].get(MultiIndex::unit(2, k)));
    auto pt = coefficients_at(args, cnst);
    MultiIndex zero(2);
    for (int ell = 0; ell < 2; ++ell)
        CHECK(pt.a[static_cast<size_t>(ell)]
              == doctest::Approx(coef.a[static_cast<size_t>(ell)].get(zero)).epsilon(1e-13));
    CHECK(pt.b == doctest::Approx(coef.b.get(zero)).epsilon(1e-13));
    CHECK(pt.c == doctest::Approx(coef.c.get(zero)).epsilon(1e-13));
    CHECK(pt.vstar == doctest::Approx(coef.vstar.get(zero)).epsilon(1e-13));
}

TEST_CASE("y_n grad v^j stays bounded on shrinking shells of a reconstructed field") {
    // qualitative boundedness only; no rate is claimed near y = 0
    ModelConstants cnst(0.5, 2, 2);
    auto st = synthetic_state(cnst, 4);
    auto u = inverse_reconstruct(st);
    double cap = 0;
    for (double yn : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
        auto ls = legendre_from_solution(u, cnst, {{0.05, yn}, {0.05, yn * 1.02}});
        double dv = (ls.values[1][1] - ls.values[0][1]) / (0.02 * yn);
        double bound = yn * std::fabs(dv);
        if (cap == 0) cap = 10.0 * (bound + 1e-6);
        CHECK(bound < cap);
    }
}

TEST_CASE("system residual vanishes exactly on half-space Legendre data") {
    for (double q : {0.0, 0.5}) {
        ModelConstants cnst(q, 2, 2);
        auto zero = LegendreState(cnst, {Series<double>(2, 8), Series<double>(2, 8)});
        for (auto& r : residual_system(zero)) CHECK(max_abs(r) < 1e-15);

        auto tilt = tilted_halfspace_state(cnst, {0.28, 0.96}, {0.8, 0.6}, 8);
        for (auto& r : residual_system(tilt)) CHECK(max_abs(r) < 1e-12);

        // and stays zero under the invariant rescaling
        auto resc = rescale_legendre(tilt, 0.37);
        for (auto& r : residual_system(resc)) CHECK(max_abs(r) < 1e-12);
    }
}

TEST_CASE("legendre rescaling") {
    ModelConstants cnst(0.5, 2, 2);
    LegendreState zero(cnst, {Series<double>(2, 4), Series<double>(2, 4)});
    auto rz = rescale_legendre(zero, 0.5);
    CHECK(rz.v[0].is_zero());

    // v_r(y) = (v^1(ry)/r, v^2(ry)) pointwise
    auto st = synthetic_state(cnst, 4);
    auto r = rescale_legendre(st, 0.5);
    Vec y = {0.2, 0.3};
    Vec ry = {0.1, 0.15};
    CHECK(r.v[0].evaluate_d(y) == doctest::Approx(st.v[0].evaluate_d(ry) / 0.5).epsilon(1e-13));
    CHECK(r.v[1].evaluate_d(y) == doctest::Approx(st.v[1].evaluate_d(ry)).epsilon(1e-13));

    // ||v^1_r||_{C^1} does not grow for r <= 1 on half-ball samples
    double sup0 = 0, supr = 0;
    for (double t1 = -1; t1 <= 1; t1 += 0.2)
        for (double t2 = 0; t2 <= 1; t2 += 0.2) {
            sup0 = std::max(sup0, std::fabs(st.v[0].evaluate_d({t1, t2})));
            supr = std::max(supr, std::fabs(r.v[0].evaluate_d({t1, t2})));
        }
    CHECK(supr <= sup0 + 1e-15);
}

TEST_CASE("residual of the original system on reconstructed fields") {
    ModelConstants cnst(0.5, 2, 1);
    LegendreState zero(cnst, {Series<double>(2, 6)});
    auto u = inverse_reconstruct(zero);
    auto res = residual_original(u, cnst.q, {{0.1, 0.4}, {-0.3, 0.7}, {0.2, -0.5}});
    for (auto& r : res)
        for (double c : r) CHECK(std::fabs(c) < 1e-11);
}
