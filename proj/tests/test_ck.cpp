#include <cmath>

#include "doctest.h"
#include "hodo/ck.hpp"
#include "hodo/hodograph.hpp"

using namespace hodo;

namespace {

// y v'' + gamma v' = g(v), no second-order coefficients. The source recipes
// below never depend on d_n v, so the first-order solve is a plain division
// and stays exact in rational mode.
template <class T, class G>
GeneralDegenerateSystem<T> vertical_toy(T gamma, G g) {
    GeneralDegenerateSystem<T> sys;
    sys.m = 1;
    sys.n = 2;
    sys.gamma = {gamma};
    sys.A.assign(1, std::vector<std::shared_ptr<AnalyticFn<T>>>(4));
    sys.g = {make_analytic_fn<T>(g)};
    return sys;
}

template <class T>
CauchyData<T> const_data(int n, int order, const std::vector<T>& c) {
    CauchyData<T> d;
    for (auto& v : c) d.v0.push_back(Series<T>::constant(n, order, v));
    return d;
}

Rational rising(Rational g, int k) {
    Rational acc(1);
    for (int i = 0; i < k; ++i) acc *= (g + Rational(i));
    return acc;
}

}  // namespace

TEST_CASE("instantiate_model satisfies the structural conditions") {
    for (double q : {0.0, 1.0 / 3.0, 0.5}) {
        for (int n : {2, 3}) {
            ModelConstants cnst(q, n, 2);
            auto sys = instantiate_model(cnst);
            CHECK_NOTHROW(validate_structure(sys));
            CHECK(sys.gamma[0] == doctest::Approx(2.0 * (cnst.kappa - 1.0)));
            CHECK(sys.gamma[1] == doctest::Approx(2.0 * cnst.kappa));

            auto zero = zero_state<double>(2, n);
            CHECK(sys.coefA(0, n - 1, n - 1)->eval(zero) == doctest::Approx(0.0));
            CHECK(sys.g[0]->eval(zero) == doctest::Approx(0.0));
        }
    }
    // q = 0: gamma_1 = 2, gamma_j = 4
    auto sys0 = instantiate_model(ModelConstants(0.0, 2, 3));
    CHECK(sys0.gamma[0] == doctest::Approx(2.0));
    CHECK(sys0.gamma[2] == doctest::Approx(4.0));
}

TEST_CASE("first-order solve") {
    // zero data on the model: p = 0 (the quadratic 2(k-1)p(1+p) = (k-1)p^2
    // has roots 0 and -2; Newton from 0 picks the small one)
    ModelConstants cnst(0.5, 2, 1);
    auto sys = instantiate_model(cnst);
    auto p = solve_first_order_point(sys, const_data<double>(2, 4, {0.0}));
    CHECK(std::fabs(p[0]) < 1e-14);

    // explicit constant source: p = delta / gamma
    auto lin = vertical_toy<double>(3.0, [](const auto& st) {
        return ring_const(st.v[0], 0.12);
    });
    auto pl = solve_first_order_point(lin, const_data<double>(2, 4, {0.0}));
    CHECK(pl[0] == doctest::Approx(0.12 / 3.0));

    // smallness rejection
    CHECK_THROWS_WITH_AS(solve_first_order_point(sys, const_data<double>(2, 4, {0.5})),
                         doctest::Contains("smallness violated"), std::runtime_error);
}

TEST_CASE("ck_expand: zero data gives the zero solution through every order") {
    for (double q : {0.0, 0.5}) {
        ModelConstants cnst(q, 2, 2);
        auto sys = instantiate_model(cnst);
        auto res = ck_expand(sys, const_data<double>(2, 10, {0.0, 0.0}), 10);
        for (auto& comp : res.v) CHECK(comp.is_zero());
    }
}

TEST_CASE("ck_expand reproduces the tilted half-space exactly (float mode)") {
    ModelConstants cnst(0.5, 2, 2);
    auto sys = instantiate_model(cnst);
    double slope = 0.04;
    CauchyData<double> data;
    Series<double> d1(2, 8);
    d1.set(MultiIndex{1, 0}, slope);
    data.v0 = {d1, Series<double>(2, 8)};
    auto res = ck_expand(sys, data, 8);

    double p_expect = std::sqrt(1.0 + slope * slope) - 1.0;
    CHECK(res.first_order[0] == doctest::Approx(p_expect).epsilon(1e-13));
    // |grad v(0)| <= c eps0 with the working constant c = 10
    CHECK(std::fabs(res.first_order[0]) <= 10.0 * data.epsilon0());
    for (auto& [mu, val] : res.v[0].coefficients()) {
        if (mu.total() <= 1) continue;
        CHECK(std::fabs(val) < 1e-12);
    }
    CHECK(res.v[1].is_zero());
}

TEST_CASE("ck_expand reproduces the tilted half-space identically (exact mode)") {
    // Pythagorean slope -41/840 makes the first-order root the rational 1/840
    ModelConstantsT<Rational> cnst(Rational(1, 2), 2, 2);
    auto sys = instantiate_model(cnst);
    CauchyData<Rational> data;
    Series<Rational> d1(2, 10);
    d1.set(MultiIndex{1, 0}, Rational(-41, 840));
    data.v0 = {d1, Series<Rational>(2, 10)};

    CKOptions<Rational> opt;
    opt.first_order_seed = std::vector<Rational>{Rational(1, 840), Rational(0)};
    auto res = ck_expand(sys, data, 10, opt);

    CHECK(res.v[0].get(MultiIndex{1, 0}) == Rational(-41, 840));
    CHECK(res.v[0].get(MultiIndex{0, 1}) == Rational(1, 840));
    for (auto& [mu, val] : res.v[0].coefficients()) {
        if (mu.total() <= 1) continue;
        CHECK(val == Rational(0));
    }
    CHECK(res.v[1].is_zero());

    // a wrong seed is rejected
    CKOptions<Rational> bad;
    bad.first_order_seed = std::vector<Rational>{Rational(1, 839), Rational(0)};
    CHECK_THROWS_AS(ck_expand(sys, data, 4, bad), std::invalid_argument);
}

TEST_CASE("undetermined-coefficients oracle: linear vertical toy") {
    // y v'' + gamma v' = v with constant data c has the exact expansion
    // d_n^k v(0) = c / (gamma (gamma+1) ... (gamma+k-1)).
    Rational gamma(7, 2), c(1, 3);
    auto sys = vertical_toy<Rational>(gamma, [](const auto& st) { return st.v[0]; });
    CKOptions<Rational> opt;
    opt.smallness_max = 1.0;
    auto res = ck_expand(sys, const_data<Rational>(2, 8, {c}), 8, opt);
    for (int k = 1; k <= 4; ++k) {
        MultiIndex mu{0, k};
        CHECK(res.v[0].get(mu) == c / rising(gamma, k));
    }
}

TEST_CASE("undetermined-coefficients oracle: quadratic source") {
    // y v'' + gamma v' = v^2 with data c: monomial coefficients a_k satisfy
    // k(gamma+k-1) a_k = sum_{i+j=k-1} a_i a_j, so
    //   a_1 = c^2/gamma, a_2 = c^3/(gamma(gamma+1)),
    //   a_3 = c^4 (3 gamma + 1) / (3 gamma^2 (gamma+1)(gamma+2)).
    Rational gamma(2), c(1, 4);
    auto sys = vertical_toy<Rational>(gamma, [](const auto& st) { return st.v[0] * st.v[0]; });
    CKOptions<Rational> opt;
    opt.smallness_max = 1.0;
    auto res = ck_expand(sys, const_data<Rational>(2, 8, {c}), 8, opt);

    Rational a1 = c * c / gamma;
    Rational a2 = c * c * c / (gamma * (gamma + Rational(1)));
    Rational a3 = c * c * c * c * (Rational(3) * gamma + Rational(1))
                  / (Rational(3) * gamma * gamma * (gamma + Rational(1)) * (gamma + Rational(2)));
    CHECK(res.v[0].get(MultiIndex{0, 1}) == a1);
    CHECK(res.v[0].get(MultiIndex{0, 2}) == Rational(2) * a2);
    CHECK(res.v[0].get(MultiIndex{0, 3}) == Rational(6) * a3);
}

TEST_CASE("undetermined-coefficients oracle: tangential coupling through A") {
    // y v'' + gamma v' = beta y d_11 v with data eps y1^2 has the exact
    // polynomial solution eps y1^2 + beta eps/(1+gamma) y_n^2.
    Rational gamma(3), beta(1, 2), eps(1, 5);
    GeneralDegenerateSystem<Rational> sys;
    sys.m = 1;
    sys.n = 2;
    sys.gamma = {gamma};
    sys.A.assign(1, std::vector<std::shared_ptr<AnalyticFn<Rational>>>(4));
    sys.A[0][0] = make_analytic_fn<Rational>([beta](const auto& st) {
        return ring_const(st.v[0], beta);
    });
    sys.g = {nullptr};

    CauchyData<Rational> data;
    Series<Rational> d(2, 8);
    data.v0 = {d};
    data.v0[0].set(MultiIndex{2, 0}, Rational(2) * eps);  // derivative value of eps y1^2
    auto res = ck_expand(sys, data, 8);

    Series<Rational> expect(2, res.v[0].order());
    expect.set(MultiIndex{2, 0}, Rational(2) * eps);
    expect.set(MultiIndex{0, 2}, Rational(2) * beta * eps / (Rational(1) + gamma));
    CHECK((res.v[0] - expect).is_zero());
}

TEST_CASE("undetermined-coefficients oracle: coupled two-component system") {
    // y v1'' + g1 v1' = (v2)^2,  y v2'' + g2 v2' = v1 v2, data (c + eps y1^2, ct).
    // Hand-derived monomial coefficients through weighted order 4:
    //   v1: a01 = ct^2/g1, a02 = c ct^2/(g2 (1+g1)), a11 = a21 = 0
    //   v2: b01 = c ct/g2, b21 = ct eps/g2,
    //       b02 = (c^2 ct/g2 + ct^3/g1) / (2 (1+g2)), b11 = 0
    Rational g1(2), g2(3), c(1, 10), ct(1, 7), eps(1, 9);
    GeneralDegenerateSystem<Rational> sys;
    sys.m = 2;
    sys.n = 2;
    sys.gamma = {g1, g2};
    sys.A.assign(2, std::vector<std::shared_ptr<AnalyticFn<Rational>>>(4));
    sys.g = {make_analytic_fn<Rational>([](const auto& st) { return st.v[1] * st.v[1]; }),
             make_analytic_fn<Rational>([](const auto& st) { return st.v[0] * st.v[1]; })};
    validate_structure(sys);

    CauchyData<Rational> data;
    data.v0 = {Series<Rational>::constant(2, 8, c), Series<Rational>::constant(2, 8, ct)};
    data.v0[0].set(MultiIndex{2, 0}, Rational(2) * eps);
    auto res = ck_expand(sys, data, 8);

    Rational a01 = ct * ct / g1;
    Rational b01 = c * ct / g2;
    Rational a02 = ct * b01 / (Rational(1) + g1);
    Rational b21 = ct * eps / g2;
    Rational b02 = (c * b01 + ct * a01) / (Rational(2) * (Rational(1) + g2));

    CHECK(res.first_order[0] == a01);
    CHECK(res.first_order[1] == b01);
    CHECK(res.v[0].get(MultiIndex{0, 1}) == a01);
    CHECK(res.v[0].get(MultiIndex{1, 1}) == Rational(0));
    CHECK(res.v[0].get(MultiIndex{2, 1}) == Rational(0));
    CHECK(res.v[0].get(MultiIndex{0, 2}) == Rational(2) * a02);
    CHECK(res.v[1].get(MultiIndex{0, 1}) == b01);
    CHECK(res.v[1].get(MultiIndex{1, 1}) == Rational(0));
    CHECK(res.v[1].get(MultiIndex{2, 1}) == Rational(2) * b21);
    CHECK(res.v[1].get(MultiIndex{0, 2}) == Rational(2) * b02);
}

TEST_CASE("singular blocks abort with a diagnostic naming the multi-index") {
    // g = c v d_n v with c v(0) = gamma + 1 makes the mu_n = 1 block singular
    // while the first-order Jacobian stays invertible
    double gamma = 2.0, c = 30.0, v0 = 0.1;
    GeneralDegenerateSystem<double> sys;
    sys.m = 1;
    sys.n = 2;
    sys.gamma = {gamma};
    sys.A.assign(1, std::vector<std::shared_ptr<AnalyticFn<double>>>(4));
    sys.g = {make_analytic_fn<double>([c](const auto& st) {
        return ring_scale(st.v[0] * st.grad[0].back(), c);
    })};
    CHECK_NOTHROW(validate_structure(sys));

    CauchyData<double> data;
    data.v0 = {Series<double>::constant(2, 6, v0)};
    data.v0[0].set(MultiIndex{2, 0}, 0.01);
    try {
        ck_expand(sys, data, 6);
        CHECK(false);
    } catch (const std::runtime_error& e) {
        std::string msg = e.what();
        CHECK(msg.find("singular block") != std::string::npos);
        CHECK(msg.find("(0,1)") != std::string::npos);
    }
}

TEST_CASE("ck output satisfies the transformed system residual through order s-2") {
    // float mode
    {
        ModelConstants cnst(0.5, 2, 2);
        auto sys = instantiate_model(cnst);
        CauchyData<double> data;
        Series<double> d1(2, 8);
        d1.set(MultiIndex{2, 0}, 0.02);  // 0.01 y1^2
        data.v0 = {d1, Series<double>(2, 8)};
        auto res = ck_expand(sys, data, 8);
        LegendreState st(cnst, res.v);
        for (auto& r : residual_system(st))
            for (auto& [mu, val] : r.coefficients()) {
                INFO("mu = ", mu.str());
                CHECK(std::fabs(val) < 1e-10);
            }
    }
    // exact mode: residual is identically zero
    {
        ModelConstantsT<Rational> cnst(Rational(1, 2), 2, 2);
        auto sys = instantiate_model(cnst);
        CauchyData<Rational> data;
        Series<Rational> d1(2, 6);
        d1.set(MultiIndex{2, 0}, Rational(1, 50));
        data.v0 = {d1, Series<Rational>(2, 6)};
        CKOptions<Rational> opt;
        opt.first_order_seed = std::vector<Rational>{Rational(0), Rational(0)};
        auto res = ck_expand(sys, data, 6, opt);
        LegendreStateT<Rational> st(cnst, res.v);
        for (auto& r : residual_system(st)) CHECK(r.is_zero());
    }
}

TEST_CASE("data recovery: traces match the Cauchy data and the first-order solve") {
    ModelConstants cnst(1.0 / 3.0, 3, 2);
    auto sys = instantiate_model(cnst);
    CauchyData<double> data;
    Series<double> d1(3, 6);
    d1.set(MultiIndex{1, 0, 0}, 0.01);
    d1.set(MultiIndex{0, 2, 0}, 0.04);
    Series<double> d2(3, 6);
    d2.set(MultiIndex{0, 0, 0}, 0.02);
    data.v0 = {d1, d2};
    auto res = ck_expand(sys, data, 6);

    for (int j = 0; j < 2; ++j)
        for (auto& [mu, val] : res.v[static_cast<size_t>(j)].coefficients())
            if (mu.vertical() == 0)
                CHECK(val == doctest::Approx(data.v0[static_cast<size_t>(j)].get(mu)).epsilon(1e-14));

    auto dn = vertical_trace_series(res);
    CHECK(dn[0].get(MultiIndex{0, 0, 0}) == doctest::Approx(res.first_order[0]));
    CHECK(dn[1].get(MultiIndex{0, 0, 0}) == doctest::Approx(res.first_order[1]));

    auto fo = solve_first_order(sys, data, 6);
    CHECK(fo.p[0] == doctest::Approx(res.first_order[0]));
    for (auto& [mu, val] : fo.tangential[0].coefficients())
        CHECK(val == doctest::Approx(dn[0].get(mu)));
}

TEST_CASE("determinism: identical runs produce identical coefficients") {
    ModelConstants cnst(0.5, 2, 2);
    auto sys = instantiate_model(cnst);
    CauchyData<double> data;
    Series<double> d1(2, 8);
    d1.set(MultiIndex{2, 0}, 0.02);
    d1.set(MultiIndex{1, 0}, 0.01);
    data.v0 = {d1, Series<double>::constant(2, 8, 0.005)};
    auto a = ck_expand(sys, data, 8);
    auto b = ck_expand(sys, data, 8);
    for (int j = 0; j < 2; ++j) {
        auto ca = a.v[static_cast<size_t>(j)].coefficients();
        auto cb = b.v[static_cast<size_t>(j)].coefficients();
        REQUIRE(ca.size() == cb.size());
        auto ia = ca.begin();
        auto ib = cb.begin();
        for (; ia != ca.end(); ++ia, ++ib) {
            CHECK(ia->first == ib->first);
            CHECK(ia->second == ib->second);  // bit-for-bit
        }
    }
}

TEST_CASE("scaling invariance of the expansion") {
    // ck(data scaled by r) == rescale_legendre(ck(data), r) through the order
    ModelConstants cnst(0.5, 2, 2);
    auto sys = instantiate_model(cnst);
    CauchyData<double> data;
    Series<double> d1(2, 8);
    d1.set(MultiIndex{1, 0}, 0.02);
    d1.set(MultiIndex{2, 0}, 0.06);
    data.v0 = {d1, Series<double>::constant(2, 8, 0.004)};

    double r = 0.5;
    CauchyData<double> scaled;
    scaled.v0 = data.v0;
    for (size_t j = 0; j < scaled.v0.size(); ++j) {
        Series<double> s(2, 8);
        for (auto& [mu, val] : scaled.v0[j].coefficients()) {
            double f = std::pow(r, mu.total());
            if (j == 0) f /= r;
            s.set(mu, val * f);
        }
        scaled.v0[j] = s;
    }

    auto direct = ck_expand(sys, scaled, 8);
    auto rescaled = rescale_legendre(LegendreState(cnst, ck_expand(sys, data, 8).v), r);
    for (int j = 0; j < 2; ++j) {
        auto diff = direct.v[static_cast<size_t>(j)] - rescaled.v[static_cast<size_t>(j)];
        for (auto& [mu, val] : diff.coefficients()) CHECK(std::fabs(val) < 1e-13);
    }
}

TEST_CASE("convergence diagnostics") {
    // zero series: all norms zero, infinite radius
    {
        std::vector<Series<double>> v = {Series<double>(2, 8)};
        auto rep = convergence_diagnostics(v, NormParams(1.0, 0.5, 8), 2.0, 1e-2);
        CHECK(rep.aggregate.back() == 0.0);
        CHECK(std::isinf(rep.radius_estimate));
        CHECK(rep.within_bound);
    }
    // geometric series in y1 with ratio 1/2: fitted radius ~ 2R within 10%
    {
        Series<double> geo(2, 12);
        for (int k = 0; k <= 12; ++k)
            geo.set(MultiIndex{k, 0}, std::pow(0.5, k) * static_cast<double>(factorial_u64(k)));
        std::vector<Series<double>> v = {geo};
        NormParams p(1.0, 0.5, 11);
        auto rep = convergence_diagnostics(v, p, 1e9, 1.0);
        CHECK(rep.radius_estimate == doctest::Approx(2.0 * p.R).epsilon(0.1));
    }
    // linear-in-eps scaling of the ck output norms
    {
        ModelConstants cnst(0.5, 2, 1);
        auto sys = instantiate_model(cnst);
        auto run = [&](double eps) {
            CauchyData<double> data;
            Series<double> d1(2, 8);
            d1.set(MultiIndex{2, 0}, 2.0 * eps);
            data.v0 = {d1};
            auto res = ck_expand(sys, data, 8);
            auto rep = convergence_diagnostics(res.v, NormParams(0.3, 0.1, 6), 10.0, eps);
            return rep.aggregate.back();
        };
        double n1 = run(1e-2), n2 = run(5e-3), n4 = run(2.5e-3);
        CHECK(std::fabs(n1 / n2 - 2.0) < 0.3);
        CHECK(std::fabs(n2 / n4 - 2.0) < 0.3);
    }
}
