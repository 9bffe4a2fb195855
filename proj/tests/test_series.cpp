#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "hodo/dual.hpp"
#include "hodo/series.hpp"

using namespace hodo;

namespace {

// Test-local untruncated polynomial arithmetic in the *monomial* basis,
// used as an independent oracle for compose_scalar. No weighted-order logic
// here on purpose; truncation is applied only at the final comparison.
using Poly = std::map<std::vector<int>, Rational>;

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out;
    for (auto& [ea, ca] : a)
        for (auto& [eb, cb] : b) {
            std::vector<int> e(ea.size());
            for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            out[e] += ca * cb;
        }
    return out;
}

Poly poly_add(Poly a, const Poly& b) {
    for (auto& [e, c] : b) a[e] += c;
    return a;
}

Poly poly_from_series(const Series<Rational>& s) {
    Poly out;
    for (auto& [mu, v] : s.coefficients())
        out[mu.entries()] = v / Rational(static_cast<long long>(multifactorial_u64(mu)));
    return out;
}

// substitute inner into a 1D polynomial outer, then truncate by weighted order
Series<Rational> brute_compose(const std::vector<Rational>& outer, const Series<Rational>& inner) {
    Poly pin = poly_from_series(inner);
    Poly acc;
    Poly power;  // inner^k, starts at 1
    power[std::vector<int>(static_cast<size_t>(inner.dim()), 0)] = Rational(1);
    for (size_t k = 0; k < outer.size(); ++k) {
        if (k > 0) power = poly_mul(power, pin);
        Poly term;
        for (auto& [e, c] : power) term[e] = c * outer[k];
        acc = poly_add(acc, term);
    }
    Series<Rational> out(inner.dim(), inner.order());
    for (auto& [e, c] : acc) {
        MultiIndex mu(e);
        if (mu.weighted_order() > inner.order() || c.is_zero()) continue;
        out.set(mu, c * Rational(static_cast<long long>(multifactorial_u64(mu))));
    }
    return out;
}

Series<Rational> random_series(std::mt19937& rng, int dim, int order, int max_terms) {
    Series<Rational> s(dim, order);
    auto idx = indices_up_to(dim, order);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(idx.size()) - 1);
    std::uniform_int_distribution<int> num(-4, 4);
    std::uniform_int_distribution<int> den(1, 3);
    for (int t = 0; t < max_terms; ++t)
        s.set(idx[static_cast<size_t>(pick(rng))], Rational(num(rng), den(rng)));
    return s;
}

}  // namespace

TEST_CASE("multi-index basics and the permutation identity") {
    MultiIndex mu{2, 1, 3};
    CHECK(mu.total() == 6);
    CHECK(mu.weighted_order() == 9);
    CHECK(binomial_u64(mu, MultiIndex{0, 0, 0}) == 1);
    CHECK(binomial_u64(mu, mu) == 1);
    CHECK_THROWS_AS(binomial_u64(MultiIndex{1, 0}, MultiIndex{0, 1}), std::invalid_argument);

    // sum_{|sigma|=s} binom(mu,sigma) = binom(|mu|,s) for all |mu| <= 8
    for (int dim : {2, 3}) {
        for (auto& m : indices_up_to(dim, 8)) {
            if (m.total() > 8) continue;
            std::map<int, unsigned long long> by_s;
            for (auto& sg : subindices(m)) by_s[sg.total()] += binomial_u64(m, sg);
            for (auto& [s, total] : by_s) CHECK(total == binomial_u64(m.total(), s));
        }
    }
}

TEST_CASE("graded-lex enumeration is deterministic and complete") {
    auto idx = indices_up_to(2, 4);
    for (size_t i = 1; i < idx.size(); ++i) CHECK(idx[i - 1] < idx[i]);
    // dim 2, cap 4: mu_n <= 2, counts by hand: mu=(a,b), a+2b <= 4
    CHECK(idx.size() == 9);
}

TEST_CASE("series add") {
    auto one = Series<double>::constant(2, 4, 1.0);
    auto y1 = Series<double>::variable(2, 4, 0);
    auto s = (one + y1) + (one - y1);
    CHECK(s.get(MultiIndex{0, 0}) == 2.0);
    CHECK(s.coefficients().size() == 1);

    auto a = Series<double>::variable(2, 4, 1);
    CHECK((a + Series<double>(2, 4)).coefficients() == a.coefficients());

    // y2 + y1*y2 keeps exactly two entries
    auto y2 = Series<double>::variable(3, 4, 1);
    Series<double> y1y2(3, 4);
    y1y2.set(MultiIndex{1, 1, 0}, 1.0);
    auto sum = y2 + y1y2;
    CHECK(sum.coefficients().size() == 2);
    CHECK(sum.get(MultiIndex{0, 1, 0}) == 1.0);
    CHECK(sum.get(MultiIndex{1, 1, 0}) == 1.0);

    CHECK_THROWS_AS(Series<double>(2, 4) + Series<double>(2, 5), std::invalid_argument);
    CHECK_THROWS_AS(Series<double>(2, 4) + Series<double>(3, 4), std::invalid_argument);
}

TEST_CASE("series multiply respects the weighted truncation") {
    auto one = Series<double>::constant(2, 2, 1.0);
    auto t = Series<double>::variable(2, 2, 0);
    auto prod = (one + t) * (one - t);
    CHECK(prod.get(MultiIndex{0, 0}) == 1.0);
    CHECK(prod.get(MultiIndex{1, 0}) == 0.0);
    CHECK(prod.get(MultiIndex{2, 0}) == doctest::Approx(-2.0));  // derivative value of -t^2

    // y1 * y_n has weighted order 3, dropped at order 2
    auto y1 = Series<double>::variable(2, 2, 0);
    auto yn = Series<double>::variable(2, 2, 1);
    CHECK((y1 * yn).is_zero());

    // y_n * y_n at order 4: V_{2 e_n} = d_n^2 (y_n^2) = 2
    auto yn4 = Series<double>::variable(2, 4, 1);
    auto sq = yn4 * yn4;
    CHECK(sq.get(MultiIndex{0, 2}) == doctest::Approx(2.0));
    CHECK(sq.coefficients().size() == 1);
}

TEST_CASE("ring axioms hold exactly at fixed order") {
    std::mt19937 rng(7);
    for (int rep = 0; rep < 30; ++rep) {
        auto a = random_series(rng, 2, 5, 4);
        auto b = random_series(rng, 2, 5, 4);
        auto c = random_series(rng, 2, 5, 4);
        auto lhs = (a * b) * c;
        auto rhs = a * (b * c);
        CHECK(((lhs - rhs).is_zero()));
        auto dist = a * (b + c) - (a * b + a * c);
        CHECK(dist.is_zero());
    }
}

TEST_CASE("differentiate") {
    auto y1 = Series<double>::variable(2, 4, 0);
    auto sq = y1 * y1;
    auto d = sq.differentiate(0);
    CHECK(d.get(MultiIndex{1, 0}) == doctest::Approx(2.0));
    CHECK(d.order() == 3);

    auto yn = Series<double>::variable(2, 6, 1);
    auto d2 = (yn * yn).differentiate(1);
    CHECK(d2.get(MultiIndex{0, 1}) == doctest::Approx(2.0));
    CHECK(d2.order() == 4);

    std::mt19937 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        auto f = random_series(rng, 3, 6, 6);
        auto ab = f.differentiate(0).differentiate(1);
        auto ba = f.differentiate(1).differentiate(0);
        CHECK((ab - ba).is_zero());
    }
}

TEST_CASE("shifted_vertical multiplies by y_n exactly") {
    std::mt19937 rng(13);
    auto f = random_series(rng, 2, 4, 5);
    auto yn = Series<Rational>::variable(2, 6, 1);
    auto lhs = f.shifted_vertical(6);
    auto rhs = yn * f.extended(6);
    CHECK((lhs - rhs).is_zero());
}

TEST_CASE("compose_scalar: geometric, square root, constant inner") {
    // outer 1/(1-t), inner y1 -> 1 + y1 + y1^2 + ... (monomial coefficients 1)
    std::vector<double> geo(6, 1.0);
    auto y1 = Series<double>::variable(2, 4, 0);
    auto g = Series<double>::compose_scalar(geo, y1);
    for (int k = 0; k <= 4; ++k)
        CHECK(g.get(MultiIndex{k, 0}) == doctest::Approx(static_cast<double>(factorial_u64(k))));

    // outer (1+t)^{1/2}, inner 2 y1 + y1^2 -> exactly 1 + y1
    std::vector<double> sqrt_coef;
    {
        PowOuter<double> half(0.5);
        double kfact = 1;
        for (int k = 0; k <= 6; ++k) {
            if (k > 0) kfact *= k;
            sqrt_coef.push_back(half.deriv(k, 1.0) / kfact);
        }
    }
    Series<double> inner(2, 5);
    inner.set(MultiIndex{1, 0}, 2.0);
    inner.set(MultiIndex{2, 0}, 2.0);  // derivative value of y1^2
    auto r = Series<double>::compose_scalar(sqrt_coef, inner);
    auto expect = Series<double>::constant(2, 5, 1.0) + Series<double>::variable(2, 5, 0);
    for (auto& [mu, v] : (r - expect).coefficients()) CHECK(std::fabs(v) < 1e-12);

    // inner = 0 -> constant outer(0)
    auto z = Series<double>::compose_scalar({3.5, 1.0, 2.0}, Series<double>(2, 4));
    CHECK(z.get(MultiIndex{0, 0}) == doctest::Approx(3.5));
    CHECK(z.coefficients().size() == 1);

    auto bad = Series<double>::constant(2, 4, 1.0);
    CHECK_THROWS_AS(Series<double>::compose_scalar(geo, bad), std::invalid_argument);
}

TEST_CASE("compose_scalar agrees with brute-force substitution, dim <= 2, order <= 5") {
    std::mt19937 rng(17);
    for (int rep = 0; rep < 25; ++rep) {
        int dim = 1 + (rep % 2);
        int order = 3 + (rep % 3);
        auto inner = random_series(rng, dim, order, 4);
        inner.set(MultiIndex(dim), Rational(0));  // zero constant term
        std::vector<Rational> outer;
        std::uniform_int_distribution<int> num(-3, 3);
        for (int k = 0; k <= order + 1; ++k) outer.emplace_back(num(rng), 2);
        auto fast = Series<Rational>::compose_scalar(outer, inner);
        auto slow = brute_compose(outer, inner);
        CHECK((fast - slow).is_zero());
    }
}

TEST_CASE("compose_outer recenters around a nonzero constant term") {
    // 1/(1+w) with w = 1/2 + y1: exact coefficients of (3/2 + y1)^{-1}
    Series<Rational> w(2, 3);
    w.set(MultiIndex{0, 0}, Rational(1, 2));
    w.set(MultiIndex{1, 0}, Rational(1));
    PowOuter<Rational> inv(Rational(-1));
    auto one_plus = Series<Rational>::constant(2, 3, Rational(1)) + w;
    auto r = one_plus.compose_outer(inv);
    CHECK(r.get(MultiIndex{0, 0}) == Rational(2, 3));
    CHECK(r.get(MultiIndex{1, 0}) == Rational(-4, 9));
    CHECK(r.get(MultiIndex{2, 0}) == Rational(2) * Rational(8, 27));  // 2!/(3/2)^3
    // exactness: (1+w) * r == 1
    auto prod = one_plus * r;
    CHECK(prod.get(MultiIndex{0, 0}) == Rational(1));
    CHECK(prod.get(MultiIndex{1, 0}) == Rational(0));
    CHECK(prod.get(MultiIndex{2, 0}) == Rational(0));
    CHECK(prod.get(MultiIndex{3, 0}) == Rational(0));
}

TEST_CASE("weighted norm") {
    NormParams p(0.5, 0.1, 4);
    CHECK(weighted_norm(Series<double>(2, 4), p) == 0.0);
    CHECK(weighted_norm(Series<double>::variable(2, 4, 0), p) == doctest::Approx(0.5));
    CHECK(weighted_norm(Series<double>::variable(2, 4, 1), p) == doctest::Approx(0.05));
    CHECK_THROWS_AS(NormParams(0.0, 0.5, 3), std::invalid_argument);
    CHECK_THROWS_AS(NormParams(1.0, 1.5, 3), std::invalid_argument);
}

TEST_CASE("majorant check") {
    double M = 2.0, Rstar = 0.5;
    CHECK(majorant_check(Series<double>(2, 4), M, Rstar));

    // the geometric majorant itself, truncated: boundary case stays true
    Series<double> geo(2, 4);
    for (auto& mu : indices_up_to(2, 4))
        geo.set(mu, M * static_cast<double>(factorial_u64(mu.total())) / std::pow(Rstar, mu.total()));
    CHECK(majorant_check(geo, M, Rstar));

    auto bad = geo;
    bad.set(MultiIndex{1, 1}, 2.0 * geo.get(MultiIndex{1, 1}));
    CHECK_FALSE(majorant_check(bad, M, Rstar));
}

TEST_CASE("composition norm bound in the style of the majorant lemma") {
    // f(s, p1, p2) = M Rstar / (Rstar - (s + p1 + p2)) applied to a small u:
    // the weighted norm of the composite stays below the same geometric bound
    // evaluated at the argument norms.
    std::mt19937 rng(23);
    double M = 1.5, Rstar = 1.0;
    NormParams p(0.25, 0.25, 5);
    for (int rep = 0; rep < 10; ++rep) {
        auto u = random_series(rng, 2, 5, 3);
        auto ud = to_double_series(u);
        double total = weighted_norm(ud, p);
        for (int k = 0; k < 2; ++k) total += weighted_norm(ud.differentiate(k).extended(5), p);
        if (total >= 0.9 * Rstar) continue;
        Series<double> arg = ud;
        for (int k = 0; k < 2; ++k) arg = arg + ud.differentiate(k).extended(5);
        PowOuter<double> inv(-1.0);
        auto denom = Series<double>::constant(2, 5, Rstar) - arg;
        auto comp = denom.compose_outer(inv).scaled(M * Rstar);
        double lhs = weighted_norm(comp, p);
        double rhs = M * Rstar / (Rstar - total);
        CHECK(lhs <= rhs * (1.0 + 1e-9));
    }
}

TEST_CASE("serialization roundtrip") {
    std::mt19937 rng(29);
    auto s = to_double_series(random_series(rng, 3, 5, 6));
    std::stringstream buf(s.serialize());
    auto back = parse_series(buf);
    CHECK(back.dim() == s.dim());
    CHECK(back.order() == s.order());
    CHECK((back - s).is_zero());
}

TEST_CASE("rational scalar") {
    Rational a(1, 3), b(1, 6);
    CHECK(a + b == Rational(1, 2));
    CHECK(a * b == Rational(1, 18));
    CHECK(a / b == Rational(2));
    CHECK(Rational(-4, -8) == Rational(1, 2));
    CHECK(Rational(3, 4).pow_int(-2) == Rational(16, 9));
    CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
    Rational huge(1);
    CHECK_THROWS_AS([&] {
        for (int i = 0; i < 200; ++i) huge *= Rational(1000000000000LL);
    }(), std::overflow_error);
}

TEST_CASE("dual numbers carry first derivatives through the ring ops") {
    auto x = Dual<double>::seed(2.0, 2, 0);
    auto y = Dual<double>::seed(3.0, 2, 1);
    auto f = x * y + x;  // df/dx = y + 1 = 4, df/dy = x = 2
    CHECK(f.v == doctest::Approx(8.0));
    CHECK(f.g[0] == doctest::Approx(4.0));
    CHECK(f.g[1] == doctest::Approx(2.0));
    PowOuter<double> inv(-1.0);
    auto r = ring_outer(inv, x);  // 1/x: value 1/2, d/dx = -1/4
    CHECK(r.v == doctest::Approx(0.5));
    CHECK(r.g[0] == doctest::Approx(-0.25));
}
