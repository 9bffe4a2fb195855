#pragma once

#include <cmath>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hodo/multiindex.hpp"
#include "hodo/rational.hpp"

namespace hodo {

// Smooth 1D functions usable as the outer factor of a composition. deriv(k, c)
// must return the k-th derivative at c.
template <class T>
struct Outer1D {
    virtual ~Outer1D() = default;
    virtual T deriv(int k, const T& c) const = 0;
};

// t -> t^p. For Rational scalars p must be an integer unless c == 1.
template <class T>
struct PowOuter final : Outer1D<T> {
    explicit PowOuter(T exponent) : p(std::move(exponent)) {}
    T p;

    T deriv(int k, const T& c) const override {
        T coef = scalar_traits<T>::from_int(1);
        for (int i = 0; i < k; ++i) coef = coef * (p - scalar_traits<T>::from_int(i));
        return coef * pow_at(c, k);
    }

private:
    T pow_at(const T& c, int k) const;
};

template <>
inline double PowOuter<double>::pow_at(const double& c, int k) const {
    return std::pow(c, p - static_cast<double>(k));
}

template <>
inline Rational PowOuter<Rational>::pow_at(const Rational& c, int k) const {
    Rational e = p - Rational(k);
    if (e.is_integer()) return c.pow_int(static_cast<long long>(e.num()));
    if (c == Rational(1)) return Rational(1);
    throw std::domain_error("PowOuter<Rational>: fractional power at c != 1 is not exact");
}

// Truncated multivariate power series. Coefficients are Taylor *derivative*
// values V_mu = d^mu f(0); the monomial coefficient is V_mu / mu!. Truncation
// is by weighted order |mu| + mu_n <= order, so the vertical axis counts
// double, and every operation stays closed under that truncation.
template <class T>
class Series {
public:
    Series() : dim_(1), order_(0) {}
    Series(int dim, int order) : dim_(dim), order_(order) {
        if (dim < 1) throw std::invalid_argument("Series: dim must be >= 1");
        if (order < 0) throw std::invalid_argument("Series: order must be >= 0");
    }

    static Series constant(int dim, int order, const T& value) {
        Series s(dim, order);
        if (!scalar_traits<T>::is_zero(value)) s.coef_[MultiIndex(dim)] = value;
        return s;
    }

    // the coordinate function y_{axis}; needs order >= 1 (or 2 vertically)
    static Series variable(int dim, int order, int axis) {
        Series s(dim, order);
        MultiIndex mu = MultiIndex::unit(dim, axis);
        if (mu.weighted_order() > order)
            throw std::invalid_argument("Series::variable: order too small for axis");
        s.coef_[mu] = scalar_traits<T>::from_int(1);
        return s;
    }

    int dim() const { return dim_; }
    int order() const { return order_; }

    const std::map<MultiIndex, T>& coefficients() const { return coef_; }

    T get(const MultiIndex& mu) const {
        auto it = coef_.find(mu);
        return it == coef_.end() ? T{} : it->second;
    }

    void set(const MultiIndex& mu, const T& v) {
        if (mu.dim() != dim_) throw std::invalid_argument("Series::set: dimension mismatch");
        if (mu.weighted_order() > order_)
            throw std::invalid_argument("Series::set: index " + mu.str() + " above truncation order");
        if (scalar_traits<T>::is_zero(v))
            coef_.erase(mu);
        else
            coef_[mu] = v;
    }

    bool is_zero() const {
        for (auto& [mu, v] : coef_)
            if (!scalar_traits<T>::is_zero(v)) return false;
        return true;
    }

    T value_at_origin() const { return get(MultiIndex(dim_)); }

    Series truncated(int new_order) const {
        if (new_order > order_)
            throw std::invalid_argument("Series::truncated: cannot raise the truncation order");
        if (new_order == order_) return *this;
        Series s(dim_, new_order);
        for (auto& [mu, v] : coef_)
            if (mu.weighted_order() <= new_order) s.coef_[mu] = v;
        return s;
    }

    // Relabel with a higher truncation order. Only valid when the series is
    // known exactly (a polynomial), e.g. finite Cauchy-data coefficient lists.
    Series extended(int new_order) const {
        if (new_order < order_) return truncated(new_order);
        Series s = *this;
        s.order_ = new_order;
        return s;
    }

    Series operator-() const {
        Series s = *this;
        for (auto& [mu, v] : s.coef_) v = -v;
        return s;
    }

    friend Series operator+(const Series& a, const Series& b) {
        a.check_match(b, "add");
        Series s = a;
        for (auto& [mu, v] : b.coef_) {
            auto it = s.coef_.find(mu);
            if (it == s.coef_.end())
                s.coef_[mu] = v;
            else {
                it->second = it->second + v;
                if (scalar_traits<T>::is_zero(it->second)) s.coef_.erase(it);
            }
        }
        return s;
    }
    friend Series operator-(const Series& a, const Series& b) { return a + (-b); }

    // truncated Cauchy product; derivative values combine with binomial(mu,sigma)
    friend Series operator*(const Series& a, const Series& b) {
        a.check_match(b, "multiply");
        Series s(a.dim_, a.order_);
        for (auto& [sa, va] : a.coef_) {
            for (auto& [sb, vb] : b.coef_) {
                MultiIndex mu = sa + sb;
                if (mu.weighted_order() > a.order_) continue;
                T w = scalar_traits<T>::from_int(static_cast<long long>(binomial_u64(mu, sa)));
                T add = w * va * vb;
                auto it = s.coef_.find(mu);
                if (it == s.coef_.end())
                    s.coef_[mu] = add;
                else
                    it->second = it->second + add;
            }
        }
        s.drop_zeros();
        return s;
    }

    Series scaled(const T& c) const {
        Series s = *this;
        if (scalar_traits<T>::is_zero(c)) return Series(dim_, order_);
        for (auto& [mu, v] : s.coef_) v = v * c;
        return s;
    }

    // d/dy_axis; the weighted truncation order drops by 1 (tangential) or 2 (vertical)
    Series differentiate(int axis) const {
        int drop = (axis == dim_ - 1) ? 2 : 1;
        Series s(dim_, std::max(0, order_ - drop));
        for (auto& [mu, v] : coef_) {
            if (mu[axis] == 0) continue;
            MultiIndex nu = mu.plus(axis, -1);
            if (nu.weighted_order() <= s.order_) s.coef_[nu] = v;
        }
        return s;
    }

    // multiply by the vertical coordinate y_n; exact, order rises by 2
    Series shifted_vertical(int out_order) const {
        if (out_order > order_ + 2)
            throw std::invalid_argument("Series::shifted_vertical: requested order not determined");
        Series s(dim_, out_order);
        int n = dim_ - 1;
        for (auto& [mu, v] : coef_) {
            MultiIndex nu = mu.plus(n, +1);
            if (nu.weighted_order() > out_order) continue;
            s.coef_[nu] = v * scalar_traits<T>::from_int(nu[n]);
        }
        return s;
    }

    // f(c + w) for outer f given by derivatives at c = inner(0)
    Series compose_outer(const Outer1D<T>& f, int max_terms = -1) const {
        T c = value_at_origin();
        Series w = *this;
        w.coef_.erase(MultiIndex(dim_));
        int kmax = max_terms < 0 ? order_ : max_terms;
        Series acc = Series::constant(dim_, order_, f.deriv(0, c));
        Series wpow = Series::constant(dim_, order_, scalar_traits<T>::from_int(1));
        T kfact = scalar_traits<T>::from_int(1);
        for (int k = 1; k <= kmax; ++k) {
            wpow = wpow * w;
            if (wpow.is_zero()) break;
            kfact = kfact * scalar_traits<T>::from_int(k);
            acc = acc + wpow.scaled(f.deriv(k, c) / kfact);
        }
        return acc;
    }

    // Taylor expansion of outer(inner) where outer is a 1D series given by its
    // monomial coefficients c_k at 0 and inner has zero constant term.
    static Series compose_scalar(const std::vector<T>& outer_monomial, const Series& inner) {
        if (!scalar_traits<T>::is_zero(inner.value_at_origin()))
            throw std::invalid_argument("compose_scalar: inner series must have zero constant term");
        Series acc(inner.dim_, inner.order_);
        if (!outer_monomial.empty())
            acc = Series::constant(inner.dim_, inner.order_, outer_monomial[0]);
        Series wpow = Series::constant(inner.dim_, inner.order_, scalar_traits<T>::from_int(1));
        size_t kmax = std::min(outer_monomial.size(), static_cast<size_t>(inner.order_) + 1);
        for (size_t k = 1; k < kmax; ++k) {
            wpow = wpow * inner;
            if (wpow.is_zero()) break;
            acc = acc + wpow.scaled(outer_monomial[k]);
        }
        return acc;
    }

    T evaluate(const std::vector<T>& y) const {
        if (static_cast<int>(y.size()) != dim_)
            throw std::invalid_argument("Series::evaluate: point dimension mismatch");
        T sum{};
        for (auto& [mu, v] : coef_) {
            T term = v / scalar_traits<T>::from_int(static_cast<long long>(multifactorial_u64(mu)));
            for (int i = 0; i < dim_; ++i)
                for (int k = 0; k < mu[i]; ++k) term = term * y[static_cast<size_t>(i)];
            sum = sum + term;
        }
        return sum;
    }

    double evaluate_d(const std::vector<double>& y) const {
        double sum = 0;
        for (auto& [mu, v] : coef_) {
            double term = scalar_traits<T>::to_double(v) / static_cast<double>(multifactorial_u64(mu));
            for (int i = 0; i < dim_; ++i)
                for (int k = 0; k < mu[i]; ++k) term *= y[static_cast<size_t>(i)];
            sum += term;
        }
        return sum;
    }

    std::string serialize() const {
        std::ostringstream os;
        os.precision(17);
        os << "dim " << dim_ << " order " << order_ << "\n";
        for (auto& [mu, v] : coef_) {
            for (int i = 0; i < dim_; ++i) os << mu[i] << " ";
            os << ": " << scalar_traits<T>::to_double(v) << "\n";
        }
        return os.str();
    }

private:
    void check_match(const Series& o, const char* op) const {
        if (dim_ != o.dim_)
            throw std::invalid_argument(std::string("Series ") + op + ": dimension mismatch");
        if (order_ != o.order_)
            throw std::invalid_argument(std::string("Series ") + op + ": truncation order mismatch");
    }
    void drop_zeros() {
        for (auto it = coef_.begin(); it != coef_.end();) {
            if (scalar_traits<T>::is_zero(it->second))
                it = coef_.erase(it);
            else
                ++it;
        }
    }

    int dim_;
    int order_;
    std::map<MultiIndex, T> coef_;
};

// Line-based text format: header "dim n order s", then one line per index,
// "mu_1 ... mu_n : value". A blank line ends the block (vector series are
// stored as consecutive blocks).
inline Series<double> parse_series(std::istream& in) {
    std::string word;
    int dim = 0, order = 0;
    if (!(in >> word) || word != "dim" || !(in >> dim) || !(in >> word) || word != "order" || !(in >> order))
        throw std::runtime_error("parse_series: bad header, expected 'dim n order s'");
    Series<double> s(dim, order);
    std::string line;
    std::getline(in, line);  // rest of header line
    while (std::getline(in, line)) {
        if (line.empty()) break;
        std::istringstream ls(line);
        std::vector<int> mu(static_cast<size_t>(dim));
        for (int i = 0; i < dim; ++i)
            if (!(ls >> mu[static_cast<size_t>(i)])) throw std::runtime_error("parse_series: bad index line: " + line);
        std::string colon;
        double v;
        if (!(ls >> colon >> v) || colon != ":") throw std::runtime_error("parse_series: bad value line: " + line);
        s.set(MultiIndex(mu), v);
    }
    return s;
}

template <class T>
Series<double> to_double_series(const Series<T>& s) {
    Series<double> out(s.dim(), s.order());
    for (auto& [mu, v] : s.coefficients()) out.set(mu, scalar_traits<T>::to_double(v));
    return out;
}

// Weight parameters of the coefficient norm ||.||_{s,R,r}.
struct NormParams {
    double R;   // tangential radius weight, > 0
    double r;   // vertical radius weight, in (0,1)
    int s;      // order cap, >= 0

    NormParams(double R_, double r_, int s_) : R(R_), r(r_), s(s_) {
        if (!(R > 0)) throw std::invalid_argument("NormParams: R must be > 0");
        if (!(r > 0 && r < 1)) throw std::invalid_argument("NormParams: r must be in (0,1)");
        if (s < 0) throw std::invalid_argument("NormParams: s must be >= 0");
    }
};

// sum_{|mu|+mu_n <= s} |V_mu| / (|mu|! mu_n!) R^{|mu|} r^{mu_n}
template <class T>
double weighted_norm(const Series<T>& a, const NormParams& p) {
    double sum = 0;
    for (auto& [mu, v] : a.coefficients()) {
        if (mu.weighted_order() > p.s) continue;
        double av = std::abs(scalar_traits<T>::to_double(v));
        sum += av / (static_cast<double>(factorial_u64(mu.total())) * static_cast<double>(factorial_u64(mu.vertical())))
               * std::pow(p.R, mu.total()) * std::pow(p.r, mu.vertical());
    }
    return sum;
}

// Partial sums of the weighted norm by weighted order 0..s.
template <class T>
std::vector<double> weighted_norm_by_order(const Series<T>& a, const NormParams& p) {
    std::vector<double> sums(static_cast<size_t>(p.s) + 1, 0.0);
    for (auto& [mu, v] : a.coefficients()) {
        int w = mu.weighted_order();
        if (w > p.s) continue;
        double av = std::abs(scalar_traits<T>::to_double(v));
        sums[static_cast<size_t>(w)] +=
            av / (static_cast<double>(factorial_u64(mu.total())) * static_cast<double>(factorial_u64(mu.vertical())))
            * std::pow(p.R, mu.total()) * std::pow(p.r, mu.vertical());
    }
    for (size_t i = 1; i < sums.size(); ++i) sums[i] += sums[i - 1];
    return sums;
}

// True iff every monomial coefficient |V_mu|/mu! is dominated by the matching
// coefficient of the geometric majorant M Rstar / (Rstar - sum_i y_i),
// i.e. |V_mu| <= M |mu|! / Rstar^{|mu|}.
template <class T>
bool majorant_check(const Series<T>& a, double M, double Rstar) {
    if (!(M > 0) || !(Rstar > 0)) throw std::invalid_argument("majorant_check: M, Rstar must be > 0");
    for (auto& [mu, v] : a.coefficients()) {
        double av = std::abs(scalar_traits<T>::to_double(v));
        double bound = M * static_cast<double>(factorial_u64(mu.total())) / std::pow(Rstar, mu.total());
        if (av > bound * (1.0 + 1e-12)) return false;
    }
    return true;
}

}  // namespace hodo
