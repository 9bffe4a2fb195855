#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hodo {

// Exact rational scalar on 128-bit integers, used as a slow cross-check mode
// for low-order series work. Every operation reduces by gcd and throws
// std::overflow_error instead of wrapping.
class Rational {
public:
    using Int = __int128;

    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d) : num_(n), den_(d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        normalize();
    }

    static Rational from_int128(Int n, Int d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        Rational r;
        r.num_ = n;
        r.den_ = d;
        r.normalize();
        return r;
    }

    Int num() const { return num_; }
    Int den() const { return den_; }
    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    Rational operator-() const { return from_int128(-num_, den_); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from_int128(checked_add(checked_mul(a.num_, b.den_), checked_mul(b.num_, a.den_)),
                           checked_mul(a.den_, b.den_));
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        // cross-reduce first to keep magnitudes down
        Int g1 = gcd(iabs(a.num_), b.den_);
        Int g2 = gcd(iabs(b.num_), a.den_);
        return from_int128(checked_mul(a.num_ / g1, b.num_ / g2),
                           checked_mul(a.den_ / g2, b.den_ / g1));
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        return a * from_int128(b.den_, b.num_);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return checked_mul(a.num_, b.den_) < checked_mul(b.num_, a.den_);
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    // integer exponents only; c^p for fractional p is outside exact arithmetic
    Rational pow_int(long long p) const {
        if (p == 0) return Rational(1);
        Rational base = p > 0 ? *this : Rational(1) / *this;
        long long k = p > 0 ? p : -p;
        Rational acc(1);
        while (k > 0) {
            if (k & 1) acc *= base;
            base *= base;
            k >>= 1;
        }
        return acc;
    }

    std::string str() const {
        std::string s = int128_str(num_);
        if (den_ != 1) s += "/" + int128_str(den_);
        return s;
    }

    static std::string int128_str(Int v) {
        if (v == 0) return "0";
        bool neg = v < 0;
        unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1
                                  : static_cast<unsigned __int128>(v);
        std::string s;
        while (u > 0) {
            s += static_cast<char>('0' + static_cast<int>(u % 10));
            u /= 10;
        }
        if (neg) s += '-';
        std::reverse(s.begin(), s.end());
        return s;
    }

private:
    static Int iabs(Int v) { return v < 0 ? -v : v; }
    static Int gcd(Int a, Int b) {
        a = iabs(a);
        b = iabs(b);
        while (b != 0) {
            Int t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }
    static Int checked_mul(Int a, Int b) {
        Int r;
        if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("Rational: multiply overflow");
        return r;
    }
    static Int checked_add(Int a, Int b) {
        Int r;
        if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("Rational: add overflow");
        return r;
    }

    void normalize() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        Int g = gcd(num_, den_);
        num_ /= g;
        den_ /= g;
    }

    Int num_, den_;
};

// Scalar traits shared by double (default mode) and Rational (exact mode).
template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    static double from_fraction(long long n, long long d) { return static_cast<double>(n) / static_cast<double>(d); }
    static double from_int(long long n) { return static_cast<double>(n); }
    static double to_double(double v) { return v; }
    static double abs(double v) { return v < 0 ? -v : v; }
    static bool is_zero(double v) { return v == 0.0; }
    static constexpr bool exact = false;
    static const char* name() { return "float64"; }
};

template <>
struct scalar_traits<Rational> {
    static Rational from_fraction(long long n, long long d) { return Rational(n, d); }
    static Rational from_int(long long n) { return Rational(n); }
    static double to_double(const Rational& v) { return v.to_double(); }
    static Rational abs(const Rational& v) { return v < Rational(0) ? -v : v; }
    static bool is_zero(const Rational& v) { return v.is_zero(); }
    static constexpr bool exact = true;
    static const char* name() { return "rational"; }
};

}  // namespace hodo
