#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace nsw {

/// Exact rational number backed by GMP, always kept canonical
/// (coprime numerator/denominator, positive denominator).
class Rational {
public:
    Rational() : v_(0) {}
    Rational(int n) : v_(n) {}
    Rational(long n) : v_((signed long)n) {}
    Rational(long num, long den) : v_((signed long)num, (signed long)den) {
        if (den == 0) throw std::domain_error("Rational: zero denominator");
        v_.canonicalize();
    }
    explicit Rational(mpq_class q) : v_(std::move(q)) { v_.canonicalize(); }
    explicit Rational(const mpz_class& num, const mpz_class& den) : v_(num, den) {
        if (den == 0) throw std::domain_error("Rational: zero denominator");
        v_.canonicalize();
    }

    /// Parses "p", "-p" or "p/q" in base 10.
    static Rational from_string(const std::string& s) {
        if (s.empty()) throw std::invalid_argument("Rational: empty literal");
        try {
            mpq_class q(s, 10);
            if (q.get_den() == 0) throw std::invalid_argument("Rational: zero denominator");
            q.canonicalize();
            return Rational(std::move(q));
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("Rational: bad literal '" + s + "'");
        }
    }

    bool is_zero() const { return sgn(v_) == 0; }
    int sign() const { return sgn(v_); }
    bool is_integer() const { return v_.get_den() == 1; }

    Rational abs() const { return Rational(mpq_class(::abs(v_))); }

    /// Integer power; k may be negative provided the value is nonzero.
    Rational pow(long k) const {
        if (k == 0) return Rational(1);
        bool inv = k < 0;
        unsigned long e = inv ? (unsigned long)(-k) : (unsigned long)k;
        if (inv && is_zero()) throw std::domain_error("Rational: 0 to negative power");
        mpz_class num, den;
        mpz_pow_ui(num.get_mpz_t(), v_.get_num().get_mpz_t(), e);
        mpz_pow_ui(den.get_mpz_t(), v_.get_den().get_mpz_t(), e);
        return inv ? Rational(den, num) : Rational(num, den);
    }

    Rational reciprocal() const {
        if (is_zero()) throw std::domain_error("Rational: reciprocal of zero");
        return Rational(v_.get_den(), v_.get_num());
    }

    double to_double() const { return v_.get_d(); }
    std::string str() const { return v_.get_str(); }
    const mpq_class& raw() const { return v_; }

    friend Rational operator+(const Rational& a, const Rational& b) { return Rational(mpq_class(a.v_ + b.v_)); }
    friend Rational operator-(const Rational& a, const Rational& b) { return Rational(mpq_class(a.v_ - b.v_)); }
    friend Rational operator*(const Rational& a, const Rational& b) { return Rational(mpq_class(a.v_ * b.v_)); }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.is_zero()) throw std::domain_error("Rational: division by zero");
        return Rational(mpq_class(a.v_ / b.v_));
    }
    Rational operator-() const { return Rational(mpq_class(-v_)); }

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.v_; }

private:
    mpq_class v_;
};

inline Rational abs(const Rational& r) { return r.abs(); }

} // namespace nsw
