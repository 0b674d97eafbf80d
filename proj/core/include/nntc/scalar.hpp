#ifndef NNTC_SCALAR_HPP
#define NNTC_SCALAR_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <compare>
#include <string>

#include "nntc/errors.hpp"

namespace nntc {

using Rational = boost::multiprecision::cpp_rational;

// A scalar value in one of two modes: exact (arbitrary-precision rational,
// always kept normalized with positive denominator) or floating (double,
// never NaN/inf). Mixing modes in arithmetic raises ModeMismatch.
class Scalar {
public:
    enum class Mode { exact, floating };

    Scalar() : mode_(Mode::exact), rat_(0), flt_(0.0) {}

    static Scalar exact(Rational r) {
        Scalar s;
        s.mode_ = Mode::exact;
        s.rat_ = std::move(r);
        return s;
    }
    static Scalar exact(long long num, long long den = 1) {
        if (den == 0) throw DivisionByZero("rational with zero denominator");
        if (den < 0) {  // cpp_rational requires a positive denominator
            num = -num;
            den = -den;
        }
        return exact(Rational(num, den));
    }
    static Scalar floating(double v) {
        if (!std::isfinite(v)) throw NonFiniteCost("non-finite scalar");
        Scalar s;
        s.mode_ = Mode::floating;
        s.flt_ = v;
        return s;
    }
    static Scalar zero(Mode m) {
        return m == Mode::exact ? exact(0) : floating(0.0);
    }
    static Scalar one(Mode m) {
        return m == Mode::exact ? exact(1) : floating(1.0);
    }

    Mode mode() const { return mode_; }
    bool is_exact() const { return mode_ == Mode::exact; }

    const Rational& rat() const {
        require(Mode::exact);
        return rat_;
    }
    double flt() const {
        require(Mode::floating);
        return flt_;
    }

    // Numeric value as a double regardless of mode.
    double to_double() const {
        return mode_ == Mode::exact ? static_cast<double>(rat_) : flt_;
    }

    Scalar to_float_mode() const {
        return mode_ == Mode::floating ? *this : floating(to_double());
    }

    bool is_zero() const {
        return mode_ == Mode::exact ? rat_.is_zero() : flt_ == 0.0;
    }

    Scalar operator-() const {
        return mode_ == Mode::exact ? exact(-rat_) : floating(-flt_);
    }

    Scalar operator+(const Scalar& o) const {
        check(o);
        return mode_ == Mode::exact ? exact(rat_ + o.rat_)
                                    : floating(flt_ + o.flt_);
    }
    Scalar operator-(const Scalar& o) const {
        check(o);
        return mode_ == Mode::exact ? exact(rat_ - o.rat_)
                                    : floating(flt_ - o.flt_);
    }
    Scalar operator*(const Scalar& o) const {
        check(o);
        return mode_ == Mode::exact ? exact(rat_ * o.rat_)
                                    : floating(flt_ * o.flt_);
    }
    Scalar operator/(const Scalar& o) const {
        check(o);
        if (o.is_zero()) throw DivisionByZero("division by zero");
        return mode_ == Mode::exact ? exact(rat_ / o.rat_)
                                    : floating(flt_ / o.flt_);
    }
    Scalar inverse() const {
        if (is_zero()) throw DivisionByZero("inverse of zero");
        return mode_ == Mode::exact ? exact(Rational(1) / rat_)
                                    : floating(1.0 / flt_);
    }
    Scalar abs() const {
        return mode_ == Mode::exact ? exact(rat_ < 0 ? -rat_ : rat_)
                                    : floating(std::fabs(flt_));
    }

    bool operator==(const Scalar& o) const {
        check(o);
        return mode_ == Mode::exact ? rat_ == o.rat_ : flt_ == o.flt_;
    }
    bool operator!=(const Scalar& o) const { return !(*this == o); }
    bool operator<(const Scalar& o) const {
        check(o);
        return mode_ == Mode::exact ? rat_ < o.rat_ : flt_ < o.flt_;
    }
    bool operator<=(const Scalar& o) const {
        return *this < o || *this == o;
    }
    bool operator>(const Scalar& o) const { return o < *this; }
    bool operator>=(const Scalar& o) const { return o <= *this; }

    // Canonical text form: exact values as "p" or "p/q" with q > 0 and
    // gcd(|p|, q) = 1; float values via shortest round-trip formatting.
    std::string str() const;

    // Parses the canonical exact form "p" or "p/q".
    static Scalar parse_exact(const std::string& text);

private:
    void require(Mode m) const {
        if (mode_ != m) throw ModeMismatch("scalar mode mismatch");
    }
    void check(const Scalar& o) const {
        if (mode_ != o.mode_) throw ModeMismatch("mixed-mode arithmetic");
    }

    Mode mode_;
    Rational rat_;
    double flt_;
};

} // namespace nntc

#endif
