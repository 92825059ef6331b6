#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace pddl {

// Numeric values are either exact integers or IEEE doubles.  Integer
// arithmetic stays exact; division promotes to Real unless it divides evenly.
struct NumericValue {
    enum class Kind { Int, Real };
    Kind kind = Kind::Int;
    int64_t i = 0;
    double r = 0.0;

    static NumericValue integer(int64_t v) { return {Kind::Int, v, 0.0}; }
    static NumericValue real(double v) { return {Kind::Real, 0, v}; }

    bool is_int() const { return kind == Kind::Int; }
    double as_double() const { return is_int() ? static_cast<double>(i) : r; }
    // True when the value is an integer by value (Real 3.0 counts).
    bool integral() const {
        return is_int() || (std::floor(r) == r && std::isfinite(r));
    }
    int64_t as_int() const { return is_int() ? i : static_cast<int64_t>(r); }

    friend bool operator==(const NumericValue& a, const NumericValue& b) {
        if (a.is_int() && b.is_int()) return a.i == b.i;
        return a.as_double() == b.as_double();
    }
    friend bool operator<(const NumericValue& a, const NumericValue& b) {
        if (a.is_int() && b.is_int()) return a.i < b.i;
        return a.as_double() < b.as_double();
    }
    friend bool operator<=(const NumericValue& a, const NumericValue& b) {
        return a == b || a < b;
    }

    NumericValue operator+(const NumericValue& o) const {
        if (is_int() && o.is_int()) return integer(i + o.i);
        return real(as_double() + o.as_double());
    }
    NumericValue operator-(const NumericValue& o) const {
        if (is_int() && o.is_int()) return integer(i - o.i);
        return real(as_double() - o.as_double());
    }
    NumericValue operator*(const NumericValue& o) const {
        if (is_int() && o.is_int()) return integer(i * o.i);
        return real(as_double() * o.as_double());
    }
    // Caller must reject division by zero first.
    NumericValue operator/(const NumericValue& o) const {
        if (is_int() && o.is_int() && o.i != 0 && i % o.i == 0)
            return integer(i / o.i);
        return real(as_double() / o.as_double());
    }
    NumericValue negate() const { return is_int() ? integer(-i) : real(-r); }

    bool is_zero() const { return is_int() ? i == 0 : r == 0.0; }

    std::string str() const;
};

}  // namespace pddl
