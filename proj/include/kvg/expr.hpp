#pragma once

#include "kvg/lexer.hpp"
#include "kvg/polynomial.hpp"

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace kvg {

/// Exact rational function num/den over Q in named variables.
///
/// Every Expr is held in canonical form: numerator and denominator are coprime
/// (full multivariate gcd), the denominator is monic in grlex order, and zero
/// is 0/1. Two Exprs denote the same rational function iff they compare equal.
class Expr {
public:
    Expr() : den_(1) {}
    Expr(const Rational& c) : num_(c), den_(1) {}  // NOLINT
    Expr(long c) : Expr(Rational(c)) {}           // NOLINT
    Expr(const Polynomial& p) : num_(p), den_(1) {}  // NOLINT
    /// Builds and normalizes num/den. Throws ZeroDenominator if den is zero.
    Expr(const Polynomial& num, const Polynomial& den);

    static Expr variable(const std::string& name) { return Expr(Polynomial::variable(name)); }

    const Polynomial& numerator() const { return num_; }
    const Polynomial& denominator() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_constant(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    Rational constant_value() const { return num_.constant_value(); }
    std::set<std::string> variables() const;

    Expr& operator+=(const Expr& o);
    Expr& operator-=(const Expr& o);
    Expr& operator*=(const Expr& o);
    Expr& operator/=(const Expr& o);
    Expr operator-() const;
    friend Expr operator+(Expr a, const Expr& b) { return a += b; }
    friend Expr operator-(Expr a, const Expr& b) { return a -= b; }
    friend Expr operator*(Expr a, const Expr& b) { return a *= b; }
    friend Expr operator/(Expr a, const Expr& b) { return a /= b; }
    /// Negative exponents invert; 0^(-k) throws ZeroDenominator.
    Expr pow(long e) const;

    friend bool operator==(const Expr& a, const Expr& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

private:
    Polynomial num_;
    Polynomial den_;
};

using Bindings = std::map<std::string, Expr, std::less<>>;

enum class Unbound { Reject, Keep };

/// Returns e unchanged: values are canonical on construction. Kept as the named entry point.
Expr normalize(const Expr& e);
Expr normalize(const Polynomial& num, const Polynomial& den);

/// Exact partial derivative (quotient rule for rational functions).
Expr differentiate(const Expr& e, const std::string& var);
/// Same, but var must be one of the chart coordinates `coords` (UnknownVariable otherwise).
Expr differentiate(const Expr& e, const std::string& var, const std::vector<std::string>& coords);

/// Composition e(var := bindings[var]). With Unbound::Reject every free variable must be bound.
Expr substitute(const Expr& e, const Bindings& bindings, Unbound policy = Unbound::Reject);

/// Exact value at a point. Throws PoleAtPoint when the denominator vanishes there.
Rational eval_at(const Expr& e, const Point& point);

/// Surface syntax with canonical term order, e.g. "x^2*y - 1/2*x + 3" or "(x)/(x - y)".
std::string to_string(const Expr& e);
std::string to_string(const Polynomial& p);

/// Parses the expression surface syntax; throws ParseError with a position.
Expr parse_expr(std::string_view text);
/// Parses one expression starting at the stream cursor (used by the scenario parser).
Expr parse_expr(TokenStream& tokens);

}  // namespace kvg
