#pragma once

#include "kvg/rational.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kvg {

/// Power product of named variables. Exponents are positive; variables sorted by name.
class Monomial {
public:
    Monomial() = default;
    static Monomial variable(std::string name, unsigned exponent = 1);

    const std::vector<std::pair<std::string, unsigned>>& powers() const { return powers_; }
    unsigned degree() const;
    unsigned exponent(std::string_view var) const;
    bool is_one() const { return powers_.empty(); }

    Monomial operator*(const Monomial& other) const;
    bool divides(const Monomial& other) const;
    /// Quotient other / *this; requires divides(other).
    Monomial quotient_of(const Monomial& other) const;
    Monomial without(std::string_view var) const;

    friend bool operator==(const Monomial&, const Monomial&) = default;

private:
    std::vector<std::pair<std::string, unsigned>> powers_;
};

/// Graded lexicographic order; alphabetically earlier variables weigh more.
struct GrlexLess {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

using Point = std::map<std::string, Rational, std::less<>>;

/// Sparse multivariate polynomial over the rationals.
class Polynomial {
public:
    using TermMap = std::map<Monomial, Rational, GrlexLess>;

    Polynomial() = default;
    Polynomial(const Rational& constant);  // NOLINT: implicit on purpose, mirrors scalars
    Polynomial(long constant) : Polynomial(Rational(constant)) {}
    static Polynomial variable(const std::string& name);
    static Polynomial term(const Monomial& m, const Rational& c);

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Rational constant_value() const;
    std::size_t size() const { return terms_.size(); }

    /// Largest term in grlex order. Requires !is_zero().
    const Monomial& leading_monomial() const { return terms_.rbegin()->first; }
    const Rational& leading_coefficient() const { return terms_.rbegin()->second; }

    unsigned total_degree() const;
    unsigned degree_in(std::string_view var) const;
    std::set<std::string> variables() const;
    /// Coefficients with respect to one variable; keys are exponents.
    std::map<unsigned, Polynomial> coefficients_in(const std::string& var) const;

    Polynomial derivative(const std::string& var) const;
    /// Throws UnknownVariable if a variable is missing from the point.
    Rational evaluate(const Point& point) const;

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(const Rational& c);
    Polynomial operator-() const;
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
    Polynomial pow(unsigned e) const;

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

    void add_term(const Monomial& m, const Rational& c);

private:
    TermMap terms_;
};

/// Scales p so its leading coefficient is 1 (zero stays zero).
Polynomial monic(const Polynomial& p);

/// Monic greatest common divisor over Q. gcd(0, 0) = 0.
Polynomial gcd(const Polynomial& a, const Polynomial& b);

/// a / b when b divides a exactly, otherwise nullopt.
std::optional<Polynomial> divide_exact(const Polynomial& a, const Polynomial& b);

}  // namespace kvg
