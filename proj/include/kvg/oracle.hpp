#pragma once

#include "kvg/expr.hpp"
#include "kvg/matrix.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace kvg {

/// Raised by jet arithmetic when a denominator vanishes at the expansion point.
struct OraclePole {};

/// Monomials in n variables up to a total degree, with precomputed product and derivative tables.
class JetSpace {
public:
    JetSpace(std::size_t n, unsigned order);
    std::size_t vars() const { return n_; }
    unsigned order() const { return order_; }
    std::size_t size() const { return monomials_.size(); }
    std::size_t unit(std::size_t var) const { return units_[var]; }
    /// Index of the monomial with the given exponents; npos when its degree exceeds the order.
    std::size_t index(const std::vector<unsigned>& exps) const;

    struct Product { std::size_t a, b, out; };
    struct Shift { std::size_t from, to; unsigned factor; };
    const std::vector<Product>& products() const { return products_; }
    const std::vector<Shift>& shifts(std::size_t var) const { return shifts_[var]; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::size_t n_;
    unsigned order_;
    std::vector<std::vector<unsigned>> monomials_;
    std::map<std::vector<unsigned>, std::size_t> index_;
    std::vector<std::size_t> units_;
    std::vector<Product> products_;
    std::vector<std::vector<Shift>> shifts_;
};

/// Truncated Taylor expansion sum c_a dx^a around a point, exact over Q.
/// Derivatives lose one degree of validity; the caller picks an order large enough.
class Jet {
public:
    Jet() = default;
    Jet(std::shared_ptr<const JetSpace> s, const Rational& value);

    const std::shared_ptr<const JetSpace>& space() const { return space_; }
    const Rational& value() const { return c_[0]; }
    /// First partial at the expansion point.
    const Rational& slope(std::size_t var) const { return c_[space_->unit(var)]; }
    Jet d(std::size_t var) const;

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator*(Jet a, const Rational& q);
    /// Throws OraclePole when b.value() is zero.
    friend Jet operator/(const Jet& a, const Jet& b);

    static Jet variable(std::shared_ptr<const JetSpace> s, std::size_t var, const Rational& at);

private:
    std::shared_ptr<const JetSpace> space_;
    std::vector<Rational> c_;
};

using JetPoint = std::map<std::string, Jet, std::less<>>;

/// x_i = p_i + dx_i for the given coordinates.
JetPoint seed_jets(const std::shared_ptr<const JetSpace>& s, const std::vector<std::string>& coords,
                   const RatVector& p);
/// Evaluates num/den term by term on jets. Throws OraclePole or UnknownVariable.
Jet jet_eval(const Expr& e, const JetPoint& at);
/// Plain value at a point through the jet evaluator (order 0).
Rational numeric_value(const Expr& e, const std::vector<std::string>& coords, const RatVector& p);

/// Symbolic residuals paired with an independent numeric evaluation of the same quantities.
struct OracleGroup {
    std::string label;
    std::vector<std::string> vars;
    std::vector<Expr> symbolic;
    /// One value per symbolic entry; nullopt marks a pole. May throw OraclePole for the whole point.
    std::function<std::vector<std::optional<Rational>>(const RatVector&)> numeric;
};

struct OracleMismatch {
    std::string label;
    std::size_t entry = 0;
    RatVector point;
    Rational symbolic;
    Rational numeric;
};

/// Compares eval_at(symbolic[i], p) with numeric(p)[i] at every point, skipping poles on either side.
std::optional<OracleMismatch> cross_check(const OracleGroup& g, const std::vector<RatVector>& points,
                                          std::size_t* compared = nullptr);

/// Numeric matrix helpers shared by the oracles.
Rational numeric_det(RatMatrix m);

}  // namespace kvg
