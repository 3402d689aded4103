#include "kvg/expr.hpp"

#include "kvg/errors.hpp"

#include <algorithm>
#include <sstream>

namespace kvg {

Expr::Expr(const Polynomial& num, const Polynomial& den) {
    if (den.is_zero()) throw Error(ErrorCode::ZeroDenominator, "denominator is the zero polynomial");
    if (num.is_zero()) {
        den_ = Polynomial(1);
        return;
    }
    if (den.is_constant()) {
        num_ = num * Rational(1 / den.constant_value());
        den_ = Polynomial(1);
        return;
    }
    Polynomial g = gcd(num, den);
    Polynomial n = num, d = den;
    if (!g.is_constant()) {
        n = *divide_exact(num, g);
        d = *divide_exact(den, g);
    }
    Rational lead = d.leading_coefficient();
    if (lead != 1) {
        Rational inv = 1 / lead;
        n *= inv;
        d *= inv;
    }
    num_ = std::move(n);
    den_ = std::move(d);
}

std::set<std::string> Expr::variables() const {
    auto v = num_.variables();
    auto d = den_.variables();
    v.insert(d.begin(), d.end());
    return v;
}

Expr& Expr::operator+=(const Expr& o) {
    if (is_polynomial() && o.is_polynomial()) {
        num_ += o.num_;
    } else if (den_ == o.den_) {
        *this = Expr(num_ + o.num_, den_);
    } else {
        *this = Expr(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
    }
    return *this;
}

Expr& Expr::operator-=(const Expr& o) { return *this += -o; }

Expr& Expr::operator*=(const Expr& o) {
    if (is_polynomial() && o.is_polynomial()) {
        num_ = num_ * o.num_;
    } else {
        *this = Expr(num_ * o.num_, den_ * o.den_);
    }
    return *this;
}

Expr& Expr::operator/=(const Expr& o) {
    if (o.is_zero()) throw Error(ErrorCode::ZeroDenominator, "division by an expression equal to zero");
    *this = Expr(num_ * o.den_, den_ * o.num_);
    return *this;
}

Expr Expr::operator-() const {
    Expr r = *this;
    r.num_ = -r.num_;
    return r;
}

Expr Expr::pow(long e) const {
    if (e < 0) {
        if (is_zero()) throw Error(ErrorCode::ZeroDenominator, "negative power of zero");
        return Expr(den_.pow(static_cast<unsigned>(-e)), num_.pow(static_cast<unsigned>(-e)));
    }
    Expr r;
    r.num_ = num_.pow(static_cast<unsigned>(e));
    r.den_ = den_.pow(static_cast<unsigned>(e));  // coprime and monic are preserved by powers
    if (r.num_.is_zero()) r.den_ = Polynomial(1);
    return r;
}

Expr normalize(const Expr& e) { return e; }

Expr normalize(const Polynomial& num, const Polynomial& den) { return Expr(num, den); }

Expr differentiate(const Expr& e, const std::string& var) {
    const Polynomial& n = e.numerator();
    const Polynomial& d = e.denominator();
    if (e.is_polynomial()) return Expr(n.derivative(var));
    return Expr(n.derivative(var) * d - n * d.derivative(var), d * d);
}

Expr differentiate(const Expr& e, const std::string& var, const std::vector<std::string>& coords) {
    if (std::find(coords.begin(), coords.end(), var) == coords.end())
        throw Error(ErrorCode::UnknownVariable, "'" + var + "' is not a chart coordinate");
    return differentiate(e, var);
}

namespace {

Expr substitute_poly(const Polynomial& p, const Bindings& bindings, Unbound policy) {
    std::map<std::pair<std::string, unsigned>, Expr> powers;
    auto power_of = [&](const std::string& v, unsigned e) -> const Expr& {
        auto key = std::make_pair(v, e);
        auto it = powers.find(key);
        if (it != powers.end()) return it->second;
        auto b = bindings.find(v);
        Expr base;
        if (b != bindings.end()) {
            base = b->second;
        } else if (policy == Unbound::Keep) {
            base = Expr::variable(v);
        } else {
            throw Error(ErrorCode::UnknownVariable, "no binding for '" + v + "'");
        }
        return powers.emplace(key, base.pow(e)).first->second;
    };

    bool polynomial_result = true;
    for (const auto& [_, val] : bindings)
        if (!val.is_polynomial()) polynomial_result = false;

    if (polynomial_result) {
        Polynomial total;
        for (const auto& [m, c] : p.terms()) {
            Polynomial t(c);
            for (const auto& [v, e] : m.powers()) t = t * power_of(v, e).numerator();
            total += t;
        }
        return Expr(total);
    }
    Expr total;
    for (const auto& [m, c] : p.terms()) {
        Expr t(c);
        for (const auto& [v, e] : m.powers()) t *= power_of(v, e);
        total += t;
    }
    return total;
}

}  // namespace

Expr substitute(const Expr& e, const Bindings& bindings, Unbound policy) {
    Expr n = substitute_poly(e.numerator(), bindings, policy);
    if (e.is_polynomial()) return n;
    Expr d = substitute_poly(e.denominator(), bindings, policy);
    if (d.is_zero())
        throw Error(ErrorCode::ZeroDenominator, "substitution makes the denominator " +
                                                    to_string(e.denominator()) + " identically zero");
    return n / d;
}

Rational eval_at(const Expr& e, const Point& point) {
    Rational d = e.denominator().evaluate(point);
    if (d == 0) throw Error(ErrorCode::PoleAtPoint, "denominator " + to_string(e.denominator()) + " vanishes");
    return e.numerator().evaluate(point) / d;
}

std::string to_string(const Polynomial& p) {
    if (p.is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [m, c] = *it;
        const bool negative = c < 0;
        Rational a = abs(c);
        if (first)
            out << (negative ? "-" : "");
        else
            out << (negative ? " - " : " + ");
        first = false;
        if (m.is_one()) {
            out << to_string(a);
            continue;
        }
        if (a != 1) out << to_string(a) << '*';
        bool first_factor = true;
        for (const auto& [v, e] : m.powers()) {
            if (!first_factor) out << '*';
            first_factor = false;
            out << v;
            if (e != 1) out << '^' << e;
        }
    }
    return out.str();
}

std::string to_string(const Expr& e) {
    if (e.is_polynomial()) return to_string(e.numerator());
    return "(" + to_string(e.numerator()) + ")/(" + to_string(e.denominator()) + ")";
}

// ------------------------------------------------------------------ parser

namespace {

Expr parse_sum(TokenStream& ts);

bool starts_operand(const TokenStream& ts) {
    TokenKind k = ts.peek().kind;
    return k == TokenKind::Integer || k == TokenKind::Identifier || ts.is_symbol("(") || ts.is_symbol("-") ||
           ts.is_symbol("+");
}

// A binary operator with nothing usable after it is reported at the operator itself.
void require_operand(const TokenStream& ts, const Token& op) {
    if (!starts_operand(ts)) ts.fail(op, "dangling operator");
}

Expr parse_atom(TokenStream& ts) {
    const Token& t = ts.peek();
    if (t.kind == TokenKind::Integer) {
        ts.next();
        return Expr(Rational(mpz_class(t.text)));
    }
    if (t.kind == TokenKind::Identifier) {
        ts.next();
        return Expr::variable(t.text);
    }
    if (ts.is_symbol("(")) {
        ts.next();
        Expr inner = parse_sum(ts);
        ts.expect_symbol(")");
        return inner;
    }
    ts.fail(t, t.kind == TokenKind::End ? "expression ends unexpectedly" : "expected an operand");
}

Expr parse_power(TokenStream& ts) {
    Expr base = parse_atom(ts);
    if (!ts.is_symbol("^")) return base;
    const Token& caret = ts.next();
    bool negative = ts.accept_symbol("-");
    if (ts.peek().kind != TokenKind::Integer) ts.fail(ts.peek(), "exponent must be an integer");
    long e = ts.expect_integer("exponent");
    if (e > 4096) ts.fail(caret, "exponent too large");
    if (ts.is_symbol("^")) ts.fail(ts.peek(), "chained exponents need parentheses");
    try {
        return base.pow(negative ? -e : e);
    } catch (const Error&) {
        ts.fail(caret, "negative power of zero");
    }
}

Expr parse_unary(TokenStream& ts) {
    if (ts.accept_symbol("-")) return -parse_unary(ts);
    if (ts.accept_symbol("+")) return parse_unary(ts);
    return parse_power(ts);
}

Expr parse_product(TokenStream& ts) {
    Expr acc = parse_unary(ts);
    while (ts.is_symbol("*") || ts.is_symbol("/")) {
        const Token& op = ts.next();
        require_operand(ts, op);
        Expr rhs = parse_unary(ts);
        if (op.text == "*") {
            acc *= rhs;
        } else {
            if (rhs.is_zero()) ts.fail(op, "division by zero");
            acc /= rhs;
        }
    }
    return acc;
}

Expr parse_sum(TokenStream& ts) {
    Expr acc = parse_product(ts);
    while (ts.is_symbol("+") || ts.is_symbol("-")) {
        const Token& op = ts.next();
        require_operand(ts, op);
        bool plus = op.text == "+";
        Expr rhs = parse_product(ts);
        if (plus)
            acc += rhs;
        else
            acc -= rhs;
    }
    return acc;
}

}  // namespace

Expr parse_expr(TokenStream& tokens) { return parse_sum(tokens); }

Expr parse_expr(std::string_view text) {
    TokenStream ts(tokenize(text));
    Expr e = parse_sum(ts);
    if (!ts.at_end()) ts.fail(ts.peek(), "unexpected token after expression");
    return e;
}

}  // namespace kvg
