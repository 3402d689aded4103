#include "kvg/polynomial.hpp"

#include "kvg/errors.hpp"

#include <algorithm>

namespace kvg {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ZeroDenominator: return "ZeroDenominator";
        case ErrorCode::UnknownVariable: return "UnknownVariable";
        case ErrorCode::PoleAtPoint: return "PoleAtPoint";
        case ErrorCode::ChartMismatch: return "ChartMismatch";
        case ErrorCode::PreconditionViolated: return "PreconditionViolated";
        case ErrorCode::DegenerateBasis: return "DegenerateBasis";
        case ErrorCode::NotCoisotropic: return "NotCoisotropic";
        case ErrorCode::ClosureFailure: return "ClosureFailure";
        case ErrorCode::NotTransverseAtSample: return "NotTransverseAtSample";
        case ErrorCode::InvalidAlgebra: return "InvalidAlgebra";
        case ErrorCode::InvalidSubspace: return "InvalidSubspace";
        case ErrorCode::Parse: return "ParseError";
        case ErrorCode::Semantic: return "SemanticError";
    }
    return "Error";
}

std::string to_string(const Rational& q) { return q.get_str(); }

Rational parse_rational(std::string_view text) {
    auto fail = [&] { return Error(ErrorCode::Parse, "malformed rational '" + std::string(text) + "'"); };
    if (text.empty()) throw fail();
    auto slash = text.find('/');
    auto valid_int = [](std::string_view s, bool allow_sign) {
        if (!s.empty() && allow_sign && (s[0] == '-' || s[0] == '+')) s.remove_prefix(1);
        return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    std::string num(text.substr(0, slash));
    std::string den = slash == std::string_view::npos ? "1" : std::string(text.substr(slash + 1));
    if (!valid_int(num, true) || !valid_int(den, false)) throw fail();
    if (num[0] == '+') num.erase(0, 1);
    mpz_class n(num), d(den);
    if (d == 0) throw Error(ErrorCode::ZeroDenominator, "rational literal '" + std::string(text) + "'");
    Rational q(n, d);
    q.canonicalize();
    return q;
}

// ---------------------------------------------------------------- Monomial

Monomial Monomial::variable(std::string name, unsigned exponent) {
    Monomial m;
    if (exponent > 0) m.powers_.emplace_back(std::move(name), exponent);
    return m;
}

unsigned Monomial::degree() const {
    unsigned d = 0;
    for (const auto& [_, e] : powers_) d += e;
    return d;
}

unsigned Monomial::exponent(std::string_view var) const {
    for (const auto& [v, e] : powers_)
        if (v == var) return e;
    return 0;
}

Monomial Monomial::operator*(const Monomial& other) const {
    Monomial r;
    r.powers_.reserve(powers_.size() + other.powers_.size());
    auto a = powers_.begin(), b = other.powers_.begin();
    while (a != powers_.end() || b != other.powers_.end()) {
        if (b == other.powers_.end() || (a != powers_.end() && a->first < b->first)) {
            r.powers_.push_back(*a++);
        } else if (a == powers_.end() || b->first < a->first) {
            r.powers_.push_back(*b++);
        } else {
            r.powers_.emplace_back(a->first, a->second + b->second);
            ++a;
            ++b;
        }
    }
    return r;
}

bool Monomial::divides(const Monomial& other) const {
    for (const auto& [v, e] : powers_)
        if (other.exponent(v) < e) return false;
    return true;
}

Monomial Monomial::quotient_of(const Monomial& other) const {
    Monomial r;
    for (const auto& [v, e] : other.powers_) {
        unsigned mine = exponent(v);
        if (e > mine) r.powers_.emplace_back(v, e - mine);
    }
    return r;
}

Monomial Monomial::without(std::string_view var) const {
    Monomial r;
    for (const auto& p : powers_)
        if (p.first != var) r.powers_.push_back(p);
    return r;
}

bool GrlexLess::operator()(const Monomial& a, const Monomial& b) const {
    unsigned da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    const auto& pa = a.powers();
    const auto& pb = b.powers();
    std::size_t i = 0, j = 0;
    while (i < pa.size() || j < pb.size()) {
        const std::string* name;
        if (j == pb.size() || (i < pa.size() && pa[i].first < pb[j].first))
            name = &pa[i].first;
        else
            name = &pb[j].first;
        unsigned ea = (i < pa.size() && pa[i].first == *name) ? pa[i++].second : 0;
        unsigned eb = (j < pb.size() && pb[j].first == *name) ? pb[j++].second : 0;
        if (ea != eb) return ea < eb;
    }
    return false;
}

// -------------------------------------------------------------- Polynomial

Polynomial::Polynomial(const Rational& constant) {
    if (constant != 0) terms_.emplace(Monomial{}, constant);
}

Polynomial Polynomial::variable(const std::string& name) {
    return term(Monomial::variable(name), 1);
}

Polynomial Polynomial::term(const Monomial& m, const Rational& c) {
    Polynomial p;
    p.add_term(m, c);
    return p;
}

bool Polynomial::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

Rational Polynomial::constant_value() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Rational(0) : it->second;
}

unsigned Polynomial::total_degree() const {
    return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

unsigned Polynomial::degree_in(std::string_view var) const {
    unsigned d = 0;
    for (const auto& [m, _] : terms_) d = std::max(d, m.exponent(var));
    return d;
}

std::set<std::string> Polynomial::variables() const {
    std::set<std::string> vars;
    for (const auto& [m, _] : terms_)
        for (const auto& [v, _e] : m.powers()) vars.insert(v);
    return vars;
}

std::map<unsigned, Polynomial> Polynomial::coefficients_in(const std::string& var) const {
    std::map<unsigned, Polynomial> out;
    for (const auto& [m, c] : terms_) out[m.exponent(var)].add_term(m.without(var), c);
    return out;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Polynomial Polynomial::derivative(const std::string& var) const {
    Polynomial d;
    for (const auto& [m, c] : terms_) {
        unsigned e = m.exponent(var);
        if (e == 0) continue;
        d.add_term(m.without(var) * Monomial::variable(var, e - 1), c * e);
    }
    return d;
}

Rational Polynomial::evaluate(const Point& point) const {
    Rational total = 0;
    for (const auto& [m, c] : terms_) {
        Rational t = c;
        for (const auto& [v, e] : m.powers()) {
            auto it = point.find(v);
            if (it == point.end()) throw Error(ErrorCode::UnknownVariable, "no value for '" + v + "'");
            Rational p = 1;
            for (unsigned k = 0; k < e; ++k) p *= it->second;
            t *= p;
        }
        total += t;
    }
    return total;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [_, v] : terms_) v *= c;
    return *this;
}

Polynomial Polynomial::operator-() const {
    Polynomial r = *this;
    for (auto& [_, v] : r.terms_) v = -v;
    return r;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
    return r;
}

Polynomial Polynomial::pow(unsigned e) const {
    Polynomial result(1), base = *this;
    while (e > 0) {
        if (e & 1u) result = result * base;
        e >>= 1u;
        if (e > 0) base = base * base;
    }
    return result;
}

// ------------------------------------------------------------ gcd machinery

Polynomial monic(const Polynomial& p) {
    if (p.is_zero()) return p;
    return p * Rational(1 / p.leading_coefficient());
}

std::optional<Polynomial> divide_exact(const Polynomial& a, const Polynomial& b) {
    if (b.is_zero()) throw Error(ErrorCode::ZeroDenominator, "polynomial division by zero");
    if (b.is_constant()) return a * Rational(1 / b.constant_value());
    Polynomial q, r = a;
    const Monomial& lb = b.leading_monomial();
    const Rational& cb = b.leading_coefficient();
    while (!r.is_zero()) {
        const Monomial& lr = r.leading_monomial();
        if (!lb.divides(lr)) return std::nullopt;
        Polynomial t = Polynomial::term(lb.quotient_of(lr), r.leading_coefficient() / cb);
        q += t;
        r -= t * b;
    }
    return q;
}

namespace {

Polynomial lift_to(const Polynomial& coeff, const std::string& var, unsigned e) {
    return coeff * Polynomial::term(Monomial::variable(var, e), 1);
}

// a * lc(b)^k - q * b with deg_var(result) < deg_var(b).
Polynomial pseudo_remainder(const Polynomial& a, const Polynomial& b, const std::string& var) {
    const unsigned db = b.degree_in(var);
    const Polynomial lcb = b.coefficients_in(var).at(db);
    Polynomial r = a;
    while (!r.is_zero()) {
        unsigned dr = r.degree_in(var);
        if (dr < db) break;
        Polynomial lcr = r.coefficients_in(var).at(dr);
        r = lcb * r - lift_to(lcr, var, dr - db) * b;
    }
    return r;
}

Polynomial content_in(const Polynomial& p, const std::string& var) {
    Polynomial g;
    for (const auto& [_, c] : p.coefficients_in(var)) {
        g = gcd(g, c);
        if (g.is_constant()) return Polynomial(1);
    }
    return g;
}

Polynomial primitive_in(const Polynomial& p, const std::string& var) {
    if (p.is_zero()) return p;
    Polynomial c = content_in(p, var);
    return monic(*divide_exact(p, c));
}

}  // namespace

Polynomial gcd(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero()) return monic(b);
    if (b.is_zero()) return monic(a);
    if (a.is_constant() || b.is_constant()) return Polynomial(1);

    auto va = a.variables(), vb = b.variables();
    std::string var = std::min(*va.begin(), *vb.begin());
    const bool in_a = va.count(var) > 0, in_b = vb.count(var) > 0;
    if (!in_a) return gcd(a, content_in(b, var));
    if (!in_b) return gcd(content_in(a, var), b);

    Polynomial scalar = gcd(content_in(a, var), content_in(b, var));
    Polynomial f = primitive_in(a, var), g = primitive_in(b, var);
    if (f.degree_in(var) < g.degree_in(var)) std::swap(f, g);
    while (!g.is_zero()) {
        Polynomial r = pseudo_remainder(f, g, var);
        f = std::move(g);
        if (r.is_zero()) break;
        if (r.degree_in(var) == 0) {
            f = Polynomial(1);
            break;
        }
        g = primitive_in(r, var);
    }
    if (f.degree_in(var) == 0) f = Polynomial(1);
    return monic(scalar * primitive_in(f, var));
}

}  // namespace kvg
