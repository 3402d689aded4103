#include "kvg/oracle.hpp"

#include <algorithm>
#include <numeric>

namespace kvg {

namespace {

void enumerate(std::size_t n, unsigned budget, std::vector<unsigned>& cur, std::size_t var,
               std::vector<std::vector<unsigned>>& out) {
    if (var == n) {
        out.push_back(cur);
        return;
    }
    for (unsigned e = 0; e <= budget; ++e) {
        cur[var] = e;
        enumerate(n, budget - e, cur, var + 1, out);
    }
    cur[var] = 0;
}

unsigned degree(const std::vector<unsigned>& e) { return std::accumulate(e.begin(), e.end(), 0u); }

}  // namespace

JetSpace::JetSpace(std::size_t n, unsigned order) : n_(n), order_(order) {
    std::vector<unsigned> cur(n, 0);
    enumerate(n, order, cur, 0, monomials_);
    std::stable_sort(monomials_.begin(), monomials_.end(),
                     [](const auto& a, const auto& b) { return degree(a) < degree(b); });
    for (std::size_t i = 0; i < monomials_.size(); ++i) index_[monomials_[i]] = i;
    units_.assign(n, npos);
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<unsigned> e(n, 0);
        e[v] = 1;
        units_[v] = index(e);
    }
    for (std::size_t a = 0; a < monomials_.size(); ++a)
        for (std::size_t b = 0; b < monomials_.size(); ++b) {
            if (degree(monomials_[a]) + degree(monomials_[b]) > order) continue;
            std::vector<unsigned> s(n);
            for (std::size_t v = 0; v < n; ++v) s[v] = monomials_[a][v] + monomials_[b][v];
            products_.push_back({a, b, index(s)});
        }
    shifts_.resize(n);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t a = 0; a < monomials_.size(); ++a) {
            if (monomials_[a][v] == 0) continue;
            std::vector<unsigned> lower = monomials_[a];
            --lower[v];
            shifts_[v].push_back({a, index(lower), monomials_[a][v]});
        }
}

std::size_t JetSpace::index(const std::vector<unsigned>& exps) const {
    auto it = index_.find(exps);
    return it == index_.end() ? npos : it->second;
}

Jet::Jet(std::shared_ptr<const JetSpace> s, const Rational& value) : space_(std::move(s)), c_(space_->size()) {
    c_[0] = value;
}

Jet Jet::variable(std::shared_ptr<const JetSpace> s, std::size_t var, const Rational& at) {
    Jet j(s, at);
    if (s->order() > 0) j.c_[s->unit(var)] = 1;
    return j;
}

Jet Jet::d(std::size_t var) const {
    Jet out(space_, Rational(0));
    for (const auto& sh : space_->shifts(var)) out.c_[sh.to] = c_[sh.from] * sh.factor;
    return out;
}

Jet& Jet::operator+=(const Jet& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
    Jet out(a.space_, Rational(0));
    for (const auto& p : a.space_->products()) {
        if (a.c_[p.a] == 0 || b.c_[p.b] == 0) continue;
        out.c_[p.out] += a.c_[p.a] * b.c_[p.b];
    }
    return out;
}

Jet operator*(Jet a, const Rational& q) {
    for (auto& c : a.c_) c *= q;
    return a;
}

Jet operator/(const Jet& a, const Jet& b) {
    if (b.value() == 0) throw OraclePole{};
    // 1/b = (1/b0) sum_m (-(b - b0)/b0)^m, truncated at the order.
    const Rational inv0 = 1 / b.value();
    Jet tail = b;
    tail.c_[0] = 0;
    tail = tail * (-inv0);
    Jet term(b.space_, Rational(1));
    Jet sum(b.space_, Rational(1));
    for (unsigned m = 1; m <= b.space_->order(); ++m) {
        term = term * tail;
        sum += term;
    }
    return a * (sum * inv0);
}

JetPoint seed_jets(const std::shared_ptr<const JetSpace>& s, const std::vector<std::string>& coords,
                   const RatVector& p) {
    JetPoint out;
    for (std::size_t i = 0; i < coords.size(); ++i) out.emplace(coords[i], Jet::variable(s, i, p.at(i)));
    return out;
}

namespace {

Jet poly_eval(const Polynomial& poly, const JetPoint& at, const std::shared_ptr<const JetSpace>& s) {
    Jet acc(s, Rational(0));
    for (const auto& [mono, coef] : poly.terms()) {
        Jet t(s, coef);
        for (const auto& [var, e] : mono.powers()) {
            auto it = at.find(var);
            if (it == at.end()) throw Error(ErrorCode::UnknownVariable, "oracle: unbound variable " + var);
            for (unsigned k = 0; k < e; ++k) t = t * it->second;
        }
        acc += t;
    }
    return acc;
}

}  // namespace

Jet jet_eval(const Expr& e, const JetPoint& at) {
    static const auto point_space = std::make_shared<const JetSpace>(0, 0);
    const auto& s = at.empty() ? point_space : at.begin()->second.space();
    Jet num = poly_eval(e.numerator(), at, s);
    if (e.is_polynomial()) return num * Rational(Rational(1) / e.denominator().constant_value());
    return num / poly_eval(e.denominator(), at, s);
}

Rational numeric_value(const Expr& e, const std::vector<std::string>& coords, const RatVector& p) {
    static const auto s = std::make_shared<const JetSpace>(0, 0);
    JetPoint at;
    for (std::size_t i = 0; i < coords.size(); ++i) at.emplace(coords[i], Jet(s, p.at(i)));
    return jet_eval(e, at).value();
}

std::optional<OracleMismatch> cross_check(const OracleGroup& g, const std::vector<RatVector>& points,
                                          std::size_t* compared) {
    std::size_t count = 0;
    for (const auto& p : points) {
        std::vector<std::optional<Rational>> num;
        try {
            num = g.numeric(p);
        } catch (const OraclePole&) {
            continue;
        }
        Point at;
        for (std::size_t i = 0; i < g.vars.size(); ++i) at[g.vars[i]] = p.at(i);
        for (std::size_t i = 0; i < g.symbolic.size(); ++i) {
            if (!num.at(i)) continue;
            Rational sym;
            try {
                sym = eval_at(g.symbolic[i], at);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::PoleAtPoint) continue;
                throw;
            }
            ++count;
            if (sym != *num[i]) {
                if (compared) *compared = count;
                return OracleMismatch{g.label, i, p, sym, *num[i]};
            }
        }
    }
    if (compared) *compared = count;
    return std::nullopt;
}

Rational numeric_det(RatMatrix m) {
    const std::size_t n = m.rows();
    Rational det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && m(piv, c) == 0) ++piv;
        if (piv == n) return 0;
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(c, j));
            det = -det;
        }
        det *= m(c, c);
        for (std::size_t r = c + 1; r < n; ++r) {
            if (m(r, c) == 0) continue;
            Rational f = m(r, c) / m(c, c);
            for (std::size_t j = c; j < n; ++j) m(r, j) -= f * m(c, j);
        }
    }
    return det;
}

}  // namespace kvg
