#include "kvg/structures.hpp"

#include "kvg/errors.hpp"
#include "kvg/tangent.hpp"

#include <algorithm>
#include <set>

namespace kvg {

// ---------------------------------------------------------------- maps

AffineMap::AffineMap(Chart s, Chart t, RatMatrix m, RatVector c)
    : source(std::move(s)), target(std::move(t)), matrix(std::move(m)), offset(std::move(c)) {
    if (matrix.rows() != target.dim() || matrix.cols() != source.dim())
        throw Error(ErrorCode::Semantic, "map matrix must be " + std::to_string(target.dim()) + "x" +
                                             std::to_string(source.dim()));
    if (offset.size() != target.dim())
        throw Error(ErrorCode::Semantic, "map offset must have " + std::to_string(target.dim()) + " entries");
}

Bindings AffineMap::bindings() const {
    Bindings b;
    for (std::size_t a = 0; a < target.dim(); ++a) {
        Polynomial p(offset[a]);
        for (std::size_t i = 0; i < source.dim(); ++i)
            if (matrix(a, i) != 0) p += Polynomial::variable(source.coords[i]) * matrix(a, i);
        b[target.coords[a]] = Expr(p);
    }
    return b;
}

Expr AffineMap::compose(const Expr& g) const { return substitute(g, bindings()); }

RatVector AffineMap::apply(const RatVector& x) const {
    RatVector y = offset;
    for (std::size_t a = 0; a < target.dim(); ++a)
        for (std::size_t i = 0; i < source.dim(); ++i) y[a] += matrix(a, i) * x[i];
    return y;
}

AffineMap identity_map(const Chart& c) {
    return AffineMap(c, c, RatMatrix::identity(c.dim()), RatVector(c.dim(), Rational(0)));
}

AffineMap compose(const AffineMap& g, const AffineMap& f) {
    require_same_chart(f.target, g.source, "compose");
    RatMatrix fc(f.offset.size(), 1);
    for (std::size_t i = 0; i < f.offset.size(); ++i) fc(i, 0) = f.offset[i];
    RatMatrix c = g.matrix * fc;
    RatVector off(g.target.dim());
    for (std::size_t a = 0; a < off.size(); ++a) off[a] = c(a, 0) + g.offset[a];
    return AffineMap(f.source, g.target, g.matrix * f.matrix, off);
}

OneForm pullback(const AffineMap& f, const OneForm& a) {
    require_same_chart(f.target, a.chart, "pullback");
    const Bindings b = f.bindings();
    OneForm out{f.source, std::vector<Expr>(f.source.dim())};
    for (std::size_t j = 0; j < f.target.dim(); ++j) {
        if (a.components[j].is_zero()) continue;
        Expr aj = substitute(a.components[j], b);
        for (std::size_t i = 0; i < f.source.dim(); ++i)
            if (f.matrix(j, i) != 0) out.components[i] += aj * Expr(f.matrix(j, i));
    }
    return out;
}

bool are_F_related(const AffineMap& f, const VectorField& x, const VectorField& y) {
    require_same_chart(f.source, x.chart, "F-related");
    require_same_chart(f.target, y.chart, "F-related");
    const Bindings b = f.bindings();
    for (std::size_t a = 0; a < f.target.dim(); ++a) {
        Expr lhs;
        for (std::size_t i = 0; i < f.source.dim(); ++i)
            if (f.matrix(a, i) != 0) lhs += Expr(f.matrix(a, i)) * x.components[i];
        if (!(lhs == substitute(y.components[a], b))) return false;
    }
    return true;
}

ExprMatrix kv_map_residual(const AffineMap& f, const SymBivector& h1, const SymBivector& h2) {
    require_same_chart(f.source, h1.chart(), "kv_map");
    require_same_chart(f.target, h2.chart(), "kv_map");
    const ExprMatrix m = to_expr(f.matrix);
    ExprMatrix lhs = m * h1.matrix() * m.transpose();
    const Bindings b = f.bindings();
    ExprMatrix rhs(h2.dim(), h2.dim());
    for (std::size_t a = 0; a < h2.dim(); ++a)
        for (std::size_t c = 0; c < h2.dim(); ++c) rhs(a, c) = substitute(h2(a, c), b);
    return lhs - rhs;
}

bool is_kv_map(const AffineMap& f, const SymBivector& h1, const SymBivector& h2) {
    return is_zero(kv_map_residual(f, h1, h2));
}

Theorem1Report theorem1_equivalences(const AffineMap& f, const SymBivector& h1, const SymBivector& h2,
                                     const std::vector<Expr>& extra) {
    Theorem1Report r;
    r.kv_map = is_kv_map(f, h1, h2);

    // (ii) TF(x, u) = (Mx + c, Mu); Poisson iff DTF Π1 DTFᵀ = Π2∘TF.
    {
        SkewBivector p1 = build_pi(h1);
        SkewBivector p2 = build_pi(h2);
        const std::size_t n = f.source.dim();
        const std::size_t m = f.target.dim();
        RatMatrix dtf(2 * m, 2 * n);
        RatVector off(2 * m, Rational(0));
        for (std::size_t a = 0; a < m; ++a) {
            off[a] = f.offset[a];
            for (std::size_t i = 0; i < n; ++i) {
                dtf(a, i) = f.matrix(a, i);
                dtf(m + a, n + i) = f.matrix(a, i);
            }
        }
        AffineMap tf(p1.chart().total, p2.chart().total, dtf, off);
        const ExprMatrix d = to_expr(dtf);
        ExprMatrix lhs = d * p1.matrix() * d.transpose();
        const Bindings b = tf.bindings();
        bool ok = true;
        for (std::size_t a = 0; a < 2 * m && ok; ++a)
            for (std::size_t c = 0; c < 2 * m && ok; ++c) ok = lhs(a, c) == substitute(p2(a, c), b);
        r.tangent_poisson = ok;
    }

    // (iii) (F^*dy_a)^{#1} and (dy_a)^{#2} are F-related for every coordinate form.
    r.sharp_related = true;
    for (std::size_t a = 0; a < f.target.dim() && r.sharp_related; ++a) {
        OneForm dy = coordinate_form(f.target, a);
        r.sharp_related = are_F_related(f, sharp(h1, pullback(f, dy)), sharp(h2, dy));
    }

    // (iv) X_{g∘F} and X_g are F-related for the test functions.
    std::vector<Expr> tests;
    for (std::size_t a = 0; a < f.target.dim(); ++a) {
        tests.push_back(Expr::variable(f.target.coords[a]));
        for (std::size_t c = a; c < f.target.dim(); ++c)
            tests.push_back(Expr::variable(f.target.coords[a]) * Expr::variable(f.target.coords[c]));
    }
    tests.insert(tests.end(), extra.begin(), extra.end());
    r.hamiltonian_related = true;
    for (const auto& g : tests) {
        VectorField xg = hamiltonian(h2, ScalarField{f.target, g});
        VectorField xgf = hamiltonian(h1, ScalarField{f.source, f.compose(g)});
        if (!are_F_related(f, xgf, xg)) {
            r.hamiltonian_related = false;
            break;
        }
    }
    return r;
}

ProductStructure product_kv(const SymBivector& h1, const SymBivector& h2, int sign) {
    if (sign != 1 && sign != -1) throw Error(ErrorCode::PreconditionViolated, "product sign must be +1 or -1");
    const auto& c1 = h1.chart();
    const auto& c2 = h2.chart();
    std::set<std::string> used(c1.coords.begin(), c1.coords.end());
    std::vector<std::string> coords = c1.coords;
    std::vector<std::string> second;
    Bindings rename;
    for (const auto& v : c2.coords) {
        std::string w = v;
        while (used.count(w)) w += "_2";
        used.insert(w);
        second.push_back(w);
        coords.push_back(w);
        rename[v] = Expr::variable(w);
    }
    const std::size_t n1 = c1.dim();
    const std::size_t n2 = c2.dim();
    Chart pc(c1.name + "x" + c2.name, coords);
    ExprMatrix m(n1 + n2, n1 + n2);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n1; ++j) m(i, j) = h1(i, j);
    for (std::size_t i = 0; i < n2; ++i)
        for (std::size_t j = 0; j < n2; ++j) m(n1 + i, n1 + j) = Expr(sign) * substitute(h2(i, j), rename);

    RatMatrix m1(n1, n1 + n2), m2(n2, n1 + n2);
    for (std::size_t i = 0; i < n1; ++i) m1(i, i) = 1;
    for (std::size_t i = 0; i < n2; ++i) m2(i, n1 + i) = 1;
    return ProductStructure{SymBivector(pc, m), AffineMap(pc, c1, m1, RatVector(n1, Rational(0))),
                            AffineMap(pc, c2, m2, RatVector(n2, Rational(0))), second};
}

// ---------------------------------------------------------- submanifolds

AffineSubmanifold::AffineSubmanifold(std::string nm, Chart amb, RatVector o, std::vector<RatVector> b)
    : name(std::move(nm)), ambient(std::move(amb)), origin(std::move(o)), basis(std::move(b)) {
    const std::size_t n = ambient.dim();
    if (origin.size() != n)
        throw Error(ErrorCode::Semantic, "origin of '" + name + "' must have " + std::to_string(n) + " entries");
    for (const auto& v : basis)
        if (v.size() != n)
            throw Error(ErrorCode::Semantic, "basis vectors of '" + name + "' must have " + std::to_string(n) +
                                                 " entries");
    if (basis.size() > n || rank(columns_to_matrix(basis, n)) != basis.size())
        throw Error(ErrorCode::DegenerateBasis, "basis of '" + name + "' is linearly dependent");
}

RatVector AffineSubmanifold::at(const RatVector& t) const {
    RatVector x = origin;
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t r = 0; r < x.size(); ++r) x[r] += t[i] * basis[i][r];
    return x;
}

bool AffineSubmanifold::contains(const RatVector& x) const {
    RatVector d(n());
    for (std::size_t r = 0; r < n(); ++r) d[r] = x[r] - origin[r];
    return solve(columns_to_matrix(basis, n()), d).has_value();
}

std::optional<AffineSubmanifold> intersect(const AffineSubmanifold& a, const AffineSubmanifold& b) {
    require_same_chart(a.ambient, b.ambient, "intersect");
    const std::size_t n = a.n();
    // a.origin + A s = b.origin + B t  ⇔  [A | -B](s, t) = b.origin - a.origin
    RatMatrix m(n, a.k() + b.k());
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < a.k(); ++i) m(r, i) = a.basis[i][r];
        for (std::size_t j = 0; j < b.k(); ++j) m(r, a.k() + j) = -b.basis[j][r];
    }
    RatVector rhs(n);
    for (std::size_t r = 0; r < n; ++r) rhs[r] = b.origin[r] - a.origin[r];
    auto sol = solve(m, rhs);
    if (!sol) return std::nullopt;
    RatVector s(sol->begin(), sol->begin() + static_cast<long>(a.k()));
    std::vector<RatVector> dirs;
    for (const auto& v : nullspace(m)) {
        RatVector d(n, Rational(0));
        for (std::size_t i = 0; i < a.k(); ++i)
            for (std::size_t r = 0; r < n; ++r) d[r] += v[i] * a.basis[i][r];
        dirs.push_back(d);
    }
    return AffineSubmanifold(a.name + "^" + b.name, a.ambient, a.at(s), dirs);
}

namespace {

std::string fresh(const std::string& base, const std::vector<std::string>& avoid) {
    std::string s = base;
    while (std::find(avoid.begin(), avoid.end(), s) != avoid.end()) s += "_";
    return s;
}

}  // namespace

AdaptedFrame adapted_frame(const AffineSubmanifold& sub) {
    const std::size_t n = sub.n();
    const std::size_t k = sub.k();
    std::vector<RatVector> cols = sub.basis;
    for (std::size_t j = 0; j < n && cols.size() < n; ++j) {
        RatVector e(n, Rational(0));
        e[j] = 1;
        cols.push_back(e);
        if (rank(columns_to_matrix(cols, n)) != cols.size()) cols.pop_back();
    }
    AdaptedFrame f;
    f.sub = sub;
    f.change = columns_to_matrix(cols, n);
    auto inv = inverse(f.change);
    if (!inv) throw Error(ErrorCode::DegenerateBasis, "cannot complete the basis of '" + sub.name + "'");
    f.inverse = *inv;

    bool trivial = f.change == RatMatrix::identity(n) &&
                   std::all_of(sub.origin.begin(), sub.origin.end(), [](const Rational& q) { return q == 0; });
    std::vector<std::string> names;
    if (trivial) {
        names = sub.ambient.coords;
    } else {
        for (std::size_t i = 0; i < k; ++i) names.push_back(fresh("t" + std::to_string(i + 1), sub.ambient.coords));
        for (std::size_t i = k; i < n; ++i)
            names.push_back(fresh("w" + std::to_string(i - k + 1), sub.ambient.coords));
    }
    const std::string nm = sub.name.empty() ? std::string("N") : sub.name;
    f.adapted = Chart(nm + "_adapted", names);
    if (k > 0) f.tangent = Chart(nm, std::vector<std::string>(names.begin(), names.begin() + static_cast<long>(k)));
    return f;
}

Bindings AdaptedFrame::to_ambient() const {
    Bindings b;
    const std::size_t n = sub.n();
    for (std::size_t i = 0; i < n; ++i) {
        Polynomial p(sub.origin[i]);
        for (std::size_t j = 0; j < n; ++j)
            if (change(i, j) != 0) p += Polynomial::variable(adapted.coords[j]) * change(i, j);
        b[sub.ambient.coords[i]] = Expr(p);
    }
    return b;
}

Bindings AdaptedFrame::onto_sub() const {
    Bindings b;
    for (std::size_t i = 0; i < sub.n(); ++i) {
        const auto& v = adapted.coords[i];
        b[v] = i < sub.k() ? Expr::variable(v) : Expr(0);
    }
    return b;
}

ExprMatrix AdaptedFrame::transform(const SymBivector& h) const {
    require_same_chart(sub.ambient, h.chart(), "adapted frame");
    const std::size_t n = sub.n();
    const Bindings b = to_ambient();
    ExprMatrix moved(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) moved(i, j) = moved(j, i) = substitute(h(i, j), b);
    const ExprMatrix q = to_expr(inverse);
    return q * moved * q.transpose();
}

Expr AdaptedFrame::restrict(const Expr& e) const { return substitute(e, onto_sub()); }

ExprMatrix AdaptedFrame::restrict(const ExprMatrix& m) const {
    ExprMatrix out(m.rows(), m.cols());
    const Bindings b = onto_sub();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = substitute(m(i, j), b);
    return out;
}

SubmanifoldReport is_kv_submanifold(const AffineSubmanifold& n, const SymBivector& h) {
    SubmanifoldReport r;
    r.ambient_kv = is_kv(h);
    AdaptedFrame f = adapted_frame(n);
    const std::size_t k = n.k();
    const std::size_t dim = n.n();
    ExprMatrix on = f.restrict(f.transform(h));
    r.residual = on.block(k, 0, dim - k, dim);
    r.holds = is_zero(r.residual);
    if (r.holds && k > 0) r.induced = SymBivector(*f.tangent, on.block(0, 0, k, k));
    return r;
}

std::string to_string(TransversalVerdict v) {
    switch (v) {
        case TransversalVerdict::SymbolicTrue: return "symbolic-true";
        case TransversalVerdict::PointwiseTrue: return "pointwise-true";
        case TransversalVerdict::False: return "false";
    }
    return "false";
}

TransversalReport is_transversal(const AffineSubmanifold& n, const SymBivector& h,
                                 const std::vector<RatVector>& samples) {
    TransversalReport r;
    r.ambient_kv = is_kv(h);
    AdaptedFrame f = adapted_frame(n);
    const std::size_t k = n.k();
    const std::size_t c = n.n() - k;
    ExprMatrix on = f.restrict(f.transform(h));
    ExprMatrix a = on.block(0, 0, k, k);
    ExprMatrix b = on.block(0, k, k, c);
    ExprMatrix d = on.block(k, k, c, c);
    r.det_d = determinant(d);

    auto point_of = [&](const RatVector& t) {
        Point p;
        for (std::size_t i = 0; i < k; ++i) p[f.adapted.coords[i]] = t[i];
        return p;
    };

    if (r.det_d.is_zero()) {
        r.verdict = TransversalVerdict::False;
        r.singular.push_back(samples.empty() ? RatVector(k, Rational(0)) : samples.front());
        return r;
    }
    if (r.det_d.is_constant()) {
        r.verdict = TransversalVerdict::SymbolicTrue;
    } else {
        for (const auto& t : samples) {
            r.checked.push_back(t);
            bool singular = false;
            try {
                singular = eval_at(r.det_d, point_of(t)) == 0;
            } catch (const Error&) {
                singular = true;
            }
            if (singular) r.singular.push_back(t);
        }
        r.verdict = r.singular.empty() ? TransversalVerdict::PointwiseTrue : TransversalVerdict::False;
    }
    if (k > 0) {
        ExprMatrix induced = a;
        if (c > 0) {
            auto dinv = inverse(d);
            induced = a - b * (*dinv) * b.transpose();
        }
        r.induced = SymBivector(*f.tangent, induced);
    }
    return r;
}

CoisotropicReport is_coisotropic(const AffineSubmanifold& n, const SymBivector& h) {
    CoisotropicReport r;
    AdaptedFrame f = adapted_frame(n);
    const std::size_t k = n.k();
    const std::size_t c = n.n() - k;
    r.residual = f.restrict(f.transform(h)).block(k, k, c, c);
    r.holds = is_zero(r.residual);
    return r;
}

// --------------------------------------------------- conormal algebroid

namespace {

// ρ(α)(g) for a section α (coefficients in dw) and a function g of t.
Expr anchor_apply(const ConormalAlgebroid& c, const std::vector<Expr>& a, const Expr& g) {
    if (!c.frame.tangent) return Expr(0);
    Expr out;
    const auto& t = c.frame.tangent->coords;
    for (std::size_t j = 0; j < t.size(); ++j) {
        Expr dg = differentiate(g, t[j]);
        if (dg.is_zero()) continue;
        for (std::size_t p = 0; p < c.rank; ++p)
            if (!a[p].is_zero() && !c.anchor(p, j).is_zero()) out += a[p] * c.anchor(p, j) * dg;
    }
    return out;
}

std::vector<Expr> unit(std::size_t r, std::size_t a) {
    std::vector<Expr> v(r);
    v[a] = Expr(1);
    return v;
}

std::vector<Expr> minus(std::vector<Expr> a, const std::vector<Expr>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

RatVector fiber_product(const std::vector<std::vector<std::vector<Rational>>>& s, const RatVector& a,
                        const RatVector& b) {
    const std::size_t r = a.size();
    RatVector out(r, Rational(0));
    for (std::size_t p = 0; p < r; ++p) {
        if (a[p] == 0) continue;
        for (std::size_t q = 0; q < r; ++q) {
            if (b[q] == 0) continue;
            for (std::size_t c = 0; c < r; ++c) out[c] += a[p] * b[q] * s[p][q][c];
        }
    }
    return out;
}

}  // namespace

std::vector<Expr> conormal_product(const ConormalAlgebroid& c, const std::vector<Expr>& a,
                                   const std::vector<Expr>& b) {
    std::vector<Expr> out(c.rank);
    for (std::size_t q = 0; q < c.rank; ++q) out[q] = anchor_apply(c, a, b[q]);
    for (std::size_t p = 0; p < c.rank; ++p) {
        if (a[p].is_zero()) continue;
        for (std::size_t q = 0; q < c.rank; ++q) {
            if (b[q].is_zero()) continue;
            Expr w = a[p] * b[q];
            for (std::size_t s = 0; s < c.rank; ++s)
                if (!c.structure[p][q][s].is_zero()) out[s] += w * c.structure[p][q][s];
        }
    }
    return out;
}

ConormalAlgebroid conormal_algebroid(const AffineSubmanifold& n, const SymBivector& h,
                                     std::optional<RatVector> fiber_point) {
    if (!is_coisotropic(n, h).holds)
        throw Error(ErrorCode::NotCoisotropic, "'" + n.name + "' is not coisotropic");
    ConormalAlgebroid c;
    c.frame = adapted_frame(n);
    const std::size_t k = n.k();
    const std::size_t dim = n.n();
    c.rank = dim - k;
    const std::size_t r = c.rank;
    const auto& y = c.frame.adapted.coords;
    ExprMatrix ht = c.frame.transform(h);

    // dw_a • dw_b = D_{dw_a} dw_b = sum_c ∂_{y_c} h̃_ab dy_c on N; tangent components must vanish.
    c.structure.assign(r, std::vector<std::vector<Expr>>(r, std::vector<Expr>(r)));
    c.closed = true;
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b) {
            const Expr& e = ht(k + a, k + b);
            for (std::size_t j = 0; j < k; ++j)
                if (!c.frame.restrict(differentiate(e, y[j])).is_zero()) c.closed = false;
            for (std::size_t s = 0; s < r; ++s) c.structure[a][b][s] = c.frame.restrict(differentiate(e, y[k + s]));
        }
    if (!c.closed) throw Error(ErrorCode::ClosureFailure, "conormal product leaves TN° on '" + n.name + "'");

    c.anchor = ExprMatrix(r, k);
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t j = 0; j < k; ++j) c.anchor(a, j) = c.frame.restrict(ht(k + a, j));

    c.left_symmetric = true;
    for (std::size_t a = 0; a < r && c.left_symmetric; ++a)
        for (std::size_t b = 0; b < r && c.left_symmetric; ++b)
            for (std::size_t s = 0; s < r && c.left_symmetric; ++s) {
                auto ea = unit(r, a), eb = unit(r, b), es = unit(r, s);
                auto ass_ab = minus(conormal_product(c, conormal_product(c, ea, eb), es),
                                    conormal_product(c, ea, conormal_product(c, eb, es)));
                auto ass_ba = minus(conormal_product(c, conormal_product(c, eb, ea), es),
                                    conormal_product(c, eb, conormal_product(c, ea, es)));
                c.left_symmetric = ass_ab == ass_ba;
            }

    // ρ(α•β - β•α) = [ρα, ρβ]
    c.anchor_compatible = true;
    if (c.frame.tangent) {
        const Chart& tc = *c.frame.tangent;
        auto rho = [&](const std::vector<Expr>& s) {
            VectorField v{tc, std::vector<Expr>(k)};
            for (std::size_t j = 0; j < k; ++j)
                for (std::size_t p = 0; p < r; ++p)
                    if (!s[p].is_zero()) v.components[j] += s[p] * c.anchor(p, j);
            return v;
        };
        for (std::size_t a = 0; a < r && c.anchor_compatible; ++a)
            for (std::size_t b = a + 1; b < r && c.anchor_compatible; ++b) {
                auto ea = unit(r, a), eb = unit(r, b);
                auto comm = minus(conormal_product(c, ea, eb), conormal_product(c, eb, ea));
                c.anchor_compatible = is_zero(rho(comm) - lie_bracket(rho(ea), rho(eb)));
            }
    }

    // Fiber algebra ker ρ_x.
    ConormalAlgebroid::Fiber fib;
    fib.point = fiber_point.value_or(RatVector(k, Rational(0)));
    Point x;
    for (std::size_t j = 0; j < k; ++j) x[y[j]] = fib.point.at(j);
    RatMatrix rho_t(k, r);
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t j = 0; j < k; ++j) rho_t(j, a) = eval_at(c.anchor(a, j), x);
    if (k == 0) {
        for (std::size_t a = 0; a < r; ++a) {
            RatVector e(r, Rational(0));
            e[a] = 1;
            fib.basis.push_back(e);
        }
    } else {
        fib.basis = nullspace(rho_t);
    }
    std::vector<std::vector<std::vector<Rational>>> sx(
        r, std::vector<std::vector<Rational>>(r, std::vector<Rational>(r)));
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b)
            for (std::size_t s = 0; s < r; ++s) sx[a][b][s] = eval_at(c.structure[a][b][s], x);
    auto in_kernel = [&](const RatVector& v) {
        for (std::size_t j = 0; j < k; ++j) {
            Rational acc = 0;
            for (std::size_t a = 0; a < r; ++a) acc += rho_t(j, a) * v[a];
            if (acc != 0) return false;
        }
        return true;
    };
    fib.closed = fib.commutative = fib.associative = true;
    for (const auto& u : fib.basis)
        for (const auto& v : fib.basis) {
            RatVector uv = fiber_product(sx, u, v);
            fib.closed = fib.closed && in_kernel(uv);
            fib.commutative = fib.commutative && uv == fiber_product(sx, v, u);
            for (const auto& w : fib.basis)
                fib.associative = fib.associative &&
                                  fiber_product(sx, uv, w) == fiber_product(sx, u, fiber_product(sx, v, w));
        }
    c.fiber = fib;
    return c;
}

// ----------------------------------------------------------------- graph

GraphReport graph_check(const AffineMap& f, const SymBivector& h1, const SymBivector& h2) {
    require_same_chart(f.source, h1.chart(), "graph");
    require_same_chart(f.target, h2.chart(), "graph");
    const std::size_t n = f.source.dim();
    const std::size_t m = f.target.dim();
    ProductStructure prod = product_kv(h1, h2, -1);
    RatVector origin(n + m, Rational(0));
    for (std::size_t a = 0; a < m; ++a) origin[n + a] = f.offset[a];
    std::vector<RatVector> basis;
    for (std::size_t i = 0; i < n; ++i) {
        RatVector v(n + m, Rational(0));
        v[i] = 1;
        for (std::size_t a = 0; a < m; ++a) v[n + a] = f.matrix(a, i);
        basis.push_back(v);
    }
    AffineSubmanifold g("Graph", prod.h.chart(), origin, basis);
    GraphReport r{prod, g, is_coisotropic(g, prod.h).holds, is_kv_map(f, h1, h2)};
    return r;
}

// -------------------------------------------------------------- preimage

PreimageReport preimage_transversal(const AffineMap& f, const SymBivector& h1, const SymBivector& h2,
                                    const AffineSubmanifold& n2, const std::vector<RatVector>& samples1,
                                    const std::vector<RatVector>& samples2) {
    require_same_chart(f.target, n2.ambient, "preimage");
    if (!is_kv_map(f, h1, h2)) throw Error(ErrorCode::PreconditionViolated, "map is not a K-V map");
    const std::size_t n = f.source.dim();
    const std::size_t m = f.target.dim();
    const std::size_t k2 = n2.k();

    // F transverse to N2: Im M + T N2 = R^m (constant for affine maps).
    RatMatrix span(m, n + k2);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t i = 0; i < n; ++i) span(a, i) = f.matrix(a, i);
        for (std::size_t j = 0; j < k2; ++j) span(a, n + j) = n2.basis[j][a];
    }
    if (rank(span) != m)
        throw Error(ErrorCode::NotTransverseAtSample, "map is not transverse to '" + n2.name + "'");

    PreimageReport r;
    r.target = is_transversal(n2, h2, samples2);

    // M x + c = o2 + B2 s  ⇔  [M | -B2](x, s) = o2 - c
    RatMatrix sys(m, n + k2);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t i = 0; i < n; ++i) sys(a, i) = f.matrix(a, i);
        for (std::size_t j = 0; j < k2; ++j) sys(a, n + j) = -n2.basis[j][a];
    }
    RatVector rhs(m);
    for (std::size_t a = 0; a < m; ++a) rhs[a] = n2.origin[a] - f.offset[a];
    auto sol = solve(sys, rhs);
    if (!sol) throw Error(ErrorCode::InvalidSubspace, "preimage of '" + n2.name + "' is empty");
    RatVector o1(sol->begin(), sol->begin() + static_cast<long>(n));
    std::vector<RatVector> b1;
    for (const auto& v : nullspace(sys)) b1.emplace_back(v.begin(), v.begin() + static_cast<long>(n));
    r.preimage = AffineSubmanifold(n2.name + "_pre", f.source, o1, b1);
    r.source = is_transversal(r.preimage, h1, samples1);

    const std::size_t k1 = r.preimage.k();
    if (k1 == 0 || k2 == 0) {
        r.restriction_kv = true;  // a map into or out of a point is vacuously K-V
        return r;
    }
    AdaptedFrame f1 = adapted_frame(r.preimage);
    AdaptedFrame f2 = adapted_frame(n2);
    // t2 = first k2 rows of P2^{-1}(M (o1 + P1 (t1, 0)) + c - o2)
    RatMatrix full = f2.inverse * f.matrix * f1.change;
    RatMatrix rm(k2, k1);
    for (std::size_t a = 0; a < k2; ++a)
        for (std::size_t i = 0; i < k1; ++i) rm(a, i) = full(a, i);
    RatVector shift = f.apply(o1);
    for (std::size_t a = 0; a < m; ++a) shift[a] -= n2.origin[a];
    RatVector off(k2, Rational(0));
    for (std::size_t a = 0; a < k2; ++a)
        for (std::size_t b = 0; b < m; ++b) off[a] += f2.inverse(a, b) * shift[b];
    r.restriction = AffineMap(*f1.tangent, *f2.tangent, rm, off);
    if (r.source.induced && r.target.induced) {
        r.restriction_residual = kv_map_residual(*r.restriction, *r.source.induced, *r.target.induced);
        r.restriction_kv = is_zero(r.restriction_residual);
    }
    return r;
}

std::vector<LeafPoint> leaf_openness_check(const AffineSubmanifold& n, const SymBivector& h,
                                           const std::vector<RatVector>& points) {
    require_same_chart(n.ambient, h.chart(), "leaf check");
    std::vector<LeafPoint> out;
    const std::size_t dim = n.n();
    for (const auto& t : points) {
        LeafPoint lp;
        lp.point = n.at(t);
        RatMatrix hx = eval_at(h.matrix(), n.ambient.point(lp.point));
        lp.rank = rank(hx);
        std::vector<RatVector> cols = n.basis;
        for (std::size_t j = 0; j < dim; ++j) {
            RatVector c(dim);
            for (std::size_t i = 0; i < dim; ++i) c[i] = hx(i, j);
            cols.push_back(c);
        }
        lp.contained = rank(columns_to_matrix(cols, dim)) == n.k();
        out.push_back(lp);
    }
    return out;
}

}  // namespace kvg
