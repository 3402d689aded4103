#include "kvg/geometry.hpp"

#include "kvg/errors.hpp"

#include <set>

namespace kvg {

Chart::Chart(std::string n, std::vector<std::string> c) : name(std::move(n)), coords(std::move(c)) {
    if (coords.empty()) throw Error(ErrorCode::Semantic, "chart '" + name + "' has no coordinates");
    std::set<std::string> seen;
    for (const auto& v : coords)
        if (!seen.insert(v).second)
            throw Error(ErrorCode::Semantic, "chart '" + name + "' repeats coordinate '" + v + "'");
}

Point Chart::point(const RatVector& values) const {
    Point p;
    for (std::size_t i = 0; i < coords.size() && i < values.size(); ++i) p[coords[i]] = values[i];
    return p;
}

void require_same_chart(const Chart& a, const Chart& b, const char* op) {
    if (!(a == b))
        throw Error(ErrorCode::ChartMismatch,
                    std::string(op) + ": charts '" + a.name + "' and '" + b.name + "' differ");
}

void require_on_chart(const Expr& e, const Chart& c, const char* what) {
    for (const auto& v : e.variables()) {
        bool found = false;
        for (const auto& coord : c.coords) found = found || coord == v;
        if (!found)
            throw Error(ErrorCode::ChartMismatch,
                        std::string(what) + " uses '" + v + "' which is not a coordinate of '" + c.name + "'");
    }
}

SymBivector::SymBivector(Chart chart, ExprMatrix entries) : chart_(std::move(chart)), entries_(std::move(entries)) {
    const std::size_t n = chart_.dim();
    if (entries_.rows() != n || entries_.cols() != n)
        throw Error(ErrorCode::Semantic, "bivector matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (!(entries_(i, j) == entries_(j, i)))
                throw Error(ErrorCode::Semantic, "bivector matrix is not symmetric at (" + std::to_string(i + 1) +
                                                     "," + std::to_string(j + 1) + ")");
    for (const auto& e : entries_.data()) require_on_chart(e, chart_, "bivector entry");
}

bool TrilinearForm::is_zero() const {
    for (const auto& e : entries_)
        if (!e.is_zero()) return false;
    return true;
}

std::optional<std::array<std::size_t, 3>> TrilinearForm::first_nonzero() const {
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t k = 0; k < n_; ++k)
                if (!at(i, j, k).is_zero()) return std::array<std::size_t, 3>{i, j, k};
    return std::nullopt;
}

// ------------------------------------------------------------------ calculus

namespace {

template <typename Field>
void require_dim(const Field& f, const char* what) {
    if (f.components.size() != f.chart.dim())
        throw Error(ErrorCode::ChartMismatch, std::string(what) + " has the wrong number of components");
}

Expr d(const Expr& e, const Chart& c, std::size_t i) { return differentiate(e, c.coords[i]); }

}  // namespace

OneForm coordinate_form(const Chart& c, std::size_t i) {
    OneForm a{c, std::vector<Expr>(c.dim())};
    a.components.at(i) = Expr(1);
    return a;
}

VectorField coordinate_field(const Chart& c, std::size_t i) {
    VectorField x{c, std::vector<Expr>(c.dim())};
    x.components.at(i) = Expr(1);
    return x;
}

OneForm differential(const ScalarField& f) {
    require_on_chart(f.value, f.chart, "scalar");
    OneForm a{f.chart, {}};
    for (std::size_t i = 0; i < f.chart.dim(); ++i) a.components.push_back(d(f.value, f.chart, i));
    return a;
}

Expr apply(const VectorField& x, const Expr& f) {
    require_dim(x, "vector field");
    Expr out;
    for (std::size_t i = 0; i < x.chart.dim(); ++i) {
        if (x.components[i].is_zero()) continue;
        out += x.components[i] * d(f, x.chart, i);
    }
    return out;
}

Expr pairing(const OneForm& a, const VectorField& x) {
    require_same_chart(a.chart, x.chart, "pairing");
    Expr out;
    for (std::size_t i = 0; i < a.chart.dim(); ++i) out += a.components[i] * x.components[i];
    return out;
}

Expr evaluate(const SymBivector& h, const OneForm& a, const OneForm& b) {
    require_same_chart(h.chart(), a.chart, "h(a, b)");
    require_same_chart(h.chart(), b.chart, "h(a, b)");
    Expr out;
    for (std::size_t i = 0; i < h.dim(); ++i) {
        if (a.components[i].is_zero()) continue;
        for (std::size_t j = 0; j < h.dim(); ++j) {
            if (b.components[j].is_zero() || h(i, j).is_zero()) continue;
            out += a.components[i] * h(i, j) * b.components[j];
        }
    }
    return out;
}

OneForm covariant(const VectorField& x, const OneForm& a) {
    require_same_chart(x.chart, a.chart, "covariant derivative");
    OneForm out{a.chart, {}};
    for (const auto& c : a.components) out.components.push_back(apply(x, c));
    return out;
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
    require_same_chart(x.chart, y.chart, "lie_bracket");
    VectorField out{x.chart, {}};
    for (std::size_t j = 0; j < x.chart.dim(); ++j)
        out.components.push_back(apply(x, y.components[j]) - apply(y, x.components[j]));
    return out;
}

ExprMatrix lie_derivative_tensor(const Chart& c, const ExprMatrix& t, const VectorField& x) {
    require_same_chart(c, x.chart, "lie derivative");
    const std::size_t n = c.dim();
    // dX(i, k) = d_k X^i
    ExprMatrix dx(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) dx(i, k) = d(x.components[i], c, k);
    ExprMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Expr v = apply(x, t(i, j));
            for (std::size_t k = 0; k < n; ++k) {
                if (!dx(i, k).is_zero()) v -= t(k, j) * dx(i, k);
                if (!dx(j, k).is_zero()) v -= t(i, k) * dx(j, k);
            }
            out(i, j) = v;
        }
    return out;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    require_same_chart(a.chart, b.chart, "vector sum");
    VectorField out = a;
    for (std::size_t i = 0; i < out.components.size(); ++i) out.components[i] += b.components[i];
    return out;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    require_same_chart(a.chart, b.chart, "vector difference");
    VectorField out = a;
    for (std::size_t i = 0; i < out.components.size(); ++i) out.components[i] -= b.components[i];
    return out;
}

VectorField operator*(const Expr& f, const VectorField& a) {
    VectorField out = a;
    for (auto& c : out.components) c *= f;
    return out;
}

OneForm operator+(const OneForm& a, const OneForm& b) {
    require_same_chart(a.chart, b.chart, "form sum");
    OneForm out = a;
    for (std::size_t i = 0; i < out.components.size(); ++i) out.components[i] += b.components[i];
    return out;
}

OneForm operator-(const OneForm& a, const OneForm& b) {
    require_same_chart(a.chart, b.chart, "form difference");
    OneForm out = a;
    for (std::size_t i = 0; i < out.components.size(); ++i) out.components[i] -= b.components[i];
    return out;
}

OneForm operator*(const Expr& f, const OneForm& a) {
    OneForm out = a;
    for (auto& c : out.components) c *= f;
    return out;
}

bool is_zero(const VectorField& v) {
    for (const auto& c : v.components)
        if (!c.is_zero()) return false;
    return true;
}

bool is_zero(const OneForm& a) {
    for (const auto& c : a.components)
        if (!c.is_zero()) return false;
    return true;
}

// ----------------------------------------------------------- K-V operators

VectorField sharp(const SymBivector& h, const OneForm& a) {
    require_same_chart(h.chart(), a.chart, "sharp");
    require_dim(a, "one-form");
    VectorField out{h.chart(), std::vector<Expr>(h.dim())};
    for (std::size_t i = 0; i < h.dim(); ++i) {
        if (a.components[i].is_zero()) continue;
        for (std::size_t j = 0; j < h.dim(); ++j)
            if (!h(i, j).is_zero()) out.components[j] += a.components[i] * h(i, j);
    }
    return out;
}

bool is_kv(const SymBivector& h) { return codazzi_tensor(h).is_zero(); }

TrilinearForm kv_bracket_form(const SymBivector& h) {
    const auto& c = h.chart();
    const std::size_t n = h.dim();
    std::vector<OneForm> dx;
    std::vector<VectorField> hx;
    for (std::size_t i = 0; i < n; ++i) {
        dx.push_back(coordinate_form(c, i));
        hx.push_back(sharp(h, dx.back()));
    }
    TrilinearForm t(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            VectorField br = lie_bracket(hx[i], hx[j]);
            for (std::size_t k = 0; k < n; ++k) {
                Expr v = apply(hx[i], h(j, k)) - apply(hx[j], h(i, k));
                v += pairing(dx[i], left_sym_product(hx[j], hx[k]));
                v -= pairing(dx[j], left_sym_product(hx[i], hx[k]));
                v -= pairing(dx[k], br);
                t.at(i, j, k) = v;
            }
        }
    return t;
}

OneForm bracket_h(const SymBivector& h, const OneForm& a, const OneForm& b) {
    require_same_chart(h.chart(), b.chart, "bracket_h");
    return covariant(sharp(h, a), b) - covariant(sharp(h, b), a);
}

OneForm contravariant_D(const SymBivector& h, const OneForm& a, const OneForm& b) {
    require_same_chart(h.chart(), b.chart, "contravariant_D");
    const auto& c = h.chart();
    OneForm out = covariant(sharp(h, a), b);
    for (std::size_t j = 0; j < h.dim(); ++j) {
        // (∇_{∂_j} h)(a, b): differentiate the entries only, the forms are held fixed.
        Expr v;
        for (std::size_t p = 0; p < h.dim(); ++p) {
            if (a.components[p].is_zero()) continue;
            for (std::size_t q = 0; q < h.dim(); ++q) {
                if (b.components[q].is_zero()) continue;
                Expr dh = d(h(p, q), c, j);
                if (!dh.is_zero()) v += dh * a.components[p] * b.components[q];
            }
        }
        out.components[j] += v;
    }
    return out;
}

VectorField hamiltonian(const SymBivector& h, const ScalarField& f) {
    require_same_chart(h.chart(), f.chart, "hamiltonian");
    return sharp(h, differential(f));
}

SymBivector lie_derivative_h(const SymBivector& h, const ScalarField& f) {
    return SymBivector(h.chart(), lie_derivative_tensor(h.chart(), h.matrix(), hamiltonian(h, f)));
}

ExprMatrix lie_derivative_residual(const SymBivector& h, const ScalarField& f) {
    const auto& c = h.chart();
    const std::size_t n = h.dim();
    VectorField xf = hamiltonian(h, f);
    ExprMatrix lie = lie_derivative_tensor(c, h.matrix(), xf);
    OneForm df = differential(f);
    std::vector<VectorField> hx;
    for (std::size_t i = 0; i < n; ++i) hx.push_back(sharp(h, coordinate_form(c, i)));
    ExprMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            r(i, j) = lie(i, j) + apply(xf, h(i, j)) - Expr(2) * pairing(covariant(hx[i], df), hx[j]);
    return r;
}

ExprMatrix in_E_residuals(const SymBivector& h, const ScalarField& f) {
    require_same_chart(h.chart(), f.chart, "in_E");
    require_on_chart(f.value, f.chart, "scalar");
    const auto& c = h.chart();
    const std::size_t n = h.dim();
    ExprMatrix hess(n, n);
    for (std::size_t l = 0; l < n; ++l) {
        Expr dl = d(f.value, c, l);
        for (std::size_t k = l; k < n; ++k) hess(l, k) = hess(k, l) = d(dl, c, k);
    }
    return h.matrix() * hess * h.matrix();
}

bool in_E(const SymBivector& h, const ScalarField& f) { return is_zero(in_E_residuals(h, f)); }

bool special_class_check(const SymBivector& h, const ScalarField& f1, const ScalarField& f2) {
    if (!in_E(h, f1)) throw Error(ErrorCode::PreconditionViolated, "first function is not in E");
    if (!in_E(h, f2)) throw Error(ErrorCode::PreconditionViolated, "second function is not in E");
    ScalarField g{h.chart(), evaluate(h, differential(f1), differential(f2))};
    return in_E(h, g);
}

VectorField left_sym_product(const VectorField& x, const VectorField& y) {
    require_same_chart(x.chart, y.chart, "left_sym_product");
    VectorField out{x.chart, {}};
    for (const auto& c : y.components) out.components.push_back(apply(x, c));
    return out;
}

VectorField associator(const VectorField& x, const VectorField& y, const VectorField& z) {
    return left_sym_product(left_sym_product(x, y), z) - left_sym_product(x, left_sym_product(y, z));
}

std::size_t rank_at(const SymBivector& h, const Point& p) { return rank(eval_at(h.matrix(), p)); }

}  // namespace kvg
