#include "kvg/dsl.hpp"

#include "kvg/lexer.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace kvg {

namespace {

const std::set<std::string, std::less<>> kReserved = {"manifold", "bivector",    "scalar",  "map",
                                                      "submanifold", "algebra", "check"};

SourcePos pos_of(const Token& t) { return {t.line, t.column}; }

class Parser {
public:
    explicit Parser(std::string_view text) : ts_(tokenize(text)) {}

    Scenario run() {
        Scenario s;
        while (!ts_.at_end()) {
            const Token& t = ts_.peek();
            if (t.kind != TokenKind::Identifier) ts_.fail(t, "expected a declaration or 'check'");
            if (t.text == "manifold") s.declarations.emplace_back(manifold());
            else if (t.text == "bivector") s.declarations.emplace_back(bivector());
            else if (t.text == "scalar") s.declarations.emplace_back(scalar());
            else if (t.text == "map") s.declarations.emplace_back(map());
            else if (t.text == "submanifold") s.declarations.emplace_back(submanifold());
            else if (t.text == "algebra") s.declarations.emplace_back(algebra());
            else if (t.text == "check") s.checks.push_back(check());
            else ts_.fail(t, "unknown declaration");
        }
        return s;
    }

private:
    TokenStream ts_;

    std::string name(std::string_view what) {
        const Token& t = ts_.peek();
        if (t.kind == TokenKind::Identifier && kReserved.count(t.text))
            ts_.fail(t, "'" + t.text + "' is reserved and cannot name " + std::string(what));
        return ts_.expect_identifier(what).text;
    }

    Rational rational() {
        const Token& start = ts_.peek();
        Expr e = parse_expr(ts_);
        if (!e.is_constant()) ts_.fail(start, "expected a rational constant");
        return e.constant_value();
    }

    /// "[" [item ("," item)* (";" item ("," item)*)*] "]"
    template <typename T, typename F>
    std::vector<std::vector<T>> rows(F item) {
        ts_.expect_symbol("[");
        std::vector<std::vector<T>> out;
        if (ts_.accept_symbol("]")) return out;
        out.emplace_back();
        for (;;) {
            out.back().push_back(item());
            if (ts_.accept_symbol(",")) continue;
            if (ts_.accept_symbol(";")) {
                out.emplace_back();
                continue;
            }
            ts_.expect_symbol("]");
            return out;
        }
    }

    RatRows rat_rows() { return rows<Rational>([this] { return rational(); }); }

    RatVector rat_row() {
        const Token& start = ts_.peek();
        RatRows r = rat_rows();
        if (r.size() > 1) ts_.fail(start, "expected a single row");
        return r.empty() ? RatVector{} : r.front();
    }

    ExprRows expr_rows() { return rows<Expr>([this] { return parse_expr(ts_); }); }

    long positive(std::string_view what) {
        const Token& t = ts_.peek();
        long v = ts_.expect_integer(what);
        if (v < 1) ts_.fail(t, std::string(what) + " must be positive");
        return v;
    }

    ManifoldDecl manifold() {
        ManifoldDecl d;
        d.pos = pos_of(ts_.next());
        d.name = name("a manifold");
        ts_.expect_symbol("{");
        ts_.expect_keyword("dim");
        d.dim = positive("dimension");
        ts_.expect_keyword("coords");
        ts_.expect_symbol("[");
        while (!ts_.accept_symbol("]")) {
            d.coords.push_back(ts_.expect_identifier("coordinate name").text);
            ts_.accept_symbol(",");
        }
        ts_.expect_symbol("}");
        return d;
    }

    BivectorDecl bivector() {
        BivectorDecl d;
        d.pos = pos_of(ts_.next());
        d.name = name("a bivector");
        ts_.expect_keyword("on");
        d.chart = ts_.expect_identifier("manifold name").text;
        if (ts_.is_keyword("from")) {
            ts_.next();
            d.from_algebra = ts_.expect_identifier("algebra name").text;
            return d;
        }
        ts_.expect_symbol("{");
        const Token& start = ts_.peek();
        d.rows = expr_rows();
        if (d.rows.empty()) ts_.fail(start, "empty bivector matrix");
        ts_.expect_symbol("}");
        return d;
    }

    ScalarDecl scalar() {
        ScalarDecl d;
        d.pos = pos_of(ts_.next());
        d.name = name("a scalar");
        ts_.expect_keyword("on");
        d.chart = ts_.expect_identifier("manifold name").text;
        ts_.expect_symbol("=");
        d.value = parse_expr(ts_);
        return d;
    }

    MapDecl map() {
        MapDecl d;
        d.pos = pos_of(ts_.next());
        d.name = name("a map");
        ts_.expect_symbol(":");
        d.source = ts_.expect_identifier("source manifold").text;
        ts_.expect_symbol("->");
        d.target = ts_.expect_identifier("target manifold").text;
        ts_.expect_symbol("{");
        ts_.expect_keyword("matrix");
        d.matrix = rat_rows();
        ts_.expect_keyword("offset");
        d.offset = rat_row();
        ts_.expect_symbol("}");
        return d;
    }

    SubmanifoldDecl submanifold() {
        SubmanifoldDecl d;
        d.pos = pos_of(ts_.next());
        d.name = name("a submanifold");
        ts_.expect_keyword("in");
        d.chart = ts_.expect_identifier("manifold name").text;
        ts_.expect_symbol("{");
        ts_.expect_keyword("origin");
        d.origin = rat_row();
        ts_.expect_keyword("basis");
        d.basis = rat_rows();
        ts_.expect_symbol("}");
        return d;
    }

    template <std::size_t N>
    std::array<long, N> index_tuple() {
        std::array<long, N> idx{};
        ts_.expect_symbol("(");
        for (std::size_t i = 0; i < N; ++i) {
            if (i) ts_.expect_symbol(",");
            idx[i] = positive("index");
        }
        ts_.expect_symbol(")");
        return idx;
    }

    AlgebraDecl algebra() {
        AlgebraDecl d;
        d.pos = pos_of(ts_.next());
        d.name = name("an algebra");
        ts_.expect_symbol("{");
        ts_.expect_keyword("dim");
        d.dim = positive("dimension");
        ts_.expect_keyword("product");
        ts_.expect_symbol("{");
        while (!ts_.accept_symbol("}")) {
            auto idx = index_tuple<3>();
            ts_.expect_symbol(":");
            d.product.emplace_back(idx, rational());
        }
        if (ts_.is_keyword("cocycle")) {
            ts_.next();
            ts_.expect_symbol("{");
            while (!ts_.accept_symbol("}")) {
                auto idx = index_tuple<2>();
                ts_.expect_symbol(":");
                d.cocycle.emplace_back(idx, rational());
            }
        }
        ts_.expect_symbol("}");
        return d;
    }

    CheckDecl check() {
        CheckDecl c;
        c.pos = pos_of(ts_.next());
        const Token& kind = ts_.expect_identifier("check kind");
        const auto& kinds = check_kinds();
        if (std::find(kinds.begin(), kinds.end(), kind.text) == kinds.end())
            ts_.fail(kind, "unknown check kind");
        c.kind = kind.text;
        while (ts_.peek().kind == TokenKind::Identifier && !kReserved.count(ts_.peek().text))
            c.args.push_back(ts_.next().text);
        if (c.args.empty()) ts_.fail(ts_.peek(), "check needs at least one object name");
        if (ts_.accept_symbol("{")) options(c.options);
        return c;
    }

    template <typename T>
    void once(std::optional<T>& slot, const Token& key, T value) {
        if (slot) ts_.fail(key, "option given twice");
        slot = std::move(value);
    }

    void options(CheckOptions& o) {
        while (!ts_.accept_symbol("}")) {
            const Token& key = ts_.expect_identifier("option name");
            const std::string& k = key.text;
            if (k == "samples") once(o.samples, key, positive("sample count"));
            else if (k == "seed") once(o.seed, key, ts_.expect_integer("seed"));
            else if (k == "value") once(o.value, key, ts_.expect_integer("value"));
            else if (k == "points") once(o.points, key, rat_rows());
            else if (k == "point") once(o.point, key, rat_row());
            else if (k == "basis") once(o.basis, key, rat_rows());
            else if (k == "equals") once(o.equals, key, expr_rows());
            else if (k == "label") {
                const Token& t = ts_.peek();
                if (t.kind != TokenKind::String) ts_.fail(t, "expected a quoted label");
                once(o.label, key, ts_.next().text);
            } else if (k == "kind") {
                const Token& t = ts_.expect_identifier("subspace kind");
                if (t.text == "subalgebra") once(o.kind, key, SubspaceKind::Subalgebra);
                else if (t.text == "ideal") once(o.kind, key, SubspaceKind::Ideal);
                else ts_.fail(t, "expected 'subalgebra' or 'ideal'");
            } else if (k == "expect") {
                const Token& t = ts_.expect_identifier("expected status");
                if (t.text == "pass") once(o.expect, key, Expectation::Pass);
                else if (t.text == "fail") once(o.expect, key, Expectation::Fail);
                else if (t.text == "pointwise_pass") once(o.expect, key, Expectation::PointwisePass);
                else if (t.text == "unsupported") once(o.expect, key, Expectation::Unsupported);
                else ts_.fail(t, "expected pass, fail, pointwise_pass or unsupported");
            } else {
                ts_.fail(key, "unknown option");
            }
        }
    }
};

// ------------------------------------------------------------ serializer

std::string join_rows(const auto& rows, auto&& item) {
    std::string s = "[";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r) s += "; ";
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            if (c) s += ", ";
            s += item(rows[r][c]);
        }
    }
    return s + "]";
}

std::string rat_text(const Rational& q) { return to_string(q); }
std::string expr_text(const Expr& e) { return to_string(e); }

std::string row_text(const RatVector& v) { return join_rows(RatRows{v}, rat_text); }

struct DeclWriter {
    std::ostringstream& out;
    void operator()(const ManifoldDecl& d) const {
        out << "manifold " << d.name << " { dim " << d.dim << " coords [";
        for (std::size_t i = 0; i < d.coords.size(); ++i) out << (i ? " " : "") << d.coords[i];
        out << "] }\n";
    }
    void operator()(const BivectorDecl& d) const {
        out << "bivector " << d.name << " on " << d.chart;
        if (d.from_algebra) out << " from " << *d.from_algebra << "\n";
        else out << " { " << join_rows(d.rows, expr_text) << " }\n";
    }
    void operator()(const ScalarDecl& d) const {
        out << "scalar " << d.name << " on " << d.chart << " = " << to_string(d.value) << "\n";
    }
    void operator()(const MapDecl& d) const {
        out << "map " << d.name << " : " << d.source << " -> " << d.target << " { matrix "
            << join_rows(d.matrix, rat_text) << " offset " << (d.offset.empty() ? "[]" : row_text(d.offset))
            << " }\n";
    }
    void operator()(const SubmanifoldDecl& d) const {
        out << "submanifold " << d.name << " in " << d.chart << " { origin "
            << (d.origin.empty() ? "[]" : row_text(d.origin)) << " basis " << join_rows(d.basis, rat_text)
            << " }\n";
    }
    void operator()(const AlgebraDecl& d) const {
        out << "algebra " << d.name << " { dim " << d.dim << " product {";
        for (const auto& [idx, v] : d.product)
            out << " (" << idx[0] << "," << idx[1] << "," << idx[2] << "): " << to_string(v);
        out << " }";
        if (!d.cocycle.empty()) {
            out << " cocycle {";
            for (const auto& [idx, v] : d.cocycle) out << " (" << idx[0] << "," << idx[1] << "): " << to_string(v);
            out << " }";
        }
        out << " }\n";
    }
};

std::string options_text(const CheckOptions& o) {
    std::vector<std::string> parts;
    if (o.samples) parts.push_back("samples " + std::to_string(*o.samples));
    if (o.seed) parts.push_back("seed " + std::to_string(*o.seed));
    if (o.value) parts.push_back("value " + std::to_string(*o.value));
    if (o.points) parts.push_back("points " + join_rows(*o.points, rat_text));
    if (o.point) parts.push_back("point " + (o.point->empty() ? std::string("[]") : row_text(*o.point)));
    if (o.basis) parts.push_back("basis " + join_rows(*o.basis, rat_text));
    if (o.equals) parts.push_back("equals " + join_rows(*o.equals, expr_text));
    if (o.label) parts.push_back("label \"" + *o.label + "\"");
    if (o.kind) parts.push_back(std::string("kind ") + (*o.kind == SubspaceKind::Ideal ? "ideal" : "subalgebra"));
    if (o.expect) {
        std::string e = to_string(*o.expect);
        std::replace(e.begin(), e.end(), '-', '_');
        parts.push_back("expect " + e);
    }
    if (parts.empty()) return "";
    std::string s = " {";
    for (const auto& p : parts) s += " " + p;
    return s + " }";
}

// ------------------------------------------------------------ semantics

[[noreturn]] void semantic(SourcePos p, const std::string& msg) { throw SemanticError(p.line, p.column, msg); }

enum class Kind { Manifold, Bivector, Scalar, Map, Submanifold, Algebra };

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::Manifold: return "manifold";
        case Kind::Bivector: return "bivector";
        case Kind::Scalar: return "scalar";
        case Kind::Map: return "map";
        case Kind::Submanifold: return "submanifold";
        case Kind::Algebra: return "algebra";
    }
    return "?";
}

struct Builder {
    Model m;
    std::map<std::string, Kind> kinds;

    void require(const std::string& name, Kind k, SourcePos p) {
        auto it = kinds.find(name);
        if (it == kinds.end()) semantic(p, "unresolved reference '" + name + "'");
        if (it->second != k)
            semantic(p, "'" + name + "' is a " + kind_name(it->second) + ", expected a " + kind_name(k));
    }

    void declare(const std::string& name, Kind k, SourcePos p) {
        if (kinds.count(name)) semantic(p, "duplicate name '" + name + "'");
        kinds[name] = k;
    }

    // Engine errors raised while building a declaration become positioned semantic errors.
    template <typename F>
    auto guarded(SourcePos p, F&& f) {
        try {
            return f();
        } catch (const SemanticError&) {
            throw;
        } catch (const Error& e) {
            semantic(p, e.what());
        }
    }

    void operator()(const ManifoldDecl& d) {
        if (static_cast<long>(d.coords.size()) != d.dim)
            semantic(d.pos, "manifold '" + d.name + "' has dim " + std::to_string(d.dim) + " but " +
                                std::to_string(d.coords.size()) + " coordinates");
        Chart c = guarded(d.pos, [&] { return Chart(d.name, d.coords); });
        declare(d.name, Kind::Manifold, d.pos);
        m.charts.emplace(d.name, std::move(c));
    }

    void operator()(const BivectorDecl& d) {
        require(d.chart, Kind::Manifold, d.pos);
        const Chart& chart = m.charts.at(d.chart);
        const std::size_t n = chart.dim();
        SymBivector h;
        if (d.from_algebra) {
            require(*d.from_algebra, Kind::Algebra, d.pos);
            const AlgebraSpec& a = m.algebras.at(*d.from_algebra);
            if (a.dim != n) semantic(d.pos, "algebra dimension differs from the manifold dimension");
            h = guarded(d.pos, [&] { return algebra_to_kv(a, chart); });
        } else {
            auto e = square_from_rows(d.rows, n);
            if (!e)
                semantic(d.pos, "bivector '" + d.name + "' needs " + std::to_string(n) + " rows of length " +
                                    std::to_string(n) + " or an upper triangle");
            h = guarded(d.pos, [&] { return SymBivector(chart, *e); });
        }
        declare(d.name, Kind::Bivector, d.pos);
        m.bivectors.emplace(d.name, std::move(h));
    }

    void operator()(const ScalarDecl& d) {
        require(d.chart, Kind::Manifold, d.pos);
        const Chart& chart = m.charts.at(d.chart);
        guarded(d.pos, [&] {
            require_on_chart(d.value, chart, "scalar");
            return 0;
        });
        declare(d.name, Kind::Scalar, d.pos);
        m.scalars.emplace(d.name, ScalarField{chart, d.value});
    }

    void operator()(const MapDecl& d) {
        require(d.source, Kind::Manifold, d.pos);
        require(d.target, Kind::Manifold, d.pos);
        const Chart& s = m.charts.at(d.source);
        const Chart& t = m.charts.at(d.target);
        if (d.matrix.size() != t.dim())
            semantic(d.pos, "map matrix needs " + std::to_string(t.dim()) + " rows (target dimension)");
        RatMatrix mat(t.dim(), s.dim());
        for (std::size_t r = 0; r < d.matrix.size(); ++r) {
            if (d.matrix[r].size() != s.dim())
                semantic(d.pos, "map matrix rows need " + std::to_string(s.dim()) + " entries (source dimension)");
            for (std::size_t c = 0; c < s.dim(); ++c) mat(r, c) = d.matrix[r][c];
        }
        if (d.offset.size() != t.dim()) semantic(d.pos, "map offset needs " + std::to_string(t.dim()) + " entries");
        AffineMap f = guarded(d.pos, [&] { return AffineMap(s, t, mat, d.offset); });
        declare(d.name, Kind::Map, d.pos);
        m.maps.emplace(d.name, std::move(f));
    }

    void operator()(const SubmanifoldDecl& d) {
        require(d.chart, Kind::Manifold, d.pos);
        const Chart& c = m.charts.at(d.chart);
        if (d.origin.size() != c.dim()) semantic(d.pos, "origin needs " + std::to_string(c.dim()) + " entries");
        for (const auto& b : d.basis)
            if (b.size() != c.dim()) semantic(d.pos, "basis vectors need " + std::to_string(c.dim()) + " entries");
        AffineSubmanifold n = guarded(d.pos, [&] { return AffineSubmanifold(d.name, c, d.origin, d.basis); });
        declare(d.name, Kind::Submanifold, d.pos);
        m.submanifolds.emplace(d.name, std::move(n));
    }

    void operator()(const AlgebraDecl& d) {
        AlgebraSpec a(static_cast<std::size_t>(d.dim));
        std::set<std::array<long, 3>> seen;
        for (const auto& [idx, v] : d.product) {
            for (long i : idx)
                if (i > d.dim) semantic(d.pos, "product index " + std::to_string(i) + " exceeds the dimension");
            if (!seen.insert(idx).second) semantic(d.pos, "product entry listed twice");
            a.c(idx[0] - 1, idx[1] - 1, idx[2] - 1) = v;
        }
        std::set<std::array<long, 2>> seen2;
        for (const auto& [idx, v] : d.cocycle) {
            for (long i : idx)
                if (i > d.dim) semantic(d.pos, "cocycle index " + std::to_string(i) + " exceeds the dimension");
            if (!seen2.insert(idx).second) semantic(d.pos, "cocycle entry listed twice");
            a.cocycle(idx[0] - 1, idx[1] - 1) = v;
        }
        declare(d.name, Kind::Algebra, d.pos);
        m.algebras.emplace(d.name, std::move(a));
    }

    const Chart& chart_of(const std::string& name) {
        auto k = kinds.at(name);
        switch (k) {
            case Kind::Bivector: return m.bivectors.at(name).chart();
            case Kind::Scalar: return m.scalars.at(name).chart;
            case Kind::Submanifold: return m.submanifolds.at(name).ambient;
            default: return m.charts.at(name);
        }
    }

    void same_chart(const Chart& a, const Chart& b, SourcePos p, const std::string& what) {
        if (a.name != b.name || !(a == b)) semantic(p, "chart mismatch: " + what + " ('" + a.name + "' vs '" + b.name + "')");
    }

    void check(const CheckDecl& c) {
        using K = Kind;
        static const std::map<std::string, std::vector<K>> signatures = {
            {"codazzi", {K::Bivector}},
            {"kv_bracket", {K::Bivector}},
            {"jacobi_tangent", {K::Bivector}},
            {"rank", {K::Bivector}},
            {"kv_map", {K::Map, K::Bivector, K::Bivector}},
            {"theorem1", {K::Map, K::Bivector, K::Bivector}},
            {"graph", {K::Map, K::Bivector, K::Bivector}},
            {"submanifold", {K::Submanifold, K::Bivector}},
            {"transversal", {K::Submanifold, K::Bivector}},
            {"coisotropic", {K::Submanifold, K::Bivector}},
            {"conormal", {K::Submanifold, K::Bivector}},
            {"preimage_transversal", {K::Map, K::Bivector, K::Bivector, K::Submanifold}},
            {"in_E", {K::Bivector, K::Scalar}},
            {"lie_derivative", {K::Bivector, K::Scalar}},
            {"lift_props", {K::Bivector, K::Scalar}},
            {"special_class", {K::Bivector, K::Scalar, K::Scalar}},
            {"algebra", {K::Algebra}},
            {"annihilator", {K::Algebra}},
        };
        const auto& sig = signatures.at(c.kind);
        if (c.args.size() != sig.size()) {
            std::string want;
            for (std::size_t i = 0; i < sig.size(); ++i) want += std::string(i ? " " : "") + kind_name(sig[i]);
            semantic(c.pos, "check " + c.kind + " takes: " + want);
        }
        for (std::size_t i = 0; i < sig.size(); ++i) require(c.args[i], sig[i], c.pos);

        const auto& a = c.args;
        if (sig.front() == K::Map) {
            const AffineMap& f = m.maps.at(a[0]);
            same_chart(chart_of(a[1]), f.source, c.pos, a[1] + " must live on the map source");
            same_chart(chart_of(a[2]), f.target, c.pos, a[2] + " must live on the map target");
            if (sig.size() == 4) same_chart(chart_of(a[3]), f.target, c.pos, a[3] + " must lie in the map target");
        } else if (sig.size() >= 2) {
            for (std::size_t i = 1; i < a.size(); ++i)
                same_chart(chart_of(a[i]), chart_of(a[0]), c.pos, a[i] + " and " + a[0]);
        }
        const auto& o = c.options;
        if (c.kind == "annihilator") {
            if (!o.basis || !o.kind) semantic(c.pos, "check annihilator needs 'basis' and 'kind' options");
            for (const auto& b : *o.basis)
                if (b.size() != m.algebras.at(a[0]).dim) semantic(c.pos, "basis vectors must match the algebra dimension");
        }
        if (c.kind == "rank" && !o.points && !o.point && o.value)
            semantic(c.pos, "check rank with 'value' needs 'point' or 'points'");
    }
};

}  // namespace

std::optional<ExprMatrix> square_from_rows(const ExprRows& rows, std::size_t n) {
    if (rows.size() != n) return std::nullopt;
    ExprMatrix e(n, n);
    if (std::all_of(rows.begin(), rows.end(), [&](const auto& r) { return r.size() == n; })) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) e(i, j) = rows[i][j];
        return e;
    }
    for (std::size_t r = 0; r < n; ++r)
        if (rows[r].size() != n - r) return std::nullopt;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) e(i, j) = e(j, i) = rows[i][j - i];
    return e;
}

const std::string& declaration_name(const Declaration& d) {
    return std::visit([](const auto& x) -> const std::string& { return x.name; }, d);
}

SourcePos declaration_pos(const Declaration& d) {
    return std::visit([](const auto& x) { return x.pos; }, d);
}

std::string to_string(Expectation e) {
    switch (e) {
        case Expectation::Pass: return "pass";
        case Expectation::Fail: return "fail";
        case Expectation::PointwisePass: return "pointwise-pass";
        case Expectation::Unsupported: return "unsupported";
    }
    return "pass";
}

const std::vector<std::string>& check_kinds() {
    static const std::vector<std::string> kinds = {
        "codazzi",     "kv_bracket",  "jacobi_tangent", "kv_map",        "theorem1",       "submanifold",
        "transversal", "coisotropic", "conormal",       "graph",         "preimage_transversal",
        "in_E",        "special_class", "lie_derivative", "lift_props",  "algebra",        "annihilator",
        "rank"};
    return kinds;
}

Scenario parse_scenario(std::string_view text) { return Parser(text).run(); }

std::string serialize(const Scenario& s) {
    std::ostringstream out;
    for (const auto& d : s.declarations) std::visit(DeclWriter{out}, d);
    for (const auto& c : s.checks) {
        out << "check " << c.kind;
        for (const auto& a : c.args) out << " " << a;
        out << options_text(c.options) << "\n";
    }
    return out.str();
}

Model build_model(const Scenario& s) {
    Builder b;
    for (const auto& d : s.declarations) std::visit(b, d);
    for (const auto& c : s.checks) b.check(c);
    return std::move(b.m);
}

}  // namespace kvg
