// Acceptance run: one PASS/FAIL line per criterion.

#include "support.hpp"

#include "kvg/corpus.hpp"
#include "kvg/errors.hpp"
#include "kvg/runner.hpp"
#include "kvg/tangent.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <regex>
#include <set>
#include <sstream>

using namespace kvg;
using namespace kvg::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string note;
};

/// Accumulates sub-results; the first failures are kept for the report line.
struct Tally {
    Outcome o;
    std::vector<std::string> failures;
    void expect(bool ok, const std::string& what) {
        if (ok) return;
        o.pass = false;
        if (failures.size() < 3) failures.push_back(what);
    }
    Outcome done(std::string note) {
        o.note = std::move(note);
        for (const auto& f : failures) o.note += "; failed: " + f;
        return o;
    }
};

Expr E(const char* s) { return parse_expr(s); }

SymBivector biv(const Chart& c, std::vector<std::vector<const char*>> rows) {
    ExprMatrix m(rows.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = parse_expr(rows[i][j]);
    return SymBivector(c, m);
}

RatVector vec(std::vector<long> v) { return RatVector(v.begin(), v.end()); }

RatMatrix mat(std::vector<std::vector<long>> rows) {
    RatMatrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

ExprMatrix hessian(const Expr& f, const std::vector<std::string>& v) {
    ExprMatrix h(v.size(), v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) h(i, j) = differentiate(differentiate(f, v[i]), v[j]);
    return h;
}

const Chart& line() {
    static const Chart c = chart({"t"}, "R");
    return c;
}
const Chart& plane() {
    static const Chart c = chart({"x", "y"});
    return c;
}

// ---------------------------------------------------------------- instances

struct MapCase {
    std::string name;
    AffineMap f;
    SymBivector h1, h2;
    std::optional<bool> expected;
};

std::vector<MapCase> map_cases() {
    std::vector<MapCase> out;
    SymBivector t2 = biv(line(), {{"t^2"}}), x2y2 = biv(plane(), {{"x^2", "0"}, {"0", "y^2"}});
    for (auto [l, m] : std::vector<std::pair<long, long>>{{1, 0}, {0, 1}, {1, 1}, {2, 3}})
        out.push_back({"ray(" + std::to_string(l) + "," + std::to_string(m) + ")",
                       AffineMap(line(), plane(), mat({{l}, {m}}), vec({0, 0})), t2, x2y2, l == 0 || m == 0});

    Chart cx = chart({"x"}, "X"), cy = chart({"y"}, "Y");
    ProductStructure p = product_kv(biv(cx, {{"x"}}), biv(cy, {{"y"}}));
    out.push_back({"p1", p.p1, p.h, biv(cx, {{"x"}}), true});
    out.push_back({"p2", p.p2, p.h, biv(cy, {{"y"}}), true});
    out.push_back({"p2 into the wrong factor", p.p2, p.h, biv(cy, {{"y^2"}}), false});

    Chart c3 = chart({"x", "y", "z"}), s = chart({"s"}, "S");
    SymBivector g3(c3, to_expr(RatMatrix::identity(3)));
    AffineMap fib(c3, s, mat({{1, 2, -1}}), vec({0}));
    out.push_back({"x+2y-z onto (R,6)", fib, g3, biv(s, {{"6"}}), true});
    out.push_back({"x+2y-z onto (R,1)", fib, g3, biv(s, {{"1"}}), false});
    out.push_back({"null direction", AffineMap(plane(), chart({"u", "v"}, "P"), mat({{1, 1}, {1, 1}}), vec({0, 0})),
                   biv(plane(), {{"1", "0"}, {"0", "-1"}}), SymBivector(chart({"u", "v"}, "P"), ExprMatrix(2, 2)), true});

    std::mt19937_64 rng(2718);
    while (out.size() < 30) {
        const std::size_t k = out.size();
        if (k % 3 == 0) {
            SymBivector h = random_separable(rng, 2, 2);
            out.push_back({"identity " + std::to_string(k), identity_map(h.chart()), h, h, true});
            continue;
        }
        Chart a = chart(coords_for(3), "A"), b = chart({"p", "q"}, "B");
        RatMatrix h1 = random_rat_matrix(rng, 3, 3);
        h1 = h1 + h1.transpose();
        RatMatrix m = random_rat_matrix(rng, 2, 3), h2 = m * h1 * m.transpose();
        bool ok = k % 3 == 1;
        if (!ok) h2(0, 0) += 1;
        out.push_back({"constant " + std::to_string(k), AffineMap(a, b, m, random_vector(rng, 2)),
                       SymBivector(a, to_expr(h1)), SymBivector(b, to_expr(h2)), ok});
    }
    return out;
}

/// K-V bivectors declared in the built-in corpus, first appearance of each matrix.
std::vector<SymBivector> corpus_kv_instances() {
    std::vector<SymBivector> out;
    std::set<std::string> seen;
    for (const auto& c : builtin_corpus()) {
        Model m = build_model(parse_scenario(c.text));
        for (const auto& [name, h] : m.bivectors) {
            std::ostringstream key;
            for (const auto& v : h.chart().coords) key << v << ",";
            for (const auto& e : h.matrix().data()) key << to_string(e) << ";";
            if (is_kv(h) && seen.insert(key.str()).second) out.push_back(h);
        }
    }
    return out;
}

// ---------------------------------------------------------------- criteria

Outcome codazzi_corpus() {
    Tally t;
    t.expect(codazzi_tensor(biv(plane(), {{"x", "0"}, {"0", "y"}})).is_zero(), "x dx^2 + y dy^2");
    t.expect(codazzi_tensor(biv(plane(), {{"x^2", "0"}, {"0", "0"}})).is_zero(), "x^2 dx^2");
    std::mt19937_64 rng(1);
    for (int i = 0; i < 50; ++i) {
        AlgebraSpec a = random_algebra(rng, 4);
        t.expect(validate_algebra(a).valid() && codazzi_tensor(algebra_to_kv(a)).is_zero(),
                 "random algebra " + std::to_string(i));
    }
    return t.done("2 worked examples and 50 random algebra duals");
}

Outcome lie_derivative_value() {
    Tally t;
    SymBivector h = biv(plane(), {{"x", "0"}, {"0", "y"}});
    t.expect(lie_derivative_h(h, ScalarField{plane(), var("x")})(0, 0) == E("-x"), "(L_{X_x} h)(dx,dx) = -x");
    std::vector<SymBivector> inst = corpus_kv_instances();
    t.expect(inst.size() >= 10, "10 corpus instances");
    if (inst.size() > 10) inst.resize(10);
    std::mt19937_64 rng(2);
    int zero = 0, total = 0, hessian_term = 0;
    for (const auto& k : inst)
        for (int i = 0; i < 5; ++i) {
            ScalarField f{k.chart(), random_poly(rng, k.chart().coords, 3)};
            ExprMatrix r = lie_derivative_residual(k, f);
            ++total;
            if (is_zero(r)) ++zero;
            // the nonzero residuals are exactly -4 h Hess(f) h
            ExprMatrix hh = k.matrix() * hessian(f.value, k.chart().coords) * k.matrix();
            bool match = true;
            for (std::size_t a = 0; a < hh.rows(); ++a)
                for (std::size_t b = 0; b < hh.cols(); ++b) match = match && r(a, b) == Expr(-4) * hh(a, b);
            hessian_term += match;
        }
    t.expect(zero == total, std::to_string(total - zero) + " of " + std::to_string(total) + " residuals nonzero");
    return t.done(std::to_string(zero) + "/" + std::to_string(total) + " residuals vanish on " +
                  std::to_string(inst.size()) + " instances; " + std::to_string(hessian_term) + "/" +
                  std::to_string(total) + " equal -4 h Hess(f) h");
}

Outcome kv_poisson() {
    Tally t;
    std::mt19937_64 rng(3);
    int kv = 0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 2 + i % 2;
        SymBivector h = i % 5 == 0 ? random_separable(rng, n, 2)
                        : i % 5 == 1 ? algebra_to_kv(random_algebra(rng, n))
                                     : random_bivector(rng, n, 2);
        if (h.dim() < 2) h = random_bivector(rng, n, 2);
        bool a = codazzi_tensor(h).is_zero(), b = schouten_jacobi(build_pi(h)).is_zero();
        t.expect(a == b, "instance " + std::to_string(i));
        kv += a;
    }
    return t.done("100 bivectors, " + std::to_string(kv) + " K-V");
}

Outcome theorem1() {
    Tally t;
    int pass = 0;
    for (const auto& c : map_cases()) {
        Theorem1Report r = theorem1_equivalences(c.f, c.h1, c.h2);
        t.expect(r.agree(), c.name + " verdicts differ");
        if (c.expected) t.expect(r.kv_map == *c.expected, c.name + " verdict");
        pass += r.kv_map;
    }
    return t.done("30 maps, " + std::to_string(pass) + " K-V, all four verdicts agree");
}

Outcome submanifolds() {
    Tally t;
    for (auto [m, k] : std::vector<std::pair<std::size_t, std::size_t>>{{3, 1}, {4, 2}}) {
        Chart c = chart(coords_for(m));
        ExprMatrix h(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) h(i, j) = var(c.coords[i]) * var(c.coords[j]);
        std::vector<RatVector> basis;
        for (std::size_t i = 0; i < m - k; ++i) {
            RatVector e(m, Rational(0));
            e[i] = 1;
            basis.push_back(e);
        }
        SubmanifoldReport r = is_kv_submanifold(AffineSubmanifold("N", c, RatVector(m, Rational(0)), basis), SymBivector(c, h));
        const std::string tag = "(" + std::to_string(m) + "," + std::to_string(k) + ")";
        t.expect(r.holds, tag);
        if (r.induced)
            for (std::size_t i = 0; i < m - k; ++i)
                for (std::size_t j = 0; j < m - k; ++j)
                    t.expect((*r.induced)(i, j) == var(c.coords[i]) * var(c.coords[j]), tag + " induced entry");
    }
    AffineSubmanifold xaxis("N", plane(), vec({0, 0}), {vec({1, 0})});
    SubmanifoldReport good = is_kv_submanifold(xaxis, biv(plane(), {{"x^2", "0"}, {"0", "y"}}));
    t.expect(good.holds && good.induced && (*good.induced)(0, 0) == E("x^2"), "f2(y) = y");
    t.expect(!is_kv_submanifold(xaxis, biv(plane(), {{"x^2", "0"}, {"0", "1"}})).holds, "f2(y) = 1 rejected");
    Chart c3 = chart({"x", "y", "z"});
    SubmanifoldReport three = is_kv_submanifold(AffineSubmanifold("N", c3, vec({0, 0, 0}), {vec({1, 0, 0}), vec({0, 1, 0})}),
                                                biv(c3, {{"x^2", "0", "0"}, {"0", "y + 1", "0"}, {"0", "0", "z^3 - z"}}));
    t.expect(three.holds && three.induced && three.induced->matrix() == biv(chart({"x", "y"}), {{"x^2", "0"}, {"0", "y + 1"}}).matrix(),
             "diagonal in R^3");
    return t.done("x_i x_j for (3,1),(4,2); diagonal f_i(x_i)");
}

Outcome transversal_fibres() {
    Tally t;
    std::mt19937_64 rng(6);
    int fibres = 0;
    auto check = [&](const Chart& c, const RatMatrix& a, const RatVector& value, const std::string& tag) {
        AffineSubmanifold fib("F", c, *solve(a, value), nullspace(a));
        TransversalReport r = is_transversal(fib, SymBivector(c, to_expr(RatMatrix::identity(c.dim()))), {});
        t.expect(r.verdict == TransversalVerdict::SymbolicTrue, tag + " verdict");
        RatMatrix gram(fib.k(), fib.k());
        for (std::size_t i = 0; i < fib.k(); ++i)
            for (std::size_t j = 0; j < fib.k(); ++j)
                for (std::size_t l = 0; l < c.dim(); ++l) gram(i, j) += fib.basis[i][l] * fib.basis[j][l];
        t.expect(r.induced && r.induced->matrix() == to_expr(*inverse(gram)), tag + " induced metric");
        ++fibres;
    };
    check(chart({"x", "y", "z"}), mat({{1, 2, -1}}), vec({1}), "x+2y-z = 1");
    for (int i = 0; i < 10; ++i) {
        const std::size_t n = 3 + i % 2, m = 1 + i % 2;
        RatMatrix a = random_rat_matrix(rng, m, n);
        if (rank(a) != m) continue;
        check(chart(coords_for(n)), a, random_vector(rng, m), "random surjection " + std::to_string(i));
    }
    return t.done(std::to_string(fibres) + " fibres, induced = inverse Gram matrix");
}

Outcome coisotropy() {
    Tally t;
    AlgebraSpec a = e1_idempotent();
    SymBivector h = algebra_to_kv(a, plane());
    AffineSubmanifold sub = annihilator_submanifold({a, {vec({1, 0})}, SubspaceKind::Subalgebra}, plane());
    t.expect(is_coisotropic(sub, h).holds, "subalgebra annihilator coisotropic");
    ConormalAlgebroid alg = conormal_algebroid(sub, h);
    t.expect(alg.closed && alg.left_symmetric, "conormal product");
    // left symmetry on sections with polynomial coefficients, through the Leibniz rule
    std::mt19937_64 rng(7);
    const auto& tv = alg.frame.tangent->coords;
    auto sec = [&] {
        std::vector<Expr> v;
        for (std::size_t i = 0; i < alg.rank; ++i) v.push_back(random_poly(rng, tv, 2));
        return v;
    };
    auto minus = [](std::vector<Expr> u, const std::vector<Expr>& v) {
        for (std::size_t i = 0; i < u.size(); ++i) u[i] -= v[i];
        return u;
    };
    for (int i = 0; i < 10; ++i) {
        auto u = sec(), v = sec(), w = sec();
        auto p = [&](const auto& x, const auto& y) { return conormal_product(alg, x, y); };
        auto ass = [&](const auto& x, const auto& y, const auto& z) { return minus(p(p(x, y), z), p(x, p(y, z))); };
        t.expect(ass(u, v, w) == ass(v, u, w), "associator symmetry on sections");
    }
    AffineSubmanifold ideal = annihilator_submanifold({a, {vec({0, 1})}, SubspaceKind::Ideal}, plane());
    t.expect(is_kv_submanifold(ideal, h).holds, "ideal annihilator K-V");
    for (const auto& k : known_subspaces(rng)) {
        SymBivector hk = algebra_to_kv(k.algebra);
        AffineSubmanifold ann = annihilator_submanifold({k.algebra, k.basis, k.kind}, hk.chart());
        t.expect(is_coisotropic(ann, hk).holds, "known subspace coisotropic");
        if (k.kind == SubspaceKind::Ideal) t.expect(is_kv_submanifold(ann, hk).holds, "known ideal K-V");
        else t.expect(conormal_algebroid(ann, hk).left_symmetric, "known subalgebra left symmetric");
    }
    return t.done("e1 e1 = e1 instances plus 11 subspaces in random bases");
}

Outcome graphs() {
    Tally t;
    int n = 0;
    for (const auto& c : map_cases()) {
        GraphReport g = graph_check(c.f, c.h1, c.h2);
        t.expect(g.agree(), c.name);
        ++n;
    }
    return t.done(std::to_string(n) + " maps, graph coisotropic iff K-V map");
}

Outcome e_space() {
    Tally t;
    SymBivector d = algebra_to_kv(e1_idempotent(), plane());
    for (const char* f : {"y", "y^2", "y^3 - 2*y + 5", "7"}) t.expect(in_E(d, ScalarField{plane(), E(f)}), f);
    SymBivector x2 = biv(plane(), {{"x^2", "0"}, {"0", "0"}});
    ScalarField fx{plane(), var("x")};
    t.expect(in_E(x2, fx), "x in E");
    t.expect(!in_E(x2, ScalarField{plane(), E("x^2")}), "x^2 not in E");
    t.expect(!special_class_check(x2, fx, fx), "special class fails on x^2 dx^2");
    std::mt19937_64 rng(9);
    int tested = 1;
    t.expect(special_class_check(d, ScalarField{plane(), var("y")}, ScalarField{plane(), E("y^2")}), "y, y^2");
    for (int i = 0; i < 30; ++i) {
        AlgebraSpec a = random_algebra(rng, 4);
        SymBivector h = algebra_to_kv(a);
        ScalarField f1{h.chart(), member_of_E(rng, a, h.chart())}, f2{h.chart(), member_of_E(rng, a, h.chart())};
        t.expect(special_class_check(h, f1, f2), "algebra dual " + std::to_string(i));
        ++tested;
    }
    return t.done("special class holds on " + std::to_string(tested) + " algebra-dual pairs");
}

Outcome oracle_coherence() {
    Tally t;
    RunConfig c;
    c.scenarios = {"paper_examples"};
    c.seed = 42;
    c.samples = 20;
    RunOutcome o = run(c);
    t.expect(o.exit_code != 3, "oracle disagreement: " + o.diagnostics);
    t.expect(o.exit_code == 0, "corpus exit code " + std::to_string(o.exit_code));
    t.expect(o.oracle_comparisons > 0, "no comparisons made");
    return t.done(std::to_string(o.results.size()) + " checks, " + std::to_string(o.oracle_comparisons) +
                  " exact numeric comparisons");
}

Outcome dsl_robustness(const std::string& fixtures) {
    Tally t;
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        Scenario s = random_scenario(rng);
        std::string text = serialize(s);
        t.expect(parse_scenario(text) == s && serialize(parse_scenario(text)) == text, "scenario " + std::to_string(i));
    }
    const std::regex header(R"(error at (\d+):(\d+))");
    int malformed = 0;
    for (const auto& e : std::filesystem::directory_iterator(fixtures)) {
        if (e.path().extension() != ".kvs") continue;
        std::ifstream in(e.path());
        std::stringstream buf;
        buf << in.rdbuf();
        std::string text = buf.str();
        std::smatch m;
        const std::string name = e.path().filename().string();
        if (!std::regex_search(text, m, header)) {
            t.expect(false, name + " has no expected position");
            continue;
        }
        try {
            parse_scenario(text);
            t.expect(false, name + " parsed");
        } catch (const ParseError& p) {
            t.expect(p.line() == std::stoi(m[1]) && p.column() == std::stoi(m[2]), name + " position");
        }
        ++malformed;
    }
    t.expect(malformed > 0, "no malformed fixtures found");
    for (Format f : {Format::Json, Format::Text}) {
        RunConfig c;
        c.scenarios = {"paper_examples"};
        c.format = f;
        t.expect(run(c).report == run(c).report, "repeated reports differ");
    }
    return t.done("100 round trips, " + std::to_string(malformed) + " malformed fixtures, byte-identical reports");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> known;
    std::string fixtures = KVG_FIXTURE_DIR "/malformed";
    app.add_option("--known-failure", known, "criteria whose failure does not change the exit status");
    app.add_option("--fixtures", fixtures, "directory of malformed scenarios");
    CLI11_PARSE(app, argc, argv);

    struct Criterion {
        int id;
        const char* title;
        double limit_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all{
        {1, "Codazzi corpus", 10, codazzi_corpus},
        {2, "Lie derivative value and proposition residual", 10, lie_derivative_value},
        {3, "K-V iff Poisson tangent lift", 30, kv_poisson},
        {4, "K-V map four-way agreement", 0, theorem1},
        {5, "submanifold criteria", 0, submanifolds},
        {6, "transversal Schur structure", 0, transversal_fibres},
        {7, "coisotropy and conormal algebroid", 0, coisotropy},
        {8, "graph characterization", 0, graphs},
        {9, "E-space and special class", 0, e_space},
        {10, "oracle coherence", 60, oracle_coherence},
        {11, "DSL robustness", 0, [&] { return dsl_robustness(fixtures); }},
    };
    int unexpected = 0;
    for (const auto& c : all) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_s > 0 && secs >= c.limit_s) {
            o.pass = false;
            o.note += "; over the time limit";
        }
        bool is_known = std::find(known.begin(), known.end(), c.id) != known.end();
        if (!o.pass && !is_known) ++unexpected;
        std::printf("criterion %2d: %s  %-46s %7.2f s  %s%s\n", c.id, o.pass ? "PASS" : "FAIL", c.title, secs,
                    o.note.c_str(), !o.pass && is_known ? " [known failure]" : "");
    }
    return unexpected ? 1 : 0;
}
