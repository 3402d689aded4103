#include "doctest.h"
#include "support.hpp"

#include "kvg/errors.hpp"
#include "kvg/oracle.hpp"

using namespace kvg;
using namespace kvg::testing;

namespace {

Expr E(const char* s) { return parse_expr(s); }

SymBivector biv(const Chart& c, std::vector<std::vector<const char*>> rows) {
    ExprMatrix m(rows.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = parse_expr(rows[i][j]);
    return SymBivector(c, m);
}

const Chart& xy() {
    static const Chart c = chart({"x", "y"});
    return c;
}

SymBivector diag_xy() { return biv(xy(), {{"x", "0"}, {"0", "y"}}); }
SymBivector offdiag_x() { return biv(xy(), {{"0", "x"}, {"x", "0"}}); }
SymBivector dual_e1() { return algebra_to_kv(e1_idempotent(), xy()); }

/// The K-V instances used throughout: worked examples plus algebra duals.
std::vector<SymBivector> kv_corpus() {
    std::vector<SymBivector> out{diag_xy(), biv(xy(), {{"x^2", "0"}, {"0", "0"}}), dual_e1(),
                                 biv(xy(), {{"x^2", "0"}, {"0", "y"}})};
    Chart c3 = chart({"x", "y", "z"});
    out.push_back(biv(c3, {{"x^2", "x*y", "x*z"}, {"x*y", "y^2", "y*z"}, {"x*z", "y*z", "z^2"}}));
    out.push_back(biv(c3, {{"x", "0", "0"}, {"0", "y", "0"}, {"0", "0", "0"}}));
    std::mt19937_64 rng(101);
    while (out.size() < 10) {
        AlgebraSpec a = random_algebra(rng, 3);
        if (a.dim >= 2) out.push_back(algebra_to_kv(a));
    }
    return out;
}

/// Codazzi entry straight from the defining sum, evaluated on first-order jets.
Rational codazzi_oracle(const SymBivector& h, std::size_t i, std::size_t j, std::size_t k, const RatVector& p) {
    auto s = std::make_shared<const JetSpace>(h.dim(), 1);
    auto at = seed_jets(s, h.chart().coords, p);
    Rational acc = 0;
    for (std::size_t l = 0; l < h.dim(); ++l) {
        acc += jet_eval(h(i, l), at).value() * jet_eval(h(j, k), at).slope(l);
        acc -= jet_eval(h(j, l), at).value() * jet_eval(h(i, k), at).slope(l);
    }
    return acc;
}

OneForm form(const Chart& c, std::vector<Expr> comps) { return OneForm{c, std::move(comps)}; }

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("sharp on the dual of e1 e1 = e1") {
    SymBivector h = dual_e1();
    CHECK(h(0, 0) == var("x"));
    VectorField a = sharp(h, coordinate_form(xy(), 0));
    CHECK(a.components[0] == var("x"));
    CHECK(a.components[1].is_zero());
    CHECK(is_zero(sharp(h, coordinate_form(xy(), 1))));
    SymBivector zero(xy(), ExprMatrix(2, 2));
    std::mt19937_64 rng(1);
    CHECK(is_zero(sharp(zero, random_form(rng, xy(), 2))));
}

TEST_CASE("sharp rejects forms on another chart") {
    Chart other = chart({"u", "v"}, "N");
    CHECK_THROWS_AS(sharp(diag_xy(), coordinate_form(other, 0)), Error);
}

TEST_CASE("codazzi tensor on worked and random instances") {
    CHECK(codazzi_tensor(diag_xy()).is_zero());
    TrilinearForm t = codazzi_tensor(offdiag_x());
    CHECK(t.at(0, 1, 1) == E("-x"));
    CHECK(t.first_nonzero() == std::array<std::size_t, 3>{0, 1, 1});
    std::mt19937_64 rng(2);
    CHECK(codazzi_tensor(random_constant(rng, 3)).is_zero());

    Sampler s(3);
    for (int trial = 0; trial < 20; ++trial) {
        SymBivector h = random_bivector(rng, 2 + trial % 2, 2);
        TrilinearForm c = codazzi_tensor(h);
        const std::size_t n = h.dim();
        RatVector p = s.point(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k) {
                    CHECK(c.at(i, j, k) == -c.at(j, i, k));
                    CHECK(eval_at(c.at(i, j, k), h.chart().point(p)) == codazzi_oracle(h, i, j, k, p));
                }
    }
}

TEST_CASE("[h,h] equals minus the Codazzi tensor") {
    CHECK(kv_bracket_form(diag_xy()).is_zero());
    CHECK(kv_bracket_form(SymBivector(xy(), ExprMatrix(2, 2))).is_zero());
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        SymBivector h = random_bivector(rng, 2 + trial % 2, 2);
        TrilinearForm b = kv_bracket_form(h), c = codazzi_tensor(h);
        for (std::size_t e = 0; e < b.entries().size(); ++e) CHECK(b.entries()[e] == -c.entries()[e]);
    }
    TrilinearForm b = kv_bracket_form(offdiag_x());
    CHECK(!b.is_zero());
}

TEST_CASE("bracket_h") {
    Chart r = chart({"x"});
    SymBivector h(r, ExprMatrix(1, 1, Expr(1)));
    OneForm a = form(r, {var("x")}), dx = coordinate_form(r, 0);
    OneForm br = bracket_h(h, a, dx);
    CHECK(br.components[0] == Expr(-1));
    // hand expansion: nabla_{x d_x} dx - nabla_{d_x}(x dx) = 0 - dx
    Sampler s(9);
    for (const auto& p : s.points(1, 10)) CHECK(eval_at(br.components[0], r.point(p)) == -1);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        SymBivector g = random_bivector(rng, 2, 2);
        CHECK(is_zero(bracket_h(g, coordinate_form(xy(), 0), coordinate_form(xy(), 1))));
        OneForm u = random_form(rng, xy(), 2), v = random_form(rng, xy(), 2);
        OneForm uv = bracket_h(g, u, v), vu = bracket_h(g, v, u);
        CHECK(is_zero(uv + vu));
    }
}

TEST_CASE("contravariant connection relations") {
    OneForm dx = coordinate_form(xy(), 0);
    OneForm d = contravariant_D(diag_xy(), dx, dx);
    CHECK(d.components[0] == Expr(1));
    CHECK(d.components[1].is_zero());
    SymBivector zero(xy(), ExprMatrix(2, 2));
    CHECK(is_zero(contravariant_D(zero, dx, coordinate_form(xy(), 1))));

    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 15; ++trial) {
        SymBivector h = random_bivector(rng, 2, 2);
        OneForm a = random_form(rng, xy(), 2), b = random_form(rng, xy(), 2);
        Expr f = random_poly(rng, xy().coords, 2);
        // D_a b - D_b a = [a, b]_h
        CHECK(is_zero(contravariant_D(h, a, b) - contravariant_D(h, b, a) - bracket_h(h, a, b)));
        // [a, f b]_h = f [a, b]_h + a^#(f) b
        OneForm lhs = bracket_h(h, a, f * b);
        OneForm rhs = f * bracket_h(h, a, b) + apply(sharp(h, a), f) * b;
        CHECK(is_zero(lhs - rhs));
    }
}

TEST_CASE("sharp of D_a b is nabla_{a^#} b^# on K-V structures") {
    std::mt19937_64 rng(7);
    for (const auto& h : kv_corpus()) {
        const Chart& c = h.chart();
        for (int trial = 0; trial < 3; ++trial) {
            OneForm a = random_form(rng, c, 1), b = random_form(rng, c, 1);
            VectorField lhs = sharp(h, contravariant_D(h, a, b));
            VectorField rhs = left_sym_product(sharp(h, a), sharp(h, b));
            CHECK(is_zero(lhs - rhs));
        }
    }
    // fails without the Codazzi equation
    SymBivector bad = offdiag_x();
    OneForm dy = coordinate_form(xy(), 1);
    CHECK(!is_zero(sharp(bad, contravariant_D(bad, dy, dy)) - left_sym_product(sharp(bad, dy), sharp(bad, dy))));
}

TEST_CASE("Jacobi identity of [.,.]_h on K-V structures") {
    std::mt19937_64 rng(8);
    for (const auto& h : kv_corpus()) {
        const Chart& c = h.chart();
        OneForm a = random_form(rng, c, 1), b = random_form(rng, c, 1), g = random_form(rng, c, 1);
        auto br = [&](const OneForm& u, const OneForm& v) { return bracket_h(h, u, v); };
        OneForm jac = br(a, br(b, g)) + br(b, br(g, a)) + br(g, br(a, b));
        CHECK(is_zero(jac));
        // the anchor is a morphism of brackets
        CHECK(is_zero(sharp(h, br(a, b)) - lie_bracket(sharp(h, a), sharp(h, b))));
    }
}

TEST_CASE("Hamiltonian fields") {
    VectorField xf = hamiltonian(diag_xy(), ScalarField{xy(), var("x")});
    CHECK(xf.components[0] == var("x"));
    CHECK(xf.components[1].is_zero());
    CHECK(is_zero(hamiltonian(diag_xy(), ScalarField{xy(), Expr(5)})));
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 15; ++trial) {
        SymBivector h = random_bivector(rng, 2, 2);
        ScalarField f1{xy(), random_poly(rng, xy().coords, 3)}, f2{xy(), random_poly(rng, xy().coords, 3)};
        Expr a = apply(hamiltonian(h, f1), f2.value), b = apply(hamiltonian(h, f2), f1.value);
        CHECK(a == b);
        CHECK(a == evaluate(h, differential(f1), differential(f2)));
    }
}

TEST_CASE("Lie derivative of h along X_f") {
    SymBivector l = lie_derivative_h(diag_xy(), ScalarField{xy(), var("x")});
    CHECK(l(0, 0) == E("-x"));
    CHECK(l(0, 1).is_zero());
    CHECK(l(1, 1).is_zero());
    CHECK(is_zero(lie_derivative_h(diag_xy(), ScalarField{xy(), Expr(3)}).matrix()));

    // independent: (L_X h)(a, b) = X(h(a, b)) - h(L_X a, b) - h(a, L_X b), with L_X dx_i = d(X_i)
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 10; ++trial) {
        SymBivector h = random_bivector(rng, 2, 2);
        ScalarField f{xy(), random_poly(rng, xy().coords, 2)};
        VectorField x = hamiltonian(h, f);
        SymBivector got = lie_derivative_h(h, f);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                OneForm a = coordinate_form(xy(), i), b = coordinate_form(xy(), j);
                OneForm la = differential(ScalarField{xy(), x.components[i]});
                OneForm lb = differential(ScalarField{xy(), x.components[j]});
                Expr want = apply(x, evaluate(h, a, b)) - evaluate(h, la, b) - evaluate(h, a, lb);
                CHECK(got(i, j) == want);
            }
    }
}

TEST_CASE("Lie derivative residual on algebra duals") {
    // Expanding the coordinate Lie derivative gives L h = -X_f(h) - 2 h Hess(f) h, so the
    // residual with +2 is -4 h Hess(f) h. It vanishes exactly on the class E.
    std::mt19937_64 rng(12);
    int vanished = 0;
    for (int done = 0; done < 50; ++done) {
        AlgebraSpec a = random_algebra(rng, 3);
        SymBivector h = algebra_to_kv(a);
        const auto& c = h.chart();
        ScalarField f{c, random_poly(rng, c.coords, 3)};
        const std::size_t n = h.dim();
        ExprMatrix hess(n, n);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t l = 0; l < n; ++l) hess(k, l) = differentiate(differentiate(f.value, c.coords[k]), c.coords[l]);
        ExprMatrix want(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k)
                    for (std::size_t l = 0; l < n; ++l) want(i, j) += Expr(-4) * h(i, k) * hess(k, l) * h(l, j);
        ExprMatrix r = lie_derivative_residual(h, f);
        CHECK(r == want);
        CHECK(is_zero(r) == in_E(h, f));
        vanished += is_zero(r);
    }
    CHECK(vanished < 50);
    // f = x^2 on the dual of e1 e1 = e1: L h = -6x^2 while -X_f(h) + 2 h Hess(f) h = 2x^2
    SymBivector d = algebra_to_kv(e1_idempotent(), xy());
    ScalarField x2{xy(), E("x^2")};
    CHECK(lie_derivative_h(d, x2)(0, 0) == E("-6*x^2"));
    CHECK(lie_derivative_residual(d, x2)(0, 0) == E("-8*x^2"));
    // y-only functions: both sides vanish
    CHECK(is_zero(lie_derivative_residual(d, ScalarField{xy(), E("y^3 - y")})));
    CHECK(is_zero(lie_derivative_h(d, ScalarField{xy(), E("y^3 - y")}).matrix()));
}

TEST_CASE("the space E") {
    SymBivector d = dual_e1();
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 10; ++trial)
        CHECK(in_E(d, ScalarField{xy(), random_poly(rng, {"y"}, 3)}));
    CHECK(!in_E(d, ScalarField{xy(), E("x^2")}));

    SymBivector sq = biv(xy(), {{"x^2", "0"}, {"0", "0"}});
    CHECK(in_E(sq, ScalarField{xy(), var("x")}));
    ExprMatrix r = in_E_residuals(sq, ScalarField{xy(), E("x^2")});
    CHECK(r(0, 0) == E("2*x^4"));
    CHECK(!in_E(sq, ScalarField{xy(), E("x^2")}));

    for (int trial = 0; trial < 10; ++trial) {
        SymBivector h = random_bivector(rng, 3, 2);
        CHECK(in_E(h, ScalarField{h.chart(), random_poly(rng, h.chart().coords, 1)}));
    }
}

TEST_CASE("E residual agrees with <nabla_{a^#} df, b^#> on the coordinate coframe") {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 10; ++trial) {
        SymBivector h = random_bivector(rng, 2, 2);
        ScalarField f{xy(), random_poly(rng, xy().coords, 3)};
        ExprMatrix r = in_E_residuals(h, f);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                VectorField ai = sharp(h, coordinate_form(xy(), i)), aj = sharp(h, coordinate_form(xy(), j));
                CHECK(r(i, j) == pairing(covariant(ai, differential(f)), aj));
            }
    }
}

TEST_CASE("special class") {
    SymBivector d = dual_e1();
    CHECK(special_class_check(d, ScalarField{xy(), var("y")}, ScalarField{xy(), E("y^2")}));
    SymBivector sq = biv(xy(), {{"x^2", "0"}, {"0", "0"}});
    CHECK(!special_class_check(sq, ScalarField{xy(), var("x")}, ScalarField{xy(), var("x")}));
    CHECK(special_class_check(sq, ScalarField{xy(), Expr(2)}, ScalarField{xy(), var("x")}));
    try {
        special_class_check(sq, ScalarField{xy(), E("x^2")}, ScalarField{xy(), var("x")});
        FAIL("expected a precondition error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PreconditionViolated);
    }
}

TEST_CASE("Hamiltonian fields of E functions: commuting and closed under the product") {
    std::mt19937_64 rng(16);
    SymBivector d = dual_e1();
    for (int trial = 0; trial < 10; ++trial) {
        ScalarField f1{xy(), random_poly(rng, {"y"}, 3) + random_poly(rng, {"x"}, 1)};
        ScalarField f2{xy(), random_poly(rng, {"y"}, 3)};
        REQUIRE(in_E(d, f1));
        REQUIRE(in_E(d, f2));
        VectorField x1 = hamiltonian(d, f1), x2 = hamiltonian(d, f2);
        CHECK(is_zero(lie_bracket(x1, x2)));
        ScalarField g{xy(), evaluate(d, differential(f1), differential(f2))};
        CHECK(is_zero(left_sym_product(x1, x2) - hamiltonian(d, g)));
    }
    for (int trial = 0; trial < 10; ++trial) {
        SymBivector h = algebra_to_kv(random_algebra(rng, 3));
        ScalarField f1{h.chart(), random_poly(rng, h.chart().coords, 1)};
        ScalarField f2{h.chart(), random_poly(rng, h.chart().coords, 1)};
        VectorField x1 = hamiltonian(h, f1), x2 = hamiltonian(h, f2);
        CHECK(is_zero(lie_bracket(x1, x2)));
        ScalarField g{h.chart(), evaluate(h, differential(f1), differential(f2))};
        CHECK(is_zero(left_sym_product(x1, x2) - hamiltonian(h, g)));
    }
}

TEST_CASE("left-symmetric product") {
    VectorField x{xy(), {var("x"), Expr(0)}};
    VectorField p = left_sym_product(x, x);
    CHECK(p.components[0] == var("x"));
    std::mt19937_64 rng(18);
    for (int trial = 0; trial < 10; ++trial) {
        VectorField a = random_field(rng, xy(), 2), b = random_field(rng, xy(), 2), c = random_field(rng, xy(), 2);
        CHECK(is_zero(associator(a, b, c) - associator(b, a, c)));
        // torsion free: a.b - b.a = [a, b]
        CHECK(is_zero(left_sym_product(a, b) - left_sym_product(b, a) - lie_bracket(a, b)));
    }
}

TEST_CASE("rank at a point") {
    CHECK(rank_at(diag_xy(), {{"x", Rational(1)}, {"y", Rational(1)}}) == 2);
    CHECK(rank_at(diag_xy(), {{"x", Rational(0)}, {"y", Rational(0)}}) == 0);
    CHECK(rank_at(SymBivector(xy(), ExprMatrix(2, 2)), {{"x", Rational(3)}, {"y", Rational(1)}}) == 0);
    Chart c3 = chart({"x", "y", "z"});
    CHECK(rank_at(SymBivector(c3, to_expr(RatMatrix::identity(3))), c3.point({1, 2, 3})) == 3);
    SymBivector pole = biv(xy(), {{"1/x", "0"}, {"0", "1"}});
    CHECK_THROWS_AS(rank_at(pole, {{"x", Rational(0)}, {"y", Rational(1)}}), Error);
}

TEST_CASE("degenerate inputs") {
    Chart r = chart({"t"});
    SymBivector h(r, ExprMatrix(1, 1));
    CHECK(is_kv(h));
    CHECK(codazzi_tensor(h).is_zero());
    CHECK(is_zero(lie_derivative_h(h, ScalarField{r, E("t^3")}).matrix()));
    CHECK(in_E(h, ScalarField{r, E("t^3")}));
    CHECK_THROWS_AS(SymBivector(xy(), [] {
                        ExprMatrix m(2, 2);
                        m(0, 1) = var("x");
                        return m;
                    }()),
                    Error);
    CHECK_THROWS_AS(SymBivector(xy(), ExprMatrix(2, 2, var("z"))), Error);
}

}
