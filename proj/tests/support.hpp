#pragma once

// Generators shared by the unit tests and the acceptance binary.

#include "kvg/algebra.hpp"
#include "kvg/dsl.hpp"
#include "kvg/geometry.hpp"
#include "kvg/sampling.hpp"
#include "kvg/structures.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace kvg::testing {

inline Expr var(const std::string& v) { return Expr::variable(v); }

inline Chart chart(std::vector<std::string> coords, std::string name = "M") {
    return Chart(std::move(name), std::move(coords));
}

inline std::vector<std::string> coords_for(std::size_t n) {
    static const std::vector<std::string> xyz{"x", "y", "z"};
    if (n <= 3) return {xyz.begin(), xyz.begin() + static_cast<long>(n)};
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= n; ++i) out.push_back("x" + std::to_string(i));
    return out;
}

/// Dense random polynomial of total degree <= deg; each monomial survives with probability 1/2.
inline Expr random_poly(std::mt19937_64& rng, const std::vector<std::string>& vars, unsigned deg, long bound = 2) {
    Expr out;
    std::vector<unsigned> e(vars.size(), 0);
    auto emit = [&] {
        if (rng() % 2) return;
        Expr m = small_rational(rng, bound);
        for (std::size_t i = 0; i < vars.size(); ++i) m *= var(vars[i]).pow(e[i]);
        out += m;
    };
    // walk every exponent vector with sum <= deg
    std::function<void(std::size_t, unsigned)> walk = [&](std::size_t i, unsigned left) {
        if (i == vars.size()) {
            emit();
            return;
        }
        for (unsigned k = 0; k <= left; ++k) {
            e[i] = k;
            walk(i + 1, left - k);
        }
        e[i] = 0;
    };
    walk(0, deg);
    return out;
}

/// Random rational function whose denominator has a nonzero constant term.
inline Expr random_rational(std::mt19937_64& rng, const std::vector<std::string>& vars, unsigned deg) {
    Expr den = random_poly(rng, vars, deg) + Expr(Rational(static_cast<long>(rng() % 3 + 3)));
    return random_poly(rng, vars, deg) / den;
}

inline RatVector random_vector(std::mt19937_64& rng, std::size_t n, long bound = 2) {
    RatVector v(n);
    for (auto& q : v) q = small_rational(rng, bound);
    return v;
}

inline RatMatrix random_rat_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, long bound = 2) {
    RatMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = small_rational(rng, bound);
    return m;
}

inline RatMatrix random_invertible(std::mt19937_64& rng, std::size_t n) {
    for (;;) {
        RatMatrix m = random_rat_matrix(rng, n, n);
        if (rank(m) == n) return m;
    }
}

inline SymBivector random_bivector(std::mt19937_64& rng, std::size_t n, unsigned deg) {
    Chart c = chart(coords_for(n));
    ExprMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = random_poly(rng, c.coords, deg);
    return SymBivector(c, m);
}

/// sum_i f_i(x_i) d_i (x) d_i: always K-V.
inline SymBivector random_separable(std::mt19937_64& rng, std::size_t n, unsigned deg) {
    Chart c = chart(coords_for(n));
    ExprMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = random_poly(rng, {c.coords[i]}, deg);
    return SymBivector(c, m);
}

inline SymBivector random_constant(std::mt19937_64& rng, std::size_t n) {
    Chart c = chart(coords_for(n));
    ExprMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = Expr(small_rational(rng, 2));
    return SymBivector(c, m);
}

/// Structure constants of the algebra with basis P^{-1}-transformed from `a`: f_i = sum_j P_ji e_j.
inline AlgebraSpec change_basis(const AlgebraSpec& a, const RatMatrix& p) {
    const std::size_t n = a.dim;
    RatMatrix pinv = *inverse(p);
    AlgebraSpec out(n);
    auto column = [&](std::size_t i) {
        RatVector v(n);
        for (std::size_t j = 0; j < n; ++j) v[j] = p(j, i);
        return v;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            RatVector prod = a.multiply(column(i), column(j));
            for (std::size_t k = 0; k < n; ++k) {
                Rational acc = 0;
                for (std::size_t l = 0; l < n; ++l) acc += pinv(k, l) * prod[l];
                out.c(i, j, k) = acc;
            }
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Rational acc = 0;
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = 0; l < n; ++l) acc += p(k, i) * a.cocycle(k, l) * p(l, j);
            out.cocycle(i, j) = acc;
        }
    return out;
}

/// Valid commutative associative algebra of dimension <= 4 with a scalar cocycle.
/// Built as a direct sum of truncated polynomial blocks (unital or nilpotent), then
/// moved to a random basis. The cocycle is phi(u v); a third of the draws use the zero
/// product instead, where every symmetric form is a cocycle.
inline AlgebraSpec random_algebra(std::mt19937_64& rng, std::size_t max_dim = 4) {
    const std::size_t n = 1 + rng() % max_dim;
    AlgebraSpec a(n);
    std::size_t start = 0;
    while (start < n) {
        std::size_t len = 1 + rng() % (n - start);
        bool unital = rng() % 2;
        // block basis b_0..b_{len-1}: unital b_i = t^i in Q[t]/t^len, nilpotent b_i = t^{i+1} in t Q[t]/t^{len+1}
        for (std::size_t i = 0; i < len; ++i)
            for (std::size_t j = 0; j < len; ++j) {
                std::size_t deg = unital ? i + j : i + j + 1;
                if (deg < len) a.c(start + i, start + j, start + deg) = 1;
            }
        start += len;
    }
    RatVector phi = random_vector(rng, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Rational acc = 0;
            for (std::size_t k = 0; k < n; ++k) acc += a.c(i, j, k) * phi[k];
            a.cocycle(i, j) = acc;
        }
    if (rng() % 3 == 0) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a.constants[i][j].assign(n, Rational(0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) a.cocycle(i, j) = a.cocycle(j, i) = small_rational(rng, 2);
    }
    return change_basis(a, random_invertible(rng, n));
}

/// Truncated polynomial algebra: unital Q[t]/t^n (basis 1..t^{n-1}) or nilpotent tQ[t]/t^{n+1} (basis t..t^n).
inline AlgebraSpec truncated(std::size_t n, bool unital) {
    AlgebraSpec a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t deg = unital ? i + j : i + j + 1;
            if (deg < n) a.c(i, j, deg) = 1;
        }
    return a;
}

struct KnownSubspace {
    AlgebraSpec algebra;
    std::vector<RatVector> basis;
    SubspaceKind kind;
};

/// Hand-picked ideals and subalgebras of small linear algebras, moved to a random basis.
inline std::vector<KnownSubspace> known_subspaces(std::mt19937_64& rng) {
    auto e = [](std::size_t n, std::vector<std::size_t> ones) {
        RatVector v(n, Rational(0));
        for (auto i : ones) v[i] = 1;
        return v;
    };
    AlgebraSpec split(2);
    split.c(0, 0, 0) = 1;
    split.c(1, 1, 1) = 1;
    std::vector<KnownSubspace> base{
        {truncated(3, true), {e(3, {1}), e(3, {2})}, SubspaceKind::Ideal},
        {truncated(3, true), {e(3, {2})}, SubspaceKind::Ideal},
        {truncated(3, true), {e(3, {0})}, SubspaceKind::Subalgebra},
        {truncated(3, true), {e(3, {0}), e(3, {2})}, SubspaceKind::Subalgebra},
        {truncated(3, false), {e(3, {2})}, SubspaceKind::Ideal},
        {truncated(3, false), {e(3, {1}), e(3, {2})}, SubspaceKind::Ideal},
        {truncated(3, false), {e(3, {1})}, SubspaceKind::Subalgebra},
        {split, {e(2, {0})}, SubspaceKind::Ideal},
        {split, {e(2, {0, 1})}, SubspaceKind::Subalgebra},
        {truncated(4, true), {e(4, {0}), e(4, {2})}, SubspaceKind::Subalgebra},
        {truncated(4, true), {e(4, {2}), e(4, {3})}, SubspaceKind::Ideal},
    };
    std::vector<KnownSubspace> out;
    for (auto& k : base) {
        RatMatrix p = random_invertible(rng, k.algebra.dim), pinv = *inverse(p);
        KnownSubspace m{change_basis(k.algebra, p), {}, k.kind};
        for (const auto& v : k.basis) {
            RatVector w(v.size(), Rational(0));
            for (std::size_t i = 0; i < v.size(); ++i)
                for (std::size_t j = 0; j < v.size(); ++j) w[i] += pinv(i, j) * v[j];
            m.basis.push_back(w);
        }
        out.push_back(std::move(m));
    }
    return out;
}

inline AlgebraSpec e1_idempotent() {
    AlgebraSpec a(2);
    a.c(0, 0, 0) = 1;
    return a;
}

inline ScalarField scalar(const Chart& c, const Expr& e) { return ScalarField{c, e}; }

inline OneForm random_form(std::mt19937_64& rng, const Chart& c, unsigned deg) {
    OneForm a{c, {}};
    for (std::size_t i = 0; i < c.dim(); ++i) a.components.push_back(random_poly(rng, c.coords, deg));
    return a;
}

inline VectorField random_field(std::mt19937_64& rng, const Chart& c, unsigned deg) {
    VectorField x{c, {}};
    for (std::size_t i = 0; i < c.dim(); ++i) x.components.push_back(random_poly(rng, c.coords, deg));
    return x;
}

/// Linear forms whose gradient v satisfies h(x) v = 0 everywhere: v kills every product and B.
inline std::vector<RatVector> null_directions(const AlgebraSpec& a) {
    const std::size_t n = a.dim;
    RatMatrix rows(n * n + n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) rows(i * n + k, j) = a.c(i, j, k);
        for (std::size_t j = 0; j < n; ++j) rows(n * n + i, j) = a.cocycle(i, j);
    }
    return nullspace(rows);
}

inline Expr linear(const RatVector& v, const Chart& c) {
    Expr e;
    for (std::size_t i = 0; i < v.size(); ++i) e += Expr(v[i]) * var(c.coords[i]);
    return e;
}

/// Functions in E by construction: affine ones and polynomials in a null direction.
inline Expr member_of_E(std::mt19937_64& rng, const AlgebraSpec& a, const Chart& c) {
    std::vector<RatVector> nulls = null_directions(a);
    Expr f = linear(random_vector(rng, a.dim), c) + Expr(small_rational(rng, 2));
    if (!nulls.empty() && rng() % 2) {
        Expr l = linear(nulls[rng() % nulls.size()], c);
        f += Expr(small_rational(rng, 2)) * l * l + Expr(small_rational(rng, 2)) * l * l * l;
    }
    return f;
}

/// Random syntactically valid scenario; names need not resolve, so only the parser and
/// serializer are exercised.
inline Scenario random_scenario(std::mt19937_64& rng) {
    static const std::vector<std::string> pool{"a", "b", "c", "x", "y", "z", "u", "v", "w"};
    auto pick = [&](std::size_t n) { return rng() % n; };
    auto rat_rows = [&](std::size_t r, std::size_t c) {
        RatRows out(r);
        for (auto& row : out) row = random_vector(rng, c);
        return out;
    };
    auto expr_rows = [&](std::size_t r, std::size_t c, const std::vector<std::string>& vars) {
        ExprRows out(r);
        for (auto& row : out)
            for (std::size_t j = 0; j < c; ++j)
                row.push_back(pick(3) ? random_poly(rng, vars, 2) : random_rational(rng, vars, 1));
        return out;
    };
    Scenario s;
    std::vector<std::string> names;
    const std::size_t decls = 1 + pick(6);
    for (std::size_t d = 0; d < decls; ++d) {
        const std::string name = "n" + std::to_string(d);
        const std::size_t n = 1 + pick(3);
        std::vector<std::string> coords = pool;
        std::shuffle(coords.begin(), coords.end(), rng);
        coords.resize(n);
        names.push_back(name);
        switch (pick(6)) {
            case 0: s.declarations.emplace_back(ManifoldDecl{name, static_cast<long>(n), coords, {}}); break;
            case 1: {
                BivectorDecl b{name, "m" + std::to_string(d), {}, {}, {}};
                if (pick(4) == 0) b.from_algebra = "alg";
                else b.rows = expr_rows(n, n, coords);
                s.declarations.emplace_back(b);
                break;
            }
            case 2: s.declarations.emplace_back(ScalarDecl{name, "m", random_rational(rng, coords, 2), {}}); break;
            case 3:
                s.declarations.emplace_back(MapDecl{name, "src", "dst", rat_rows(1 + pick(3), n), random_vector(rng, 1 + pick(3)), {}});
                break;
            case 4:
                s.declarations.emplace_back(SubmanifoldDecl{name, "amb", random_vector(rng, n), rat_rows(pick(3), n), {}});
                break;
            default: {
                AlgebraDecl a{name, static_cast<long>(n), {}, {}, {}};
                for (std::size_t k = pick(4); k > 0; --k)
                    a.product.push_back({{1 + long(pick(n)), 1 + long(pick(n)), 1 + long(pick(n))}, small_rational(rng, 2)});
                for (std::size_t k = pick(3); k > 0; --k)
                    a.cocycle.push_back({{1 + long(pick(n)), 1 + long(pick(n))}, small_rational(rng, 2)});
                s.declarations.emplace_back(a);
            }
        }
    }
    const std::size_t checks = pick(6);
    for (std::size_t c = 0; c < checks; ++c) {
        CheckDecl k;
        k.kind = check_kinds()[pick(check_kinds().size())];
        for (std::size_t a = 1 + pick(3); a > 0; --a) k.args.push_back(names[pick(names.size())]);
        CheckOptions& o = k.options;
        if (pick(3) == 0) o.samples = 1 + long(pick(50));
        if (pick(3) == 0) o.seed = long(pick(1000));
        if (pick(4) == 0) o.value = long(pick(5));
        if (pick(4) == 0) o.points = rat_rows(1 + pick(3), 1 + pick(3));
        if (pick(4) == 0) o.point = random_vector(rng, 1 + pick(3));
        if (pick(4) == 0) o.basis = rat_rows(1 + pick(2), 1 + pick(3));
        if (pick(4) == 0) o.equals = expr_rows(1 + pick(2), 1 + pick(2), {"x", "y", "t1"});
        if (pick(4) == 0) o.label = "case " + std::to_string(pick(100)) + ": a/b, [c]";
        if (pick(4) == 0) o.kind = pick(2) ? SubspaceKind::Ideal : SubspaceKind::Subalgebra;
        if (pick(3) == 0) o.expect = static_cast<Expectation>(pick(4));
        s.checks.push_back(std::move(k));
    }
    return s;
}

}  // namespace kvg::testing
