#include "kvg/algebra.hpp"

#include "kvg/errors.hpp"

namespace kvg {

AlgebraSpec::AlgebraSpec(std::size_t n)
    : dim(n), constants(n, std::vector<RatVector>(n, RatVector(n, Rational(0)))), cocycle(n, n) {}

RatVector AlgebraSpec::multiply(const RatVector& u, const RatVector& v) const {
    RatVector out(dim, Rational(0));
    for (std::size_t i = 0; i < dim; ++i) {
        if (u[i] == 0) continue;
        for (std::size_t j = 0; j < dim; ++j) {
            if (v[j] == 0) continue;
            for (std::size_t k = 0; k < dim; ++k) out[k] += u[i] * v[j] * c(i, j, k);
        }
    }
    return out;
}

AlgebraReport validate_algebra(const AlgebraSpec& a) {
    AlgebraReport r;
    const std::size_t n = a.dim;
    auto fail = [&](bool& flag, std::size_t i, std::size_t j, std::size_t k, const char* what) {
        flag = false;
        if (!r.witness) {
            r.witness = std::array<std::size_t, 3>{i + 1, j + 1, k + 1};
            r.failure = what;
        }
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (a.c(i, j, k) != a.c(j, i, k)) fail(r.commutative, i, j, k, "commutativity");
    // (e_i e_j) e_k = e_i (e_j e_k)
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = 0; l < n; ++l) {
                    Rational lhs = 0, rhs = 0;
                    for (std::size_t m = 0; m < n; ++m) {
                        lhs += a.c(i, j, m) * a.c(m, k, l);
                        rhs += a.c(j, k, m) * a.c(i, m, l);
                    }
                    if (lhs != rhs) {
                        fail(r.associative, i, j, k, "associativity");
                        break;
                    }
                }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (a.cocycle(i, j) != a.cocycle(j, i)) fail(r.cocycle_symmetric, i, j, j, "cocycle symmetry");
    // B(e_i e_j, e_k) = B(e_i, e_j e_k)
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                Rational lhs = 0, rhs = 0;
                for (std::size_t m = 0; m < n; ++m) {
                    lhs += a.c(i, j, m) * a.cocycle(m, k);
                    rhs += a.c(j, k, m) * a.cocycle(i, m);
                }
                if (lhs != rhs) fail(r.cocycle, i, j, k, "cocycle condition");
            }
    return r;
}

Chart dual_chart(const AlgebraSpec& a, const std::string& name) {
    std::vector<std::string> coords;
    static const char* small[] = {"x", "y", "z"};
    for (std::size_t i = 0; i < a.dim; ++i)
        coords.push_back(a.dim <= 3 ? std::string(small[i]) : "x" + std::to_string(i + 1));
    return Chart(name, coords);
}

SymBivector algebra_to_kv(const AlgebraSpec& a, const Chart& chart) {
    AlgebraReport rep = validate_algebra(a);
    if (!rep.valid()) throw Error(ErrorCode::InvalidAlgebra, rep.failure + " fails");
    if (chart.dim() != a.dim) throw Error(ErrorCode::ChartMismatch, "dual chart has the wrong dimension");
    ExprMatrix m(a.dim, a.dim);
    for (std::size_t i = 0; i < a.dim; ++i)
        for (std::size_t j = 0; j < a.dim; ++j) {
            Polynomial p(a.cocycle(i, j));
            for (std::size_t k = 0; k < a.dim; ++k)
                if (a.c(i, j, k) != 0) p += Polynomial::variable(chart.coords[k]) * a.c(i, j, k);
            m(i, j) = Expr(p);
        }
    SymBivector h(chart, m);
    if (!is_kv(h)) throw Error(ErrorCode::InvalidAlgebra, "dual structure fails the Codazzi equation");
    return h;
}

SymBivector algebra_to_kv(const AlgebraSpec& a) { return algebra_to_kv(a, dual_chart(a)); }

std::string check_subspace(const SubspaceSpec& s) {
    const std::size_t n = s.algebra.dim;
    for (const auto& v : s.basis)
        if (v.size() != n) return "basis vectors must have " + std::to_string(n) + " entries";
    RatMatrix span = columns_to_matrix(s.basis, n);
    if (rank(span) != s.basis.size()) return "basis is linearly dependent";
    auto inside = [&](const RatVector& v) { return solve(span, v).has_value(); };
    if (s.kind == SubspaceKind::Subalgebra) {
        for (const auto& u : s.basis)
            for (const auto& v : s.basis)
                if (!inside(s.algebra.multiply(u, v))) return "not closed under the product";
    } else {
        for (const auto& u : s.basis)
            for (std::size_t i = 0; i < n; ++i) {
                RatVector e(n, Rational(0));
                e[i] = 1;
                if (!inside(s.algebra.multiply(u, e))) return "does not absorb e" + std::to_string(i + 1);
            }
    }
    return {};
}

AffineSubmanifold annihilator_submanifold(const SubspaceSpec& s, const Chart& chart) {
    std::string why = check_subspace(s);
    if (!why.empty()) throw Error(ErrorCode::InvalidSubspace, why);
    const std::size_t n = s.algebra.dim;
    if (chart.dim() != n) throw Error(ErrorCode::ChartMismatch, "dual chart has the wrong dimension");
    RatMatrix rows(s.basis.size(), n);
    for (std::size_t r = 0; r < s.basis.size(); ++r)
        for (std::size_t c = 0; c < n; ++c) rows(r, c) = s.basis[r][c];
    std::vector<RatVector> dirs;
    if (s.basis.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            RatVector e(n, Rational(0));
            e[i] = 1;
            dirs.push_back(e);
        }
    } else {
        dirs = nullspace(rows);
    }
    return AffineSubmanifold("annihilator", chart, RatVector(n, Rational(0)), dirs);
}

}  // namespace kvg
