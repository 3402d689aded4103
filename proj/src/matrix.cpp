#include "kvg/matrix.hpp"

#include "kvg/errors.hpp"

namespace kvg {

std::vector<std::size_t> rref(RatMatrix& m) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        std::size_t p = row;
        while (p < m.rows() && m(p, col) == 0) ++p;
        if (p == m.rows()) continue;
        if (p != row)
            for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(p, c), m(row, c));
        Rational inv = 1 / m(row, col);
        for (std::size_t c = 0; c < m.cols(); ++c) m(row, c) *= inv;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r == row || m(r, col) == 0) continue;
            Rational f = m(r, col);
            for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) -= f * m(row, c);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

std::size_t rank(RatMatrix m) { return rref(m).size(); }

std::optional<RatMatrix> inverse(const RatMatrix& m) {
    const std::size_t n = m.rows();
    if (m.cols() != n) return std::nullopt;
    RatMatrix aug(n, 2 * n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) aug(r, c) = m(r, c);
        aug(r, n + r) = 1;
    }
    auto pivots = rref(aug);
    if (pivots.size() < n || (n > 0 && pivots[n - 1] != n - 1)) return std::nullopt;
    return aug.block(0, n, n, n);
}

std::vector<RatVector> nullspace(const RatMatrix& m) {
    RatMatrix r = m;
    auto pivots = rref(r);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<RatVector> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        RatVector v(m.cols(), Rational(0));
        v[free] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -r(i, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<RatVector> solve(const RatMatrix& m, const RatVector& b) {
    RatMatrix aug(m.rows(), m.cols() + 1);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) aug(r, c) = m(r, c);
        aug(r, m.cols()) = b[r];
    }
    auto pivots = rref(aug);
    if (!pivots.empty() && pivots.back() == m.cols()) return std::nullopt;
    RatVector x(m.cols(), Rational(0));
    for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = aug(i, m.cols());
    return x;
}

RatMatrix columns_to_matrix(const std::vector<RatVector>& cols, std::size_t n) {
    RatMatrix m(n, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (std::size_t r = 0; r < n; ++r) m(r, c) = cols[c][r];
    return m;
}

ExprMatrix to_expr(const RatMatrix& m) {
    ExprMatrix e(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = Expr(m(r, c));
    return e;
}

namespace {

// Gauss-Jordan on [m | rhs] over the rational function field. Returns the determinant.
Expr eliminate(ExprMatrix& m, ExprMatrix* rhs) {
    const std::size_t n = m.rows();
    Expr det(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t p = col;
        while (p < n && m(p, col).is_zero()) ++p;
        if (p == n) return Expr(0);
        if (p != col) {
            det = -det;
            for (std::size_t c = 0; c < n; ++c) std::swap(m(p, c), m(col, c));
            if (rhs)
                for (std::size_t c = 0; c < rhs->cols(); ++c) std::swap((*rhs)(p, c), (*rhs)(col, c));
        }
        Expr pivot = m(col, col);
        det *= pivot;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || m(r, col).is_zero()) continue;
            if (!rhs && r < col) continue;
            Expr f = m(r, col) / pivot;
            for (std::size_t c = col; c < n; ++c) m(r, c) -= f * m(col, c);
            if (rhs)
                for (std::size_t c = 0; c < rhs->cols(); ++c) (*rhs)(r, c) -= f * (*rhs)(col, c);
        }
        if (rhs) {
            for (std::size_t c = col; c < n; ++c) m(col, c) /= pivot;
            for (std::size_t c = 0; c < rhs->cols(); ++c) (*rhs)(col, c) /= pivot;
        }
    }
    return det;
}

}  // namespace

Expr determinant(const ExprMatrix& m) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::PreconditionViolated, "determinant of a non-square matrix");
    if (m.rows() == 0) return Expr(1);
    ExprMatrix w = m;
    return eliminate(w, nullptr);
}

std::optional<ExprMatrix> inverse(const ExprMatrix& m) {
    if (m.rows() != m.cols()) return std::nullopt;
    ExprMatrix w = m;
    ExprMatrix inv = ExprMatrix::identity(m.rows());
    if (m.rows() == 0) return inv;
    if (eliminate(w, &inv).is_zero()) return std::nullopt;
    return inv;
}

RatMatrix eval_at(const ExprMatrix& m, const Point& p) {
    RatMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = eval_at(m(i, j), p);
    return r;
}

bool is_zero(const ExprMatrix& m) {
    for (const auto& e : m.data())
        if (!e.is_zero()) return false;
    return true;
}

}  // namespace kvg
