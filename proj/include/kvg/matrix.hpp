#pragma once

#include "kvg/expr.hpp"
#include "kvg/rational.hpp"

#include <cassert>
#include <optional>
#include <vector>

namespace kvg {

/// Dense row-major matrix; used with Rational and Expr entries.
template <typename T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T& fill = T())
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t r, std::size_t c) {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }
    const T& operator()(std::size_t r, std::size_t c) const {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        Matrix b(nr, nc);
        for (std::size_t r = 0; r < nr; ++r)
            for (std::size_t c = 0; c < nc; ++c) b(r, c) = (*this)(r0 + r, c0 + c);
        return b;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        assert(a.cols_ == b.rows_);
        Matrix p(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                if (a(i, k) == T(0)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) p(i, j) += a(i, k) * b(k, j);
            }
        return p;
    }
    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
        Matrix d = a;
        for (std::size_t i = 0; i < d.data_.size(); ++i) d.data_[i] -= b.data_[i];
        return d;
    }
    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
        Matrix d = a;
        for (std::size_t i = 0; i < d.data_.size(); ++i) d.data_[i] += b.data_[i];
        return d;
    }
    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    const std::vector<T>& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using RatMatrix = Matrix<Rational>;
using ExprMatrix = Matrix<Expr>;
using RatVector = std::vector<Rational>;

/// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(RatMatrix& m);
std::size_t rank(RatMatrix m);
std::optional<RatMatrix> inverse(const RatMatrix& m);
/// Basis of {v : m v = 0}.
std::vector<RatVector> nullspace(const RatMatrix& m);
/// One solution of m x = b, or nullopt if inconsistent.
std::optional<RatVector> solve(const RatMatrix& m, const RatVector& b);

RatMatrix columns_to_matrix(const std::vector<RatVector>& cols, std::size_t n);

ExprMatrix to_expr(const RatMatrix& m);
/// Exact determinant by fraction-producing elimination over the rational function field.
Expr determinant(const ExprMatrix& m);
/// Inverse over the rational function field; nullopt when the determinant is identically zero.
std::optional<ExprMatrix> inverse(const ExprMatrix& m);
/// Entrywise evaluation; throws PoleAtPoint.
RatMatrix eval_at(const ExprMatrix& m, const Point& p);
bool is_zero(const ExprMatrix& m);

}  // namespace kvg
