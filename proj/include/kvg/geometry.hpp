#pragma once

#include "kvg/expr.hpp"
#include "kvg/matrix.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace kvg {

/// Affine coordinate patch. The connection is the canonical flat one: all Christoffel symbols vanish.
struct Chart {
    std::string name;
    std::vector<std::string> coords;

    Chart() = default;
    /// Throws Semantic error on empty or repeated coordinate names.
    Chart(std::string name, std::vector<std::string> coords);

    std::size_t dim() const { return coords.size(); }
    /// Maps coordinate values to a Point keyed by coordinate names.
    Point point(const RatVector& values) const;

    friend bool operator==(const Chart& a, const Chart& b) { return a.coords == b.coords; }
};

/// Throws ChartMismatch unless both charts have the same coordinates.
void require_same_chart(const Chart& a, const Chart& b, const char* op);
/// Throws ChartMismatch if e uses a variable outside the chart.
void require_on_chart(const Expr& e, const Chart& c, const char* what);

struct ScalarField {
    Chart chart;
    Expr value;
};

struct OneForm {
    Chart chart;
    std::vector<Expr> components;
};

struct VectorField {
    Chart chart;
    std::vector<Expr> components;
};

/// Symmetric contravariant 2-tensor h with h(i, j) = h(dx_i, dx_j).
class SymBivector {
public:
    SymBivector() = default;
    /// Validates shape, symmetry (as canonical Exprs) and that entries live on the chart.
    SymBivector(Chart chart, ExprMatrix entries);

    const Chart& chart() const { return chart_; }
    std::size_t dim() const { return chart_.dim(); }
    const Expr& operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
    const ExprMatrix& matrix() const { return entries_; }

    friend bool operator==(const SymBivector& a, const SymBivector& b) {
        return a.chart_ == b.chart_ && a.entries_ == b.entries_;
    }

private:
    Chart chart_;
    ExprMatrix entries_;
};

/// n x n x n table of Exprs indexed (i, j, k), 0-based.
class TrilinearForm {
public:
    TrilinearForm() = default;
    explicit TrilinearForm(std::size_t n) : n_(n), entries_(n * n * n) {}

    std::size_t dim() const { return n_; }
    Expr& at(std::size_t i, std::size_t j, std::size_t k) { return entries_[(i * n_ + j) * n_ + k]; }
    const Expr& at(std::size_t i, std::size_t j, std::size_t k) const { return entries_[(i * n_ + j) * n_ + k]; }
    const std::vector<Expr>& entries() const { return entries_; }

    bool is_zero() const;
    /// First nonzero entry in lexicographic (i, j, k) order.
    std::optional<std::array<std::size_t, 3>> first_nonzero() const;

    friend bool operator==(const TrilinearForm&, const TrilinearForm&) = default;

private:
    std::size_t n_ = 0;
    std::vector<Expr> entries_;
};

// ------------------------------------------------------------ basic calculus

OneForm coordinate_form(const Chart& c, std::size_t i);
VectorField coordinate_field(const Chart& c, std::size_t i);
OneForm differential(const ScalarField& f);
/// X(f) = sum_i X_i df/dx_i.
Expr apply(const VectorField& x, const Expr& f);
Expr pairing(const OneForm& a, const VectorField& x);
/// h(a, b) = sum_ij a_i h_ij b_j.
Expr evaluate(const SymBivector& h, const OneForm& a, const OneForm& b);
/// Flat covariant derivative of a one-form: (∇_X a)_j = X(a_j).
OneForm covariant(const VectorField& x, const OneForm& a);
VectorField lie_bracket(const VectorField& x, const VectorField& y);
/// Lie derivative of any contravariant 2-tensor given as a matrix on chart c.
ExprMatrix lie_derivative_tensor(const Chart& c, const ExprMatrix& t, const VectorField& x);

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(const Expr& f, const VectorField& a);
OneForm operator+(const OneForm& a, const OneForm& b);
OneForm operator-(const OneForm& a, const OneForm& b);
OneForm operator*(const Expr& f, const OneForm& a);
bool is_zero(const VectorField& v);
bool is_zero(const OneForm& a);

// ------------------------------------------------------- K-V operators

/// (a^#)_j = sum_i a_i h_ij.
VectorField sharp(const SymBivector& h, const OneForm& a);

/// Codazzi defect T(i,j,k) = sum_l (h_il d_l h_jk - h_jl d_l h_ik). OpenMP kernel.
TrilinearForm codazzi_tensor(const SymBivector& h);
/// Straight-loop reference implementation of codazzi_tensor.
TrilinearForm codazzi_tensor_serial(const SymBivector& h);
bool is_kv(const SymBivector& h);

/// Five-term [h,h](dx_i, dx_j, dx_k) on the left-symmetric algebroid (TM, ∇, id).
TrilinearForm kv_bracket_form(const SymBivector& h);

/// [a, b]_h = ∇_{a^#} b - ∇_{b^#} a.
OneForm bracket_h(const SymBivector& h, const OneForm& a, const OneForm& b);
/// Contravariant connection: <D_a b, ∂_j> = (∇_{∂_j} h)(a, b) + <∇_{a^#} b, ∂_j>.
OneForm contravariant_D(const SymBivector& h, const OneForm& a, const OneForm& b);

/// X_f = (df)^#.
VectorField hamiltonian(const SymBivector& h, const ScalarField& f);
/// L_{X_f} h computed from the coordinate Lie derivative of a contravariant 2-tensor.
SymBivector lie_derivative_h(const SymBivector& h, const ScalarField& f);
/// L_{X_f}h(dx_i,dx_j) + ∇_{X_f}(h)(dx_i,dx_j) - 2<∇_{X_i} df, X_j>; vanishes on K-V structures.
ExprMatrix lie_derivative_residual(const SymBivector& h, const ScalarField& f);

/// R_ij = sum_{l,k} h_il h_jk d2f/dx_l dx_k; f is in E iff all vanish.
ExprMatrix in_E_residuals(const SymBivector& h, const ScalarField& f);
bool in_E(const SymBivector& h, const ScalarField& f);
/// in_E(h, h(df1, df2)). Throws PreconditionViolated if f1 or f2 is not in E.
bool special_class_check(const SymBivector& h, const ScalarField& f1, const ScalarField& f2);

/// X•Y = ∇_X Y.
VectorField left_sym_product(const VectorField& x, const VectorField& y);
VectorField associator(const VectorField& x, const VectorField& y, const VectorField& z);

/// Rank of h evaluated at p (exact elimination). Throws PoleAtPoint.
std::size_t rank_at(const SymBivector& h, const Point& p);

}  // namespace kvg
