#pragma once

#include "kvg/geometry.hpp"

namespace kvg {

/// TM over an affine chart: base coordinates x_i followed by fiber coordinates u_i.
/// With zero Christoffel symbols H(M) is spanned by the ∂x_i and V(M) by the ∂u_i.
struct TangentChart {
    Chart base;
    std::vector<std::string> fiber;
    Chart total;

    TangentChart() = default;
    explicit TangentChart(const Chart& base);
    std::size_t n() const { return base.dim(); }
};

VectorField vertical_lift(const TangentChart& tc, const VectorField& x);
VectorField horizontal_lift(const TangentChart& tc, const VectorField& x);
OneForm vertical_lift(const TangentChart& tc, const OneForm& a);
OneForm horizontal_lift(const TangentChart& tc, const OneForm& a);
/// f∘p as a function on TM.
ScalarField lift(const TangentChart& tc, const ScalarField& f);

/// J(∂x_i) = ∂u_i, J(∂u_i) = -∂x_i, extended linearly.
VectorField sasaki_J(const TangentChart& tc, const VectorField& v);
/// Sasaki connection: flat derivative in the (x, u) coordinates.
VectorField sasaki_nabla(const VectorField& w, const VectorField& v);

class SkewBivector {
public:
    SkewBivector() = default;
    /// Validates shape and antisymmetry.
    SkewBivector(TangentChart chart, ExprMatrix entries);

    const TangentChart& chart() const { return chart_; }
    const ExprMatrix& matrix() const { return entries_; }
    const Expr& operator()(std::size_t a, std::size_t b) const { return entries_(a, b); }

private:
    TangentChart chart_;
    ExprMatrix entries_;
};

/// Π(dx_i, du_j) = h_ij(x) = -Π(du_j, dx_i); the other blocks vanish.
SkewBivector build_pi(const SymBivector& h);
/// (Π_#(a))_b = sum_c a_c Π(c, b).
VectorField pi_sharp(const SkewBivector& pi, const OneForm& a);
/// Jacobiator over all 2n coordinates; Π is Poisson iff it vanishes.
TrilinearForm schouten_jacobi(const SkewBivector& pi);

struct LiftReport {
    bool vertical_is_hamiltonian = false;  // X_f^v = Π_#(d(f∘p))
    ExprMatrix lie_pi;                     // ℒ_{X_f^h} Π, 2n x 2n
    bool lie_pi_zero = false;
    bool block_formula_holds = false;      // fiber-base block equals the E residual, other blocks vanish
    bool in_E = false;
    bool agrees() const { return vertical_is_hamiltonian && block_formula_holds && lie_pi_zero == in_E; }
};

LiftReport lift_propositions_check(const SymBivector& h, const ScalarField& f);

}  // namespace kvg
