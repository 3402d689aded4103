#pragma once

#include "kvg/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kvg {

/// F(x) = M x + c between two affine charts.
struct AffineMap {
    Chart source;
    Chart target;
    RatMatrix matrix;  // target.dim() x source.dim()
    RatVector offset;  // target.dim()

    AffineMap() = default;
    /// Throws Semantic error on inconsistent shapes.
    AffineMap(Chart source, Chart target, RatMatrix matrix, RatVector offset);

    /// target coordinate ↦ (M x + c) as an Expr in the source coordinates.
    Bindings bindings() const;
    /// g∘F for g on the target chart.
    Expr compose(const Expr& g) const;
    RatVector apply(const RatVector& x) const;
};

AffineMap identity_map(const Chart& c);
/// G∘F. Throws ChartMismatch unless F.target = G.source.
AffineMap compose(const AffineMap& g, const AffineMap& f);

/// (F^*a)_i = sum_j a_j(F(x)) M_ji.
OneForm pullback(const AffineMap& f, const OneForm& a);
/// M X(x) = Y(F(x)) componentwise.
bool are_F_related(const AffineMap& f, const VectorField& x, const VectorField& y);

/// M H1(x) Mᵀ - H2(F(x)); zero iff F is a K-V map.
ExprMatrix kv_map_residual(const AffineMap& f, const SymBivector& h1, const SymBivector& h2);
bool is_kv_map(const AffineMap& f, const SymBivector& h1, const SymBivector& h2);

struct Theorem1Report {
    bool kv_map = false;          // (i)
    bool tangent_poisson = false; // (ii) TF is a Poisson map
    bool sharp_related = false;   // (iii) on coordinate forms
    bool hamiltonian_related = false;  // (iv) on the test functions
    bool agree() const {
        return kv_map == tangent_poisson && kv_map == sharp_related && kv_map == hamiltonian_related;
    }
};

/// Test functions for (iv) are the target coordinates, their pairwise products, and `extra`.
Theorem1Report theorem1_equivalences(const AffineMap& f, const SymBivector& h1, const SymBivector& h2,
                                     const std::vector<Expr>& extra = {});

struct ProductStructure {
    SymBivector h;
    AffineMap p1;
    AffineMap p2;
    /// Names given to the second factor's coordinates (renamed with "_2" on collision).
    std::vector<std::string> second_coords;
};

/// [H1 0; 0 sign*H2] on M1 x M2. sign = -1 builds M1 x M̄2.
ProductStructure product_kv(const SymBivector& h1, const SymBivector& h2, int sign = 1);

/// origin + span(basis) inside an affine chart.
struct AffineSubmanifold {
    std::string name;
    Chart ambient;
    RatVector origin;
    std::vector<RatVector> basis;

    AffineSubmanifold() = default;
    /// Throws DegenerateBasis on dependent vectors, Semantic error on shape problems.
    AffineSubmanifold(std::string name, Chart ambient, RatVector origin, std::vector<RatVector> basis);

    std::size_t k() const { return basis.size(); }
    std::size_t n() const { return ambient.dim(); }
    /// origin + sum_i t_i basis_i.
    RatVector at(const RatVector& t) const;
    bool contains(const RatVector& x) const;
};

/// Intersection of two affine submanifolds of the same chart; nullopt when empty.
std::optional<AffineSubmanifold> intersect(const AffineSubmanifold& a, const AffineSubmanifold& b);

/// y = P^{-1}(x - origin), where the first k columns of P are the basis of N.
/// In y coordinates N is {w_1 = ... = w_{n-k} = 0}.
struct AdaptedFrame {
    AffineSubmanifold sub;
    RatMatrix change;   // P
    RatMatrix inverse;  // P^{-1}
    Chart adapted;      // t_1..t_k, w_1..w_{n-k}; the ambient names when P = I and origin = 0
    std::optional<Chart> tangent;  // t_1..t_k, absent when k = 0

    /// ambient coordinate ↦ origin + P y.
    Bindings to_ambient() const;
    /// w ↦ 0, keeping t.
    Bindings onto_sub() const;
    /// P^{-1} H(origin + P y) P^{-T}.
    ExprMatrix transform(const SymBivector& h) const;
    /// e(t, w = 0).
    Expr restrict(const Expr& e) const;
    ExprMatrix restrict(const ExprMatrix& m) const;
};

AdaptedFrame adapted_frame(const AffineSubmanifold& n);

struct SubmanifoldReport {
    bool holds = false;
    bool ambient_kv = false;
    ExprMatrix residual;                // conormal rows of the adapted matrix on N
    std::optional<SymBivector> induced; // when holds and k > 0
};

SubmanifoldReport is_kv_submanifold(const AffineSubmanifold& n, const SymBivector& h);

enum class TransversalVerdict { SymbolicTrue, PointwiseTrue, False };
std::string to_string(TransversalVerdict v);

struct TransversalReport {
    TransversalVerdict verdict = TransversalVerdict::False;
    bool ambient_kv = false;
    Expr det_d;                          // det D on N, in tangent coordinates
    std::vector<RatVector> singular;     // tangent-coordinate samples where D is singular
    std::vector<RatVector> checked;      // samples actually tested
    std::optional<SymBivector> induced;  // A - B D^{-1} Bᵀ on N, when D is generically invertible and k > 0
};

/// Samples are tangent coordinates of N (length k each).
TransversalReport is_transversal(const AffineSubmanifold& n, const SymBivector& h,
                                 const std::vector<RatVector>& samples);

struct CoisotropicReport {
    bool holds = false;
    ExprMatrix residual;  // D on N
};

CoisotropicReport is_coisotropic(const AffineSubmanifold& n, const SymBivector& h);

/// (TN°, •, ρ) with α•β = D_α β on conormal forms dw_a.
struct ConormalAlgebroid {
    AdaptedFrame frame;
    std::size_t rank = 0;  // n - k
    /// structure[a][b][c]: coefficient of dw_c in dw_a • dw_b, functions of t.
    std::vector<std::vector<std::vector<Expr>>> structure;
    /// anchor(a, j): component along ∂t_j of ρ(dw_a).
    ExprMatrix anchor;
    bool closed = false;
    bool left_symmetric = false;
    bool anchor_compatible = false;

    struct Fiber {
        RatVector point;                // tangent coordinates of x
        std::vector<RatVector> basis;   // basis of ker ρ_x in the dw coordinates
        bool closed = false;
        bool commutative = false;
        bool associative = false;
    };
    std::optional<Fiber> fiber;
};

/// Section product with Leibniz rule in the second slot; sections are coefficient vectors in dw.
std::vector<Expr> conormal_product(const ConormalAlgebroid& c, const std::vector<Expr>& a, const std::vector<Expr>& b);

/// Throws NotCoisotropic, or ClosureFailure if the product leaves TN°.
/// The fiber algebra is examined at `fiber_point` (tangent coordinates; default the origin of N).
ConormalAlgebroid conormal_algebroid(const AffineSubmanifold& n, const SymBivector& h,
                                     std::optional<RatVector> fiber_point = std::nullopt);

struct GraphReport {
    ProductStructure product;
    AffineSubmanifold graph;
    bool coisotropic = false;
    bool kv_map = false;
    bool agree() const { return coisotropic == kv_map; }
};

GraphReport graph_check(const AffineMap& f, const SymBivector& h1, const SymBivector& h2);

struct PreimageReport {
    TransversalReport target;       // N2 in M2
    AffineSubmanifold preimage;     // N1 = F^{-1}(N2)
    TransversalReport source;       // N1 in M1
    std::optional<AffineMap> restriction;  // F|: N1 -> N2 in tangent coordinates
    bool restriction_kv = false;
    ExprMatrix restriction_residual;
};

/// Requires is_kv_map; throws PreconditionViolated otherwise, NotTransverseAtSample when
/// Im(M) + TN2 is not the whole target, and InvalidSubspace when the preimage is empty.
PreimageReport preimage_transversal(const AffineMap& f, const SymBivector& h1, const SymBivector& h2,
                                    const AffineSubmanifold& n2, const std::vector<RatVector>& samples1,
                                    const std::vector<RatVector>& samples2);

struct LeafPoint {
    RatVector point;  // ambient
    std::size_t rank = 0;
    bool contained = false;  // Im h_#(x) ⊆ T_x N
};

/// Points are tangent coordinates of N.
std::vector<LeafPoint> leaf_openness_check(const AffineSubmanifold& n, const SymBivector& h,
                                           const std::vector<RatVector>& points);

}  // namespace kvg
