#pragma once

#include "kvg/structures.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace kvg {

/// Commutative associative algebra with a scalar 2-cocycle; all indices 0-based.
struct AlgebraSpec {
    std::size_t dim = 0;
    /// constants[i][j][k] = C^k_ij, e_i e_j = sum_k C^k_ij e_k.
    std::vector<std::vector<RatVector>> constants;
    RatMatrix cocycle;

    AlgebraSpec() = default;
    explicit AlgebraSpec(std::size_t n);

    Rational& c(std::size_t i, std::size_t j, std::size_t k) { return constants[i][j][k]; }
    const Rational& c(std::size_t i, std::size_t j, std::size_t k) const { return constants[i][j][k]; }
    RatVector multiply(const RatVector& u, const RatVector& v) const;

    friend bool operator==(const AlgebraSpec&, const AlgebraSpec&) = default;
};

struct AlgebraReport {
    bool commutative = true;
    bool associative = true;
    bool cocycle_symmetric = true;
    bool cocycle = true;
    /// First failing basis triple (1-based), and which property failed.
    std::optional<std::array<std::size_t, 3>> witness;
    std::string failure;
    bool valid() const { return commutative && associative && cocycle_symmetric && cocycle; }
};

AlgebraReport validate_algebra(const AlgebraSpec& a);

/// Dual coordinates: x, y, z up to dimension 3, x1..xn beyond.
Chart dual_chart(const AlgebraSpec& a, const std::string& name = "Astar");

/// h(dx_i, dx_j) = b_ij + sum_k C^k_ij x_k. Throws InvalidAlgebra.
SymBivector algebra_to_kv(const AlgebraSpec& a, const Chart& chart);
SymBivector algebra_to_kv(const AlgebraSpec& a);

enum class SubspaceKind { Subalgebra, Ideal };

struct SubspaceSpec {
    AlgebraSpec algebra;
    std::vector<RatVector> basis;
    SubspaceKind kind = SubspaceKind::Subalgebra;
};

/// Empty string when S is a valid subalgebra / ideal, otherwise the reason.
std::string check_subspace(const SubspaceSpec& s);

/// S° = {a : a|_S = 0} through the origin of the dual chart. Throws InvalidSubspace.
AffineSubmanifold annihilator_submanifold(const SubspaceSpec& s, const Chart& chart);

}  // namespace kvg
