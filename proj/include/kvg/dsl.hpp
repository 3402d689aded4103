#pragma once

#include "kvg/algebra.hpp"
#include "kvg/structures.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace kvg {

/// Source position of a declaration or check. Ignored by equality so that
/// parse(serialize(s)) == s holds.
struct SourcePos {
    int line = 0;
    int column = 0;
    friend bool operator==(const SourcePos&, const SourcePos&) { return true; }
};

using ExprRows = std::vector<std::vector<Expr>>;
using RatRows = std::vector<RatVector>;

struct ManifoldDecl {
    std::string name;
    long dim = 0;
    std::vector<std::string> coords;
    SourcePos pos;
    friend bool operator==(const ManifoldDecl&, const ManifoldDecl&) = default;
};

/// Either explicit rows (full square, or upper triangle of lengths n, n-1, ..., 1)
/// or the dual structure of a declared algebra.
struct BivectorDecl {
    std::string name;
    std::string chart;
    ExprRows rows;
    std::optional<std::string> from_algebra;
    SourcePos pos;
    friend bool operator==(const BivectorDecl&, const BivectorDecl&) = default;
};

struct ScalarDecl {
    std::string name;
    std::string chart;
    Expr value;
    SourcePos pos;
    friend bool operator==(const ScalarDecl&, const ScalarDecl&) = default;
};

struct MapDecl {
    std::string name;
    std::string source;
    std::string target;
    RatRows matrix;
    RatVector offset;
    SourcePos pos;
    friend bool operator==(const MapDecl&, const MapDecl&) = default;
};

struct SubmanifoldDecl {
    std::string name;
    std::string chart;
    RatVector origin;
    RatRows basis;
    SourcePos pos;
    friend bool operator==(const SubmanifoldDecl&, const SubmanifoldDecl&) = default;
};

/// Indices are 1-based as written. Products are taken literally: listing (1,2,1)
/// does not imply (2,1,1).
struct AlgebraDecl {
    std::string name;
    long dim = 0;
    std::vector<std::pair<std::array<long, 3>, Rational>> product;
    std::vector<std::pair<std::array<long, 2>, Rational>> cocycle;
    SourcePos pos;
    friend bool operator==(const AlgebraDecl&, const AlgebraDecl&) = default;
};

using Declaration = std::variant<ManifoldDecl, BivectorDecl, ScalarDecl, MapDecl, SubmanifoldDecl, AlgebraDecl>;

const std::string& declaration_name(const Declaration& d);
SourcePos declaration_pos(const Declaration& d);

enum class Expectation { Pass, Fail, PointwisePass, Unsupported };
std::string to_string(Expectation e);

struct CheckOptions {
    std::optional<long> samples;
    std::optional<long> seed;
    std::optional<RatRows> points;
    std::optional<RatVector> point;
    std::optional<RatRows> basis;
    std::optional<SubspaceKind> kind;
    std::optional<Expectation> expect;
    std::optional<std::string> label;
    std::optional<long> value;
    std::optional<ExprRows> equals;
    friend bool operator==(const CheckOptions&, const CheckOptions&) = default;
};

struct CheckDecl {
    std::string kind;
    std::vector<std::string> args;
    CheckOptions options;
    SourcePos pos;
    friend bool operator==(const CheckDecl&, const CheckDecl&) = default;
};

struct Scenario {
    std::vector<Declaration> declarations;
    std::vector<CheckDecl> checks;
    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Square matrix from full rows or an upper triangle; nullopt on any other shape.
std::optional<ExprMatrix> square_from_rows(const ExprRows& rows, std::size_t n);

/// Every check kind the language accepts.
const std::vector<std::string>& check_kinds();

/// Syntax only; throws ParseError with a 1-based position.
Scenario parse_scenario(std::string_view text);

/// Canonical text: declarations first, then checks, one per line.
std::string serialize(const Scenario& s);

/// Resolved objects of a scenario.
struct Model {
    std::map<std::string, Chart> charts;
    std::map<std::string, SymBivector> bivectors;
    std::map<std::string, ScalarField> scalars;
    std::map<std::string, AffineMap> maps;
    std::map<std::string, AffineSubmanifold> submanifolds;
    std::map<std::string, AlgebraSpec> algebras;
};

/// Resolves names and validates shapes, symmetry, charts and check signatures.
/// Throws SemanticError positioned at the offending declaration or check.
Model build_model(const Scenario& s);

}  // namespace kvg
