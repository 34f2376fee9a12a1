#pragma once

// Expression language for fields, displacement maps, transitions and probe
// functions. Grammar (see docs/grammar.md):
//
//   definition := tuple | expr
//   tuple      := '(' expr { ',' expr } ')'
//   expr       := term { ('+' | '-') term }
//   term       := unary { ('*' | '/') unary }
//   unary      := '-' unary | power
//   power      := primary [ '^' unary ]          (right associative)
//   primary    := number | identifier | identifier '(' expr ')' | '(' expr ')'

#include "prevec/geometry.hpp"
#include "prevec/order.hpp"

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace prevec::dsl {

enum class Func { sin, cos, tan, exp, log, sqrt, abs, floor };
enum class BinaryOp { add, sub, mul, div, pow };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Number {
    double value;
};
/// Coordinate x_{index+1}.
struct Variable {
    int index;
};
struct Pi {};
struct Lambda {};
struct Negate {
    ExprPtr operand;
};
struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct Call {
    Func func;
    ExprPtr arg;
};

struct Expr {
    std::variant<Number, Variable, Pi, Lambda, Negate, Binary, Call> node;
};

enum class FieldKind { classical_field, displacement_map, scalar_probe, transition };

const char* to_string(FieldKind kind);
FieldKind field_kind_from_string(const std::string& name);

struct FieldDef {
    int dimension = 0;
    FieldKind kind = FieldKind::classical_field;
    std::vector<ExprPtr> components;
};

/// Parse `source` as a definition over `dimension` coordinates. Variables are
/// x1..xn, with aliases x, y, z when n <= 3. A scalar_probe has one component;
/// every other kind has `dimension` components.
///
/// Throws SyntaxError, UnknownIdentifier, ArityMismatch.
FieldDef parse(const std::string& source, int dimension, FieldKind kind);

/// Single expression (no tuple).
ExprPtr parse_expression(const std::string& source, int dimension);

/// Throws DomainError naming the failing subexpression.
double evaluate(const Expr& expr, const Vec& point, double lambda);
Vec evaluate(const FieldDef& def, const Vec& point, const Scale& scale);
Vec evaluate(const FieldDef& def, const Vec& point, double lambda);

/// Fully parenthesised source that parses back to an equivalent tree.
std::string print(const Expr& expr, int dimension);
std::string print(const FieldDef& def);

}  // namespace prevec::dsl
