#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "intmean/error.hpp"

namespace intmean::expr {

enum class Op { number, variable, neg, add, sub, mul, div, pow, call };

enum class Fn { ln, exp, sqrt, sin, cos, abs, min, max };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op;
  double value = 0.0;  // number
  Fn fn = Fn::ln;      // call
  std::vector<NodePtr> args;
};

/// Immutable expression tree in the single variable x.
class Expression {
 public:
  Expression() = default;
  explicit Expression(NodePtr root) : root_(std::move(root)) {}

  const Node& root() const { return *root_; }
  NodePtr root_ptr() const { return root_; }

  double operator()(double x) const;
  /// Functional rendering, e.g. Add(Exp(Neg(x)),Mul(Pow(x,2),Ln(x))).
  std::string to_string() const;
  /// Infix rendering that parse_expression accepts.
  std::string to_infix() const;

 private:
  NodePtr root_;
};

class ParseError : public Error {
 public:
  enum class Kind { lexical, syntax, unknown_identifier, arity };

  ParseError(Kind kind, std::size_t position, const std::string& message);

  Kind parse_kind() const { return kind_; }
  /// 1-based character position; one past the end for errors at end of input.
  std::size_t position() const { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

/// Grammar (whitespace-insensitive):
///   expr   := term (('+' | '-') term)*
///   term   := factor (('*' | '/') factor)*
///   factor := '-' factor | atom ('^' factor)?
///   atom   := number | 'x' | 'pi' | 'e' | fn '(' expr (',' expr)? ')' | '(' expr ')'
/// '^' is right-associative and binds tighter than unary minus: -x^2 = -(x^2).
Expression parse_expression(std::string_view text);

double eval_expression(const Expression& ast, double x);

/// Symbolic d/dx; throws on abs, min or max.
Expression derive_expression(const Expression& ast);

}  // namespace intmean::expr
