#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace vcch {

// Raised for malformed input; offset is a byte position into the source text.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Raised when an expression is evaluated outside the domain of one of its functions.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Var { X, T };

enum class Func { Exp, Ln, Sqrt, Sinh, Cosh, Tanh, Atanh, Abs, Sign };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { Num, Variable, Add, Sub, Mul, Div, Pow, Neg, Call };
  Kind kind;
  double value = 0.0;  // Num literal, or the exponent for Pow
  Var var = Var::X;
  Func func = Func::Exp;
  NodePtr lhs, rhs;
};

// Immutable expression tree in x and t.  Copies share structure, so values are
// cheap to pass around and safe to evaluate from several threads.
class Expression {
 public:
  Expression();  // the constant 0
  explicit Expression(NodePtr root) : root_(std::move(root)) {}

  static Expression constant(double c);
  static Expression variable(Var v);

  double eval(double x, double t) const;
  Expression diff(Var v) const;
  std::string str() const;

  bool is_constant() const;
  // true when the tree does not contain the given variable
  bool independent_of(Var v) const;
  const NodePtr& root() const { return root_; }

  friend bool operator==(const Expression& a, const Expression& b);

 private:
  NodePtr root_;
};

Expression parse_expression(const std::string& text);

Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);
Expression pow(const Expression& a, double n);
Expression call(Func f, const Expression& a);

const char* func_name(Func f);

}  // namespace vcch
