#include "vcch/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace vcch {

namespace {

NodePtr make_num(double c) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Num;
  n->value = c;
  return n;
}

NodePtr make_var(Var v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Variable;
  n->var = v;
  return n;
}

NodePtr make_bin(Node::Kind k, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

NodePtr make_pow(NodePtr a, double e) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Pow;
  n->lhs = std::move(a);
  n->value = e;
  return n;
}

NodePtr make_call(Func f, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Call;
  n->func = f;
  n->lhs = std::move(a);
  return n;
}

bool is_num(const NodePtr& n, double c) { return n->kind == Node::Kind::Num && n->value == c; }
bool is_num(const NodePtr& n) { return n->kind == Node::Kind::Num; }

// negation folds literals and double negation; the parser relies on this too so
// that printed trees read back identically
NodePtr neg(NodePtr a) {
  if (a->kind == Node::Kind::Num) return make_num(-a->value);
  if (a->kind == Node::Kind::Neg) return a->lhs;
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Neg;
  n->lhs = std::move(a);
  return n;
}

NodePtr add(NodePtr a, NodePtr b) {
  if (is_num(a) && is_num(b)) return make_num(a->value + b->value);
  if (is_num(b, 0.0)) return a;
  if (is_num(a, 0.0)) return b;
  return make_bin(Node::Kind::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_num(a) && is_num(b)) return make_num(a->value - b->value);
  if (is_num(b, 0.0)) return a;
  if (is_num(a, 0.0)) return neg(std::move(b));
  return make_bin(Node::Kind::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_num(a) && is_num(b)) return make_num(a->value * b->value);
  if (is_num(a, 0.0) || is_num(b, 0.0)) return make_num(0.0);
  if (is_num(a, 1.0)) return b;
  if (is_num(b, 1.0)) return a;
  if (is_num(a, -1.0)) return neg(std::move(b));
  if (is_num(b, -1.0)) return neg(std::move(a));
  return make_bin(Node::Kind::Mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
  if (is_num(a) && is_num(b) && b->value != 0.0) return make_num(a->value / b->value);
  if (is_num(a, 0.0)) return make_num(0.0);
  if (is_num(b, 1.0)) return a;
  return make_bin(Node::Kind::Div, std::move(a), std::move(b));
}

NodePtr powr(NodePtr a, double e) {
  if (e == 0.0) return make_num(1.0);
  if (e == 1.0) return a;
  if (is_num(a)) {
    double v = std::pow(a->value, e);
    if (std::isfinite(v)) return make_num(v);
  }
  return make_pow(std::move(a), e);
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
  return v;
}

double eval_node(const Node& n, double x, double t) {
  using K = Node::Kind;
  switch (n.kind) {
    case K::Num: return n.value;
    case K::Variable: return n.var == Var::X ? x : t;
    case K::Add: return eval_node(*n.lhs, x, t) + eval_node(*n.rhs, x, t);
    case K::Sub: return eval_node(*n.lhs, x, t) - eval_node(*n.rhs, x, t);
    case K::Mul: return eval_node(*n.lhs, x, t) * eval_node(*n.rhs, x, t);
    case K::Div: {
      double d = eval_node(*n.rhs, x, t);
      if (d == 0.0) throw DomainError("division by zero");
      return eval_node(*n.lhs, x, t) / d;
    }
    case K::Pow: {
      double b = eval_node(*n.lhs, x, t);
      if (b == 0.0 && n.value < 0.0) throw DomainError("zero raised to a negative power");
      return checked(std::pow(b, n.value), "power");
    }
    case K::Neg: return -eval_node(*n.lhs, x, t);
    case K::Call: {
      double u = eval_node(*n.lhs, x, t);
      switch (n.func) {
        case Func::Exp: return checked(std::exp(u), "exp");
        case Func::Ln:
          if (u <= 0.0) throw DomainError("ln of non-positive argument");
          return std::log(u);
        case Func::Sqrt:
          if (u < 0.0) throw DomainError("sqrt of negative argument");
          return std::sqrt(u);
        case Func::Sinh: return checked(std::sinh(u), "sinh");
        case Func::Cosh: return checked(std::cosh(u), "cosh");
        case Func::Tanh: return std::tanh(u);
        case Func::Atanh:
          if (std::fabs(u) >= 1.0) throw DomainError("atanh argument outside (-1,1)");
          return std::atanh(u);
        case Func::Abs: return std::fabs(u);
        case Func::Sign: return u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
      }
    }
  }
  return 0.0;
}

NodePtr diff_node(const NodePtr& n, Var v) {
  using K = Node::Kind;
  switch (n->kind) {
    case K::Num: return make_num(0.0);
    case K::Variable: return make_num(n->var == v ? 1.0 : 0.0);
    case K::Add: return add(diff_node(n->lhs, v), diff_node(n->rhs, v));
    case K::Sub: return sub(diff_node(n->lhs, v), diff_node(n->rhs, v));
    case K::Mul:
      return add(mul(diff_node(n->lhs, v), n->rhs), mul(n->lhs, diff_node(n->rhs, v)));
    case K::Div: {
      // (a/b)' = a'/b - a b'/b^2
      auto da = diff_node(n->lhs, v);
      auto db = diff_node(n->rhs, v);
      return sub(div(da, n->rhs), div(mul(n->lhs, db), powr(n->rhs, 2.0)));
    }
    case K::Pow:
      return mul(mul(make_num(n->value), powr(n->lhs, n->value - 1.0)), diff_node(n->lhs, v));
    case K::Neg: return neg(diff_node(n->lhs, v));
    case K::Call: {
      const NodePtr& u = n->lhs;
      auto du = diff_node(u, v);
      if (is_num(du, 0.0)) return make_num(0.0);
      switch (n->func) {
        case Func::Exp: return mul(n, du);
        case Func::Ln: return div(du, u);
        case Func::Sqrt: return div(du, mul(make_num(2.0), n));
        case Func::Sinh: return mul(make_call(Func::Cosh, u), du);
        case Func::Cosh: return mul(make_call(Func::Sinh, u), du);
        case Func::Tanh: return mul(sub(make_num(1.0), powr(n, 2.0)), du);
        case Func::Atanh: return div(du, sub(make_num(1.0), powr(u, 2.0)));
        // u/|u| rather than sign(u): evaluating at the kink divides by zero
        // and is reported instead of silently returning 0
        case Func::Abs: return mul(div(u, n), du);
        case Func::Sign: return make_num(0.0);
      }
    }
  }
  return make_num(0.0);
}

bool equal_nodes(const Node& a, const Node& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind) return false;
  using K = Node::Kind;
  switch (a.kind) {
    case K::Num: return a.value == b.value;
    case K::Variable: return a.var == b.var;
    case K::Pow: return a.value == b.value && equal_nodes(*a.lhs, *b.lhs);
    case K::Neg: return equal_nodes(*a.lhs, *b.lhs);
    case K::Call: return a.func == b.func && equal_nodes(*a.lhs, *b.lhs);
    default: return equal_nodes(*a.lhs, *b.lhs) && equal_nodes(*a.rhs, *b.rhs);
  }
}

bool contains_var(const Node& n, Var v) {
  switch (n.kind) {
    case Node::Kind::Num: return false;
    case Node::Kind::Variable: return n.var == v;
    default:
      return (n.lhs && contains_var(*n.lhs, v)) || (n.rhs && contains_var(*n.rhs, v));
  }
}

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// precedence levels used by the printer: 1 sum, 2 product, 3 power, 4 atom
int level(const Node& n) {
  using K = Node::Kind;
  switch (n.kind) {
    case K::Add:
    case K::Sub: return 1;
    case K::Mul:
    case K::Div: return 2;
    case K::Pow: return 3;
    default: return 4;
  }
}

std::string print_node(const Node& n);

std::string print_at(const Node& n, int min_level) {
  std::string s = print_node(n);
  if (level(n) < min_level) return "(" + s + ")";
  return s;
}

std::string print_node(const Node& n) {
  using K = Node::Kind;
  switch (n.kind) {
    case K::Num: return fmt_num(n.value);
    case K::Variable: return n.var == Var::X ? "x" : "t";
    case K::Add: return print_at(*n.lhs, 1) + " + " + print_at(*n.rhs, 2);
    case K::Sub: return print_at(*n.lhs, 1) + " - " + print_at(*n.rhs, 2);
    case K::Mul: return print_at(*n.lhs, 2) + "*" + print_at(*n.rhs, 3);
    case K::Div: return print_at(*n.lhs, 2) + "/" + print_at(*n.rhs, 3);
    case K::Pow: return print_at(*n.lhs, 4) + "^" + fmt_num(n.value);
    case K::Neg: return "-" + print_at(*n.lhs, 4);
    case K::Call: return std::string(func_name(n.func)) + "(" + print_node(*n.lhs) + ")";
  }
  return "";
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    auto e = expr();
    skip_ws();
    if (pos_ < s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    return e;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  NodePtr expr() {
    auto lhs = term();
    while (true) {
      if (peek('+')) {
        ++pos_;
        lhs = make_bin(Node::Kind::Add, lhs, term());
      } else if (peek('-')) {
        ++pos_;
        lhs = make_bin(Node::Kind::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    auto lhs = factor();
    while (true) {
      if (peek('*')) {
        ++pos_;
        lhs = make_bin(Node::Kind::Mul, lhs, factor());
      } else if (peek('/')) {
        ++pos_;
        lhs = make_bin(Node::Kind::Div, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    auto b = base();
    if (peek('^')) {
      ++pos_;
      skip_ws();
      double sign = 1.0;
      if (pos_ < s_.size() && s_[pos_] == '-') {
        sign = -1.0;
        ++pos_;
      }
      skip_ws();
      if (pos_ >= s_.size() || !(std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
        throw ParseError("exponent must be a number", pos_);
      b = make_pow(b, sign * number());
    }
    return b;
  }

  double number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("malformed number", pos_);
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  NodePtr base() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    char c = s_[pos_];
    if (c == '-') {
      ++pos_;
      return neg(base());
    }
    if (c == '(') {
      ++pos_;
      auto e = expr();
      if (!peek(')')) throw ParseError("expected ')'", pos_);
      ++pos_;
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return make_num(number());
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      if (id == "x" || id == "t") {
        if (peek('(')) throw ParseError("'" + id + "' is a variable, not a function", pos_);
        return make_var(id == "x" ? Var::X : Var::T);
      }
      static const std::pair<const char*, Func> table[] = {
          {"exp", Func::Exp},   {"ln", Func::Ln},       {"sqrt", Func::Sqrt},
          {"sinh", Func::Sinh}, {"cosh", Func::Cosh},   {"tanh", Func::Tanh},
          {"atanh", Func::Atanh}, {"abs", Func::Abs},   {"sign", Func::Sign}};
      for (const auto& [name, f] : table) {
        if (id == name) {
          if (!peek('(')) throw ParseError("expected '(' after " + id, pos_);
          ++pos_;
          auto arg = expr();
          if (peek(',')) throw ParseError("function " + id + " takes exactly one argument", pos_);
          if (!peek(')')) throw ParseError("expected ')'", pos_);
          ++pos_;
          return make_call(f, arg);
        }
      }
      throw ParseError("unknown identifier '" + id + "'", start);
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }
};

}  // namespace

const char* func_name(Func f) {
  switch (f) {
    case Func::Exp: return "exp";
    case Func::Ln: return "ln";
    case Func::Sqrt: return "sqrt";
    case Func::Sinh: return "sinh";
    case Func::Cosh: return "cosh";
    case Func::Tanh: return "tanh";
    case Func::Atanh: return "atanh";
    case Func::Abs: return "abs";
    case Func::Sign: return "sign";
  }
  return "?";
}

Expression::Expression() : root_(make_num(0.0)) {}

Expression Expression::constant(double c) { return Expression(make_num(c)); }
Expression Expression::variable(Var v) { return Expression(make_var(v)); }

double Expression::eval(double x, double t) const { return eval_node(*root_, x, t); }

Expression Expression::diff(Var v) const { return Expression(diff_node(root_, v)); }

std::string Expression::str() const { return print_node(*root_); }

bool Expression::is_constant() const {
  return !contains_var(*root_, Var::X) && !contains_var(*root_, Var::T);
}

bool Expression::independent_of(Var v) const { return !contains_var(*root_, v); }

bool operator==(const Expression& a, const Expression& b) {
  return equal_nodes(*a.root_, *b.root_);
}

Expression parse_expression(const std::string& text) { return Expression(Parser(text).parse()); }

Expression operator+(const Expression& a, const Expression& b) { return Expression(add(a.root(), b.root())); }
Expression operator-(const Expression& a, const Expression& b) { return Expression(sub(a.root(), b.root())); }
Expression operator*(const Expression& a, const Expression& b) { return Expression(mul(a.root(), b.root())); }
Expression operator/(const Expression& a, const Expression& b) { return Expression(div(a.root(), b.root())); }
Expression operator-(const Expression& a) { return Expression(neg(a.root())); }
Expression pow(const Expression& a, double n) { return Expression(powr(a.root(), n)); }
Expression call(Func f, const Expression& a) { return Expression(make_call(f, a.root())); }

}  // namespace vcch
