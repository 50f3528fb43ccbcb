#include "intmean/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace intmean::expr {

namespace {

struct FnInfo {
  const char* name;
  const char* label;
  Fn fn;
  int arity;
};

constexpr FnInfo kFunctions[] = {
    {"ln", "Ln", Fn::ln, 1},     {"exp", "Exp", Fn::exp, 1}, {"sqrt", "Sqrt", Fn::sqrt, 1},
    {"sin", "Sin", Fn::sin, 1},  {"cos", "Cos", Fn::cos, 1}, {"abs", "Abs", Fn::abs, 1},
    {"min", "Min", Fn::min, 2},  {"max", "Max", Fn::max, 2},
};

const FnInfo& info(Fn fn) {
  for (const auto& f : kFunctions)
    if (f.fn == fn) return f;
  return kFunctions[0];
}

NodePtr make(Op op, std::vector<NodePtr> args = {}, double value = 0.0, Fn fn = Fn::ln) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = value;
  n->fn = fn;
  n->args = std::move(args);
  return n;
}

NodePtr number(double v) { return make(Op::number, {}, v); }
NodePtr variable() { return make(Op::variable); }
NodePtr call(Fn fn, std::vector<NodePtr> args) { return make(Op::call, std::move(args), 0.0, fn); }

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, end };

struct Token {
  Tok kind;
  std::size_t pos;  // 1-based
  double value = 0.0;
  std::string text;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    const std::size_t pos = i + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
          j = k;
        }
      }
      const std::string text(s.substr(i, j - i));
      if (text == ".") throw ParseError(ParseError::Kind::lexical, pos, "malformed number '.'");
      out.push_back({Tok::number, pos, std::stod(text), text});
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
        ++j;
      out.push_back({Tok::ident, pos, 0.0, std::string(s.substr(i, j - i))});
      i = j;
      continue;
    }
    Tok kind;
    switch (c) {
      case '+': kind = Tok::plus; break;
      case '-': kind = Tok::minus; break;
      case '*': kind = Tok::star; break;
      case '/': kind = Tok::slash; break;
      case '^': kind = Tok::caret; break;
      case '(': kind = Tok::lparen; break;
      case ')': kind = Tok::rparen; break;
      case ',': kind = Tok::comma; break;
      default:
        throw ParseError(ParseError::Kind::lexical, pos,
                         std::string("unexpected character '") + c + "'");
    }
    out.push_back({kind, pos, 0.0, std::string(1, c)});
    ++i;
  }
  out.push_back({Tok::end, s.size() + 1, 0.0, ""});
  return out;
}

// ---------------------------------------------------------------------------
// Recursive-descent parser

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  NodePtr parse() {
    NodePtr e = expr();
    if (peek().kind != Tok::end) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& next() { return toks_[i_++]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++i_;
    return true;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(ParseError::Kind::syntax, peek().pos, what);
  }
  void expect(Tok k, const char* what) {
    if (!accept(k)) fail(std::string("expected ") + what);
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept(Tok::plus)) lhs = make(Op::add, {lhs, term()});
      else if (accept(Tok::minus)) lhs = make(Op::sub, {lhs, term()});
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (accept(Tok::star)) lhs = make(Op::mul, {lhs, factor()});
      else if (accept(Tok::slash)) lhs = make(Op::div, {lhs, factor()});
      else return lhs;
    }
  }

  NodePtr factor() {
    if (accept(Tok::minus)) return make(Op::neg, {factor()});
    NodePtr base = atom();
    if (accept(Tok::caret)) return make(Op::pow, {base, factor()});
    return base;
  }

  NodePtr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::number:
        next();
        return number(t.value);
      case Tok::lparen: {
        next();
        NodePtr e = expr();
        expect(Tok::rparen, "')'");
        return e;
      }
      case Tok::ident:
        return identifier();
      case Tok::end:
        fail("expected operand");
      default:
        fail("unexpected '" + t.text + "'");
    }
  }

  NodePtr identifier() {
    const Token t = next();
    if (t.text == "x") return variable();
    if (t.text == "pi") return number(std::numbers::pi);
    if (t.text == "e") return number(std::numbers::e);
    const FnInfo* fn = nullptr;
    for (const auto& f : kFunctions)
      if (t.text == f.name) fn = &f;
    if (!fn)
      throw ParseError(ParseError::Kind::unknown_identifier, t.pos,
                       "unknown identifier '" + t.text + "'");
    expect(Tok::lparen, "'(' after function name");
    std::vector<NodePtr> args{expr()};
    while (accept(Tok::comma)) args.push_back(expr());
    if (static_cast<int>(args.size()) != fn->arity)
      throw ParseError(ParseError::Kind::arity, t.pos,
                       std::string(fn->name) + " takes " + std::to_string(fn->arity) +
                           " argument(s), got " + std::to_string(args.size()));
    expect(Tok::rparen, "')'");
    return call(fn->fn, std::move(args));
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

// ---------------------------------------------------------------------------
// Printing

std::string format_number(double v) {
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::stod(buf) == v) break;
  }
  return buf;
}

const char* label(Op op) {
  switch (op) {
    case Op::neg: return "Neg";
    case Op::add: return "Add";
    case Op::sub: return "Sub";
    case Op::mul: return "Mul";
    case Op::div: return "Div";
    case Op::pow: return "Pow";
    default: return "";
  }
}

std::string functional(const Node& n) {
  switch (n.op) {
    case Op::number: return format_number(n.value);
    case Op::variable: return "x";
    case Op::call: {
      std::string s = std::string(info(n.fn).label) + "(";
      for (std::size_t i = 0; i < n.args.size(); ++i) s += (i ? "," : "") + functional(*n.args[i]);
      return s + ")";
    }
    default: {
      std::string s = std::string(label(n.op)) + "(";
      for (std::size_t i = 0; i < n.args.size(); ++i) s += (i ? "," : "") + functional(*n.args[i]);
      return s + ")";
    }
  }
}

std::string infix(const Node& n) {
  switch (n.op) {
    case Op::number: {
      const std::string s = format_number(n.value);
      return n.value < 0 ? "(" + s + ")" : s;
    }
    case Op::variable: return "x";
    case Op::neg: return "(-" + infix(*n.args[0]) + ")";
    case Op::add: return "(" + infix(*n.args[0]) + " + " + infix(*n.args[1]) + ")";
    case Op::sub: return "(" + infix(*n.args[0]) + " - " + infix(*n.args[1]) + ")";
    case Op::mul: return "(" + infix(*n.args[0]) + " * " + infix(*n.args[1]) + ")";
    case Op::div: return "(" + infix(*n.args[0]) + " / " + infix(*n.args[1]) + ")";
    case Op::pow: return "(" + infix(*n.args[0]) + " ^ " + infix(*n.args[1]) + ")";
    case Op::call: {
      std::string s = std::string(info(n.fn).name) + "(";
      for (std::size_t i = 0; i < n.args.size(); ++i) s += (i ? ", " : "") + infix(*n.args[i]);
      return s + ")";
    }
  }
  return "";
}

// ---------------------------------------------------------------------------
// Evaluation

double eval_node(const Node& n, double x) {
  double v = 0.0;
  switch (n.op) {
    case Op::number: return n.value;
    case Op::variable: return x;
    case Op::neg: v = -eval_node(*n.args[0], x); break;
    case Op::add: v = eval_node(*n.args[0], x) + eval_node(*n.args[1], x); break;
    case Op::sub: v = eval_node(*n.args[0], x) - eval_node(*n.args[1], x); break;
    case Op::mul: v = eval_node(*n.args[0], x) * eval_node(*n.args[1], x); break;
    case Op::div: v = eval_node(*n.args[0], x) / eval_node(*n.args[1], x); break;
    case Op::pow: v = std::pow(eval_node(*n.args[0], x), eval_node(*n.args[1], x)); break;
    case Op::call: {
      const double u = eval_node(*n.args[0], x);
      switch (n.fn) {
        case Fn::ln: v = std::log(u); break;
        case Fn::exp: v = std::exp(u); break;
        case Fn::sqrt: v = std::sqrt(u); break;
        case Fn::sin: v = std::sin(u); break;
        case Fn::cos: v = std::cos(u); break;
        case Fn::abs: v = std::abs(u); break;
        case Fn::min: v = std::min(u, eval_node(*n.args[1], x)); break;
        case Fn::max: v = std::max(u, eval_node(*n.args[1], x)); break;
      }
      break;
    }
  }
  if (!std::isfinite(v)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    throw Error(ErrorKind::non_finite,
                "non-finite value in '" + infix(n) + "' at x = " + std::string(buf));
  }
  return v;
}

// ---------------------------------------------------------------------------
// Differentiation, with constant folding of the trivial cases it produces.

bool is_number(const NodePtr& n, double v) { return n->op == Op::number && n->value == v; }

bool depends_on_x(const Node& n) {
  if (n.op == Op::variable) return true;
  for (const auto& a : n.args)
    if (depends_on_x(*a)) return true;
  return false;
}

NodePtr add(NodePtr a, NodePtr b) {
  if (is_number(a, 0)) return b;
  if (is_number(b, 0)) return a;
  if (a->op == Op::number && b->op == Op::number) return number(a->value + b->value);
  return make(Op::add, {a, b});
}
NodePtr neg(NodePtr a) {
  if (a->op == Op::number) return number(-a->value);
  if (a->op == Op::neg) return a->args[0];
  return make(Op::neg, {a});
}
NodePtr sub(NodePtr a, NodePtr b) {
  if (is_number(b, 0)) return a;
  if (is_number(a, 0)) return neg(b);
  if (a->op == Op::number && b->op == Op::number) return number(a->value - b->value);
  return make(Op::sub, {a, b});
}
NodePtr mul(NodePtr a, NodePtr b) {
  if (is_number(a, 0) || is_number(b, 0)) return number(0);
  if (is_number(a, 1)) return b;
  if (is_number(b, 1)) return a;
  if (a->op == Op::number && b->op == Op::number) return number(a->value * b->value);
  return make(Op::mul, {a, b});
}
NodePtr div(NodePtr a, NodePtr b) {
  if (is_number(a, 0)) return number(0);
  if (is_number(b, 1)) return a;
  return make(Op::div, {a, b});
}
NodePtr pow(NodePtr a, NodePtr b) {
  if (is_number(b, 1)) return a;
  if (is_number(b, 0)) return number(1);
  return make(Op::pow, {a, b});
}

NodePtr derive(const NodePtr& n) {
  const auto& a = n->args;
  switch (n->op) {
    case Op::number: return number(0);
    case Op::variable: return number(1);
    case Op::neg: return neg(derive(a[0]));
    case Op::add: return add(derive(a[0]), derive(a[1]));
    case Op::sub: return sub(derive(a[0]), derive(a[1]));
    case Op::mul: return add(mul(derive(a[0]), a[1]), mul(a[0], derive(a[1])));
    case Op::div:
      return div(sub(mul(derive(a[0]), a[1]), mul(a[0], derive(a[1]))), pow(a[1], number(2)));
    case Op::pow: {
      const NodePtr &u = a[0], &v = a[1];
      if (!depends_on_x(*v))
        return mul(mul(v, pow(u, sub(v, number(1)))), derive(u));
      if (!depends_on_x(*u)) return mul(mul(n, call(Fn::ln, {u})), derive(v));
      return mul(n, add(mul(derive(v), call(Fn::ln, {u})), div(mul(v, derive(u)), u)));
    }
    case Op::call: {
      const NodePtr& u = a[0];
      switch (n->fn) {
        case Fn::ln: return div(derive(u), u);
        case Fn::exp: return mul(n, derive(u));
        case Fn::sqrt: return div(derive(u), mul(number(2), n));
        case Fn::sin: return mul(call(Fn::cos, {u}), derive(u));
        case Fn::cos: return neg(mul(call(Fn::sin, {u}), derive(u)));
        case Fn::abs:
        case Fn::min:
        case Fn::max:
          throw Error(ErrorKind::non_differentiable,
                      std::string(info(n->fn).name) + " is not differentiable");
      }
    }
  }
  return number(0);
}

}  // namespace

ParseError::ParseError(Kind kind, std::size_t position, const std::string& message)
    : Error(ErrorKind::parse,
            [&] {
              const char* what = kind == Kind::lexical              ? "lexical error"
                                 : kind == Kind::syntax             ? "syntax error"
                                 : kind == Kind::unknown_identifier ? "unknown identifier"
                                                                    : "arity mismatch";
              return std::string(what) + " at position " + std::to_string(position) + ": " +
                     message;
            }()),
      kind_(kind),
      position_(position) {}

double Expression::operator()(double x) const { return eval_node(*root_, x); }

std::string Expression::to_string() const { return functional(*root_); }

std::string Expression::to_infix() const { return infix(*root_); }

Expression parse_expression(std::string_view text) {
  Parser parser(lex(text));
  return Expression(parser.parse());
}

double eval_expression(const Expression& ast, double x) { return ast(x); }

Expression derive_expression(const Expression& ast) { return Expression(derive(ast.root_ptr())); }

}  // namespace intmean::expr
