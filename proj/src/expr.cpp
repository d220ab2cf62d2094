#include "varistab/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "varistab/errors.hpp"

namespace varistab {

struct Expr::Node {
  enum class Op { Const, PVar, XVar, Neg, Add, Sub, Mul, Pow, Abs, SqrtAbs, Min, Max };
  Op op;
  double value = 0.0;
  std::size_t index = 0;
  int exponent = 0;
  std::vector<std::shared_ptr<const Node>> args;
  int degree = 0;

  double eval(const Vector& p, const Vector& x) const {
    switch (op) {
      case Op::Const: return value;
      case Op::PVar: return p[index];
      case Op::XVar: return x[index];
      case Op::Neg: return -args[0]->eval(p, x);
      case Op::Add: return args[0]->eval(p, x) + args[1]->eval(p, x);
      case Op::Sub: return args[0]->eval(p, x) - args[1]->eval(p, x);
      case Op::Mul: return args[0]->eval(p, x) * args[1]->eval(p, x);
      case Op::Pow: {
        const double b = args[0]->eval(p, x);
        double r = 1.0;
        for (int i = 0; i < exponent; ++i) r *= b;
        return r;
      }
      case Op::Abs: return std::abs(args[0]->eval(p, x));
      case Op::SqrtAbs: return std::sqrt(std::abs(args[0]->eval(p, x)));
      case Op::Min:
      case Op::Max: {
        double r = args[0]->eval(p, x);
        for (std::size_t i = 1; i < args.size(); ++i) {
          const double v = args[i]->eval(p, x);
          r = op == Op::Min ? std::min(r, v) : std::max(r, v);
        }
        return r;
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Op = Expr::Node::Op;

constexpr int kMaxDegree = 4;

NodePtr make(Op op, std::vector<NodePtr> args, int degree) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->args = std::move(args);
  n->degree = degree;
  return n;
}

class Parser {
 public:
  Parser(const std::string& s, std::size_t np, std::size_t nx) : s_(s), np_(np), nx_(nx) {}

  NodePtr parse() {
    NodePtr e = expression();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ContractViolation("expression '" + s_ + "': " + what + " at position " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr checked(NodePtr n) {
    if (n->degree > kMaxDegree) fail("polynomial degree exceeds 4");
    return n;
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        NodePtr rhs = term();
        lhs = make(Op::Add, {lhs, rhs}, std::max(lhs->degree, rhs->degree));
      } else if (accept('-')) {
        NodePtr rhs = term();
        lhs = make(Op::Sub, {lhs, rhs}, std::max(lhs->degree, rhs->degree));
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (accept('*')) {
      NodePtr rhs = unary();
      lhs = checked(make(Op::Mul, {lhs, rhs}, lhs->degree + rhs->degree));
    }
    return lhs;
  }

  NodePtr unary() {
    if (accept('-')) {
      NodePtr a = unary();
      return make(Op::Neg, {a}, a->degree);
    }
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (!accept('^')) return base;
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("exponent must be a non-negative integer");
    const int n = std::stoi(s_.substr(start, pos_ - start));
    if (n > kMaxDegree) fail("exponent exceeds 4");
    auto node = std::make_shared<Expr::Node>();
    node->op = Op::Pow;
    node->exponent = n;
    node->args = {base};
    node->degree = base->degree * n;
    return checked(node);
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (accept('(')) {
      NodePtr e = expression();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      auto n = std::make_shared<Expr::Node>();
      n->op = Op::Const;
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "abs" || name == "sqrt_abs" || name == "min" || name == "max") return call(name);
      return variable(name, start);
    }
    fail("unexpected character");
  }

  NodePtr call(const std::string& name) {
    expect('(');
    std::vector<NodePtr> args{expression()};
    while (accept(',')) args.push_back(expression());
    expect(')');
    int deg = 0;
    for (const auto& a : args) deg = std::max(deg, a->degree);
    if (name == "abs" || name == "sqrt_abs") {
      if (args.size() != 1) fail(name + " takes one argument");
      return make(name == "abs" ? Op::Abs : Op::SqrtAbs, args, deg);
    }
    if (args.size() < 2) fail(name + " takes at least two arguments");
    return make(name == "min" ? Op::Min : Op::Max, args, deg);
  }

  NodePtr variable(const std::string& name, std::size_t start) {
    const char kind = name[0];
    if ((kind != 'p' && kind != 'x') || (name.size() > 1 && !std::all_of(name.begin() + 1, name.end(), ::isdigit))) {
      pos_ = start;
      fail("unknown name '" + name + "'");
    }
    std::size_t idx = 0;
    if (name.size() > 1) {
      idx = static_cast<std::size_t>(std::stoul(name.substr(1)));
      if (idx == 0) {
        pos_ = start;
        fail("variables are numbered from 1");
      }
      --idx;
    }
    const std::size_t dim = kind == 'p' ? np_ : nx_;
    if (idx >= dim) {
      pos_ = start;
      fail("variable '" + name + "' exceeds the dimension " + std::to_string(dim));
    }
    auto n = std::make_shared<Expr::Node>();
    n->op = kind == 'p' ? Op::PVar : Op::XVar;
    n->index = idx;
    n->degree = 1;
    return n;
  }

  const std::string& s_;
  std::size_t np_, nx_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(const std::string& text, std::size_t p_dim, std::size_t x_dim) {
  Expr e;
  e.text_ = text;
  e.root_ = Parser(text, p_dim, x_dim).parse();
  return e;
}

double Expr::operator()(const Vector& p, const Vector& x) const { return root_->eval(p, x); }

int Expr::degree() const { return root_->degree; }

Matrix expr_jacobian(const std::vector<Expr>& rows, const Vector& p, const Vector& x, double h) {
  Matrix j(rows.size(), Vector(x.size(), 0.0));
  for (std::size_t c = 0; c < x.size(); ++c) {
    Vector lo = x, hi = x;
    lo[c] -= h;
    hi[c] += h;
    for (std::size_t r = 0; r < rows.size(); ++r) j[r][c] = (rows[r](p, hi) - rows[r](p, lo)) / (2.0 * h);
  }
  return j;
}

}  // namespace varistab
