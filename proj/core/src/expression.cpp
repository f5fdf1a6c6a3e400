#include "philab/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

namespace philab {

struct Expression::Node {
  enum class Op { Const, X1, X2, Neg, Add, Sub, Mul, Div };
  Op op = Op::Const;
  double constant = 0.0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

// Value with its gradient in (x1, x2).
struct Dual {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

Dual eval(const Node& n, const Point& x) {
  switch (n.op) {
    case Node::Op::Const: return {n.constant, 0.0, 0.0};
    case Node::Op::X1: return {x[0], 1.0, 0.0};
    case Node::Op::X2: return {x[1], 0.0, 1.0};
    case Node::Op::Neg: {
      const Dual a = eval(*n.lhs, x);
      return {-a.v, -a.d1, -a.d2};
    }
    default: break;
  }
  const Dual a = eval(*n.lhs, x);
  const Dual b = eval(*n.rhs, x);
  switch (n.op) {
    case Node::Op::Add: return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2};
    case Node::Op::Sub: return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2};
    case Node::Op::Mul: return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + a.v * b.d2};
    case Node::Op::Div: {
      const double inv = 1.0 / b.v;
      return {a.v * inv, (a.d1 - a.v * inv * b.d1) * inv, (a.d2 - a.v * inv * b.d2) * inv};
    }
    default: return {};
  }
}

bool uses_variable(const Node& n) {
  if (n.op == Node::Op::X1 || n.op == Node::Op::X2) return true;
  if (n.lhs && uses_variable(*n.lhs)) return true;
  return n.rhs && uses_variable(*n.rhs);
}

NodePtr make(Node::Op op, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

// expr   := term (('+' | '-') term)*
// term   := unary (('*' | '/') unary)*
// unary  := ('+' | '-') unary | atom
// atom   := number | 'x1' | 'x2' | '(' expr ')'
class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_space();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ExpressionError(what, static_cast<int>(pos_) + 1);
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (accept('+')) {
        lhs = make(Node::Op::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make(Node::Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (accept('*')) {
        lhs = make(Node::Op::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make(Node::Op::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('+')) return unary();
    if (accept('-')) return make(Node::Op::Neg, unary());
    return atom();
  }

  NodePtr atom() {
    skip_space();
    if (pos_ >= s_.size()) fail("expression ends early");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (c == 'x') {
      if (pos_ + 1 < s_.size() && (s_[pos_ + 1] == '1' || s_[pos_ + 1] == '2')) {
        const bool first = s_[pos_ + 1] == '1';
        pos_ += 2;
        if (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) {
          fail("unknown variable");
        }
        auto n = std::make_shared<Node>();
        n->op = first ? Node::Op::X1 : Node::Op::X2;
        return n;
      }
      fail("unknown variable; use x1 or x2");
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      const char* begin = s_.data() + pos_;
      const auto [ptr, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
      if (ec != std::errc() || ptr == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(ptr - begin);
      auto n = std::make_shared<Node>();
      n->constant = v;
      return n;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = Parser(text).parse();
  e.text_ = text;
  return e;
}

double Expression::value(const Point& x) const { return eval(*root_, x).v; }

Vec2 Expression::gradient(const Point& x) const {
  const Dual d = eval(*root_, x);
  return {d.d1, d.d2};
}

bool Expression::is_constant() const { return !uses_variable(*root_); }

}  // namespace philab
