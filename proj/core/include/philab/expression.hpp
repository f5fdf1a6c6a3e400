#pragma once

#include <memory>
#include <string>

#include "philab/errors.hpp"
#include "philab/types.hpp"

namespace philab {

// Parse failure; column is 1-based within the expression text.
class ExpressionError : public Error {
 public:
  ExpressionError(const std::string& what, int column)
      : Error("column " + std::to_string(column) + ": " + what), column_(column) {}
  int column() const noexcept { return column_; }

 private:
  int column_;
};

// Arithmetic over x1, x2 and decimal constants with + - * / and parentheses.
// Evaluation carries first derivatives, so gradient() is exact up to rounding.
class Expression {
 public:
  static Expression parse(const std::string& text);

  double value(const Point& x) const;
  Vec2 gradient(const Point& x) const;
  const std::string& text() const { return text_; }
  // True when the expression references no variable.
  bool is_constant() const;

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace philab
