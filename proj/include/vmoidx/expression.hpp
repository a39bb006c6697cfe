#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace vmoidx {

// Variables visible to expressions. Unset slots evaluate to 0.
enum class Var : int { X = 0, Y, Z, U, V, Theta, S, Count };

using VarValues = std::array<double, static_cast<std::size_t>(Var::Count)>;

// Scalar arithmetic expression over x, y, z, u, v, theta (alias t) and s.
// Grammar: + - * / ^, unary minus, parentheses, constants pi and e, and the
// functions sin cos tan asin acos atan sinh cosh tanh exp log sqrt abs
// sign pow atan2 min max.
class Expression {
 public:
  Expression();
  static Expression parse(std::string_view text);
  double eval(const VarValues& vars) const;
  const std::string& text() const { return text_; }

 private:
  struct Op {
    int code;
    double value;
  };
  std::string text_;
  std::vector<Op> program_;
  friend class ExpressionCompiler;
};

// Comma-separated list of expressions, e.g. "-y, x, 0".
std::vector<Expression> parse_expression_list(std::string_view text);

}  // namespace vmoidx
