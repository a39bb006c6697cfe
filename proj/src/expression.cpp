#include "vmoidx/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "vmoidx/error.hpp"

namespace vmoidx {
namespace {

enum Code : int {
  kConst,
  kVar,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kPow,
  kNeg,
  kSin,
  kCos,
  kTan,
  kAsin,
  kAcos,
  kAtan,
  kSinh,
  kCosh,
  kTanh,
  kExp,
  kLog,
  kSqrt,
  kAbs,
  kSign,
  kAtan2,
  kMin,
  kMax,
};

struct FunctionInfo {
  const char* name;
  int code;
  int arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"sin", kSin, 1},   {"cos", kCos, 1},     {"tan", kTan, 1},   {"asin", kAsin, 1},
    {"acos", kAcos, 1}, {"atan", kAtan, 1},   {"sinh", kSinh, 1}, {"cosh", kCosh, 1},
    {"tanh", kTanh, 1}, {"exp", kExp, 1},     {"log", kLog, 1},   {"sqrt", kSqrt, 1},
    {"abs", kAbs, 1},   {"sign", kSign, 1},   {"pow", kPow, 2},   {"atan2", kAtan2, 2},
    {"min", kMin, 2},   {"max", kMax, 2},
};

}  // namespace

// Recursive-descent compiler emitting a postfix program.
class ExpressionCompiler {
 public:
  explicit ExpressionCompiler(std::string_view text) : src_(text) {}

  std::vector<Expression::Op> compile() {
    parse_sum();
    skip_space();
    if (pos_ != src_.size()) error("unexpected '" + std::string(1, src_[pos_]) + "'");
    return std::move(out_);
  }

 private:
  void error(const std::string& what) const {
    fail(ErrorCode::ParseError,
         what + " at offset " + std::to_string(pos_) + " in \"" + std::string(src_) + "\"");
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) error(std::string("expected '") + c + "'");
  }

  void emit(int code, double value = 0.0) { out_.push_back({code, value}); }

  void parse_sum() {
    parse_product();
    for (;;) {
      if (accept('+')) {
        parse_product();
        emit(kAdd);
      } else if (accept('-')) {
        parse_product();
        emit(kSub);
      } else {
        return;
      }
    }
  }

  void parse_product() {
    parse_unary();
    for (;;) {
      if (accept('*')) {
        parse_unary();
        emit(kMul);
      } else if (accept('/')) {
        parse_unary();
        emit(kDiv);
      } else {
        return;
      }
    }
  }

  void parse_unary() {
    if (accept('-')) {
      parse_unary();
      emit(kNeg);
      return;
    }
    if (accept('+')) {
      parse_unary();
      return;
    }
    parse_power();
  }

  // Right associative; binds tighter than unary minus on its left operand.
  void parse_power() {
    parse_atom();
    if (accept('^')) {
      parse_unary();
      emit(kPow);
    }
  }

  void parse_atom() {
    skip_space();
    if (pos_ >= src_.size()) error("unexpected end of expression");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      parse_sum();
      expect(')');
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      const std::string rest(src_.substr(pos_));
      double value = 0.0;
      try {
        value = std::stod(rest, &used);
      } catch (const std::exception&) {
        error("bad number");
      }
      pos_ += used;
      emit(kConst, value);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      const std::string name(src_.substr(start, pos_ - start));
      skip_space();
      if (pos_ < src_.size() && src_[pos_] == '(') {
        parse_call(name);
        return;
      }
      if (name == "pi") return emit(kConst, std::numbers::pi);
      if (name == "e") return emit(kConst, std::numbers::e);
      static const std::pair<const char*, Var> kVars[] = {
          {"x", Var::X},     {"y", Var::Y},         {"z", Var::Z}, {"u", Var::U},
          {"v", Var::V},     {"theta", Var::Theta}, {"t", Var::Theta}, {"s", Var::S},
      };
      for (const auto& [vname, var] : kVars) {
        if (name == vname) return emit(kVar, static_cast<double>(static_cast<int>(var)));
      }
      error("unknown identifier '" + name + "'");
    }
    error(std::string("unexpected '") + c + "'");
  }

  void parse_call(const std::string& name) {
    for (const auto& fn : kFunctions) {
      if (name != fn.name) continue;
      expect('(');
      for (int i = 0; i < fn.arity; ++i) {
        if (i > 0) expect(',');
        parse_sum();
      }
      expect(')');
      emit(fn.code);
      return;
    }
    error("unknown function '" + name + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<Expression::Op> out_;
};

Expression::Expression() : text_("0"), program_{{kConst, 0.0}} {}

Expression Expression::parse(std::string_view text) {
  Expression e;
  e.text_ = std::string(text);
  e.program_ = ExpressionCompiler(text).compile();
  return e;
}

double Expression::eval(const VarValues& vars) const {
  double stack[64];
  int top = -1;
  for (const Op& op : program_) {
    switch (op.code) {
      case kConst: stack[++top] = op.value; break;
      case kVar: stack[++top] = vars[static_cast<std::size_t>(op.value)]; break;
      case kNeg: stack[top] = -stack[top]; break;
      case kSin: stack[top] = std::sin(stack[top]); break;
      case kCos: stack[top] = std::cos(stack[top]); break;
      case kTan: stack[top] = std::tan(stack[top]); break;
      case kAsin: stack[top] = std::asin(stack[top]); break;
      case kAcos: stack[top] = std::acos(stack[top]); break;
      case kAtan: stack[top] = std::atan(stack[top]); break;
      case kSinh: stack[top] = std::sinh(stack[top]); break;
      case kCosh: stack[top] = std::cosh(stack[top]); break;
      case kTanh: stack[top] = std::tanh(stack[top]); break;
      case kExp: stack[top] = std::exp(stack[top]); break;
      case kLog: stack[top] = std::log(stack[top]); break;
      case kSqrt: stack[top] = std::sqrt(stack[top]); break;
      case kAbs: stack[top] = std::abs(stack[top]); break;
      case kSign: stack[top] = (stack[top] > 0) - (stack[top] < 0); break;
      default: {
        const double b = stack[top--];
        double& a = stack[top];
        switch (op.code) {
          case kAdd: a += b; break;
          case kSub: a -= b; break;
          case kMul: a *= b; break;
          case kDiv: a /= b; break;
          case kPow: a = std::pow(a, b); break;
          case kAtan2: a = std::atan2(a, b); break;
          case kMin: a = std::min(a, b); break;
          case kMax: a = std::max(a, b); break;
        }
      }
    }
    if (top >= 63) fail(ErrorCode::ParseError, "expression too deeply nested: " + text_);
  }
  return stack[top];
}

std::vector<Expression> parse_expression_list(std::string_view text) {
  std::vector<Expression> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || (text[i] == ',' && depth == 0)) {
      out.push_back(Expression::parse(text.substr(start, i - start)));
      start = i + 1;
    } else if (text[i] == '(') {
      ++depth;
    } else if (text[i] == ')') {
      --depth;
    }
  }
  return out;
}

}  // namespace vmoidx
