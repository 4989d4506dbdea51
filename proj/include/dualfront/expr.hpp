#pragma once

// Expression language for map definitions.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | name | func '(' expr ')' | '(' expr ')'
//
// func is one of sin cos tan exp log sqrt cbrt sinh cosh. Names are the
// declared variables plus the constants `pi` and (complex maps only) `I`.
// The exponent of '^' must not depend on any variable.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dualfront/jet.hpp"

namespace dualfront {

enum class TokenKind { kNumber, kIdentifier, kOperator, kParen, kComma };

struct Token {
  TokenKind kind;
  std::string lexeme;
  std::size_t offset;
};

/// Splits `src` into tokens; whitespace is dropped.
std::vector<Token> tokenize(std::string_view src);

enum class Func { kSin, kCos, kTan, kExp, kLog, kSqrt, kCbrt, kSinh, kCosh };

const char* func_name(Func f);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { kConstant, kNamed, kVariable, kNeg, kAdd, kSub, kMul, kDiv, kPow, kCall };

  Kind kind = Kind::kConstant;
  double value = 0.0;  // kConstant
  std::string name;    // kNamed: "pi" or "I"
  int var = -1;        // kVariable
  Func func = Func::kSin;
  std::vector<ExprPtr> args;

  bool depends_on_variables() const;
};

bool equal(const Expr& a, const Expr& b);

struct ParseOptions {
  bool allow_imaginary = false;
};

/// Parses `src`; throws Error with a byte offset on failure.
ExprPtr parse(std::string_view src, std::span<const std::string> vars, ParseOptions options = {});

/// Minimal-parenthesis rendering that parses back to an equal tree.
std::string to_string(const Expr& e, std::span<const std::string> vars);

template <class T>
T eval_scalar(const Expr& e, std::span<const T> point);

template <class T>
Jet<T> eval_jet(const Expr& e, std::span<const T> point, int order);

extern template double eval_scalar<double>(const Expr&, std::span<const double>);
extern template Complex eval_scalar<Complex>(const Expr&, std::span<const Complex>);
extern template Jet<double> eval_jet<double>(const Expr&, std::span<const double>, int);
extern template Jet<Complex> eval_jet<Complex>(const Expr&, std::span<const Complex>, int);

}  // namespace dualfront
