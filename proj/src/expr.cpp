#include "dualfront/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

namespace dualfront {

namespace {

constexpr std::array<std::pair<std::string_view, Func>, 9> kFuncs{{
    {"sin", Func::kSin},
    {"cos", Func::kCos},
    {"tan", Func::kTan},
    {"exp", Func::kExp},
    {"log", Func::kLog},
    {"sqrt", Func::kSqrt},
    {"cbrt", Func::kCbrt},
    {"sinh", Func::kSinh},
    {"cosh", Func::kCosh},
}};

std::optional<Func> lookup_func(std::string_view name) {
  for (const auto& [n, f] : kFuncs) {
    if (n == name) return f;
  }
  return std::nullopt;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

ExprPtr make_unary(Expr::Kind kind, ExprPtr a) {
  Expr e;
  e.kind = kind;
  e.args = {std::move(a)};
  return make(std::move(e));
}

ExprPtr make_binary(Expr::Kind kind, ExprPtr a, ExprPtr b) {
  Expr e;
  e.kind = kind;
  e.args = {std::move(a), std::move(b)};
  return make(std::move(e));
}

class Parser {
 public:
  Parser(std::string_view src, std::span<const std::string> vars, ParseOptions options)
      : src_(src), tokens_(tokenize(src)), vars_(vars), options_(options) {}

  ExprPtr run() {
    if (tokens_.empty()) throw Error(ErrorCode::kSyntax, "empty expression", 0);
    ExprPtr e = binary(1);
    if (pos_ < tokens_.size()) fail("unexpected token '" + tokens_[pos_].lexeme + "'");
    return e;
  }

 private:
  static int precedence(const Token& t) {
    if (t.kind != TokenKind::kOperator) return 0;
    if (t.lexeme == "+" || t.lexeme == "-") return 1;
    if (t.lexeme == "*" || t.lexeme == "/") return 2;
    return 0;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const std::size_t off = pos_ < tokens_.size() ? tokens_[pos_].offset : src_.size();
    throw Error(ErrorCode::kSyntax, msg + " at offset " + std::to_string(off), off);
  }

  bool at(std::string_view lexeme) const { return pos_ < tokens_.size() && tokens_[pos_].lexeme == lexeme; }

  void expect(std::string_view lexeme) {
    if (!at(lexeme)) fail("expected '" + std::string(lexeme) + "'");
    ++pos_;
  }

  ExprPtr binary(int min_prec) {
    ExprPtr lhs = unary();
    while (pos_ < tokens_.size()) {
      const Token& op = tokens_[pos_];
      const int prec = precedence(op);
      if (prec == 0 || prec < min_prec) break;
      ++pos_;
      ExprPtr rhs = binary(prec + 1);
      Expr::Kind kind = op.lexeme == "+"   ? Expr::Kind::kAdd
                        : op.lexeme == "-" ? Expr::Kind::kSub
                        : op.lexeme == "*" ? Expr::Kind::kMul
                                           : Expr::Kind::kDiv;
      lhs = make_binary(kind, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ExprPtr unary() {
    if (at("-")) {
      ++pos_;
      return make_unary(Expr::Kind::kNeg, unary());
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    if (at("^")) {
      ++pos_;
      const std::size_t exp_off = pos_ < tokens_.size() ? tokens_[pos_].offset : src_.size();
      ExprPtr exponent = unary();
      if (exponent->depends_on_variables()) {
        throw Error(ErrorCode::kSyntax,
                    "exponent must be a constant at offset " + std::to_string(exp_off), exp_off);
      }
      return make_binary(Expr::Kind::kPow, std::move(base), std::move(exponent));
    }
    return base;
  }

  ExprPtr primary() {
    if (pos_ >= tokens_.size()) fail("unexpected end of expression");
    const Token& t = tokens_[pos_];
    switch (t.kind) {
      case TokenKind::kNumber: {
        ++pos_;
        Expr e;
        e.kind = Expr::Kind::kConstant;
        auto [ptr, ec] = std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), e.value);
        if (ec != std::errc() || ptr != t.lexeme.data() + t.lexeme.size()) fail("malformed number");
        return make(std::move(e));
      }
      case TokenKind::kIdentifier: {
        ++pos_;
        if (auto f = lookup_func(t.lexeme)) {
          if (!at("(")) fail("expected '(' after function name");
          ++pos_;
          if (at(")")) {
            throw Error(ErrorCode::kArity, t.lexeme + " takes one argument at offset " + std::to_string(t.offset),
                        t.offset);
          }
          ExprPtr arg = binary(1);
          if (at(",")) {
            throw Error(ErrorCode::kArity, t.lexeme + " takes one argument at offset " + std::to_string(t.offset),
                        t.offset);
          }
          expect(")");
          Expr e;
          e.kind = Expr::Kind::kCall;
          e.func = *f;
          e.args = {std::move(arg)};
          return make(std::move(e));
        }
        for (std::size_t i = 0; i < vars_.size(); ++i) {
          if (vars_[i] == t.lexeme) {
            Expr e;
            e.kind = Expr::Kind::kVariable;
            e.var = static_cast<int>(i);
            return make(std::move(e));
          }
        }
        if (t.lexeme == "pi" || (t.lexeme == "I" && options_.allow_imaginary)) {
          Expr e;
          e.kind = Expr::Kind::kNamed;
          e.name = t.lexeme;
          return make(std::move(e));
        }
        throw Error(ErrorCode::kUndeclared,
                    "undeclared identifier '" + t.lexeme + "' at offset " + std::to_string(t.offset), t.offset);
      }
      case TokenKind::kParen:
        if (t.lexeme == "(") {
          ++pos_;
          ExprPtr e = binary(1);
          expect(")");
          return e;
        }
        fail("unexpected ')'");
      default:
        fail("unexpected token '" + t.lexeme + "'");
    }
  }

  std::string_view src_;
  std::vector<Token> tokens_;
  std::span<const std::string> vars_;
  ParseOptions options_;
  std::size_t pos_ = 0;
};

int print_prec(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kAdd:
    case Expr::Kind::kSub: return 1;
    case Expr::Kind::kMul:
    case Expr::Kind::kDiv: return 2;
    case Expr::Kind::kNeg: return 3;
    case Expr::Kind::kPow: return 4;
    default: return 5;
  }
}

void print(const Expr& e, std::span<const std::string> vars, std::string& out);

void print_wrapped(const Expr& e, bool parens, std::span<const std::string> vars, std::string& out) {
  if (parens) out += '(';
  print(e, vars, out);
  if (parens) out += ')';
}

void print(const Expr& e, std::span<const std::string> vars, std::string& out) {
  using K = Expr::Kind;
  const int p = print_prec(e);
  switch (e.kind) {
    case K::kConstant: {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof(buf), e.value);
      out.append(buf, res.ptr);
      return;
    }
    case K::kNamed: out += e.name; return;
    case K::kVariable: out += vars[static_cast<std::size_t>(e.var)]; return;
    case K::kNeg:
      out += '-';
      print_wrapped(*e.args[0], print_prec(*e.args[0]) < 3, vars, out);
      return;
    case K::kCall:
      out += func_name(e.func);
      out += '(';
      print(*e.args[0], vars, out);
      out += ')';
      return;
    case K::kPow:
      print_wrapped(*e.args[0], print_prec(*e.args[0]) <= p, vars, out);
      out += '^';
      print_wrapped(*e.args[1], print_prec(*e.args[1]) < 3, vars, out);
      return;
    default: {
      const char* op = e.kind == K::kAdd ? " + " : e.kind == K::kSub ? " - " : e.kind == K::kMul ? "*" : "/";
      print_wrapped(*e.args[0], print_prec(*e.args[0]) < p, vars, out);
      out += op;
      print_wrapped(*e.args[1], print_prec(*e.args[1]) <= p, vars, out);
      return;
    }
  }
}

template <class T>
T named_value(const Expr& e) {
  if (e.name == "pi") return T(std::numbers::pi);
  if constexpr (is_complex_v<T>) {
    return T(0.0, 1.0);
  } else {
    throw Error(ErrorCode::kDomain, "imaginary unit in a real map");
  }
}

/// Integer exponent if `p` is (numerically) an integer.
template <class T>
std::optional<long> integer_exponent(T p) {
  double re;
  if constexpr (is_complex_v<T>) {
    if (p.imag() != 0.0) return std::nullopt;
    re = p.real();
  } else {
    re = p;
  }
  const double r = std::round(re);
  if (std::abs(re - r) <= 1e-12 * std::max(1.0, std::abs(re)) && std::abs(r) <= 1e6) return static_cast<long>(r);
  return std::nullopt;
}

template <class T>
double real_exponent(T p) {
  if constexpr (is_complex_v<T>) {
    if (p.imag() != 0.0) throw Error(ErrorCode::kDomain, "complex exponents are not supported");
    return p.real();
  } else {
    return p;
  }
}

/// Non-integer powers need a positive real base.
template <class T>
void check_positive_real(T x) {
  bool ok;
  if constexpr (is_complex_v<T>) {
    ok = x.imag() == 0.0 && x.real() > 0.0;
  } else {
    ok = x > 0.0;
  }
  if (!ok) throw Error(ErrorCode::kDomain, "non-integer power of a non-positive base");
}

template <class T>
T apply_scalar(Func f, T x) {
  switch (f) {
    case Func::kSin: return std::sin(x);
    case Func::kCos: return std::cos(x);
    case Func::kTan: return std::tan(x);
    case Func::kExp: return std::exp(x);
    case Func::kLog:
      if constexpr (is_complex_v<T>) {
        if (x == T{}) throw Error(ErrorCode::kDomain, "log of zero");
      } else {
        if (!(x > 0)) throw Error(ErrorCode::kDomain, "log of a non-positive real");
      }
      return std::log(x);
    case Func::kSqrt:
      if constexpr (!is_complex_v<T>) {
        if (x < 0) throw Error(ErrorCode::kDomain, "sqrt of a negative real");
      }
      return std::sqrt(x);
    case Func::kCbrt: return cbrt_value(x);
    case Func::kSinh: return std::sinh(x);
    case Func::kCosh: return std::cosh(x);
  }
  return x;
}

template <class T>
Jet<T> apply_jet(Func f, const Jet<T>& g) {
  const int n = g.order() + 1;
  const T x0 = g.value();
  if (g.order() == 0) return Jet<T>::constant(apply_scalar(f, x0), g.nvars(), 0);
  std::vector<T> s;
  switch (f) {
    case Func::kSin: s = series::sin(x0, n); break;
    case Func::kCos: s = series::cos(x0, n); break;
    case Func::kTan: s = series::tan(x0, n); break;
    case Func::kExp: s = series::exp(x0, n); break;
    case Func::kLog: s = series::log(x0, n); break;
    case Func::kSqrt:
      if constexpr (!is_complex_v<T>) {
        if (x0 <= 0) throw Error(ErrorCode::kDomain, "sqrt is not differentiable at a non-positive real");
      }
      s = series::power(x0, 0.5, std::sqrt(x0), n);
      break;
    case Func::kCbrt: s = series::power(x0, 1.0 / 3.0, cbrt_value(x0), n); break;
    case Func::kSinh: s = series::sinh(x0, n); break;
    case Func::kCosh: s = series::cosh(x0, n); break;
  }
  return compose<T>(s, g);
}

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_digit(c) || (c == '.' && i + 1 < src.size() && is_digit(src[i + 1]))) {
      while (i < src.size() && is_digit(src[i])) ++i;
      if (i < src.size() && src[i] == '.') {
        ++i;
        while (i < src.size() && is_digit(src[i])) ++i;
      }
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < src.size() && is_digit(src[j])) {
          i = j;
          while (i < src.size() && is_digit(src[i])) ++i;
        }
      }
      out.push_back({TokenKind::kNumber, std::string(src.substr(start, i - start)), start});
    } else if (is_ident_start(c)) {
      while (i < src.size() && is_ident_char(src[i])) ++i;
      out.push_back({TokenKind::kIdentifier, std::string(src.substr(start, i - start)), start});
    } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
      ++i;
      out.push_back({TokenKind::kOperator, std::string(1, c), start});
    } else if (c == '(' || c == ')') {
      ++i;
      out.push_back({TokenKind::kParen, std::string(1, c), start});
    } else if (c == ',') {
      ++i;
      out.push_back({TokenKind::kComma, ",", start});
    } else {
      throw Error(ErrorCode::kSyntax,
                  std::string("unexpected character '") + c + "' at offset " + std::to_string(start), start);
    }
  }
  return out;
}

const char* func_name(Func f) {
  for (const auto& [n, g] : kFuncs) {
    if (g == f) return n.data();
  }
  return "?";
}

bool Expr::depends_on_variables() const {
  if (kind == Kind::kVariable) return true;
  for (const auto& a : args) {
    if (a->depends_on_variables()) return true;
  }
  return false;
}

bool equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case Expr::Kind::kConstant:
      if (a.value != b.value) return false;
      break;
    case Expr::Kind::kNamed:
      if (a.name != b.name) return false;
      break;
    case Expr::Kind::kVariable:
      if (a.var != b.var) return false;
      break;
    case Expr::Kind::kCall:
      if (a.func != b.func) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!equal(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

ExprPtr parse(std::string_view src, std::span<const std::string> vars, ParseOptions options) {
  return Parser(src, vars, options).run();
}

std::string to_string(const Expr& e, std::span<const std::string> vars) {
  std::string out;
  print(e, vars, out);
  return out;
}

template <class T>
T eval_scalar(const Expr& e, std::span<const T> point) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::kConstant: return T(e.value);
    case K::kNamed: return named_value<T>(e);
    case K::kVariable: return point[static_cast<std::size_t>(e.var)];
    case K::kNeg: return -eval_scalar<T>(*e.args[0], point);
    case K::kAdd: return eval_scalar<T>(*e.args[0], point) + eval_scalar<T>(*e.args[1], point);
    case K::kSub: return eval_scalar<T>(*e.args[0], point) - eval_scalar<T>(*e.args[1], point);
    case K::kMul: return eval_scalar<T>(*e.args[0], point) * eval_scalar<T>(*e.args[1], point);
    case K::kDiv: {
      const T d = eval_scalar<T>(*e.args[1], point);
      if (d == T{}) throw Error(ErrorCode::kDomain, "division by zero");
      return eval_scalar<T>(*e.args[0], point) / d;
    }
    case K::kPow: {
      const T base = eval_scalar<T>(*e.args[0], point);
      const T p = eval_scalar<T>(*e.args[1], point);
      if (auto n = integer_exponent(p)) {
        if (*n < 0 && base == T{}) throw Error(ErrorCode::kDomain, "negative power of zero");
        T r{1}, sq = base;
        for (long k = std::abs(*n); k > 0; k >>= 1) {
          if (k & 1) r *= sq;
          sq *= sq;
        }
        return *n < 0 ? T{1} / r : r;
      }
      check_positive_real(base);
      return std::pow(base, real_exponent(p));
    }
    case K::kCall: return apply_scalar(e.func, eval_scalar<T>(*e.args[0], point));
  }
  return T{};
}

template <class T>
Jet<T> eval_jet(const Expr& e, std::span<const T> point, int order) {
  using K = Expr::Kind;
  const int n = static_cast<int>(point.size());
  switch (e.kind) {
    case K::kConstant: return Jet<T>::constant(T(e.value), n, order);
    case K::kNamed: return Jet<T>::constant(named_value<T>(e), n, order);
    case K::kVariable: return Jet<T>::variable(e.var, point[static_cast<std::size_t>(e.var)], n, order);
    case K::kNeg: return -eval_jet<T>(*e.args[0], point, order);
    case K::kAdd: return eval_jet<T>(*e.args[0], point, order) + eval_jet<T>(*e.args[1], point, order);
    case K::kSub: return eval_jet<T>(*e.args[0], point, order) - eval_jet<T>(*e.args[1], point, order);
    case K::kMul: return eval_jet<T>(*e.args[0], point, order) * eval_jet<T>(*e.args[1], point, order);
    case K::kDiv: {
      Jet<T> d = eval_jet<T>(*e.args[1], point, order);
      if (d.value() == T{}) throw Error(ErrorCode::kDomain, "division by a jet with zero constant term");
      return eval_jet<T>(*e.args[0], point, order) / d;
    }
    case K::kPow: {
      Jet<T> base = eval_jet<T>(*e.args[0], point, order);
      const T p = eval_scalar<T>(*e.args[1], point);
      if (auto k = integer_exponent(p)) {
        if (*k < 0 && base.value() == T{}) throw Error(ErrorCode::kDomain, "negative power of zero");
        return pow_int(base, *k);
      }
      check_positive_real(base.value());
      const double q = real_exponent(p);
      return compose<T>(series::power(base.value(), q, std::pow(base.value(), q), order + 1), base);
    }
    case K::kCall: return apply_jet(e.func, eval_jet<T>(*e.args[0], point, order));
  }
  return Jet<T>::constant(T{}, n, order);
}

template double eval_scalar<double>(const Expr&, std::span<const double>);
template Complex eval_scalar<Complex>(const Expr&, std::span<const Complex>);
template Jet<double> eval_jet<double>(const Expr&, std::span<const double>, int);
template Jet<Complex> eval_jet<Complex>(const Expr&, std::span<const Complex>, int);

}  // namespace dualfront
