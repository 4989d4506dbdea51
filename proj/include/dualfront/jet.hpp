#pragma once

// Truncated multivariate Taylor jets.
//
// A Jet<T> of order d in n variables stores the Taylor coefficients
// c_alpha = (d^alpha f)(p) / alpha! for every multi-index |alpha| <= d.
// Coefficients are kept densely in graded order (all degree-0 monomials,
// then degree 1, ...), so truncation to a lower order is a prefix and
// jets of different orders share index positions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include "dualfront/error.hpp"

namespace dualfront {

using Complex = std::complex<double>;
using MultiIndex = std::vector<int>;

template <class T>
inline constexpr bool is_complex_v = std::is_same_v<T, Complex>;

/// Monomial bookkeeping shared by every jet with the same (nvars, order).
class JetLayout {
 public:
  struct Product {
    std::uint32_t lhs;
    std::uint32_t rhs;
    std::uint32_t out;
  };
  struct DerivativeTerm {
    std::uint32_t src;  // index of alpha + e_var
    std::uint32_t dst;  // index of alpha
    double factor;      // alpha_var + 1
  };

  static std::shared_ptr<const JetLayout> get(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  std::size_t size() const { return exponents_.size(); }

  /// Layout of the same variable count truncated to `order` (<= this order).
  const std::shared_ptr<const JetLayout>& at_order(int order) const;

  const MultiIndex& exponents(std::size_t k) const { return exponents_[k]; }
  int degree(std::size_t k) const { return degrees_[k]; }
  double factorial(std::size_t k) const { return factorials_[k]; }
  std::optional<std::size_t> find(std::span<const int> alpha) const;

  std::span<const Product> products() const { return products_; }
  std::span<const DerivativeTerm> derivative(int var) const {
    return derivatives_[static_cast<std::size_t>(var)];
  }

  JetLayout(int nvars, int order, std::shared_ptr<const JetLayout> lower);

 private:
  int nvars_;
  int order_;
  std::vector<MultiIndex> exponents_;
  std::vector<int> degrees_;
  std::vector<double> factorials_;
  std::vector<std::uint64_t> keys_;  // sorted copy for lookup
  std::vector<std::uint32_t> key_pos_;
  std::vector<Product> products_;
  std::vector<std::vector<DerivativeTerm>> derivatives_;
  // chain of lower-order layouts; lower_[d] is the layout of order d
  std::vector<std::shared_ptr<const JetLayout>> lower_;
  std::shared_ptr<const JetLayout> self_;
  friend class LayoutCache;
};

template <class T>
class Jet {
 public:
  using Scalar = T;

  Jet() = default;
  Jet(std::shared_ptr<const JetLayout> layout, std::vector<T> coeffs)
      : layout_(std::move(layout)), c_(std::move(coeffs)) {
    if (!layout_ || c_.size() != layout_->size()) {
      throw Error(ErrorCode::kShape, "jet coefficient count does not match layout");
    }
  }

  static Jet constant(T c, int nvars, int order) {
    check_shape(nvars, order);
    auto layout = JetLayout::get(nvars, order);
    std::vector<T> coeffs(layout->size(), T{});
    coeffs[0] = c;
    return Jet(std::move(layout), std::move(coeffs));
  }

  /// The coordinate function x^index expanded at `base`.
  static Jet variable(int index, T base, int nvars, int order) {
    check_shape(nvars, order);
    if (index < 0 || index >= nvars) {
      throw Error(ErrorCode::kShape, "jet variable index out of range");
    }
    Jet j = constant(base, nvars, order);
    if (order >= 1) j.c_[1 + static_cast<std::size_t>(index)] = T{1};
    return j;
  }

  bool valid() const { return static_cast<bool>(layout_); }
  int nvars() const { return layout_->nvars(); }
  int order() const { return layout_->order(); }
  const std::shared_ptr<const JetLayout>& layout() const { return layout_; }
  std::span<const T> coeffs() const { return c_; }
  T value() const { return c_[0]; }

  /// Taylor coefficient of the monomial alpha; zero when |alpha| > order.
  T coeff(std::span<const int> alpha) const {
    auto k = layout_->find(alpha);
    return k ? c_[*k] : T{};
  }
  /// Partial derivative d^alpha f at the base point.
  T derivative(std::span<const int> alpha) const {
    auto k = layout_->find(alpha);
    return k ? c_[*k] * layout_->factorial(*k) : T{};
  }
  /// First partial derivatives at the base point (zeros when order is 0).
  std::vector<T> gradient() const {
    std::vector<T> g(static_cast<std::size_t>(nvars()), T{});
    if (order() >= 1) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = c_[1 + i];
    }
    return g;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const T& x : c_) m = std::max(m, std::abs(x));
    return m;
  }

  Jet truncated(int order) const {
    if (order >= this->order()) return *this;
    if (order < 0) throw Error(ErrorCode::kShape, "negative jet order");
    const auto& lower = layout_->at_order(order);
    return Jet(lower, std::vector<T>(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(lower->size())));
  }

  /// d/dx^var, one order lower.
  Jet partial(int var) const {
    if (var < 0 || var >= nvars()) throw Error(ErrorCode::kShape, "partial: variable out of range");
    if (order() == 0) throw Error(ErrorCode::kShape, "partial of an order-0 jet");
    const auto& lower = layout_->at_order(order() - 1);
    std::vector<T> out(lower->size(), T{});
    for (const auto& t : layout_->derivative(var)) out[t.dst] = c_[t.src] * t.factor;
    return Jet(lower, std::move(out));
  }

  Jet operator-() const {
    Jet r = *this;
    for (T& x : r.c_) x = -x;
    return r;
  }

  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  friend Jet operator+(const Jet& a, const Jet& b) { return combine(a, b, T{1}); }
  friend Jet operator-(const Jet& a, const Jet& b) { return combine(a, b, T{-1}); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    check_same_vars(a, b);
    const auto& layout = a.order() <= b.order() ? a.layout_ : b.layout_;
    std::vector<T> out(layout->size(), T{});
    for (const auto& p : layout->products()) out[p.out] += a.c_[p.lhs] * b.c_[p.rhs];
    return Jet(layout, std::move(out));
  }

  friend Jet operator+(Jet a, T s) {
    a.c_[0] += s;
    return a;
  }
  friend Jet operator+(T s, Jet a) { return std::move(a) + s; }
  friend Jet operator-(Jet a, T s) {
    a.c_[0] -= s;
    return a;
  }
  friend Jet operator-(T s, const Jet& a) { return (-a) + s; }
  friend Jet operator*(Jet a, T s) {
    for (T& x : a.c_) x *= s;
    return a;
  }
  friend Jet operator*(T s, Jet a) { return std::move(a) * s; }
  friend Jet operator/(Jet a, T s) {
    if (s == T{}) throw Error(ErrorCode::kDomain, "division of a jet by zero");
    for (T& x : a.c_) x /= s;
    return a;
  }

 private:
  static void check_shape(int nvars, int order) {
    if (nvars < 1 || order < 0) throw Error(ErrorCode::kShape, "jet needs nvars >= 1 and order >= 0");
  }
  static void check_same_vars(const Jet& a, const Jet& b) {
    if (!a.valid() || !b.valid() || a.nvars() != b.nvars()) {
      throw Error(ErrorCode::kShape, "jet variable counts differ");
    }
  }
  static Jet combine(const Jet& a, const Jet& b, T sign) {
    check_same_vars(a, b);
    const auto& layout = a.order() <= b.order() ? a.layout_ : b.layout_;
    std::vector<T> out(layout->size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = a.c_[k] + sign * b.c_[k];
    return Jet(layout, std::move(out));
  }

  std::shared_ptr<const JetLayout> layout_;
  std::vector<T> c_;
};

/// f o g where `f_taylor` holds the 1-D Taylor coefficients of f at g's
/// constant term. Horner evaluation in (g - g0).
template <class T>
Jet<T> compose(std::span<const T> f_taylor, const Jet<T>& g) {
  const int order = g.order();
  if (f_taylor.size() < static_cast<std::size_t>(order) + 1) {
    throw Error(ErrorCode::kShape, "compose: Taylor series shorter than jet order + 1");
  }
  const Jet<T> dg = g - g.value();
  Jet<T> acc = Jet<T>::constant(f_taylor[static_cast<std::size_t>(order)], g.nvars(), order);
  for (int k = order - 1; k >= 0; --k) acc = acc * dg + f_taylor[static_cast<std::size_t>(k)];
  return acc;
}

/// Sum_j field[j] * d phi / dx^j, one order lower than phi.
template <class T>
Jet<T> directional_derivative(const Jet<T>& phi, std::span<const Jet<T>> field) {
  if (phi.order() == 0) throw Error(ErrorCode::kShape, "directional derivative of an order-0 jet");
  if (field.size() != static_cast<std::size_t>(phi.nvars())) {
    throw Error(ErrorCode::kShape, "vector field has the wrong number of components");
  }
  Jet<T> acc = Jet<T>::constant(T{}, phi.nvars(), phi.order() - 1);
  for (std::size_t j = 0; j < field.size(); ++j) {
    acc = acc + field[j].truncated(phi.order() - 1) * phi.partial(static_cast<int>(j));
  }
  return acc;
}

template <class T>
Jet<T> directional_derivative(const Jet<T>& phi, const std::vector<Jet<T>>& field) {
  return directional_derivative(phi, std::span<const Jet<T>>(field));
}

/// Evaluates the Taylor polynomial of `j` at base + displacement.
template <class T>
T evaluate_polynomial(const Jet<T>& j, std::span<const T> displacement) {
  const auto& layout = *j.layout();
  if (displacement.size() != static_cast<std::size_t>(layout.nvars())) {
    throw Error(ErrorCode::kShape, "displacement has the wrong dimension");
  }
  T sum{};
  for (std::size_t k = 0; k < layout.size(); ++k) {
    T term = j.coeffs()[k];
    const auto& a = layout.exponents(k);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (int e = 0; e < a[i]; ++e) term *= displacement[i];
    }
    sum += term;
  }
  return sum;
}

/// Multivariate composition outer(y(x)). `outer` is a jet in m variables
/// expanded at y0 = (inner[i].value()); inner holds m jets in x.
template <class T>
Jet<T> compose_map(const Jet<T>& outer, std::span<const Jet<T>> inner);

template <class T>
Jet<T> compose_map(const Jet<T>& outer, const std::vector<Jet<T>>& inner) {
  return compose_map(outer, std::span<const Jet<T>>(inner));
}

template <class T>
Jet<T> compose_map(const Jet<T>& outer, std::span<const Jet<T>> inner) {
  if (inner.size() != static_cast<std::size_t>(outer.nvars()) || inner.empty()) {
    throw Error(ErrorCode::kShape, "compose_map: inner map dimension mismatch");
  }
  const int order = inner[0].order();
  const int nx = inner[0].nvars();
  std::vector<Jet<T>> disp;
  disp.reserve(inner.size());
  for (const auto& y : inner) disp.push_back(y - y.value());
  // powers[i][e] = disp[i]^e
  std::vector<std::vector<Jet<T>>> powers(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) {
    powers[i].push_back(Jet<T>::constant(T{1}, nx, order));
    for (int e = 1; e <= std::min(order, outer.order()); ++e) powers[i].push_back(powers[i].back() * disp[i]);
  }
  Jet<T> acc = Jet<T>::constant(T{}, nx, order);
  const auto& layout = *outer.layout();
  for (std::size_t k = 0; k < layout.size(); ++k) {
    if (layout.degree(k) > order) break;
    const T c = outer.coeffs()[k];
    if (c == T{}) continue;
    Jet<T> term = Jet<T>::constant(c, nx, order);
    const auto& a = layout.exponents(k);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] > 0) term = term * powers[i][static_cast<std::size_t>(a[i])];
    }
    acc = acc + term;
  }
  return acc;
}

namespace series {

// 1-D Taylor coefficients a_k = f^(k)(x0)/k!, k = 0..n-1.

template <class T>
std::vector<T> exp(T x0, int n) {
  std::vector<T> a(static_cast<std::size_t>(n));
  T e = std::exp(x0);
  double fact = 1.0;
  for (int k = 0; k < n; ++k) {
    if (k > 0) fact *= k;
    a[static_cast<std::size_t>(k)] = e / fact;
  }
  return a;
}

/// Functions whose derivatives cycle with period 2 or 4 (sin, cos, sinh, cosh).
template <class T>
std::vector<T> cyclic(std::span<const T> cycle, int n) {
  std::vector<T> a(static_cast<std::size_t>(n));
  double fact = 1.0;
  for (int k = 0; k < n; ++k) {
    if (k > 0) fact *= k;
    a[static_cast<std::size_t>(k)] = cycle[static_cast<std::size_t>(k) % cycle.size()] / fact;
  }
  return a;
}

template <class T>
std::vector<T> sin(T x0, int n) {
  const T s = std::sin(x0), c = std::cos(x0);
  const T cyc[4] = {s, c, -s, -c};
  return cyclic<T>(cyc, n);
}

template <class T>
std::vector<T> cos(T x0, int n) {
  const T s = std::sin(x0), c = std::cos(x0);
  const T cyc[4] = {c, -s, -c, s};
  return cyclic<T>(cyc, n);
}

template <class T>
std::vector<T> sinh(T x0, int n) {
  const T cyc[2] = {std::sinh(x0), std::cosh(x0)};
  return cyclic<T>(cyc, n);
}

template <class T>
std::vector<T> cosh(T x0, int n) {
  const T cyc[2] = {std::cosh(x0), std::sinh(x0)};
  return cyclic<T>(cyc, n);
}

/// Quotient of two 1-D series (b[0] != 0).
template <class T>
std::vector<T> divide(std::span<const T> num, std::span<const T> den) {
  std::vector<T> q(num.size());
  for (std::size_t k = 0; k < num.size(); ++k) {
    T acc = num[k];
    for (std::size_t j = 1; j <= k && j < den.size(); ++j) acc -= den[j] * q[k - j];
    q[k] = acc / den[0];
  }
  return q;
}

template <class T>
std::vector<T> tan(T x0, int n) {
  auto s = sin(x0, n), c = cos(x0, n);
  if (c[0] == T{}) throw Error(ErrorCode::kDomain, "tan at a pole");
  return divide<T>(s, c);
}

template <class T>
std::vector<T> log(T x0, int n) {
  if constexpr (is_complex_v<T>) {
    if (x0 == T{}) throw Error(ErrorCode::kDomain, "log of zero");
  } else {
    if (!(x0 > 0)) throw Error(ErrorCode::kDomain, "log of a non-positive real");
  }
  std::vector<T> a(static_cast<std::size_t>(n));
  a[0] = std::log(x0);
  T pw = T{1};
  for (int k = 1; k < n; ++k) {
    pw *= x0;
    a[static_cast<std::size_t>(k)] = (k % 2 == 1 ? T{1} : T{-1}) / (T(static_cast<double>(k)) * pw);
  }
  return a;
}

/// (x0 + t)^p given f0 = x0^p (branch chosen by the caller).
template <class T>
std::vector<T> power(T x0, double p, T f0, int n) {
  if (x0 == T{}) throw Error(ErrorCode::kDomain, "fractional power at zero");
  std::vector<T> a(static_cast<std::size_t>(n));
  double binom = 1.0;
  T pw = T{1};
  for (int k = 0; k < n; ++k) {
    if (k > 0) {
      binom *= (p - (k - 1)) / k;
      pw *= x0;
    }
    a[static_cast<std::size_t>(k)] = f0 * binom / pw;
  }
  return a;
}

template <class T>
std::vector<T> reciprocal(T x0, int n) {
  if (x0 == T{}) throw Error(ErrorCode::kDomain, "division by a jet with zero constant term");
  std::vector<T> a(static_cast<std::size_t>(n));
  T inv = T{1} / x0;
  T cur = inv;
  for (int k = 0; k < n; ++k) {
    a[static_cast<std::size_t>(k)] = cur;
    cur *= -inv;
  }
  return a;
}

}  // namespace series

template <class T>
Jet<T> reciprocal(const Jet<T>& g) {
  return compose<T>(series::reciprocal(g.value(), g.order() + 1), g);
}

template <class T>
Jet<T> operator/(const Jet<T>& a, const Jet<T>& b) {
  return a * reciprocal(b);
}

template <class T>
Jet<T> pow_int(const Jet<T>& base, long exponent) {
  if (exponent < 0) return reciprocal(pow_int(base, -exponent));
  Jet<T> result = Jet<T>::constant(T{1}, base.nvars(), base.order());
  Jet<T> sq = base;
  for (long e = exponent; e > 0; e >>= 1) {
    if (e & 1) result = result * sq;
    if (e > 1) sq = sq * sq;
  }
  return result;
}

/// Real cube root, odd for negative arguments; principal branch over C.
template <class T>
T cbrt_value(T x) {
  if constexpr (is_complex_v<T>) {
    return x == T{} ? T{} : std::pow(x, 1.0 / 3.0);
  } else {
    return std::cbrt(x);
  }
}

/// Small dense matrix of jets, row-major.
template <class T>
struct JetMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Jet<T>> data;

  JetMatrix() = default;
  JetMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}
  Jet<T>& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const Jet<T>& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

namespace detail {

template <class T>
Jet<T> det_rec(const JetMatrix<T>& m, std::vector<std::size_t>& rows, std::vector<std::size_t>& cols) {
  if (rows.size() == 1) return m(rows[0], cols[0]);
  if (rows.size() == 2) {
    return m(rows[0], cols[0]) * m(rows[1], cols[1]) - m(rows[0], cols[1]) * m(rows[1], cols[0]);
  }
  // Laplace expansion along the first remaining row.
  const std::size_t r = rows.front();
  rows.erase(rows.begin());
  Jet<T> acc;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const Jet<T>& entry = m(r, cols[k]);
    if (entry.max_abs_coeff() == 0.0) continue;
    const std::size_t c = cols[k];
    cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(k));
    Jet<T> term = entry * det_rec(m, rows, cols);
    cols.insert(cols.begin() + static_cast<std::ptrdiff_t>(k), c);
    if (k % 2 == 1) term = -term;
    acc = acc.valid() ? acc + term : term;
  }
  rows.insert(rows.begin(), r);
  if (!acc.valid()) {
    const Jet<T>& any = m(rows[0], cols[0]);
    acc = Jet<T>::constant(T{}, any.nvars(), any.order());
  }
  return acc;
}

}  // namespace detail

/// Determinant by cofactor expansion; entries may have different orders
/// (the result takes the lowest).
template <class T>
Jet<T> det(const JetMatrix<T>& m) {
  if (m.rows != m.cols || m.rows == 0) throw Error(ErrorCode::kShape, "determinant of a non-square matrix");
  std::vector<std::size_t> rows(m.rows), cols(m.cols);
  for (std::size_t i = 0; i < m.rows; ++i) rows[i] = cols[i] = i;
  // keep the order of the result consistent even when zero entries are skipped
  int order = m.data[0].order();
  for (const auto& e : m.data) order = std::min(order, e.order());
  return detail::det_rec(m, rows, cols).truncated(order);
}

}  // namespace dualfront
