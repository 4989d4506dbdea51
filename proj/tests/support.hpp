#pragma once

// Shared test helpers: finite-difference oracles and random expressions.

#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dualfront/mapspec.hpp"

namespace testing_support {

using ScalarFn = std::function<double(std::span<const double>)>;

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Tensor-product central difference for d^alpha f with step h, O(h^2).
inline double central_difference(const ScalarFn& f, std::span<const double> p, std::span<const int> alpha, double h) {
  std::vector<int> idx(alpha.size(), 0);
  std::vector<double> x(p.begin(), p.end());
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      const int k = alpha[i], j = idx[i];
      w *= ((j % 2) ? -1.0 : 1.0) * binomial(k, j);
      x[i] = p[i] + (0.5 * k - j) * h;
    }
    sum += w * f(x);
    std::size_t i = 0;
    while (i < alpha.size() && ++idx[i] > alpha[i]) idx[i++] = 0;
    if (i == alpha.size()) break;
  }
  int total = 0;
  for (int a : alpha) total += a;
  return sum / std::pow(h, total);
}

struct Estimate {
  double value = 0.0;
  double error = 1e300;
};

// Ridders' extrapolation of central differences from the starting step h:
// the step shrinks geometrically and the estimate with the smallest error
// bound is kept.
inline Estimate ridders(const ScalarFn& f, std::span<const double> p, std::span<const int> alpha, double h) {
  constexpr int kRows = 12;
  constexpr double kShrink = 1.4, kShrink2 = kShrink * kShrink;
  double a[kRows][kRows];
  Estimate best;
  a[0][0] = central_difference(f, p, alpha, h);
  best.value = a[0][0];
  for (int i = 1; i < kRows; ++i) {
    h /= kShrink;
    a[0][i] = central_difference(f, p, alpha, h);
    double fac = kShrink2;
    for (int j = 1; j <= i; ++j) {
      a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
      fac *= kShrink2;
      const double e = std::max(std::abs(a[j][i] - a[j - 1][i]), std::abs(a[j][i] - a[j - 1][i - 1]));
      if (e <= best.error) best = {a[j][i], e};
    }
    if (std::abs(a[i][i] - a[i - 1][i - 1]) >= 2.0 * best.error) break;
  }
  return best;
}

// Best of several Ridders runs, so fast and slow functions both find a
// step where truncation and rounding balance.
inline double fd_derivative(const ScalarFn& f, std::span<const double> p, std::span<const int> alpha) {
  Estimate best;
  for (double h : {0.4, 0.1, 0.025, 0.006}) {
    const Estimate e = ridders(f, p, alpha, h);
    if (e.error < best.error) best = e;
  }
  return best.value;
}

// Random expression over the given variables, analytic on [-1, 1]^n.
inline std::string random_expression(std::mt19937_64& rng, const std::vector<std::string>& vars, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 12);
  std::uniform_int_distribution<std::size_t> var(0, vars.size() - 1);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  auto sub = [&] { return random_expression(rng, vars, depth - 1); };
  auto num = [&] {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", coef(rng));
    return std::string(buf);
  };
  switch (pick(rng)) {
    case 0: return vars[var(rng)];
    case 1: return "(" + num() + "*" + vars[var(rng)] + ")";
    case 2: return "(" + sub() + " + " + sub() + ")";
    case 3: return "(" + sub() + " - " + sub() + ")";
    case 4: return "(" + sub() + " * " + sub() + ")";
    case 5: return "(" + sub() + " / (2 + cos(" + sub() + ")))";
    case 6: return "sin(" + sub() + ")";
    case 7: return "exp(sin(" + sub() + "))";
    case 8: return "sqrt(2 + sin(" + sub() + "))";
    case 9: return "log(3 + cos(" + sub() + "))";
    case 10: return "(" + sub() + ")^" + std::to_string(2 + static_cast<int>(rng() % 2));
    case 11: return "cbrt(2 + cos(" + sub() + "))";
    default: return "sinh(0.5*sin(" + sub() + ")) + cosh(0.3*" + sub() + ")";
  }
}

inline std::vector<double> random_point(std::mt19937_64& rng, std::size_t n, double r = 1.0) {
  std::uniform_real_distribution<double> d(-r, r);
  std::vector<double> p(n);
  for (auto& x : p) x = d(rng);
  return p;
}

inline std::string data_path(const std::string& name) { return std::string(DUALFRONT_DATA_DIR) + "/" + name; }

}  // namespace testing_support
