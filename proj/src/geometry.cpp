#include "dualfront/geometry.hpp"

#include <cmath>

#include "dualfront/linalg.hpp"

namespace dualfront {

namespace {

template <class T>
std::vector<T> values(const JetVec<T>& v) {
  std::vector<T> out;
  out.reserve(v.size());
  for (const auto& j : v) out.push_back(j.value());
  return out;
}

template <class T>
double jet_scale(const JetVec<T>& v) {
  double s = 0.0;
  for (const auto& j : v) s = std::max(s, j.max_abs_coeff());
  return s;
}

// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(k);
  for (std::size_t i = 0; i < k; ++i) cur[i] = i;
  if (k > n) return out;
  while (true) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

template <class T>
JetMatrix<T> minor_of(const JetMatrix<T>& m, std::size_t skip_row, std::size_t skip_col) {
  JetMatrix<T> out(m.rows - 1, m.cols - 1);
  for (std::size_t i = 0, oi = 0; i < m.rows; ++i) {
    if (i == skip_row) continue;
    for (std::size_t j = 0, oj = 0; j < m.cols; ++j) {
      if (j == skip_col) continue;
      out(oi, oj++) = m(i, j);
    }
    ++oi;
  }
  return out;
}

template <class T>
T sign_power(std::size_t e) {
  return e % 2 == 0 ? T{1} : T{-1};
}

// Adjugate of a square jet matrix; a 1x1 matrix has adjugate [1].
template <class T>
JetMatrix<T> adjugate(const JetMatrix<T>& a) {
  const std::size_t n = a.rows;
  JetMatrix<T> adj(n, n);
  if (n == 1) {
    const auto& e = a(0, 0);
    adj(0, 0) = Jet<T>::constant(T{1}, e.nvars(), e.order());
    return adj;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) adj(i, j) = det(minor_of(a, j, i)) * sign_power<T>(i + j);
  }
  return adj;
}

template <class T>
JetMatrix<T> select_rows(const JetMatrix<T>& m, const std::vector<std::size_t>& rows) {
  JetMatrix<T> out(rows.size(), m.cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) out(i, j) = m(rows[i], j);
  }
  return out;
}

template <class T>
std::vector<T> value_matrix(const JetMatrix<T>& m) {
  std::vector<T> out;
  out.reserve(m.data.size());
  for (const auto& e : m.data) out.push_back(e.value());
  return out;
}

template <class T>
JetVec<T> eval_exprs(const std::vector<ExprPtr>& exprs, std::span<const T> p, int order) {
  JetVec<T> out;
  out.reserve(exprs.size());
  for (const auto& e : exprs) out.push_back(eval_jet<T>(*e, p, order));
  return out;
}

// Divides the common zero factor (t - t0)^m out of a one-variable jet vector.
template <class T>
JetVec<T> strip_common_zero(const JetVec<T>& v, double vanish) {
  const double scale = jet_scale(v);
  if (scale == 0.0) return v;
  const int order = v.front().order();
  int shift = 0;
  while (shift <= order) {
    double m = 0.0;
    for (const auto& j : v) m = std::max(m, std::abs(j.coeffs()[static_cast<std::size_t>(shift)]));
    if (m > vanish * scale) break;
    ++shift;
  }
  if (shift == 0 || shift > order) return v;
  const auto& layout = v.front().layout()->at_order(order - shift);
  JetVec<T> out;
  for (const auto& j : v) {
    std::vector<T> c(j.coeffs().begin() + shift, j.coeffs().end());
    out.emplace_back(layout, std::move(c));
  }
  return out;
}

}  // namespace

template <class T>
HomogeneousPoint<T> normalize_projective(std::span<const T> x) {
  if (x.empty() || norm(x) == 0.0) throw Error(ErrorCode::kDomain, "projective point must be nonzero");
  const std::size_t k = argmax_abs(x);
  const T pivot = x[k];
  HomogeneousPoint<T> out;
  out.coords.reserve(x.size());
  for (const T& xi : x) out.coords.push_back(xi / pivot);
  out.coords[k] = T{1};
  return out;
}

template <class T>
double projective_distance(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kShape, "projective points of different dimension");
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::kDomain, "projective point must be nonzero");
  // |a ^ b| for unit a, b (Lagrange identity) is the sine of the angle.
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) s += std::norm(a[i] / na * (b[j] / nb) - a[j] / na * (b[i] / nb));
  }
  return std::sqrt(s);
}

template <class T>
JetVec<T> eval_map(const MapSpec& spec, std::span<const T> p, int order) {
  if (p.size() != spec.vars.size()) throw Error(ErrorCode::kShape, "point has the wrong dimension");
  return eval_exprs<T>(spec.components, p, order);
}

template <class T>
JetVec<T> homogeneous_lift(const MapSpec& spec, std::span<const T> p, int order) {
  JetVec<T> f = eval_map<T>(spec, p, order);
  if (spec.kind == MapKind::kAffine || spec.kind == MapKind::kCurve) {
    f.push_back(Jet<T>::constant(T{1}, spec.n(), order));
  } else if (spec.kind == MapKind::kPlaneMap) {
    throw Error(ErrorCode::kSpec, "a plane map has no homogeneous lift");
  }
  return f;
}

template <class T>
JetVec<T> wedge(const std::vector<JetVec<T>>& vectors) {
  const std::size_t rows = vectors.size();
  const std::size_t n = rows + 1;
  for (const auto& v : vectors) {
    if (v.size() != n) throw Error(ErrorCode::kShape, "wedge needs N-1 vectors in K^N");
  }
  JetMatrix<T> m(rows, n);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = vectors[i][j];
  }
  JetVec<T> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    // expand det(v_1, ..., v_{N-1}, e_k) along its last row
    JetMatrix<T> sub(rows, rows);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0, oj = 0; j < n; ++j) {
        if (j != k) sub(i, oj++) = m(i, j);
      }
    }
    out[k] = det(sub) * sign_power<T>(k + n - 1);
  }
  return out;
}

template <class T>
std::vector<JetVec<T>> partials(const JetVec<T>& f, int nvars) {
  std::vector<JetVec<T>> out(static_cast<std::size_t>(nvars));
  for (int i = 0; i < nvars; ++i) {
    for (const auto& c : f) out[static_cast<std::size_t>(i)].push_back(c.partial(i));
  }
  return out;
}

template <class T>
JetVec<T> cofactor_normal(const JetVec<T>& f, const GeometryTolerances& tol, bool strip_curve_zero) {
  if (f.empty()) throw Error(ErrorCode::kShape, "empty map");
  const int n = f.front().nvars();
  if (f.size() != static_cast<std::size_t>(n) + 1) throw Error(ErrorCode::kShape, "normal map needs m = n + 1");
  JetVec<T> nu = wedge(partials(f, n));
  if (n == 1 && strip_curve_zero) nu = strip_common_zero(nu, tol.vanish);
  return nu;
}

template <class T>
JetVec<T> normal_map(const MapSpec& spec, std::span<const T> p, int order, const GeometryTolerances& tol) {
  if (spec.kind == MapKind::kProjective) return dual_front<T>(spec, p, order);
  if (spec.kind == MapKind::kPlaneMap) throw Error(ErrorCode::kSpec, "a plane map has no normal");
  JetVec<T> nu;
  if (spec.has_normal()) {
    nu = eval_exprs<T>(spec.normal, p, order);
  } else {
    // a curve may lose orders when its zero factor is stripped
    const int extra = spec.kind == MapKind::kCurve ? 3 : 0;
    nu = cofactor_normal(eval_map<T>(spec, p, order + 1 + extra), tol);
    for (auto& j : nu) j = j.truncated(order);
  }
  const double scale = jet_scale(nu);
  if (scale == 0.0 || norm(std::span<const T>(values(nu))) <= tol.vanish * scale) {
    throw Error(ErrorCode::kRankDeficient, "normal vanishes at the point; supply a normal for fronts");
  }
  return nu;
}

template <class T>
JetVec<T> dual_front_of(const JetVec<T>& homogeneous) {
  if (homogeneous.empty()) throw Error(ErrorCode::kShape, "empty map");
  const int n = homogeneous.front().nvars();
  if (homogeneous.size() != static_cast<std::size_t>(n) + 2) throw Error(ErrorCode::kShape, "dual front needs m = n + 2");
  auto vecs = partials(homogeneous, n);
  vecs.push_back(homogeneous);
  JetVec<T> g = wedge(vecs);
  // as for affine curve normals, a singular point of a curve is a common zero
  if (n == 1) g = strip_common_zero(g, GeometryTolerances{}.vanish);
  return g;
}

template <class T>
JetVec<T> dual_front(const MapSpec& spec, std::span<const T> p, int order) {
  const int extra = spec.n() == 1 ? 3 : 0;
  JetVec<T> g = dual_front_of(homogeneous_lift<T>(spec, p, order + 1 + extra));
  for (auto& j : g) {
    if (j.order() > order) j = j.truncated(order);
  }
  return g;
}

template <class T>
double incidence_check(const JetVec<T>& F, const JetVec<T>& G) {
  if (F.size() != G.size() || F.empty()) throw Error(ErrorCode::kShape, "incidence check needs equal dimensions");
  const int n = F.front().nvars();
  T gf{};
  for (std::size_t i = 0; i < F.size(); ++i) gf += G[i].value() * F[i].value();
  double r = std::abs(gf);
  for (int j = 0; j < n; ++j) {
    T a{}, b{};
    for (std::size_t i = 0; i < F.size(); ++i) {
      const T dF = F[i].order() >= 1 ? F[i].gradient()[static_cast<std::size_t>(j)] : T{};
      const T dG = G[i].order() >= 1 ? G[i].gradient()[static_cast<std::size_t>(j)] : T{};
      a += G[i].value() * dF;
      b += dG * F[i].value();
    }
    r = std::max({r, std::abs(a), std::abs(b)});
  }
  return r;
}

template <class T>
JetVec<T> affine_chart(const JetVec<T>& homogeneous, std::size_t j) {
  if (j >= homogeneous.size()) throw Error(ErrorCode::kShape, "chart index out of range");
  if (homogeneous[j].value() == T{}) throw Error(ErrorCode::kDomain, "chart coordinate vanishes at the point");
  const Jet<T> inv = reciprocal(homogeneous[j]);
  JetVec<T> out;
  for (std::size_t i = 0; i < homogeneous.size(); ++i) {
    if (i != j) out.push_back(homogeneous[i] * inv);
  }
  return out;
}

template <class T>
JetMatrix<T> jacobian(const JetVec<T>& f, int nvars) {
  JetMatrix<T> m(f.size(), static_cast<std::size_t>(nvars));
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (int j = 0; j < nvars; ++j) m(i, static_cast<std::size_t>(j)) = f[i].partial(j);
  }
  return m;
}

template <class T>
JetVec<T> kernel_field(const JetMatrix<T>& m, double rank_tol, double reference) {
  if (m.rows < m.cols || m.cols == 0) throw Error(ErrorCode::kShape, "kernel field needs rows >= cols");
  const auto vals = value_matrix(m);
  const auto sv = singular_values<T>(vals, m.rows, m.cols);
  if (numerical_rank(sv, rank_tol, reference) != static_cast<int>(m.cols) - 1) return {};

  JetMatrix<T> best_adj;
  double best_norm = -1.0;
  for (const auto& rows : subsets(m.rows, m.cols)) {
    JetMatrix<T> adj = adjugate(select_rows(m, rows));
    const auto av = value_matrix(adj);
    const double nv = norm(std::span<const T>(av));
    if (nv > best_norm) {
      best_norm = nv;
      best_adj = std::move(adj);
    }
  }
  if (best_norm <= 0.0) return {};
  std::size_t best_col = 0;
  double col_norm = -1.0;
  for (std::size_t j = 0; j < best_adj.cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < best_adj.rows; ++i) s += std::norm(best_adj(i, j).value());
    if (s > col_norm) {
      col_norm = s;
      best_col = j;
    }
  }
  JetVec<T> field;
  for (std::size_t i = 0; i < best_adj.rows; ++i) field.push_back(best_adj(i, best_col));
  const auto fv = values(field);
  const T pivot = fv[argmax_abs(std::span<const T>(fv))];
  for (auto& j : field) j = j / pivot;
  return field;
}

template <class T>
HessianJets<T> hessian_jets_of(const JetVec<T>& f, int nvars, bool projective,
                               std::type_identity_t<const JetVec<T>*> user_normal,
                               const GeometryTolerances& tol) {
  HessianJets<T> out;
  if (user_normal) {
    out.normal = *user_normal;
  } else if (projective) {
    out.normal = dual_front_of(f);
  } else {
    out.normal = cofactor_normal(f, tol);
  }
  if (out.normal.size() != f.size()) throw Error(ErrorCode::kShape, "normal and map dimensions differ");
  const std::size_t n = static_cast<std::size_t>(nvars);
  std::vector<JetVec<T>> first = partials(f, nvars);
  out.form = JetMatrix<T>(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Jet<T> acc;
      for (std::size_t k = 0; k < f.size(); ++k) {
        Jet<T> term = out.normal[k] * first[i][k].partial(static_cast<int>(j));
        acc = acc.valid() ? acc + term : term;
      }
      out.form(i, j) = acc;
      out.form(j, i) = acc;
    }
  }
  out.hessian = det(out.form);
  double ref = 0.0;
  for (const auto& e : out.form.data) ref = std::max(ref, e.max_abs_coeff());
  out.asymptotic = kernel_field(out.form, tol.rank, ref);
  return out;
}

template <class T>
HessianJets<T> hessian_jets(const MapSpec& spec, std::span<const T> p, int order, const GeometryTolerances& tol) {
  if (order < 2) throw Error(ErrorCode::kShape, "Hessian jets need order >= 2");
  if (spec.kind == MapKind::kPlaneMap) throw Error(ErrorCode::kSpec, "a plane map has no Hessian");
  const bool projective = spec.kind == MapKind::kProjective;
  JetVec<T> f = eval_map<T>(spec, p, order);
  if (spec.has_normal()) {
    JetVec<T> nu = eval_exprs<T>(spec.normal, p, order - 1);
    return hessian_jets_of(f, spec.n(), projective, &nu, tol);
  }
  if (spec.kind == MapKind::kCurve) {
    JetVec<T> nu = normal_map<T>(spec, p, order - 1, tol);
    return hessian_jets_of(f, spec.n(), false, &nu, tol);
  }
  auto hj = hessian_jets_of(f, spec.n(), projective, nullptr, tol);
  const double scale = jet_scale(hj.normal);
  if (scale == 0.0 || norm(std::span<const T>(values(hj.normal))) <= tol.vanish * scale) {
    throw Error(ErrorCode::kRankDeficient, "normal vanishes at the point; supply a normal for fronts");
  }
  return hj;
}

template <class T>
HessianData<T> hessian_data(const MapSpec& spec, std::span<const T> p, int order, const GeometryTolerances& tol) {
  const auto hj = hessian_jets<T>(spec, p, order, tol);
  HessianData<T> d;
  d.point.assign(p.begin(), p.end());
  d.nu = values(hj.normal);
  d.hess = value_matrix(hj.form);
  d.h = hj.hessian.value();
  d.grad_h = hj.hessian.gradient();
  if (!hj.asymptotic.empty()) {
    auto xi = values(hj.asymptotic);
    const double nx = norm(std::span<const T>(xi));
    for (auto& x : xi) x /= nx;
    d.asymptotic = std::move(xi);
  }
  const double scale = hj.hessian.max_abs_coeff();
  d.nondegenerate = scale > 0.0 && norm(std::span<const T>(d.grad_h)) > 1e-7 * scale;
  return d;
}

template <class T>
HomogeneousPoint<T> affine_gauss(const MapSpec& spec, std::span<const T> p) {
  if (spec.kind != MapKind::kAffine && spec.kind != MapKind::kCurve) {
    throw Error(ErrorCode::kSpec, "the affine Gauss map needs an affine hypersurface");
  }
  const auto nu = values(normal_map<T>(spec, p, 0));
  return normalize_projective<T>(nu);
}

template <class T>
FrontFrame<T> lambda_front(const JetVec<T>& phi, const JetVec<T>& nu, int nvars, const GeometryTolerances& tol) {
  const std::size_t n = static_cast<std::size_t>(nvars);
  if (phi.size() != n + 1 || nu.size() != n + 1) throw Error(ErrorCode::kShape, "front needs m = n + 1");
  JetMatrix<T> jac = jacobian(phi, nvars);
  JetMatrix<T> m(n + 1, n + 1);
  for (std::size_t i = 0; i < n + 1; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = jac(i, j);
    m(i, n) = nu[i];
  }
  FrontFrame<T> out;
  out.kind = LambdaKind::kFront;
  out.lambda = det(m);
  const double scale = out.lambda.max_abs_coeff();
  out.singular = scale == 0.0 || std::abs(out.lambda.value()) < tol.singular * scale;
  if (out.singular) {
    double ref = 0.0;
    for (const auto& e : jac.data) ref = std::max(ref, e.max_abs_coeff());
    out.null_field = kernel_field(jac, tol.rank, ref);
  }
  return out;
}

template <class T>
FrontFrame<T> lambda_map(const JetVec<T>& phi, int nvars, const GeometryTolerances& tol) {
  if (phi.size() != static_cast<std::size_t>(nvars)) throw Error(ErrorCode::kShape, "map needs m = n");
  JetMatrix<T> jac = jacobian(phi, nvars);
  FrontFrame<T> out;
  out.kind = LambdaKind::kMap;
  out.lambda = det(jac);
  const double scale = out.lambda.max_abs_coeff();
  out.singular = scale == 0.0 || std::abs(out.lambda.value()) < tol.singular * scale;
  if (out.singular) {
    double ref = 0.0;
    for (const auto& e : jac.data) ref = std::max(ref, e.max_abs_coeff());
    out.null_field = kernel_field(jac, tol.rank, ref);
  }
  return out;
}

template <class T>
FrontFrame<T> lambda_front(const MapSpec& spec, std::span<const T> p, int order, const GeometryTolerances& tol) {
  if (spec.kind == MapKind::kPlaneMap) {
    auto fr = lambda_map(eval_map<T>(spec, p, order), spec.n(), tol);
    fr.point.assign(p.begin(), p.end());
    return fr;
  }
  if (spec.kind == MapKind::kProjective) throw Error(ErrorCode::kSpec, "lambda of a projective front needs an affine chart");
  JetVec<T> phi = eval_map<T>(spec, p, order);
  JetVec<T> nu = normal_map<T>(spec, p, order - 1, tol);
  auto fr = lambda_front(phi, nu, spec.n(), tol);
  fr.point.assign(p.begin(), p.end());
  return fr;
}

std::vector<double> chart_projection(ChartProjection which, std::span<const double> p) {
  if (p.size() != 4) throw Error(ErrorCode::kShape, "chart projections act on R^4");
  if (which == ChartProjection::kSphereToProjective) {
    if (std::abs(norm(p) - 1.0) > 1e-9) throw Error(ErrorCode::kDomain, "point is not on the unit 3-sphere");
    return normalize_projective<double>(p).coords;
  }
  const double lorentz = -p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3];
  if (std::abs(lorentz + 1.0) > 1e-9 * (1.0 + p[0] * p[0]) || p[0] <= 0.0) {
    throw Error(ErrorCode::kDomain, "point is not on the hyperboloid sheet x0 > 0");
  }
  const double r = norm(p);
  return {p[0] / r, p[1] / r, p[2] / r, p[3] / r};
}

#define DUALFRONT_INSTANTIATE(T)                                                                                  \
  template HomogeneousPoint<T> normalize_projective<T>(std::span<const T>);                                       \
  template double projective_distance<T>(std::span<const T>, std::span<const T>);                                 \
  template JetVec<T> eval_map<T>(const MapSpec&, std::span<const T>, int);                                        \
  template JetVec<T> homogeneous_lift<T>(const MapSpec&, std::span<const T>, int);                                \
  template JetVec<T> wedge<T>(const std::vector<JetVec<T>>&);                                                     \
  template std::vector<JetVec<T>> partials<T>(const JetVec<T>&, int);                                             \
  template JetVec<T> normal_map<T>(const MapSpec&, std::span<const T>, int, const GeometryTolerances&);           \
  template JetVec<T> cofactor_normal<T>(const JetVec<T>&, const GeometryTolerances&, bool);                       \
  template JetVec<T> dual_front<T>(const MapSpec&, std::span<const T>, int);                                      \
  template JetVec<T> dual_front_of<T>(const JetVec<T>&);                                                          \
  template double incidence_check<T>(const JetVec<T>&, const JetVec<T>&);                                         \
  template JetVec<T> affine_chart<T>(const JetVec<T>&, std::size_t);                                              \
  template JetVec<T> kernel_field<T>(const JetMatrix<T>&, double, double);                                        \
  template JetMatrix<T> jacobian<T>(const JetVec<T>&, int);                                                       \
  template HessianJets<T> hessian_jets<T>(const MapSpec&, std::span<const T>, int, const GeometryTolerances&);    \
  template HessianJets<T> hessian_jets_of<T>(const JetVec<T>&, int, bool, const JetVec<T>*,                        \
                                             const GeometryTolerances&);                                          \
  template HessianData<T> hessian_data<T>(const MapSpec&, std::span<const T>, int, const GeometryTolerances&);    \
  template HomogeneousPoint<T> affine_gauss<T>(const MapSpec&, std::span<const T>);                               \
  template FrontFrame<T> lambda_front<T>(const JetVec<T>&, const JetVec<T>&, int, const GeometryTolerances&);     \
  template FrontFrame<T> lambda_map<T>(const JetVec<T>&, int, const GeometryTolerances&);                         \
  template FrontFrame<T> lambda_front<T>(const MapSpec&, std::span<const T>, int, const GeometryTolerances&);

DUALFRONT_INSTANTIATE(double)
DUALFRONT_INSTANTIATE(Complex)

#undef DUALFRONT_INSTANTIATE

}  // namespace dualfront
