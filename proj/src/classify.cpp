#include "dualfront/classify.hpp"

#include <cmath>
#include <random>

#include "dualfront/linalg.hpp"

namespace dualfront {

namespace {

template <class T>
std::vector<T> values(const JetVec<T>& v) {
  std::vector<T> out;
  for (const auto& j : v) out.push_back(j.value());
  return out;
}

template <class T>
double jet_scale(const JetVec<T>& v) {
  double s = 0.0;
  for (const auto& j : v) s = std::max(s, j.max_abs_coeff());
  return s;
}

template <class T>
T conj_if_complex(T x) {
  if constexpr (is_complex_v<T>) {
    return std::conj(x);
  } else {
    return x;
  }
}

// Random polynomial of degree <= 2 without constant term, coefficients in [-0.5, 0.5].
template <class T>
Jet<T> random_quadratic(int nvars, int order, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-0.5, 0.5);
  auto layout = JetLayout::get(nvars, order);
  std::vector<T> c(layout->size(), T{});
  for (std::size_t k = 1; k < c.size(); ++k) {
    if (layout->degree(k) <= 2) c[k] = T(d(rng));
  }
  return Jet<T>(layout, std::move(c));
}

template <class T>
SingularityClass<T> nondiagnosable(ContactChain<T> chain, std::string why) {
  SingularityClass<T> s;
  s.verdict = Verdict::kNondiagnosable;
  s.certificate = std::move(chain);
  s.reason = std::move(why);
  return s;
}

// Shared verdict logic; `offset` maps the chain index to the A subscript.
template <class T>
SingularityClass<T> verdict_from(const Jet<T>& phi_in, const JetVec<T>& field, Admissible kind, Verdict target,
                                 int offset, const ClassifyOptions& opt) {
  Jet<T> phi = phi_in;
  if (opt.factor_shift != 0.0) {
    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    phi = phi * (random_quadratic<T>(phi.nvars(), phi.order(), rng) + T(opt.factor_shift));
  }
  const Tolerances& tol = opt.tol;
  ContactChain<T> head;
  head.kind = kind;
  head.tol = tol;
  head.scale = phi.max_abs_coeff();
  head.values = {phi.value()};
  if (head.scale > 0.0 && std::abs(phi.value()) >= tol.zero * head.scale) {
    head.k = 0;
    head.admissible = true;
    SingularityClass<T> s;
    s.verdict = Verdict::kRegular;
    s.certificate = std::move(head);
    return s;
  }
  if (phi.order() < 1) return nondiagnosable(std::move(head), "jet order too low for a contact chain");
  const auto g = phi.gradient();
  if (head.scale == 0.0 || norm(std::span<const T>(g)) <= tol.zero * head.scale) {
    return nondiagnosable(std::move(head), "d phi vanishes at p (degenerate point)");
  }
  head.admissible = true;
  if (field.empty()) return nondiagnosable(std::move(head), "kernel is not one-dimensional at p");
  const JetVec<T> ext = extend_field(field, phi, opt.extension, opt.seed);
  ContactChain<T> chain = contact_chain(phi, ext, opt.order - 2, tol, kind);
  if (chain.truncated) {
    return nondiagnosable(std::move(chain), "contact chain exceeds the jet order; raise --order");
  }
  if (chain.rank < chain.k) {
    const std::string why = "chain Jacobi matrix has rank " + std::to_string(chain.rank) + " < k = " +
                            std::to_string(chain.k);
    return nondiagnosable(std::move(chain), why);
  }
  SingularityClass<T> s;
  s.verdict = target;
  s.index = chain.k + offset;
  s.certificate = std::move(chain);
  return s;
}

template <class T>
JetVec<T> eval_normal_or_cofactor(const MapSpec& spec, std::span<const T> p, int order, const Tolerances& tol) {
  return normal_map<T>(spec, p, order, tol.geometry());
}

template <class T>
void set_point(SingularityClass<T>& s, std::span<const T> p) {
  s.certificate.point.assign(p.begin(), p.end());
}

// (F, [nu]) immersive: rank of rows (F_xi, nu_xi) and (0, nu) is n + 1
template <class T>
bool legendrian_immersion(const JetVec<T>& f, const JetVec<T>& nu, double rank_tol) {
  const std::size_t m = f.size();
  const std::size_t n = static_cast<std::size_t>(f[0].nvars());
  std::vector<T> a;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& x : f) a.push_back(x.gradient()[i]);
    for (const auto& x : nu) a.push_back(x.gradient()[i]);
  }
  a.insert(a.end(), m, T{});
  for (const auto& x : nu) a.push_back(x.value());
  const auto sv = singular_values<T>(a, n + 1, 2 * m);
  return numerical_rank(sv, rank_tol) == static_cast<int>(n + 1);
}

// rank (nu; nu_x1; ..; nu_xn) = n + 1, i.e. [nu] is an immersion into projective space
template <class T>
bool projective_immersion(const JetVec<T>& nu, double rank_tol) {
  const std::size_t m = nu.size();
  const std::size_t n = static_cast<std::size_t>(nu[0].nvars());
  std::vector<T> a;
  for (const auto& x : nu) a.push_back(x.value());
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& x : nu) a.push_back(x.gradient()[i]);
  }
  const auto sv = singular_values<T>(a, n + 1, m);
  return numerical_rank(sv, rank_tol) == static_cast<int>(n + 1);
}

}  // namespace

const char* to_string(Admissible a) {
  switch (a) {
    case Admissible::kHessian: return "hessian-h";
    case Admissible::kLambdaMap: return "lambda-map";
    case Admissible::kLambdaFront: return "lambda-front";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kRegular: return "Regular";
    case Verdict::kInflection: return "inflection";
    case Verdict::kFrontSingularity: return "front-singularity";
    case Verdict::kMorin: return "Morin";
    case Verdict::kNondiagnosable: return "DegenerateNondiagnosable";
  }
  return "?";
}

const char* to_string(DualityRoute r) {
  switch (r) {
    case DualityRoute::kGaussMorin: return "gauss-morin";
    case DualityRoute::kGaussInflection: return "gauss-inflection";
    case DualityRoute::kDualFront: return "dual-front";
    case DualityRoute::kDualInflection: return "dual-inflection";
  }
  return "?";
}

template <class T>
std::string SingularityClass<T>::label() const {
  switch (verdict) {
    case Verdict::kRegular:
    case Verdict::kNondiagnosable: return to_string(verdict);
    default: return "A_" + std::to_string(index) + "-" + to_string(verdict);
  }
}

template <class T>
bool DualityResult<T>::consistent() const {
  if (!applicable) return false;
  if (primal.verdict == Verdict::kRegular || dual.verdict == Verdict::kRegular) {
    return primal.verdict == dual.verdict;
  }
  return primal.diagnosable() && dual.diagnosable() && primal.certificate.k == dual.certificate.k;
}

template <class T>
ContactChain<T> contact_chain(const Jet<T>& phi, const JetVec<T>& field, int max_k, const Tolerances& tol,
                              Admissible kind) {
  ContactChain<T> c;
  c.kind = kind;
  c.tol = tol;
  const int n = phi.nvars();
  c.admissible = phi.order() >= 1 &&
                 norm(std::span<const T>(phi.gradient())) > tol.zero * std::max(phi.max_abs_coeff(), 1e-300);
  const int limit = std::min(max_k, phi.order());
  std::vector<Jet<T>> chain{phi};
  double scale = 0.0;
  for (int j = 0;; ++j) {
    const Jet<T>& cur = chain.back();
    scale = std::max(scale, cur.max_abs_coeff());
    c.values.push_back(cur.value());
    if (scale > 0.0 && std::abs(cur.value()) >= tol.zero * scale) {
      c.k = j;
      break;
    }
    if (j >= limit || cur.order() == 0) {
      c.truncated = true;
      break;
    }
    chain.push_back(directional_derivative(cur, std::span<const Jet<T>>(field)));
  }
  c.scale = scale;
  if (c.k >= 1) {
    c.rows = static_cast<std::size_t>(c.k);
    c.cols = static_cast<std::size_t>(n);
    for (int r = 0; r < c.k; ++r) {
      const auto g = chain[static_cast<std::size_t>(r)].gradient();
      c.jacobi.insert(c.jacobi.end(), g.begin(), g.end());
    }
    c.singular_values = singular_values<T>(c.jacobi, c.rows, c.cols);
    c.rank = numerical_rank(c.singular_values, tol.rank);
  }
  return c;
}

template <class T>
JetVec<T> extend_field(const JetVec<T>& field, const Jet<T>& phi, Extension ext, std::uint64_t seed) {
  if (field.empty() || ext == Extension::kNatural) return field;
  const int n = phi.nvars();
  int order = 0;
  for (const auto& f : field) order = std::max(order, f.order());
  if (ext == Extension::kPerturbed) {
    std::mt19937_64 rng(seed);
    JetVec<T> out;
    for (const auto& f : field) out.push_back(f + phi.truncated(order) * random_quadratic<T>(n, order, rng));
    return out;
  }
  // projection onto {phi = 0} along the gradient direction at p
  const auto g = phi.gradient();
  const double gn = norm(std::span<const T>(g));
  if (gn == 0.0) return field;
  std::vector<T> dir(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) dir[i] = conj_if_complex(g[i]) / gn;
  std::vector<Jet<T>> x;
  for (int i = 0; i < n; ++i) x.push_back(Jet<T>::variable(i, T{}, n, order));
  Jet<T> t = Jet<T>::constant(T{}, n, order);
  std::vector<Jet<T>> inner(static_cast<std::size_t>(n));
  auto update_inner = [&] {
    for (int i = 0; i < n; ++i) inner[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] - t * dir[static_cast<std::size_t>(i)];
  };
  for (int it = 0; it <= order + 1; ++it) {
    update_inner();
    t = t + compose_map<T>(phi, std::span<const Jet<T>>(inner)) / T(gn);
  }
  update_inner();
  JetVec<T> out;
  for (const auto& f : field) out.push_back(compose_map<T>(f, std::span<const Jet<T>>(inner)));
  return out;
}

template <class T>
SingularityClass<T> classify_inflection_jets(const JetVec<T>& f, int nvars, bool projective,
                                             std::type_identity_t<const JetVec<T>*> normal,
                                             const ClassifyOptions& opt) {
  const auto hj = hessian_jets_of<T>(f, nvars, projective, normal, opt.tol.geometry());
  return verdict_from<T>(hj.hessian, hj.asymptotic, Admissible::kHessian, Verdict::kInflection, 1, opt);
}

template <class T>
SingularityClass<T> classify_front_jets(const JetVec<T>& phi, const JetVec<T>& nu, int nvars,
                                        const ClassifyOptions& opt) {
  const auto fr = lambda_front<T>(phi, nu, nvars, opt.tol.geometry());
  if (fr.singular && !legendrian_immersion(phi, nu, opt.tol.rank)) {
    ContactChain<T> c;
    c.kind = Admissible::kLambdaFront;
    c.tol = opt.tol;
    c.values = {fr.lambda.value()};
    c.scale = fr.lambda.max_abs_coeff();
    return nondiagnosable(std::move(c), "not a front at p: the Legendrian lift is not an immersion");
  }
  if (!fr.singular) {
    SingularityClass<T> s;
    s.verdict = Verdict::kRegular;
    s.certificate.kind = Admissible::kLambdaFront;
    s.certificate.values = {fr.lambda.value()};
    s.certificate.k = 0;
    s.certificate.scale = fr.lambda.max_abs_coeff();
    s.certificate.tol = opt.tol;
    return s;
  }
  return verdict_from<T>(fr.lambda, fr.null_field, Admissible::kLambdaFront, Verdict::kFrontSingularity, 1, opt);
}

template <class T>
SingularityClass<T> classify_morin_jets(const JetVec<T>& phi, int nvars, const ClassifyOptions& opt) {
  const auto fr = lambda_map<T>(phi, nvars, opt.tol.geometry());
  if (!fr.singular) {
    SingularityClass<T> s;
    s.verdict = Verdict::kRegular;
    s.certificate.kind = Admissible::kLambdaMap;
    s.certificate.values = {fr.lambda.value()};
    s.certificate.k = 0;
    s.certificate.scale = fr.lambda.max_abs_coeff();
    s.certificate.tol = opt.tol;
    return s;
  }
  return verdict_from<T>(fr.lambda, fr.null_field, Admissible::kLambdaMap, Verdict::kMorin, 0, opt);
}

template <class T>
SingularityClass<T> classify_inflection(const MapSpec& spec, std::span<const T> p, const ClassifyOptions& opt) {
  const auto hj = hessian_jets<T>(spec, p, opt.order, opt.tol.geometry());
  auto s = verdict_from<T>(hj.hessian, hj.asymptotic, Admissible::kHessian, Verdict::kInflection, 1, opt);
  set_point(s, p);
  return s;
}

template <class T>
SingularityClass<T> classify_front_singularity(const MapSpec& spec, std::span<const T> p,
                                               const ClassifyOptions& opt) {
  if (spec.kind != MapKind::kAffine && spec.kind != MapKind::kCurve) {
    throw Error(ErrorCode::kSpec, "front singularities need an affine front or a planar curve");
  }
  const JetVec<T> phi = eval_map<T>(spec, p, opt.order);
  const JetVec<T> nu = eval_normal_or_cofactor<T>(spec, p, opt.order - 1, opt.tol);
  auto s = classify_front_jets<T>(phi, nu, spec.n(), opt);
  set_point(s, p);
  return s;
}

template <class T>
SingularityClass<T> classify_morin(const MapSpec& spec, std::span<const T> p, const ClassifyOptions& opt) {
  if (spec.kind != MapKind::kPlaneMap) throw Error(ErrorCode::kSpec, "Morin singularities need a plane map (m = n)");
  auto s = classify_morin_jets<T>(eval_map<T>(spec, p, opt.order), spec.n(), opt);
  set_point(s, p);
  return s;
}

template <class T>
JetVec<T> gauss_chart(const JetVec<T>& nu) {
  const auto v = values(nu);
  return affine_chart(nu, argmax_abs(std::span<const T>(v)));
}

template <class T>
JetVec<T> affine_dual(const JetVec<T>& f, const JetVec<T>& nu) {
  if (f.size() != nu.size()) throw Error(ErrorCode::kShape, "normal and map dimensions differ");
  JetVec<T> g = nu;
  Jet<T> pairing = nu[0] * f[0];
  for (std::size_t i = 1; i < f.size(); ++i) pairing = pairing + nu[i] * f[i];
  g.push_back(-pairing);
  return g;
}

template <class T>
DualityResult<T> duality_route(const MapSpec& spec, std::span<const T> p, DualityRoute route,
                               const ClassifyOptions& opt) {
  DualityResult<T> r;
  r.route = route;
  const int n = spec.n();
  const int d = opt.order;
  const bool affine = spec.kind == MapKind::kAffine || spec.kind == MapKind::kCurve;
  switch (route) {
    case DualityRoute::kGaussMorin: {
      if (!affine) throw Error(ErrorCode::kSpec, "the Gauss-map route needs an affine hypersurface");
      r.primal = classify_inflection<T>(spec, p, opt);
      try {
        const JetVec<T> nu = eval_normal_or_cofactor<T>(spec, p, d - 1, opt.tol);
        r.dual = classify_morin_jets<T>(gauss_chart(nu), n, opt);
      } catch (const Error& e) {
        r.applicable = false;
        r.note = e.what();
      }
      break;
    }
    case DualityRoute::kGaussInflection: {
      if (!affine) throw Error(ErrorCode::kSpec, "the Gauss-inflection route needs an affine front");
      r.primal = classify_front_singularity<T>(spec, p, opt);
      const JetVec<T> nu = eval_normal_or_cofactor<T>(spec, p, d, opt.tol);
      if (!projective_immersion(nu, opt.tol.rank)) {
        r.applicable = false;
        r.note = "the affine Gauss map is not an immersion at p";
        break;
      }
      // Translate F so that nu(p) . F(p) = 1, then rescale nu so that F is its conormal.
      JetVec<T> F = eval_map<T>(spec, p, d);
      const auto nv = values(nu);
      const auto fv = values(F);
      double nn = 0.0;
      for (const T& x : nv) nn += std::norm(x);
      for (std::size_t i = 0; i < F.size(); ++i) F[i] = F[i] + (conj_if_complex(nv[i]) / nn - fv[i]);
      Jet<T> pairing = nu[0] * F[0];
      for (std::size_t i = 1; i < F.size(); ++i) pairing = pairing + nu[i] * F[i];
      const Jet<T> inv = reciprocal(pairing);
      JetVec<T> scaled;
      for (const auto& x : nu) scaled.push_back(x * inv);
      r.dual = classify_inflection_jets<T>(scaled, n, false, &F, opt);
      break;
    }
    case DualityRoute::kDualFront: {
      if (spec.kind == MapKind::kPlaneMap) throw Error(ErrorCode::kSpec, "a plane map has no dual front");
      const JetVec<T> F = homogeneous_lift<T>(spec, p, d);
      r.primal = classify_inflection_jets<T>(F, n, true, nullptr, opt);
      set_point(r.primal, p);
      const JetVec<T> G = dual_front_of(F);
      const auto gv = values(G);
      if (jet_scale(G) == 0.0 || norm(std::span<const T>(gv)) <= opt.tol.vanish * jet_scale(G)) {
        r.applicable = false;
        r.note = "the dual front vanishes at p (f is not immersed)";
        break;
      }
      const std::size_t j = argmax_abs(std::span<const T>(gv));
      JetVec<T> Fhat;
      for (std::size_t i = 0; i < F.size(); ++i) {
        if (i != j) Fhat.push_back(F[i]);
      }
      r.dual = classify_front_jets<T>(affine_chart(G, j), Fhat, n, opt);
      break;
    }
    case DualityRoute::kDualInflection: {
      if (!affine) throw Error(ErrorCode::kSpec, "the dual-inflection route needs an affine front");
      r.primal = classify_front_singularity<T>(spec, p, opt);
      const JetVec<T> F = eval_map<T>(spec, p, d);
      const JetVec<T> nu = eval_normal_or_cofactor<T>(spec, p, d, opt.tol);
      const JetVec<T> G = affine_dual(F, nu);
      const JetVec<T> GG = dual_front_of(G);
      const auto gv = values(GG);
      if (jet_scale(GG) == 0.0 || norm(std::span<const T>(gv)) <= opt.tol.vanish * jet_scale(GG)) {
        r.applicable = false;
        r.note = "the dual is not immersed at p";
        break;
      }
      r.dual = classify_inflection_jets<T>(G, n, true, nullptr, opt);
      break;
    }
  }
  set_point(r.dual, p);
  return r;
}

template <class T>
std::vector<DualityResult<T>> duality_check(const MapSpec& spec, std::span<const T> p, const ClassifyOptions& opt) {
  switch (spec.kind) {
    case MapKind::kProjective: return {duality_route<T>(spec, p, DualityRoute::kDualFront, opt)};
    case MapKind::kPlaneMap: throw Error(ErrorCode::kSpec, "duality checks need a hypersurface or a front");
    default: break;
  }
  bool singular = false;
  try {
    singular = lambda_front<T>(spec, p, opt.order, opt.tol.geometry()).singular;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kRankDeficient) throw;
    throw Error(ErrorCode::kRankDeficient, "the map is singular at p; supply a normal to treat it as a front");
  }
  if (singular) {
    return {duality_route<T>(spec, p, DualityRoute::kGaussInflection, opt),
            duality_route<T>(spec, p, DualityRoute::kDualInflection, opt)};
  }
  return {duality_route<T>(spec, p, DualityRoute::kGaussMorin, opt),
          duality_route<T>(spec, p, DualityRoute::kDualFront, opt)};
}

template <class T>
double split_identity_residual(const MapSpec& spec, std::span<const T> p) {
  if (spec.kind != MapKind::kAffine) throw Error(ErrorCode::kSpec, "the split identity needs an affine hypersurface");
  const std::size_t n = static_cast<std::size_t>(spec.n());
  const JetVec<T> f = eval_map<T>(spec, p, 3);
  const JetVec<T> nu = cofactor_normal(f);
  const auto hj = hessian_jets_of<T>(f, spec.n(), false, &nu);
  // rows (nu_x1; ..; nu_xn; nu), columns (F_x1, .., F_xn, nu^T)
  DenseMatrix<T> rows(n + 1, n + 1), cols(n + 1, n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const auto g = nu[k].gradient();
    const auto fg = f[k].gradient();
    for (std::size_t i = 0; i < n; ++i) {
      rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = g[i];
      cols(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = fg[i];
    }
    rows(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) = nu[k].value();
    cols(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n)) = nu[k].value();
  }
  const DenseMatrix<T> prod = rows * cols;
  T nn{};
  for (const auto& x : nu) nn += x.value() * x.value();
  double r = 0.0, scale = 1.0;
  for (Eigen::Index i = 0; i <= static_cast<Eigen::Index>(n); ++i) {
    for (Eigen::Index j = 0; j <= static_cast<Eigen::Index>(n); ++j) scale = std::max(scale, std::abs(prod(i, j)));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      r = std::max(r, std::abs(prod(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +
                               hj.form(i, j).value()));
    }
    r = std::max(r, std::abs(prod(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i))));
  }
  r = std::max(r, std::abs(prod(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) - nn));
  return r / scale;
}

#define DUALFRONT_INSTANTIATE(T)                                                                                     \
  template struct SingularityClass<T>;                                                                               \
  template struct DualityResult<T>;                                                                                  \
  template ContactChain<T> contact_chain<T>(const Jet<T>&, const JetVec<T>&, int, const Tolerances&, Admissible);    \
  template JetVec<T> extend_field<T>(const JetVec<T>&, const Jet<T>&, Extension, std::uint64_t);                     \
  template SingularityClass<T> classify_inflection<T>(const MapSpec&, std::span<const T>, const ClassifyOptions&);   \
  template SingularityClass<T> classify_front_singularity<T>(const MapSpec&, std::span<const T>,                     \
                                                             const ClassifyOptions&);                                \
  template SingularityClass<T> classify_morin<T>(const MapSpec&, std::span<const T>, const ClassifyOptions&);        \
  template SingularityClass<T> classify_inflection_jets<T>(const JetVec<T>&, int, bool, const JetVec<T>*,            \
                                                           const ClassifyOptions&);                                  \
  template SingularityClass<T> classify_front_jets<T>(const JetVec<T>&, const JetVec<T>&, int,                       \
                                                      const ClassifyOptions&);                                       \
  template SingularityClass<T> classify_morin_jets<T>(const JetVec<T>&, int, const ClassifyOptions&);                \
  template JetVec<T> gauss_chart<T>(const JetVec<T>&);                                                               \
  template JetVec<T> affine_dual<T>(const JetVec<T>&, const JetVec<T>&);                                             \
  template DualityResult<T> duality_route<T>(const MapSpec&, std::span<const T>, DualityRoute,                       \
                                             const ClassifyOptions&);                                                \
  template std::vector<DualityResult<T>> duality_check<T>(const MapSpec&, std::span<const T>,                        \
                                                          const ClassifyOptions&);                                   \
  template double split_identity_residual<T>(const MapSpec&, std::span<const T>);

DUALFRONT_INSTANTIATE(double)
DUALFRONT_INSTANTIATE(Complex)

#undef DUALFRONT_INSTANTIATE

}  // namespace dualfront
