#pragma once

// Normal maps, Hessians, dual fronts and null directions of parametrized
// maps, all evaluated as jets at a base point.

#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include "dualfront/jet.hpp"
#include "dualfront/mapspec.hpp"

namespace dualfront {

template <class T>
using JetVec = std::vector<Jet<T>>;

inline constexpr int kDefaultOrder = 6;

struct GeometryTolerances {
  double rank = 1e-8;      // sigma counts as zero below rank * sigma_max
  double singular = 1e-9;  // |lambda(p)| below singular * scale means singular
  double vanish = 1e-12;   // normal treated as vanishing below vanish * scale
};

/// Projective point normalized so its largest-modulus coordinate is exactly 1.
template <class T>
struct HomogeneousPoint {
  std::vector<T> coords;
};

template <class T>
HomogeneousPoint<T> normalize_projective(std::span<const T> x);

/// Sine of the angle between the lines spanned by a and b (0 iff equal in P).
template <class T>
double projective_distance(std::span<const T> a, std::span<const T> b);

/// Components of the map at p as jets of the given order.
template <class T>
JetVec<T> eval_map(const MapSpec& spec, std::span<const T> p, int order);

/// Components plus a trailing constant 1 for affine/curve kinds.
template <class T>
JetVec<T> homogeneous_lift(const MapSpec& spec, std::span<const T> p, int order);

/// The covector v -> det(v_1, ..., v_{N-1}, v) for N-1 vectors in K^N.
template <class T>
JetVec<T> wedge(const std::vector<JetVec<T>>& vectors);

template <class T>
std::vector<JetVec<T>> partials(const JetVec<T>& f, int nvars);

/// Normal map nu = det(F_x1, ..., F_xn, .) of an affine map, or the user
/// normal when the spec supplies one. For curves whose cofactor normal
/// vanishes at p, the common zero factor is divided out.
template <class T>
JetVec<T> normal_map(const MapSpec& spec, std::span<const T> p, int order,
                     const GeometryTolerances& tol = {});

/// Same, from a component jet vector (affine, m = n + 1).
template <class T>
JetVec<T> cofactor_normal(const JetVec<T>& f, const GeometryTolerances& tol = {}, bool strip_curve_zero = true);

/// Dual front G = F_x1 ^ ... ^ F_xn ^ F of the homogeneous lift.
template <class T>
JetVec<T> dual_front(const MapSpec& spec, std::span<const T> p, int order);

template <class T>
JetVec<T> dual_front_of(const JetVec<T>& homogeneous);

/// max(|G.F|, |G.dF(e_j)|, |dG(e_j).F|) at the base point.
template <class T>
double incidence_check(const JetVec<T>& F, const JetVec<T>& G);

/// Y_i / Y_j for i != j: the affine chart of a projective map.
template <class T>
JetVec<T> affine_chart(const JetVec<T>& homogeneous, std::size_t j);

/// Kernel direction field of a rows x cols jet matrix (rows >= cols) of
/// corank one at the base point: the largest adjugate column of the
/// best-conditioned cols x cols row subset, scaled so its largest entry
/// at p equals 1. Empty when the corank is not one. Singular values below
/// rank_tol * max(sigma_max, reference) count as zero.
template <class T>
JetVec<T> kernel_field(const JetMatrix<T>& m, double rank_tol, double reference = 0.0);

/// Jacobian matrix (rows = components, cols = variables).
template <class T>
JetMatrix<T> jacobian(const JetVec<T>& f, int nvars);

/// Hessian-form jets of an affine (cofactor/user normal) or projective
/// (dual front) hypersurface.
template <class T>
struct HessianJets {
  JetVec<T> normal;      // nu, or G for projective maps
  JetMatrix<T> form;     // h_ij
  Jet<T> hessian;        // h = det(h_ij)
  JetVec<T> asymptotic;  // extension of xi; empty unless rank(h_ij(p)) = n - 1
};

template <class T>
HessianJets<T> hessian_jets(const MapSpec& spec, std::span<const T> p, int order,
                            const GeometryTolerances& tol = {});

/// From component jets; `projective` selects the dual-front normal.
template <class T>
HessianJets<T> hessian_jets_of(const JetVec<T>& f, int nvars, bool projective,
                               std::type_identity_t<const JetVec<T>*> user_normal,
                               const GeometryTolerances& tol = {});

template <class T>
struct HessianData {
  std::vector<T> point;
  std::vector<T> nu;
  std::vector<T> hess;  // n x n row-major
  T h{};
  std::vector<T> grad_h;
  std::optional<std::vector<T>> asymptotic;  // unit vector
  bool nondegenerate = false;
};

template <class T>
HessianData<T> hessian_data(const MapSpec& spec, std::span<const T> p, int order = kDefaultOrder,
                            const GeometryTolerances& tol = {});

template <class T>
HomogeneousPoint<T> affine_gauss(const MapSpec& spec, std::span<const T> p);

enum class LambdaKind { kMap, kFront };

template <class T>
struct FrontFrame {
  std::vector<T> point;
  LambdaKind kind = LambdaKind::kFront;
  Jet<T> lambda;
  bool singular = false;
  JetVec<T> null_field;  // empty at regular points
};

/// lambda = det(Phi_x1, ..., Phi_xn, nu) for a front Phi: K^n -> K^{n+1}.
template <class T>
FrontFrame<T> lambda_front(const JetVec<T>& phi, const JetVec<T>& nu, int nvars, const GeometryTolerances& tol = {});

/// lambda = det(Phi_x1, ..., Phi_xn) for Phi: K^n -> K^n.
template <class T>
FrontFrame<T> lambda_map(const JetVec<T>& phi, int nvars, const GeometryTolerances& tol = {});

/// Spec-level wrapper: uses the spec's normal (or the cofactor normal).
template <class T>
FrontFrame<T> lambda_front(const MapSpec& spec, std::span<const T> p, int order = kDefaultOrder,
                           const GeometryTolerances& tol = {});

enum class ChartProjection { kSphereToProjective, kHyperbolicToHemisphere };

/// S^3 -> P(R^4) (normalized representative) or H^3 -> S^3_+ (x / |x|).
std::vector<double> chart_projection(ChartProjection which, std::span<const double> p);

}  // namespace dualfront
