#pragma once

// Iterated-contact chains and A_k verdicts for inflections, front
// singularities and equidimensional (Morin) singularities, plus the
// duality cross-checks between them.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dualfront/geometry.hpp"

namespace dualfront {

struct Tolerances {
  double zero = 1e-7;      // chain value counts as zero below zero * cumulative jet scale
  double rank = 1e-8;      // singular values below rank * sigma_max count as zero
  double singular = 1e-9;  // lambda(p) counts as zero below singular * jet scale
  double vanish = 1e-12;   // normal vectors count as vanishing below vanish * jet scale

  GeometryTolerances geometry() const { return {rank, singular, vanish}; }
};

/// How the field along the zero set is extended to a neighborhood.
/// kNatural uses the adjugate field as computed; kNormalFrozen composes it
/// with the projection onto the zero set along the gradient direction at
/// p; kPerturbed adds phi * W for a seeded random polynomial field W.
enum class Extension { kNatural, kNormalFrozen, kPerturbed };

struct ClassifyOptions {
  Tolerances tol;
  int order = kDefaultOrder;
  Extension extension = Extension::kNormalFrozen;
  std::uint64_t seed = 1;
  /// Optional nonvanishing factor: the chain runs on phi * (factor_shift + q)
  /// where q is a seeded random polynomial (0 disables).
  double factor_shift = 0.0;
};

enum class Admissible { kHessian, kLambdaMap, kLambdaFront };
const char* to_string(Admissible a);

template <class T>
struct ContactChain {
  std::vector<T> point;
  Admissible kind = Admissible::kHessian;
  std::vector<T> values;  // phi(p), phi'(p), ..., up to the first nonzero one
  int k = -1;             // index of the first nonzero value; -1 when not found
  std::size_t rows = 0, cols = 0;
  std::vector<T> jacobi;  // rows x cols, gradients of phi .. phi^(k-1)
  std::vector<double> singular_values;
  int rank = 0;
  bool admissible = false;  // d phi(p) != 0
  bool truncated = false;   // ran out of jet order before a nonzero value
  double scale = 0.0;
  Tolerances tol;
};

/// Chain phi, phi' = d phi(field), ... at the base point.
template <class T>
ContactChain<T> contact_chain(const Jet<T>& phi, const JetVec<T>& field, int max_k, const Tolerances& tol,
                              Admissible kind = Admissible::kHessian);

/// Extension of `field` (given along {phi = 0}) to a neighborhood.
template <class T>
JetVec<T> extend_field(const JetVec<T>& field, const Jet<T>& phi, Extension ext, std::uint64_t seed = 1);

enum class Verdict { kRegular, kInflection, kFrontSingularity, kMorin, kNondiagnosable };
const char* to_string(Verdict v);

template <class T>
struct SingularityClass {
  Verdict verdict = Verdict::kNondiagnosable;
  int index = 0;  // the subscript of A_index, 0 when regular or nondiagnosable
  ContactChain<T> certificate;
  std::string reason;  // set for nondiagnosable verdicts

  std::string label() const;
  bool diagnosable() const { return verdict != Verdict::kNondiagnosable; }
};

template <class T>
SingularityClass<T> classify_inflection(const MapSpec& spec, std::span<const T> p, const ClassifyOptions& opt = {});

template <class T>
SingularityClass<T> classify_front_singularity(const MapSpec& spec, std::span<const T> p,
                                               const ClassifyOptions& opt = {});

template <class T>
SingularityClass<T> classify_morin(const MapSpec& spec, std::span<const T> p, const ClassifyOptions& opt = {});

/// Jet-level forms. `f` holds the components at the base point; for
/// inflections, `projective` selects the dual-front Hessian and `normal`
/// (optional) overrides the cofactor normal.
template <class T>
SingularityClass<T> classify_inflection_jets(const JetVec<T>& f, int nvars, bool projective,
                                             std::type_identity_t<const JetVec<T>*> normal,
                                             const ClassifyOptions& opt = {});

template <class T>
SingularityClass<T> classify_front_jets(const JetVec<T>& phi, const JetVec<T>& nu, int nvars,
                                        const ClassifyOptions& opt = {});

template <class T>
SingularityClass<T> classify_morin_jets(const JetVec<T>& phi, int nvars, const ClassifyOptions& opt = {});

/// nu / nu_j with component j dropped, j the largest |nu_j(p)|: a chart of
/// the affine Gauss map.
template <class T>
JetVec<T> gauss_chart(const JetVec<T>& nu);

/// Homogeneous dual of an affine front with normal nu: (nu, -nu . F).
template <class T>
JetVec<T> affine_dual(const JetVec<T>& f, const JetVec<T>& nu);

enum class DualityRoute {
  kGaussMorin,       // inflection of F  <->  Morin singularity of the Gauss map
  kGaussInflection,  // front singularity of F  <->  inflection of the rescaled normal map
  kDualFront,        // inflection of f  <->  front singularity of the dual front
  kDualInflection,   // front singularity of f  <->  inflection of the dual
};
const char* to_string(DualityRoute r);

template <class T>
struct DualityResult {
  DualityRoute route = DualityRoute::kGaussMorin;
  SingularityClass<T> primal;
  SingularityClass<T> dual;
  bool applicable = true;  // false when the dual side violates its immersion hypothesis
  std::string note;
  /// Both sides regular, or both diagnosable with the same chain index.
  bool consistent() const;
};

template <class T>
DualityResult<T> duality_route(const MapSpec& spec, std::span<const T> p, DualityRoute route,
                               const ClassifyOptions& opt = {});

/// The routes that apply to the spec's kind at p (regular or singular).
template <class T>
std::vector<DualityResult<T>> duality_check(const MapSpec& spec, std::span<const T> p,
                                            const ClassifyOptions& opt = {});

/// Max deviation of rows (nu_x1; ..; nu_xn; nu) times columns
/// (F_x1, .., F_xn, nu^T) from [[-h_ij, *], [0, nu . nu]] at p.
template <class T>
double split_identity_residual(const MapSpec& spec, std::span<const T> p);

}  // namespace dualfront
