#pragma once

// Global structure over a 2-D real parameter box: zero curves of the
// Hessian (or of lambda), godrons on the parabolic curves and their signs,
// the Euler characteristic of the negative region, and the godron census.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dualfront/classify.hpp"
#include "dualfront/kernels.hpp"

namespace dualfront {

using Point2 = std::array<double, 2>;

enum class ZeroFunction { kHessian, kLambda };
const char* to_string(ZeroFunction f);

/// Value of h (or lambda) at p, with gradient and jet scale.
struct ZeroSample {
  double value = 0.0;
  Point2 grad{0.0, 0.0};
  double scale = 0.0;  // largest jet coefficient; only meaningful with the gradient
};
ZeroSample zero_sample(const MapSpec& spec, ZeroFunction which, const Point2& p, bool with_gradient = true);

struct TraceOptions {
  int grid = 128;
  double tol = 1e-9;       // |f| < tol * jet scale after refinement
  int newton_iters = 30;
  Execution exec = Execution::kParallel;
  bool with_data = true;   // per-vertex HessianData on h-curves
};

struct TracedCurve {
  ZeroFunction which = ZeroFunction::kHessian;
  std::vector<Point2> points;  // wrapped into the domain box
  std::vector<double> values;
  std::vector<HessianData<double>> data;
  std::vector<std::size_t> degenerate;  // vertices where the gradient vanishes
  bool closed = false;
  double tolerance = 0.0;
  double step = 0.0;  // lattice cell diagonal, bounds the gap between consecutive vertices
};

/// Marching squares on a grid x grid lattice plus Newton refinement.
/// Curves are oriented with the negative side on the left.
std::vector<TracedCurve> trace_zero_curve(const MapSpec& spec, ZeroFunction which, const TraceOptions& opt = {});

struct Godron {
  Point2 point{0.0, 0.0};
  std::size_t curve = 0;
  int sign = 0;  // +1 or -1 once signed
  bool resolved = false;
  SingularityClass<double> certificate;
  std::vector<Point2> tail_samples;
  std::string note;
};

struct HypothesisViolation {
  Point2 point{0.0, 0.0};
  std::string label;
  std::string reason;
};

struct EulerOptions {
  int grid = 64;
  int max_depth = 4;
  Execution exec = Execution::kParallel;
};

struct SignOptions {
  double radius = 0.02;  // half distance between the preimage pairs
  int newton_iters = 60;
};

struct CensusOptions {
  TraceOptions trace;
  EulerOptions euler;
  SignOptions sign;
  ClassifyOptions classify;
  int check_stride = 8;  // classify every check_stride-th curve vertex
};

struct GodronCensus {
  std::vector<Godron> godrons;
  std::vector<HypothesisViolation> violations;
  // whole parabolic curves that are asymptotic curves (psi identically 0):
  // no isolated godrons there, reported without failing the census
  std::vector<HypothesisViolation> warnings;
  int i2_plus = 0;
  int i2_minus = 0;
  int chi_minus = 0;
  int chi_plus = 0;
  int chi_domain = 0;
  int residual = 0;  // i2_plus - i2_minus - 2 chi_minus
  bool signed_ = false;

  bool hypotheses_ok() const { return violations.empty(); }
  int total() const { return static_cast<int>(godrons.size()); }
  bool even() const { return total() % 2 == 0; }
};

/// Sign changes of psi = dh(xi) along the curves, refined and classified.
/// Unsigned: sign fields are left at 0.
GodronCensus find_godrons(const MapSpec& spec, const std::vector<TracedCurve>& curves,
                          const CensusOptions& opt = {});

struct GodronSign {
  int sign = 0;
  bool resolved = false;
  Point2 q1{0.0, 0.0}, q2{0.0, 0.0};  // preimages of a self-intersection of the dual front
  std::vector<Point2> tail_samples;
  double residual = 0.0;
  std::string note;
};

/// +1 when h < 0 on the tail part of the dual swallowtail at p, else -1.
GodronSign godron_sign(const MapSpec& spec, const Point2& p, const SignOptions& opt = {});

/// Adaptively refined triangulation of the closed parameter domain with
/// the sign of h at every vertex. Vertices are identified across periodic
/// edges.
struct SignedTriangulation {
  std::vector<Point2> vertices;
  std::vector<std::int8_t> sign;  // -1, 0 or +1
  std::vector<std::array<std::int32_t, 3>> triangles;
  std::vector<std::uint8_t> depth;  // subdivision depth per triangle
};

SignedTriangulation signed_triangulation(const MapSpec& spec, const EulerOptions& opt = {});

struct EulerResult {
  int chi_minus = 0;
  int chi_plus = 0;
  int chi_domain = 0;
  SubcomplexCounts minus, plus, domain;
  std::size_t vertices = 0;
  std::size_t triangles = 0;
};

EulerResult euler_characteristics(const MapSpec& spec, const EulerOptions& opt = {});
int euler_characteristic_Mminus(const MapSpec& spec, const EulerOptions& opt = {});

/// Trace, godrons, signs and chi(M_-) in one pass.
GodronCensus verify_theorem_c(const MapSpec& spec, const CensusOptions& opt = {});

/// Curves as rows "curve,u,v,value".
void write_curves_csv(std::ostream& out, const std::vector<TracedCurve>& curves);

/// Domain square with zero curves and godron markers (+ filled, - hollow).
void write_svg(std::ostream& out, const MapSpec& spec, const std::vector<TracedCurve>& curves,
               const GodronCensus* census = nullptr);

}  // namespace dualfront
