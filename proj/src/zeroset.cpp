#include "dualfront/zeroset.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "dualfront/linalg.hpp"

namespace dualfront {

namespace {

struct Box {
  double lo[2];
  double hi[2];
  bool periodic[2];

  double width(int a) const { return hi[a] - lo[a]; }
};

Box domain_box(const MapSpec& spec) {
  if (spec.n() != 2) throw Error(ErrorCode::kSpec, "zero-set analysis needs two parameters");
  if (spec.field != ScalarField::kReal) throw Error(ErrorCode::kSpec, "zero-set analysis needs a real map");
  if (!spec.has_domain()) throw Error(ErrorCode::kSpec, "zero-set analysis needs a domain box");
  Box b{};
  for (int a = 0; a < 2; ++a) {
    const auto& r = spec.domain[static_cast<std::size_t>(a)];
    b.lo[a] = r.lo;
    b.hi[a] = r.hi;
    b.periodic[a] = r.periodic;
  }
  return b;
}

// Shortest displacement from p to q, respecting periodic identifications.
Point2 delta(const Box& b, const Point2& p, const Point2& q) {
  Point2 d{q[0] - p[0], q[1] - p[1]};
  for (int a = 0; a < 2; ++a) {
    if (b.periodic[a]) d[static_cast<std::size_t>(a)] -= b.width(a) * std::round(d[static_cast<std::size_t>(a)] / b.width(a));
  }
  return d;
}

Point2 wrap(const Box& b, Point2 p) {
  for (int a = 0; a < 2; ++a) {
    auto& x = p[static_cast<std::size_t>(a)];
    if (b.periodic[a]) {
      x = b.lo[a] + std::fmod(x - b.lo[a], b.width(a));
      if (x < b.lo[a]) x += b.width(a);
      if (x >= b.hi[a]) x -= b.width(a);
    }
  }
  return p;
}

double dist(const Box& b, const Point2& p, const Point2& q) {
  const auto d = delta(b, p, q);
  return std::hypot(d[0], d[1]);
}

int sgn(double x) { return x < 0.0 ? -1 : 1; }

std::vector<double> vec(const Point2& p) { return {p[0], p[1]}; }

// Newton steps along the gradient onto {f = 0}; returns false if it stalls.
bool newton_project(const MapSpec& spec, ZeroFunction which, Point2& p, double tol, int iters, double max_move) {
  const Point2 start = p;
  ZeroSample s = zero_sample(spec, which, p);
  for (int it = 0; it < iters; ++it) {
    if (std::abs(s.value) < tol * s.scale) return true;
    const double g2 = s.grad[0] * s.grad[0] + s.grad[1] * s.grad[1];
    if (g2 == 0.0) return false;
    const Point2 step{s.value * s.grad[0] / g2, s.value * s.grad[1] / g2};
    double lam = 1.0;
    bool moved = false;
    for (int k = 0; k < 12; ++k, lam *= 0.5) {
      const Point2 q{p[0] - lam * step[0], p[1] - lam * step[1]};
      const ZeroSample sq = zero_sample(spec, which, q);
      if (std::abs(sq.value) < std::abs(s.value)) {
        p = q;
        s = sq;
        moved = true;
        break;
      }
    }
    if (!moved) return std::abs(s.value) < tol * s.scale;
    if (std::hypot(p[0] - start[0], p[1] - start[1]) > max_move) return false;
  }
  return std::abs(s.value) < tol * s.scale;
}

struct Crossing {
  Point2 a, b;
  double fa = 0.0, fb = 0.0;
  Point2 point{0.0, 0.0};
  double value = 0.0;
  bool degenerate = false;
};

void refine_crossing(const MapSpec& spec, ZeroFunction which, Crossing& c, const TraceOptions& opt, double step) {
  const double t = c.fa / (c.fa - c.fb);
  Point2 p{c.a[0] + t * (c.b[0] - c.a[0]), c.a[1] + t * (c.b[1] - c.a[1])};
  if (!newton_project(spec, which, p, opt.tol, opt.newton_iters, 1.5 * step)) {
    // bisection along the grid edge
    Point2 lo = c.a, hi = c.b;
    double flo = c.fa;
    for (int it = 0; it < 100; ++it) {
      p = {0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])};
      const ZeroSample s = zero_sample(spec, which, p, false);
      if (std::abs(s.value) < opt.tol * s.scale) break;
      if (sgn(s.value) == sgn(flo)) {
        lo = p;
        flo = s.value;
      } else {
        hi = p;
      }
    }
  }
  const ZeroSample s = zero_sample(spec, which, p);
  c.point = p;
  c.value = s.value;
  c.degenerate = std::hypot(s.grad[0], s.grad[1]) <= 1e-6 * s.scale;
}

template <class A, class B>
double dot2(const A& a, const B& b) {
  return a[0] * b[0] + a[1] * b[1];
}

std::string fmt_point(const Point2& p) {
  std::ostringstream os;
  os.precision(6);
  os << "(" << p[0] << ", " << p[1] << ")";
  return os.str();
}

}  // namespace

const char* to_string(ZeroFunction f) { return f == ZeroFunction::kHessian ? "h" : "lambda"; }

ZeroSample zero_sample(const MapSpec& spec, ZeroFunction which, const Point2& p, bool with_gradient) {
  const std::vector<double> x = vec(p);
  Jet<double> f;
  if (which == ZeroFunction::kHessian) {
    f = hessian_jets<double>(spec, x, with_gradient ? 3 : 2).hessian;
  } else {
    f = lambda_front<double>(spec, x, with_gradient ? 2 : 1).lambda;
  }
  ZeroSample s;
  s.value = f.value();
  s.scale = f.max_abs_coeff();
  if (with_gradient && f.order() >= 1) {
    const auto g = f.gradient();
    s.grad = {g[0], g[1]};
  }
  return s;
}

std::vector<TracedCurve> trace_zero_curve(const MapSpec& spec, ZeroFunction which, const TraceOptions& opt) {
  const Box box = domain_box(spec);
  if (opt.grid < 16) throw Error(ErrorCode::kSpec, "grid must be at least 16");
  int nodes[2];
  double step[2];
  for (int a = 0; a < 2; ++a) {
    nodes[a] = box.periodic[a] ? opt.grid : opt.grid + 1;
    step[a] = box.width(a) / opt.grid;
  }
  const auto node_pos = [&](int i, int j) { return Point2{box.lo[0] + i * step[0], box.lo[1] + j * step[1]}; };
  std::vector<Point2> pts;
  for (int i = 0; i < nodes[0]; ++i) {
    for (int j = 0; j < nodes[1]; ++j) pts.push_back(node_pos(i, j));
  }
  const auto vals = evaluate_points([&](const Point2& p) { return zero_sample(spec, which, p, false).value; }, pts,
                                    opt.exec);
  const auto wrap_i = [&](int a, int i) { return box.periodic[a] ? (i % nodes[a] + nodes[a]) % nodes[a] : i; };
  const auto val = [&](int i, int j) {
    return vals[static_cast<std::size_t>(wrap_i(0, i) * nodes[1] + wrap_i(1, j))];
  };
  const auto valid = [&](int a, int i) { return box.periodic[a] || (i >= 0 && i < nodes[a]); };
  // edge id: 2 * (node index) + dir, dir 0 along u, 1 along v
  const auto edge_id = [&](int i, int j, int dir) { return 2 * (wrap_i(0, i) * nodes[1] + wrap_i(1, j)) + dir; };
  const int num_edges = 2 * nodes[0] * nodes[1];
  std::vector<int> crossing_index(static_cast<std::size_t>(num_edges), -1);
  std::vector<Crossing> crossings;
  const auto crossing_of = [&](int i, int j, int dir) {
    const int di = dir == 0 ? 1 : 0, dj = 1 - di;
    if (!valid(0, i + di) || !valid(1, j + dj)) return -1;
    const int id = edge_id(i, j, dir);
    if (crossing_index[static_cast<std::size_t>(id)] >= 0) return id;
    const double fa = val(i, j), fb = val(i + di, j + dj);
    if (sgn(fa) == sgn(fb)) return -1;
    Crossing c;
    c.a = node_pos(i, j);
    c.b = node_pos(i + di, j + dj);
    c.fa = fa;
    c.fb = fb;
    crossing_index[static_cast<std::size_t>(id)] = static_cast<int>(crossings.size());
    crossings.push_back(c);
    return id;
  };
  std::vector<std::array<int, 2>> nbr(static_cast<std::size_t>(num_edges), {-1, -1});
  const auto link = [&](int a, int b) {
    auto add = [&](int x, int y) {
      auto& n = nbr[static_cast<std::size_t>(x)];
      (n[0] < 0 ? n[0] : n[1]) = y;
    };
    add(a, b);
    add(b, a);
  };
  const int cells_u = box.periodic[0] ? nodes[0] : nodes[0] - 1;
  const int cells_v = box.periodic[1] ? nodes[1] : nodes[1] - 1;
  for (int i = 0; i < cells_u; ++i) {
    for (int j = 0; j < cells_v; ++j) {
      const int e[4] = {crossing_of(i, j, 0), crossing_of(i + 1, j, 1), crossing_of(i, j + 1, 0), crossing_of(i, j, 1)};
      std::vector<int> on;
      for (int k = 0; k < 4; ++k) {
        if (e[k] >= 0) on.push_back(k);
      }
      if (on.size() == 2) {
        link(e[on[0]], e[on[1]]);
      } else if (on.size() == 4) {
        const Point2 c{box.lo[0] + (i + 0.5) * step[0], box.lo[1] + (j + 0.5) * step[1]};
        const double fc = zero_sample(spec, which, c, false).value;
        if (sgn(fc) == sgn(val(i, j))) {
          link(e[0], e[1]);  // cut off the (i+1, j) corner
          link(e[2], e[3]);  // and the (i, j+1) corner
        } else {
          link(e[0], e[3]);
          link(e[1], e[2]);
        }
      }
    }
  }
  parallel_for(crossings.size(),
               [&](std::size_t k) { refine_crossing(spec, which, crossings[k], opt, std::max(step[0], step[1])); },
               opt.exec);

  std::vector<char> seen(static_cast<std::size_t>(num_edges), 0);
  std::vector<std::vector<int>> chains;
  std::vector<bool> closed;
  const auto walk = [&](int start) {
    std::vector<int> chain;
    int cur = start;
    while (cur >= 0 && !seen[static_cast<std::size_t>(cur)]) {
      seen[static_cast<std::size_t>(cur)] = 1;
      chain.push_back(cur);
      int next = -1;
      for (int x : nbr[static_cast<std::size_t>(cur)]) {
        if (x >= 0 && !seen[static_cast<std::size_t>(x)]) {
          next = x;
          break;
        }
      }
      cur = next;
    }
    return chain;
  };
  for (int id = 0; id < num_edges; ++id) {
    if (crossing_index[static_cast<std::size_t>(id)] < 0 || seen[static_cast<std::size_t>(id)]) continue;
    const auto& n = nbr[static_cast<std::size_t>(id)];
    if (n[1] < 0) {  // an end at the box boundary
      chains.push_back(walk(id));
      closed.push_back(false);
    }
  }
  for (int id = 0; id < num_edges; ++id) {
    if (crossing_index[static_cast<std::size_t>(id)] < 0 || seen[static_cast<std::size_t>(id)]) continue;
    chains.push_back(walk(id));
    closed.push_back(true);
  }

  std::vector<TracedCurve> curves;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    TracedCurve tc;
    tc.which = which;
    tc.closed = closed[c] && chains[c].size() > 2;
    tc.tolerance = opt.tol;
    tc.step = std::hypot(step[0], step[1]);
    std::vector<bool> degenerate;
    for (int id : chains[c]) {
      const auto& x = crossings[static_cast<std::size_t>(crossing_index[static_cast<std::size_t>(id)])];
      const Point2 p = wrap(box, x.point);
      if (!tc.points.empty() && dist(box, tc.points.back(), p) < 1e-12) continue;
      tc.points.push_back(p);
      tc.values.push_back(x.value);
      degenerate.push_back(x.degenerate);
    }
    if (tc.points.size() < 2) continue;
    // negative side on the left
    const ZeroSample s0 = zero_sample(spec, which, tc.points[0]);
    const Point2 t = delta(box, tc.points[0], tc.points[1]);
    if (-t[1] * s0.grad[0] + t[0] * s0.grad[1] > 0.0) {
      std::reverse(tc.points.begin(), tc.points.end());
      std::reverse(tc.values.begin(), tc.values.end());
      std::reverse(degenerate.begin(), degenerate.end());
    }
    for (std::size_t k = 0; k < degenerate.size(); ++k) {
      if (degenerate[k]) tc.degenerate.push_back(k);
    }
    if (which == ZeroFunction::kHessian && opt.with_data) {
      tc.data.resize(tc.points.size());
      parallel_for(tc.points.size(), [&](std::size_t k) { tc.data[k] = hessian_data<double>(spec, vec(tc.points[k]), 3); },
                   opt.exec);
    }
    curves.push_back(std::move(tc));
  }
  return curves;
}

namespace {

// psi = dh(xi) at q with xi aligned to `ref`; nullopt when xi is undefined.
std::optional<double> psi_at(const MapSpec& spec, const Point2& q, const Point2& ref, Point2* xi_out = nullptr,
                             double* grad_norm = nullptr) {
  const auto hd = hessian_data<double>(spec, vec(q), 3);
  if (!hd.asymptotic) return std::nullopt;
  Point2 xi{(*hd.asymptotic)[0], (*hd.asymptotic)[1]};
  if (dot2(xi, ref) < 0.0) xi = {-xi[0], -xi[1]};
  if (xi_out) *xi_out = xi;
  if (grad_norm) *grad_norm = std::hypot(hd.grad_h[0], hd.grad_h[1]);
  return dot2(hd.grad_h, xi);
}

}  // namespace

GodronCensus find_godrons(const MapSpec& spec, const std::vector<TracedCurve>& curves_in, const CensusOptions& opt) {
  const Box box = domain_box(spec);
  GodronCensus census;
  std::vector<TracedCurve> curves = curves_in;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    auto& curve = curves[c];
    if (curve.which != ZeroFunction::kHessian) throw Error(ErrorCode::kSpec, "godrons live on the parabolic curve");
    const std::size_t m = curve.points.size();
    if (curve.data.size() != m) {
      curve.data.resize(m);
      parallel_for(m, [&](std::size_t k) { curve.data[k] = hessian_data<double>(spec, vec(curve.points[k]), 3); },
                   opt.trace.exec);
    }
    for (std::size_t k : curve.degenerate) {
      census.violations.push_back({curve.points[k], "DegenerateNondiagnosable", "dh vanishes on the parabolic curve"});
    }
    std::vector<Point2> xi(m);
    std::vector<double> psi(m);
    bool defined = true;
    for (std::size_t k = 0; k < m; ++k) {
      const auto& d = curve.data[k];
      if (!d.asymptotic) {
        census.violations.push_back({curve.points[k], "DegenerateNondiagnosable", "flat point: no asymptotic direction"});
        defined = false;
        break;
      }
      xi[k] = {(*d.asymptotic)[0], (*d.asymptotic)[1]};
      if (k > 0 && dot2(xi[k], xi[k - 1]) < 0.0) xi[k] = {-xi[k][0], -xi[k][1]};
      psi[k] = dot2(d.grad_h, xi[k]);
    }
    if (!defined) continue;
    double psi_max = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const auto& gh = curve.data[k].grad_h;
      psi_max = std::max(psi_max, std::abs(psi[k]) / std::max(std::hypot(gh[0], gh[1]), 1e-300));
    }
    if (psi_max < 1e-7) {
      census.warnings.push_back({curve.points[0], "DegenerateNondiagnosable",
                                 "asymptotic direction is tangent to the whole parabolic curve"});
      continue;
    }
    const std::size_t segments = curve.closed ? m : m - 1;
    std::vector<std::pair<std::size_t, std::size_t>> changes;
    for (std::size_t k = 0; k < segments; ++k) {
      const std::size_t k2 = (k + 1) % m;
      double next = psi[k2];
      if (k2 == 0 && dot2(xi[0], xi[m - 1]) < 0.0) next = -next;
      if (sgn(psi[k]) != sgn(next)) changes.emplace_back(k, k2);
    }
    std::vector<Godron> found(changes.size());
    parallel_for(
        changes.size(),
        [&](std::size_t g) {
          const auto [ka, kb] = changes[g];
          const Point2 a = curve.points[ka];
          const Point2 d = delta(box, a, curve.points[kb]);
          const Point2 ref = xi[ka];
          double lo = 0.0, hi = 1.0;
          const int slo = sgn(psi[ka]);
          Point2 q = a;
          for (int it = 0; it < 60; ++it) {
            const double s = 0.5 * (lo + hi);
            q = {a[0] + s * d[0], a[1] + s * d[1]};
            newton_project(spec, ZeroFunction::kHessian, q, 1e-13, 12, 2.0 * curve.step);
            double gn = 0.0;
            const auto p = psi_at(spec, q, ref, nullptr, &gn);
            if (!p) break;
            if (std::abs(*p) < 1e-9 * gn) break;
            (sgn(*p) == slo ? lo : hi) = s;
          }
          Godron& out = found[g];
          out.point = wrap(box, q);
          out.curve = c;
          out.certificate = classify_inflection<double>(spec, vec(out.point), opt.classify);
        },
        opt.trace.exec);
    // a sign-change pair closer than the grid step is a double zero of psi split by rounding
    std::vector<bool> merged(found.size(), false);
    for (std::size_t i = 0; i < found.size(); ++i) {
      for (std::size_t j = i + 1; j < found.size() && !merged[i]; ++j) {
        if (merged[j] || dist(box, found[i].point, found[j].point) >= curve.step) continue;
        merged[i] = merged[j] = true;
        const Point2 d = delta(box, found[i].point, found[j].point);
        const Point2 mid = wrap(box, {found[i].point[0] + 0.5 * d[0], found[i].point[1] + 0.5 * d[1]});
        const auto s = classify_inflection<double>(spec, vec(mid), opt.classify);
        census.violations.push_back({mid, s.label(), "two A_3 candidates coalesce (degenerate inflection)"});
      }
    }
    for (std::size_t i = 0; i < found.size(); ++i) {
      if (merged[i]) continue;
      auto& g = found[i];
      const auto& s = g.certificate;
      if (s.verdict == Verdict::kInflection && s.index == 3) {
        const bool dup = std::any_of(census.godrons.begin(), census.godrons.end(),
                                     [&](const Godron& o) { return dist(box, o.point, g.point) < 1e-6; });
        if (!dup) census.godrons.push_back(std::move(g));
      } else {
        std::string why = s.verdict == Verdict::kNondiagnosable ? s.reason
                          : s.index >= 4 ? "inflection beyond A_3 on the parabolic curve"
                                         : "psi changes sign without an A_3 point";
        census.violations.push_back({g.point, s.label(), why});
      }
    }
    // tangential zeros of psi: near-zero local minima of |psi| without a sign change
    std::vector<double> r(m);
    for (std::size_t k = 0; k < m; ++k) {
      const auto& gh = curve.data[k].grad_h;
      r[k] = std::abs(psi[k]) / std::max(std::hypot(gh[0], gh[1]), 1e-300);
    }
    std::vector<std::size_t> dips;
    for (std::size_t k = curve.closed ? 0 : 1; k + (curve.closed ? 0 : 1) < m; ++k) {
      const std::size_t a = (k + m - 1) % m, b = (k + 1) % m;
      if (r[k] > r[a] || r[k] > r[b] || r[k] >= 0.05 * psi_max) continue;
      const auto straddles = [&](std::size_t i) {
        return std::any_of(changes.begin(), changes.end(), [&](const auto& e) { return e.first == i || e.second == i; });
      };
      if (!straddles(k)) dips.push_back(k);
    }
    std::vector<std::optional<HypothesisViolation>> dip_found(dips.size());
    parallel_for(
        dips.size(),
        [&](std::size_t i) {
          const std::size_t k = dips[i], a = (k + m - 1) % m, b = (k + 1) % m;
          const Point2 pa = curve.points[a];
          const Point2 d = delta(box, pa, curve.points[b]);
          const auto ratio = [&](double t, Point2& q) {
            q = {pa[0] + t * d[0], pa[1] + t * d[1]};
            newton_project(spec, ZeroFunction::kHessian, q, 1e-13, 12, 2.0 * curve.step);
            double gn = 0.0;
            const auto p = psi_at(spec, q, xi[k], nullptr, &gn);
            return p ? std::abs(*p) / std::max(gn, 1e-300) : 0.0;
          };
          // golden-section search for the minimum of |psi| / |dh|
          const double g = 0.5 * (std::sqrt(5.0) - 1.0);
          double lo = 0.0, hi = 1.0;
          Point2 q1, q2;
          double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
          double f1 = ratio(x1, q1), f2 = ratio(x2, q2);
          for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
            if (f1 < f2) {
              hi = x2, x2 = x1, f2 = f1, q2 = q1;
              x1 = hi - g * (hi - lo), f1 = ratio(x1, q1);
            } else {
              lo = x1, x1 = x2, f1 = f2, q1 = q2;
              x2 = lo + g * (hi - lo), f2 = ratio(x2, q2);
            }
          }
          const Point2 q = wrap(box, f1 < f2 ? q1 : q2);
          const auto s = classify_inflection<double>(spec, vec(q), opt.classify);
          if (s.verdict == Verdict::kInflection && s.index == 2) return;
          dip_found[i] = HypothesisViolation{
              q, s.label(),
              s.verdict == Verdict::kNondiagnosable ? s.reason : "asymptotic direction touches the parabolic curve"};
        },
        opt.trace.exec);
    for (auto& v : dip_found) {
      if (v) census.violations.push_back(std::move(*v));
    }
    // every sampled vertex away from the godrons should be an A_2-inflection
    std::vector<std::size_t> sample;
    for (std::size_t k = 0; k < m; k += static_cast<std::size_t>(std::max(1, opt.check_stride))) {
      const bool near = std::any_of(census.godrons.begin(), census.godrons.end(), [&](const Godron& o) {
        return dist(box, o.point, curve.points[k]) < 2.0 * curve.step;
      });
      if (!near) sample.push_back(k);
    }
    std::vector<SingularityClass<double>> verdicts(sample.size());
    parallel_for(sample.size(),
                 [&](std::size_t i) { verdicts[i] = classify_inflection<double>(spec, vec(curve.points[sample[i]]), opt.classify); },
                 opt.trace.exec);
    std::size_t bad = 0, first = 0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      const auto& s = verdicts[i];
      if (s.verdict == Verdict::kInflection && s.index == 2) continue;
      if (bad++ == 0) first = i;
    }
    if (bad > 0) {
      const auto& s = verdicts[first];
      census.violations.push_back(
          {curve.points[sample[first]], s.label(),
           std::to_string(bad) + " of " + std::to_string(sample.size()) + " sampled parabolic points are not A_2 (" +
               (s.verdict == Verdict::kNondiagnosable ? s.reason : "higher contact") + ")"});
    }
  }
  return census;
}

GodronSign godron_sign(const MapSpec& spec, const Point2& p, const SignOptions& opt) {
  GodronSign out;
  const auto G0 = dual_front<double>(spec, vec(p), 0);
  std::vector<double> g0;
  for (const auto& x : G0) g0.push_back(x.value());
  const std::size_t j = argmax_abs(std::span<const double>(g0));
  const auto chart = [&](const Point2& q) { return affine_chart(dual_front<double>(spec, vec(q), 1), j); };
  const auto hd = hessian_data<double>(spec, vec(p), 3);
  if (!hd.asymptotic) {
    out.note = "no asymptotic direction at the godron";
    return out;
  }
  const double theta0 = std::atan2((*hd.asymptotic)[1], (*hd.asymptotic)[0]);
  double gscale = 1.0;
  for (const auto& x : chart(p)) gscale = std::max(gscale, x.max_abs_coeff());

  for (double factor : {1.0, 0.5, 2.0, 0.25}) {
    const double s = opt.radius * factor;
    Eigen::Vector3d x(p[0], p[1], theta0);
    const auto residual = [&](const Eigen::Vector3d& y, Eigen::Matrix3d* jac) {
      const Point2 d{s * std::cos(y[2]), s * std::sin(y[2])};
      const Point2 dp{-s * std::sin(y[2]), s * std::cos(y[2])};
      const auto c1 = chart({y[0] + d[0], y[1] + d[1]});
      const auto c2 = chart({y[0] - d[0], y[1] - d[1]});
      Eigen::Vector3d r;
      for (int i = 0; i < 3; ++i) {
        r[i] = c1[static_cast<std::size_t>(i)].value() - c2[static_cast<std::size_t>(i)].value();
        if (jac) {
          const auto g1 = c1[static_cast<std::size_t>(i)].gradient();
          const auto g2 = c2[static_cast<std::size_t>(i)].gradient();
          (*jac)(i, 0) = g1[0] - g2[0];
          (*jac)(i, 1) = g1[1] - g2[1];
          (*jac)(i, 2) = g1[0] * dp[0] + g1[1] * dp[1] + g2[0] * dp[0] + g2[1] * dp[1];
        }
      }
      return r;
    };
    Eigen::Matrix3d J;
    Eigen::Vector3d r = residual(x, &J);
    for (int it = 0; it < opt.newton_iters && r.norm() > 1e-13 * gscale; ++it) {
      const Eigen::Vector3d dx = J.colPivHouseholderQr().solve(r);
      double lam = 1.0;
      bool moved = false;
      for (int k = 0; k < 20; ++k, lam *= 0.5) {
        const Eigen::Vector3d y = x - lam * dx;
        const Eigen::Vector3d ry = residual(y, nullptr);
        if (ry.norm() < r.norm()) {
          x = y;
          r = residual(x, &J);
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    out.residual = r.norm();
    const Point2 m{x[0], x[1]};
    if (r.norm() > 1e-10 * gscale || std::hypot(m[0] - p[0], m[1] - p[1]) > 4.0 * s) continue;
    const Point2 d{s * std::cos(x[2]), s * std::sin(x[2])};
    out.q1 = {m[0] + d[0], m[1] + d[1]};
    out.q2 = {m[0] - d[0], m[1] - d[1]};
    // The preimages lie on one side of the parabolic curve; the tail part is
    // the other side. Sample it by mirroring each preimage across the curve.
    out.tail_samples.clear();
    int pre_neg = 0, tail_neg = 0;
    bool ok = true;
    for (const Point2& q : {out.q1, out.q2}) {
      Point2 c = q;
      if (!newton_project(spec, ZeroFunction::kHessian, c, 1e-13, 20, 4.0 * s)) {
        ok = false;
        break;
      }
      const Point2 mirror{2 * c[0] - q[0], 2 * c[1] - q[1]};
      out.tail_samples.push_back(mirror);
      pre_neg += zero_sample(spec, ZeroFunction::kHessian, q, false).value < 0.0;
      tail_neg += zero_sample(spec, ZeroFunction::kHessian, mirror, false).value < 0.0;
    }
    if (!ok || pre_neg == 1 || tail_neg == 1 || pre_neg == tail_neg) {
      out.note = "tail-part samples disagree in sign";
      continue;
    }
    const int neg = tail_neg;
    out.sign = neg == 2 ? +1 : -1;
    out.resolved = true;
    out.note.clear();
    return out;
  }
  if (out.note.empty()) out.note = "no self-intersection of the dual front found near " + fmt_point(p);
  return out;
}

SignedTriangulation signed_triangulation(const MapSpec& spec, const EulerOptions& opt) {
  const Box box = domain_box(spec);
  if (!box.periodic[0] || !box.periodic[1]) {
    throw Error(ErrorCode::kSpec, "chi(M_-) needs a closed domain: both parameters periodic");
  }
  if (opt.grid < 4 || opt.max_depth < 0 || opt.max_depth > 12) throw Error(ErrorCode::kSpec, "bad Euler grid");
  const std::int64_t M = static_cast<std::int64_t>(2 * opt.grid) << opt.max_depth;  // half-finest units
  const std::int64_t S0 = M / opt.grid;
  const auto wrapi = [&](std::int64_t a) { return ((a % M) + M) % M; };
  const auto key = [&](std::int64_t a, std::int64_t b) { return wrapi(a) * M + wrapi(b); };

  SignedTriangulation tri;
  std::vector<double> values;
  std::unordered_map<std::int64_t, std::int32_t> id;
  std::vector<std::size_t> pending;
  const auto vertex = [&](std::int64_t a, std::int64_t b) {
    const auto k = key(a, b);
    auto it = id.find(k);
    if (it != id.end()) return it->second;
    const auto v = static_cast<std::int32_t>(tri.vertices.size());
    id.emplace(k, v);
    tri.vertices.push_back({box.lo[0] + box.width(0) * static_cast<double>(wrapi(a)) / static_cast<double>(M),
                            box.lo[1] + box.width(1) * static_cast<double>(wrapi(b)) / static_cast<double>(M)});
    values.push_back(0.0);
    pending.push_back(static_cast<std::size_t>(v));
    return v;
  };
  const auto flush = [&] {
    std::vector<Point2> pts;
    for (auto v : pending) pts.push_back(tri.vertices[v]);
    const auto vals = evaluate_points([&](const Point2& q) { return zero_sample(spec, ZeroFunction::kHessian, q, false).value; },
                                      pts, opt.exec);
    for (std::size_t i = 0; i < pending.size(); ++i) values[pending[i]] = vals[i];
    pending.clear();
  };

  struct Cell {
    std::int64_t a, b, size;
    int depth;
  };
  std::vector<Cell> level, leaves;
  for (int i = 0; i < opt.grid; ++i) {
    for (int j = 0; j < opt.grid; ++j) level.push_back({i * S0, j * S0, S0, 0});
  }
  std::vector<Point2> unresolved;
  while (!level.empty()) {
    for (const auto& c : level) {
      vertex(c.a, c.b);
      vertex(c.a + c.size, c.b);
      vertex(c.a + c.size, c.b + c.size);
      vertex(c.a, c.b + c.size);
      vertex(c.a + c.size / 2, c.b + c.size / 2);
    }
    flush();
    std::vector<Cell> next;
    for (const auto& c : level) {
      const double f[4] = {values[static_cast<std::size_t>(vertex(c.a, c.b))],
                           values[static_cast<std::size_t>(vertex(c.a + c.size, c.b))],
                           values[static_cast<std::size_t>(vertex(c.a + c.size, c.b + c.size))],
                           values[static_cast<std::size_t>(vertex(c.a, c.b + c.size))]};
      const double fc = values[static_cast<std::size_t>(vertex(c.a + c.size / 2, c.b + c.size / 2))];
      bool mixed = false;
      for (double x : f) mixed = mixed || sgn(x) != sgn(fc);
      if (mixed && c.depth < opt.max_depth) {
        const auto h = c.size / 2;
        for (int di = 0; di < 2; ++di) {
          for (int dj = 0; dj < 2; ++dj) next.push_back({c.a + di * h, c.b + dj * h, h, c.depth + 1});
        }
        continue;
      }
      const bool alternating = sgn(f[0]) == sgn(f[2]) && sgn(f[1]) == sgn(f[3]) && sgn(f[0]) != sgn(f[1]);
      double big = 0.0;
      for (double x : f) big = std::max(big, std::abs(x));
      if (alternating && std::abs(fc) < 1e-9 * big) {
        unresolved.push_back(tri.vertices[static_cast<std::size_t>(vertex(c.a + c.size / 2, c.b + c.size / 2))]);
      }
      leaves.push_back(c);
    }
    level = std::move(next);
  }
  if (!unresolved.empty()) {
    std::string msg = "sign ambiguity unresolved at maximum depth in " + std::to_string(unresolved.size()) + " cell(s):";
    for (std::size_t i = 0; i < std::min<std::size_t>(unresolved.size(), 5); ++i) msg += " " + fmt_point(unresolved[i]);
    throw Error(ErrorCode::kUnresolved, msg);
  }

  std::unordered_set<std::int64_t> corners;
  for (const auto& c : leaves) {
    corners.insert(key(c.a, c.b));
    corners.insert(key(c.a + c.size, c.b));
    corners.insert(key(c.a + c.size, c.b + c.size));
    corners.insert(key(c.a, c.b + c.size));
  }
  for (const auto& c : leaves) {
    std::vector<std::int32_t> ring;
    const std::int64_t x0 = c.a, y0 = c.b, x1 = c.a + c.size, y1 = c.b + c.size;
    const auto visit = [&](std::int64_t a, std::int64_t b) {
      if (corners.count(key(a, b))) ring.push_back(id.at(key(a, b)));
    };
    for (std::int64_t a = x0; a < x1; a += 2) visit(a, y0);
    for (std::int64_t b = y0; b < y1; b += 2) visit(x1, b);
    for (std::int64_t a = x1; a > x0; a -= 2) visit(a, y1);
    for (std::int64_t b = y1; b > y0; b -= 2) visit(x0, b);
    const std::int32_t center = id.at(key(c.a + c.size / 2, c.b + c.size / 2));
    for (std::size_t k = 0; k < ring.size(); ++k) {
      tri.triangles.push_back({center, ring[k], ring[(k + 1) % ring.size()]});
      tri.depth.push_back(static_cast<std::uint8_t>(c.depth));
    }
  }
  tri.sign.resize(values.size());
  for (std::size_t v = 0; v < values.size(); ++v) tri.sign[v] = static_cast<std::int8_t>(sgn(values[v]));
  return tri;
}

EulerResult euler_characteristics(const MapSpec& spec, const EulerOptions& opt) {
  const auto tri = signed_triangulation(spec, opt);
  EulerResult r;
  r.minus = count_full_subcomplex(tri.sign, tri.triangles, -1, opt.exec);
  r.plus = count_full_subcomplex(tri.sign, tri.triangles, +1, opt.exec);
  r.domain = count_full_subcomplex(tri.sign, tri.triangles, 0, opt.exec, true);
  r.chi_minus = static_cast<int>(r.minus.euler());
  r.chi_plus = static_cast<int>(r.plus.euler());
  r.chi_domain = static_cast<int>(r.domain.euler());
  r.vertices = tri.vertices.size();
  r.triangles = tri.triangles.size();
  return r;
}

int euler_characteristic_Mminus(const MapSpec& spec, const EulerOptions& opt) {
  return euler_characteristics(spec, opt).chi_minus;
}

GodronCensus verify_theorem_c(const MapSpec& spec, const CensusOptions& opt) {
  const auto curves = trace_zero_curve(spec, ZeroFunction::kHessian, opt.trace);
  GodronCensus census = find_godrons(spec, curves, opt);
  std::vector<GodronSign> signs(census.godrons.size());
  parallel_for(signs.size(), [&](std::size_t i) { signs[i] = godron_sign(spec, census.godrons[i].point, opt.sign); },
               opt.trace.exec);
  // with hypotheses already violated, failures below are reported rather than thrown
  const bool violated = !census.hypotheses_ok();
  bool all_signed = true;
  for (std::size_t i = 0; i < signs.size(); ++i) {
    auto& g = census.godrons[i];
    if (!signs[i].resolved) {
      if (!violated) throw Error(ErrorCode::kUnresolved, "godron at " + fmt_point(g.point) + ": " + signs[i].note);
      g.note = signs[i].note;
      all_signed = false;
      continue;
    }
    g.sign = signs[i].sign;
    g.resolved = true;
    g.tail_samples = signs[i].tail_samples;
    (g.sign > 0 ? census.i2_plus : census.i2_minus) += 1;
  }
  census.signed_ = all_signed;
  try {
    const auto chi = euler_characteristics(spec, opt.euler);
    census.chi_minus = chi.chi_minus;
    census.chi_plus = chi.chi_plus;
    census.chi_domain = chi.chi_domain;
  } catch (const Error& e) {
    if (!violated || e.code() != ErrorCode::kUnresolved) throw;
    census.violations.push_back({{0.0, 0.0}, "Unresolved", e.what()});
  }
  census.residual = census.i2_plus - census.i2_minus - 2 * census.chi_minus;
  return census;
}

void write_curves_csv(std::ostream& out, const std::vector<TracedCurve>& curves) {
  out << "curve,u,v,value\n";
  out.precision(17);
  for (std::size_t c = 0; c < curves.size(); ++c) {
    for (std::size_t k = 0; k < curves[c].points.size(); ++k) {
      out << c << ',' << curves[c].points[k][0] << ',' << curves[c].points[k][1] << ',' << curves[c].values[k] << '\n';
    }
  }
}

void write_svg(std::ostream& out, const MapSpec& spec, const std::vector<TracedCurve>& curves,
               const GodronCensus* census) {
  const Box box = domain_box(spec);
  const double size = 600.0, pad = 20.0;
  const auto X = [&](const Point2& p) { return pad + size * (p[0] - box.lo[0]) / box.width(0); };
  const auto Y = [&](const Point2& p) { return pad + size * (1.0 - (p[1] - box.lo[1]) / box.width(1)); };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * pad << "\" height=\"" << size + 2 * pad
      << "\">\n";
  out << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << size << "\" height=\"" << size
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (const auto& c : curves) {
    std::vector<std::vector<Point2>> runs{{}};
    for (std::size_t k = 0; k < c.points.size(); ++k) {
      if (k > 0 && std::hypot(c.points[k][0] - c.points[k - 1][0], c.points[k][1] - c.points[k - 1][1]) > 0.25 * std::min(box.width(0), box.width(1))) {
        runs.emplace_back();
      }
      runs.back().push_back(c.points[k]);
    }
    if (c.closed && !c.points.empty() && runs.size() == 1) runs.back().push_back(c.points.front());
    for (const auto& run : runs) {
      if (run.size() < 2) continue;
      out << "<polyline fill=\"none\" stroke=\"" << (c.which == ZeroFunction::kHessian ? "steelblue" : "darkred")
          << "\" points=\"";
      for (const auto& p : run) out << X(p) << ',' << Y(p) << ' ';
      out << "\"/>\n";
    }
  }
  if (census) {
    for (const auto& g : census->godrons) {
      const char* fill = g.sign > 0 ? "black" : g.sign < 0 ? "white" : "gray";
      out << "<circle cx=\"" << X(g.point) << "\" cy=\"" << Y(g.point) << "\" r=\"5\" fill=\"" << fill
          << "\" stroke=\"black\"/>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace dualfront
