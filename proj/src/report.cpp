#include "dualfront/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace dualfront {

namespace {

void write_value(std::ostream& out, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' '), close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out << ",\n";
        first = false;
        out << pad << Json(key).dump() << ": ";
        write_value(out, value, indent + 2);
      }
      out << '\n' << close << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      // short numeric arrays stay on one line
      const bool flat = j.size() <= 8 && std::all_of(j.begin(), j.end(), [](const Json& x) { return x.is_number(); });
      out << (flat ? "[" : "[\n");
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out << (flat ? ", " : ",\n");
        if (!flat) out << pad;
        write_value(out, j[i], indent + 2);
      }
      if (flat) {
        out << ']';
      } else {
        out << '\n' << close << ']';
      }
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out << "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out << buf;
      return;
    }
    default:
      out << j.dump();
  }
}

template <class T>
Json scalar(const T& x) {
  if constexpr (is_complex_v<T>) {
    return Json::array({x.real(), x.imag()});
  } else {
    return x;
  }
}

template <class T>
Json scalars(const std::vector<T>& xs) {
  Json a = Json::array();
  for (const auto& x : xs) a.push_back(scalar(x));
  return a;
}

Json point2(const std::array<double, 2>& p) { return Json::array({p[0], p[1]}); }

const char* to_string(Extension e) {
  switch (e) {
    case Extension::kNatural: return "natural";
    case Extension::kNormalFrozen: return "normal-frozen";
    case Extension::kPerturbed: return "perturbed";
  }
  return "?";
}

}  // namespace

void write_json(std::ostream& out, const Json& j) {
  write_value(out, j, 0);
  out << '\n';
}

std::string dump_json(const Json& j) {
  std::ostringstream s;
  write_json(s, j);
  return s.str();
}

Json to_json(const Tolerances& tol) {
  return {{"zero", tol.zero}, {"rank", tol.rank}, {"singular", tol.singular}, {"vanish", tol.vanish}};
}

Json to_json(const ClassifyOptions& opt) {
  return {{"order", opt.order},
          {"extension", to_string(opt.extension)},
          {"seed", opt.seed},
          {"factor_shift", opt.factor_shift},
          {"tolerances", to_json(opt.tol)}};
}

Json to_json(const MapSpec& spec) {
  Json domain = Json::array();
  for (std::size_t i = 0; i < spec.domain.size(); ++i) {
    const auto& d = spec.domain[i];
    domain.push_back({{"var", spec.vars[i]}, {"lo", d.lo}, {"hi", d.hi}, {"periodic", d.periodic}});
  }
  return {{"name", spec.name},
          {"field", to_string(spec.field)},
          {"kind", to_string(spec.kind)},
          {"vars", spec.vars},
          {"domain", domain},
          {"components", spec.component_src},
          {"normal", spec.normal_src}};
}

template <class T>
Json to_json(const ContactChain<T>& c) {
  return {{"admissible_function", to_string(c.kind)},
          {"admissible", c.admissible},
          {"values", scalars(c.values)},
          {"k", c.k},
          {"jacobi_rows", c.rows},
          {"jacobi_cols", c.cols},
          {"jacobi", scalars(c.jacobi)},
          {"singular_values", c.singular_values},
          {"rank", c.rank},
          {"truncated", c.truncated},
          {"scale", c.scale}};
}

template <class T>
Json to_json(const SingularityClass<T>& s) {
  Json j = {{"label", s.label()},
            {"verdict", to_string(s.verdict)},
            {"index", s.index},
            {"diagnosable", s.diagnosable()}};
  if (!s.reason.empty()) j["reason"] = s.reason;
  j["certificate"] = to_json(s.certificate);
  return j;
}

template <class T>
Json to_json(const DualityResult<T>& d) {
  Json j = {{"route", to_string(d.route)}, {"applicable", d.applicable}, {"consistent", d.consistent()}};
  if (!d.note.empty()) j["note"] = d.note;
  j["primal"] = to_json(d.primal);
  if (d.applicable) j["dual"] = to_json(d.dual);
  return j;
}

template Json to_json(const ContactChain<double>&);
template Json to_json(const ContactChain<Complex>&);
template Json to_json(const SingularityClass<double>&);
template Json to_json(const SingularityClass<Complex>&);
template Json to_json(const DualityResult<double>&);
template Json to_json(const DualityResult<Complex>&);

Json to_json(const TracedCurve& c) {
  Json pts = Json::array();
  for (const auto& p : c.points) pts.push_back(point2(p));
  return {{"function", to_string(c.which)},
          {"closed", c.closed},
          {"vertices", c.points.size()},
          {"step", c.step},
          {"tolerance", c.tolerance},
          {"degenerate_vertices", c.degenerate},
          {"points", pts}};
}

Json to_json(const HypothesisViolation& v) {
  return {{"point", point2(v.point)}, {"label", v.label}, {"reason", v.reason}};
}

Json to_json(const Godron& g) {
  Json j = {{"point", point2(g.point)},
            {"curve", g.curve},
            {"sign", g.sign},
            {"resolved", g.resolved},
            {"label", g.certificate.label()}};
  Json tail = Json::array();
  for (const auto& p : g.tail_samples) tail.push_back(point2(p));
  j["tail_samples"] = tail;
  if (!g.note.empty()) j["note"] = g.note;
  j["certificate"] = to_json(g.certificate.certificate);
  return j;
}

Json to_json(const GodronCensus& c) {
  Json godrons = Json::array(), violations = Json::array(), warnings = Json::array();
  for (const auto& g : c.godrons) godrons.push_back(to_json(g));
  for (const auto& v : c.violations) violations.push_back(to_json(v));
  for (const auto& v : c.warnings) warnings.push_back(to_json(v));
  return {{"hypotheses_ok", c.hypotheses_ok()},
          {"signed", c.signed_},
          {"godrons_total", c.total()},
          {"even", c.even()},
          {"i2_plus", c.i2_plus},
          {"i2_minus", c.i2_minus},
          {"chi_minus", c.chi_minus},
          {"chi_plus", c.chi_plus},
          {"chi_domain", c.chi_domain},
          {"residual", c.residual},
          {"godrons", godrons},
          {"violations", violations},
          {"warnings", warnings}};
}

Json to_json(const EulerResult& e) {
  const auto counts = [](const SubcomplexCounts& s) {
    return Json{{"vertices", s.vertices}, {"edges", s.edges}, {"faces", s.faces}, {"euler", s.euler()}};
  };
  return {{"chi_minus", e.chi_minus},
          {"chi_plus", e.chi_plus},
          {"chi_domain", e.chi_domain},
          {"mesh_vertices", e.vertices},
          {"mesh_triangles", e.triangles},
          {"minus", counts(e.minus)},
          {"plus", counts(e.plus)},
          {"domain", counts(e.domain)}};
}

Json to_json(const CuspDetection& d) {
  Json j = {{"t0", d.t0},       {"is_cusp", d.is_cusp}, {"point", point2(d.point)}, {"d1", point2(d.d1)},
            {"d2", point2(d.d2)}, {"d3", point2(d.d3)},  {"det_d2_d3", d.det},       {"scale", d.scale}};
  if (!d.reason.empty()) j["reason"] = d.reason;
  return j;
}

Json to_json(const CuspidalCurvature& c) {
  return {{"mu", c.mu}, {"mu_from_normal", c.mu_normal}, {"agreement", c.agreement}};
}

Json to_json(const CuspReport& r) {
  const auto& c = r.cycloid;
  return {{"detection", to_json(r.detection)},
          {"curvature", to_json(r.curvature)},
          {"sign", r.sign > 0 ? "positive" : "negative"},
          {"radius", r.radius},
          {"cycloid",
           {{"radius", c.radius},
            {"origin", point2(c.origin)},
            {"axis", point2(c.axis)},
            {"side", point2(c.side)},
            {"angle", c.angle},
            {"reflected", c.reflected},
            {"alpha", c.alpha}}},
          {"fit",
           {{"window", r.window},
            {"residual", r.residual},
            {"residual_half_window", r.residual_half},
            {"decreases", r.residual_decreases}}}};
}

Json to_json(const OsculatingCycloid& o) {
  return {{"t0", o.t0}, {"kappa", o.kappa}, {"kappa_dot", o.kappa_dot}, {"theta", o.theta}, {"radius", o.radius}};
}

Json report_document(const std::string& command, const std::string& input_path, const MapSpec& spec) {
  return {{"tool", "dualfront"}, {"version", kVersion}, {"command", command}, {"input", input_path},
          {"map", to_json(spec)}};
}

}  // namespace dualfront
