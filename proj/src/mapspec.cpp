#include "dualfront/mapspec.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dualfront {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

double constant_value(const std::string& src) {
  ExprPtr e = parse(src, std::span<const std::string>{});
  return eval_scalar<double>(*e, std::span<const double>{});
}

[[noreturn]] void spec_error(const std::string& msg, std::size_t line) {
  throw Error(ErrorCode::kSpec, "line " + std::to_string(line) + ": " + msg);
}

}  // namespace

const char* to_string(ScalarField f) { return f == ScalarField::kReal ? "real" : "complex"; }

const char* to_string(MapKind k) {
  switch (k) {
    case MapKind::kAffine: return "affine";
    case MapKind::kProjective: return "projective";
    case MapKind::kCurve: return "curve";
    case MapKind::kPlaneMap: return "planemap";
  }
  return "?";
}

bool MapSpec::fully_periodic() const {
  if (domain.empty()) return false;
  for (const auto& d : domain) {
    if (!d.periodic) return false;
  }
  return true;
}

bool MapSpec::contains(std::span<const double> p) const {
  if (p.size() != vars.size()) return false;
  if (domain.empty()) return true;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (domain[i].periodic) continue;
    if (p[i] < domain[i].lo || p[i] > domain[i].hi) return false;
  }
  return true;
}

DomainRange make_range(std::string lo_src, std::string hi_src, bool periodic) {
  DomainRange r;
  r.lo = constant_value(lo_src);
  r.hi = constant_value(hi_src);
  r.lo_src = std::move(lo_src);
  r.hi_src = std::move(hi_src);
  r.periodic = periodic;
  if (!(r.hi > r.lo) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    throw Error(ErrorCode::kSpec, "domain interval must be finite with lo < hi");
  }
  return r;
}

MapSpec make_mapspec(std::string name, ScalarField field, std::vector<std::string> vars, MapKind kind,
                     std::vector<std::string> components, std::vector<DomainRange> domain,
                     std::vector<std::string> normal) {
  MapSpec s;
  s.name = std::move(name);
  s.field = field;
  s.vars = std::move(vars);
  s.kind = kind;
  s.domain = std::move(domain);
  if (s.vars.empty()) throw Error(ErrorCode::kSpec, "a map needs at least one variable");
  for (std::size_t i = 0; i < s.vars.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (s.vars[i] == s.vars[j]) throw Error(ErrorCode::kSpec, "duplicate variable '" + s.vars[i] + "'");
    }
  }
  if (!s.domain.empty() && s.domain.size() != s.vars.size()) {
    throw Error(ErrorCode::kSpec, "domain must list every variable");
  }
  const ParseOptions opts{field == ScalarField::kComplex};
  for (auto& c : components) {
    s.components.push_back(parse(c, s.vars, opts));
    s.component_src.push_back(std::move(c));
  }
  for (auto& c : normal) {
    s.normal.push_back(parse(c, s.vars, opts));
    s.normal_src.push_back(std::move(c));
  }
  const int n = s.n(), m = s.m();
  bool ok = false;
  switch (kind) {
    case MapKind::kAffine: ok = m == n + 1; break;
    case MapKind::kProjective: ok = m == n + 2; break;
    case MapKind::kCurve: ok = n == 1 && m == 2; break;
    case MapKind::kPlaneMap: ok = m == n; break;
  }
  if (!ok) {
    throw Error(ErrorCode::kSpec, std::string("component count ") + std::to_string(m) + " does not fit kind '" +
                                      to_string(kind) + "' with " + std::to_string(n) + " variables");
  }
  if (!s.normal.empty() && s.normal.size() != s.components.size()) {
    throw Error(ErrorCode::kSpec, "normal must have as many entries as components");
  }
  if (!s.normal.empty() && kind != MapKind::kAffine && kind != MapKind::kCurve) {
    throw Error(ErrorCode::kSpec, "a user normal is only meaningful for affine and curve kinds");
  }
  return s;
}

MapSpec parse_mapspec(std::string_view text) {
  std::string name;
  std::optional<ScalarField> field;
  std::vector<std::string> vars;
  std::optional<MapKind> kind;
  std::vector<std::string> comps, normal;
  std::vector<std::pair<std::vector<std::string>, std::size_t>> domain_lines;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string line = trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty() || line[0] == '#') {
      if (end == text.size()) break;
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) spec_error("expected 'key: value'", line_no);
    const std::string key = trim(std::string_view(line).substr(0, colon));
    const std::string value = trim(std::string_view(line).substr(colon + 1));
    if (key == "name") {
      name = value;
    } else if (key == "field") {
      if (value == "real") field = ScalarField::kReal;
      else if (value == "complex") field = ScalarField::kComplex;
      else spec_error("field must be real or complex", line_no);
    } else if (key == "vars") {
      vars = split_ws(value);
    } else if (key == "domain") {
      domain_lines.emplace_back(split_ws(value), line_no);
    } else if (key == "kind") {
      if (value == "affine") kind = MapKind::kAffine;
      else if (value == "projective") kind = MapKind::kProjective;
      else if (value == "curve") kind = MapKind::kCurve;
      else if (value == "planemap") kind = MapKind::kPlaneMap;
      else spec_error("unknown kind '" + value + "'", line_no);
    } else if (key == "component") {
      comps.push_back(value);
    } else if (key == "normal") {
      normal.push_back(value);
    } else {
      spec_error("unknown key '" + key + "'", line_no);
    }
    if (end == text.size()) break;
  }
  if (!field) throw Error(ErrorCode::kSpec, "missing 'field'");
  if (vars.empty()) throw Error(ErrorCode::kSpec, "missing 'vars'");
  if (!kind) throw Error(ErrorCode::kSpec, "missing 'kind'");

  std::vector<DomainRange> domain;
  if (!domain_lines.empty()) {
    domain.resize(vars.size());
    std::vector<bool> seen(vars.size(), false);
    for (const auto& [words, ln] : domain_lines) {
      if (words.size() != 3 && !(words.size() == 4 && words[3] == "periodic")) {
        spec_error("domain expects '<var> <lo> <hi> [periodic]'", ln);
      }
      std::size_t idx = vars.size();
      for (std::size_t i = 0; i < vars.size(); ++i) {
        if (vars[i] == words[0]) idx = i;
      }
      if (idx == vars.size()) spec_error("domain for undeclared variable '" + words[0] + "'", ln);
      if (seen[idx]) spec_error("duplicate domain for '" + words[0] + "'", ln);
      seen[idx] = true;
      domain[idx] = make_range(words[1], words[2], words.size() == 4);
    }
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (!seen[i]) throw Error(ErrorCode::kSpec, "missing domain for '" + vars[i] + "'");
    }
  }
  return make_mapspec(name, *field, vars, *kind, comps, domain, normal);
}

MapSpec load_mapspec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kSpec, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mapspec(buf.str());
}

std::string format_mapspec(const MapSpec& spec) {
  std::string out;
  out += "name: " + spec.name + "\n";
  out += std::string("field: ") + to_string(spec.field) + "\n";
  out += "vars:";
  for (const auto& v : spec.vars) out += " " + v;
  out += "\n";
  for (std::size_t i = 0; i < spec.domain.size(); ++i) {
    const auto& d = spec.domain[i];
    out += "domain: " + spec.vars[i] + " " + d.lo_src + " " + d.hi_src + (d.periodic ? " periodic" : "") + "\n";
  }
  out += std::string("kind: ") + to_string(spec.kind) + "\n";
  for (const auto& c : spec.component_src) out += "component: " + c + "\n";
  for (const auto& c : spec.normal_src) out += "normal: " + c + "\n";
  return out;
}

std::vector<double> wrap_point(const MapSpec& spec, std::span<const double> p) {
  std::vector<double> q(p.begin(), p.end());
  for (std::size_t i = 0; i < spec.domain.size() && i < q.size(); ++i) {
    const auto& d = spec.domain[i];
    if (!d.periodic) continue;
    double t = std::fmod(q[i] - d.lo, d.period());
    if (t < 0) t += d.period();
    q[i] = d.lo + t;
  }
  return q;
}

}  // namespace dualfront
