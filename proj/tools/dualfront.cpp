// Command-line driver: classify, dual, trace, euler, cusp.
//
// Exit codes: 0 ok, 1 input error, 2 nondiagnosable, 3 hypothesis violation.

#include <omp.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "dualfront/classify.hpp"
#include "dualfront/cusp.hpp"
#include "dualfront/report.hpp"
#include "dualfront/zeroset.hpp"

using namespace dualfront;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kInput = 1, kNondiagnosable = 2, kHypothesis = 3 };

struct Config {
  std::string input;
  std::string point;
  int grid = 128;
  double tol_zero = Tolerances{}.zero;
  double tol_rank = Tolerances{}.rank;
  int order = kDefaultOrder;
  bool dual = false;
  bool regular = false;
  bool lambda = false;
  std::string out = ".";
  int threads = 0;
};

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNondiagnosable:
    case ErrorCode::kTruncation:
    case ErrorCode::kUnresolved: return kNondiagnosable;
    case ErrorCode::kHypothesis: return kHypothesis;
    default: return kInput;
  }
}

ClassifyOptions classify_options(const Config& cfg) {
  ClassifyOptions opt;
  opt.tol.zero = cfg.tol_zero;
  opt.tol.rank = cfg.tol_rank;
  opt.order = cfg.order;
  return opt;
}

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t");
  const auto b = s.find_last_not_of(" \t");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

// "u=0.1,v=pi/2" or "0.1,pi/2"; missing coordinates are 0.
template <class T>
std::vector<T> parse_point(const MapSpec& spec, const std::string& text) {
  std::vector<T> p(static_cast<std::size_t>(spec.n()), T{});
  if (trim(text).empty()) return p;
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(trim(item));
  ParseOptions po;
  po.allow_imaginary = spec.field == ScalarField::kComplex;
  const std::vector<std::string> none;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    std::string name, value = parts[i];
    if (const auto eq = value.find('='); eq != std::string::npos) {
      name = trim(value.substr(0, eq));
      value = trim(value.substr(eq + 1));
    }
    std::size_t slot = i;
    if (!name.empty()) {
      const auto it = std::find(spec.vars.begin(), spec.vars.end(), name);
      if (it == spec.vars.end()) throw Error(ErrorCode::kUndeclared, "--point names an unknown variable '" + name + "'");
      slot = static_cast<std::size_t>(it - spec.vars.begin());
    }
    if (slot >= p.size()) throw Error(ErrorCode::kShape, "--point has more coordinates than the map has variables");
    const auto e = parse(value, none, po);
    p[slot] = eval_scalar<T>(*e, std::span<const T>());
  }
  std::vector<double> re(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) re[i] = std::real(p[i]);
  if (!spec.contains(re)) throw Error(ErrorCode::kDomain, "point lies outside the domain");
  return p;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kSpec, "cannot write " + path.string());
  f << text;
}

fs::path out_dir(const Config& cfg) {
  fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kSpec, "output directory is not writable: " + cfg.out);
  return dir;
}

Json point_json(const std::vector<double>& p) { return p; }
Json point_json(const std::vector<Complex>& p) {
  Json a = Json::array();
  for (const auto& z : p) a.push_back(Json::array({z.real(), z.imag()}));
  return a;
}

template <class T>
int classify_as(const Config& cfg, const MapSpec& spec, Json& doc) {
  const auto p = parse_point<T>(spec, cfg.point);
  const auto opt = classify_options(cfg);
  doc["point"] = point_json(p);
  doc["options"] = to_json(opt);
  std::optional<SingularityClass<T>> primary;
  if (spec.kind == MapKind::kPlaneMap) {
    primary = classify_morin<T>(spec, p, opt);
    doc["morin"] = to_json(*primary);
  } else {
    if (spec.kind == MapKind::kAffine || spec.kind == MapKind::kCurve) {
      const auto front = classify_front_singularity<T>(spec, p, opt);
      doc["front"] = to_json(front);
      if (front.verdict != Verdict::kRegular) primary = front;
    }
    const auto infl = classify_inflection<T>(spec, p, opt);
    doc["inflection"] = to_json(infl);
    if (!primary) primary = infl;
  }
  doc["verdict"] = primary->label();
  std::cout << "verdict: " << primary->label();
  if (!primary->reason.empty()) std::cout << " (" << primary->reason << ")";
  std::cout << '\n';
  if (cfg.dual) {
    Json routes = Json::array();
    for (const auto& r : duality_check<T>(spec, p, opt)) {
      routes.push_back(to_json(r));
      std::cout << "dual " << to_string(r.route) << ": "
                << (r.applicable ? r.dual.label() : std::string("not applicable (") + r.note + ")") << '\n';
    }
    doc["duality"] = routes;
  }
  return primary->diagnosable() ? kOk : kNondiagnosable;
}

int cmd_classify(const Config& cfg) {
  const auto spec = load_mapspec(cfg.input);
  Json doc = report_document("classify", cfg.input, spec);
  const int code = spec.field == ScalarField::kComplex ? classify_as<Complex>(cfg, spec, doc)
                                                       : classify_as<double>(cfg, spec, doc);
  write_file(out_dir(cfg) / "classify.json", dump_json(doc));
  return code;
}

int cmd_dual(const Config& cfg) {
  const auto spec = load_mapspec(cfg.input);
  if (spec.field != ScalarField::kReal) throw Error(ErrorCode::kSpec, "the dual command expects a real map");
  if (spec.kind == MapKind::kPlaneMap) throw Error(ErrorCode::kSpec, "plane maps have no dual front");
  Json doc = report_document("dual", cfg.input, spec);
  const auto p = parse_point<double>(spec, cfg.point);
  const auto opt = classify_options(cfg);
  doc["point"] = p;
  doc["options"] = to_json(opt);
  const auto F = homogeneous_lift<double>(spec, p, std::max(cfg.order, 3));
  const auto G = dual_front_of(F);
  std::vector<double> fv, gv, ggv;
  for (const auto& x : F) fv.push_back(x.value());
  for (const auto& x : G) gv.push_back(x.value());
  const auto gn = normalize_projective<double>(gv);
  doc["lift"] = fv;
  doc["dual_front"] = gn.coords;
  doc["incidence_residual"] = incidence_check(F, G);
  try {
    const auto GG = dual_front_of(G);
    for (const auto& x : GG) ggv.push_back(x.value());
    doc["double_dual_distance"] = projective_distance<double>(ggv, fv);
  } catch (const Error& e) {
    doc["double_dual_distance"] = nullptr;
    doc["double_dual_note"] = e.what();
  }
  Json routes = Json::array();
  for (const auto& r : duality_check<double>(spec, p, opt)) {
    routes.push_back(to_json(r));
    std::cout << to_string(r.route) << ": " << r.primal.label() << " <-> "
              << (r.applicable ? r.dual.label() : std::string("not applicable")) << '\n';
  }
  doc["duality"] = routes;
  write_file(out_dir(cfg) / "dual.json", dump_json(doc));
  return kOk;
}

int zero_set_command(const Config& cfg, const std::string& command) {
  const auto spec = load_mapspec(cfg.input);
  Json doc = report_document(command, cfg.input, spec);
  CensusOptions opt;
  opt.trace.grid = cfg.grid;
  opt.classify = classify_options(cfg);
  doc["options"] = {{"grid", cfg.grid},
                    {"trace_tolerance", opt.trace.tol},
                    {"euler_grid", opt.euler.grid},
                    {"euler_max_depth", opt.euler.max_depth},
                    {"sign_radius", opt.sign.radius},
                    {"check_stride", opt.check_stride},
                    {"classify", to_json(opt.classify)}};
  const auto which = cfg.lambda ? ZeroFunction::kLambda : ZeroFunction::kHessian;
  const auto curves = trace_zero_curve(spec, which, opt.trace);
  Json cj = Json::array();
  for (const auto& c : curves) cj.push_back(to_json(c));
  doc["curves"] = cj;
  std::optional<GodronCensus> census;
  if (which == ZeroFunction::kHessian) {
    if (command == "euler" || spec.fully_periodic()) {
      if (!spec.fully_periodic()) throw Error(ErrorCode::kSpec, "euler needs both variables periodic");
      census = verify_theorem_c(spec, opt);
      doc["euler"] = to_json(euler_characteristics(spec, opt.euler));
    } else {
      census = find_godrons(spec, curves, opt);
    }
    doc["census"] = to_json(*census);
  }
  const fs::path dir = out_dir(cfg);
  std::ostringstream csv, svg;
  write_curves_csv(csv, curves);
  write_svg(svg, spec, curves, census ? &*census : nullptr);
  write_file(dir / "curves.csv", csv.str());
  write_file(dir / "curves.svg", svg.str());
  write_file(dir / (command + ".json"), dump_json(doc));

  std::cout << curves.size() << " curve(s)";
  if (census) {
    std::cout << ", godrons " << census->total();
    if (census->signed_) {
      std::cout << " (+" << census->i2_plus << " / -" << census->i2_minus << "), chi(M-) " << census->chi_minus
                << ", residual " << census->residual;
    }
  }
  std::cout << '\n';
  if (census && !census->hypotheses_ok()) {
    std::cerr << "hypothesis violations:\n";
    for (const auto& v : census->violations) {
      std::cerr << "  (" << v.point[0] << ", " << v.point[1] << ") " << v.label << ": " << v.reason << '\n';
    }
    return kHypothesis;
  }
  return kOk;
}

int cmd_cusp(const Config& cfg) {
  const auto spec = load_mapspec(cfg.input);
  Json doc = report_document("cusp", cfg.input, spec);
  const auto p = parse_point<double>(spec, cfg.point);
  if (p.size() != 1) throw Error(ErrorCode::kSpec, "cusp expects a curve in one variable");
  doc["point"] = p;
  const fs::path dir = out_dir(cfg);
  const auto det = detect_cusp(spec, p[0]);
  int code = kOk;
  if (det.is_cusp) {
    const auto r = best_cycloid(spec, p[0]);
    doc["cusp"] = to_json(r);
    std::ostringstream svg;
    write_cusp_svg(svg, spec, r);
    write_file(dir / "cusp.svg", svg.str());
    std::cout << "3/2-cusp: mu " << r.curvature.mu << ", radius " << r.radius << ", "
              << (r.sign > 0 ? "positive" : "negative") << '\n';
  } else {
    doc["detection"] = to_json(det);
    std::cout << "not a 3/2-cusp: " << det.reason << '\n';
    code = kNondiagnosable;
    if (cfg.regular && det.reason.find("regular") != std::string::npos) {
      const auto o = osculating_cycloid_regular(spec, p[0]);
      doc["osculating_cycloid"] = to_json(o);
      std::cout << "osculating cycloid: theta " << o.theta << ", radius " << o.radius << '\n';
    }
  }
  write_file(dir / "cusp.json", dump_json(doc));
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singularities, inflections and their duality for parametrized hypersurfaces and curves"};
  app.require_subcommand(1);
  Config cfg;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("input", cfg.input, "map definition file")->required();
    sub->add_option("--point", cfg.point, "base point, e.g. \"u=0.1,v=pi/2\"");
    sub->add_option("--tol-zero", cfg.tol_zero, "relative zero tolerance of chain values");
    sub->add_option("--tol-rank", cfg.tol_rank, "relative singular-value cutoff");
    sub->add_option("--order", cfg.order, "jet order")->check(CLI::Range(2, 12));
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--threads", cfg.threads, "worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);
  };
  auto* classify = app.add_subcommand("classify", "A_k verdict at a point");
  common(classify);
  classify->add_flag("--dual", cfg.dual, "also classify the dual side of every duality route");
  auto* dual = app.add_subcommand("dual", "dual front, incidence and duality routes at a point");
  common(dual);
  auto* trace = app.add_subcommand("trace", "zero curves of h (or lambda) and the godron census");
  common(trace);
  trace->add_option("--grid", cfg.grid, "lattice size")->check(CLI::Range(16, 8192));
  trace->add_flag("--lambda", cfg.lambda, "trace the singular set instead of the parabolic curve");
  auto* euler = app.add_subcommand("euler", "Euler characteristic of the negative region and the signed census");
  common(euler);
  euler->add_option("--grid", cfg.grid, "lattice size")->check(CLI::Range(16, 8192));
  auto* cusp = app.add_subcommand("cusp", "cuspidal curvature and best cycloid of a planar curve");
  common(cusp);
  cusp->add_flag("--regular", cfg.regular, "report the osculating cycloid at a regular point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);

  try {
    if (classify->parsed()) return cmd_classify(cfg);
    if (dual->parsed()) return cmd_dual(cfg);
    if (trace->parsed()) return zero_set_command(cfg, "trace");
    if (euler->parsed()) return zero_set_command(cfg, "euler");
    if (cusp->parsed()) return cmd_cusp(cfg);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
  return kInput;
}
