#include "dualfront/kernels.hpp"

#include <exception>
#include <mutex>

#include "dualfront/error.hpp"

namespace dualfront {

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, Execution ex) {
  std::exception_ptr first;
  std::mutex mu;
  const auto run = [&](std::size_t i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!first) first = std::current_exception();
    }
  };
  const auto count = static_cast<std::int64_t>(n);
  if (ex == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < count; ++i) run(static_cast<std::size_t>(i));
  } else {
    for (std::int64_t i = 0; i < count; ++i) run(static_cast<std::size_t>(i));
  }
  if (first) std::rethrow_exception(first);
}

std::vector<double> evaluate_points(const PlaneFunction& f, std::span<const std::array<double, 2>> points,
                                    Execution ex) {
  std::vector<double> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) { out[i] = f(points[i]); }, ex);
  return out;
}

SubcomplexCounts count_full_subcomplex(std::span<const std::int8_t> labels,
                                       std::span<const std::array<std::int32_t, 3>> triangles, std::int8_t label,
                                       Execution ex, bool all) {
  const auto nv = static_cast<std::int64_t>(labels.size());
  const auto nt = static_cast<std::int64_t>(triangles.size());
  for (const auto& t : triangles) {
    for (auto v : t) {
      if (v < 0 || v >= nv) throw Error(ErrorCode::kShape, "triangle references a missing vertex");
    }
  }
  const auto in = [&](std::int32_t v) { return all || labels[static_cast<std::size_t>(v)] == label; };
  std::int64_t vertices = 0, half_edges = 0, faces = 0;
  if (ex == Execution::kParallel) {
#pragma omp parallel for reduction(+ : vertices)
    for (std::int64_t i = 0; i < nv; ++i) vertices += in(static_cast<std::int32_t>(i)) ? 1 : 0;
#pragma omp parallel for reduction(+ : half_edges, faces)
    for (std::int64_t i = 0; i < nt; ++i) {
      const auto& t = triangles[static_cast<std::size_t>(i)];
      const bool a = in(t[0]), b = in(t[1]), c = in(t[2]);
      half_edges += (a && b) + (b && c) + (c && a);
      faces += (a && b && c) ? 1 : 0;
    }
  } else {
    for (std::int64_t i = 0; i < nv; ++i) vertices += in(static_cast<std::int32_t>(i)) ? 1 : 0;
    for (std::int64_t i = 0; i < nt; ++i) {
      const auto& t = triangles[static_cast<std::size_t>(i)];
      const bool a = in(t[0]), b = in(t[1]), c = in(t[2]);
      half_edges += (a && b) + (b && c) + (c && a);
      faces += (a && b && c) ? 1 : 0;
    }
  }
  if (half_edges % 2 != 0) throw Error(ErrorCode::kShape, "triangulation is not closed: an edge lies in one triangle");
  return {vertices, half_edges / 2, faces};
}

}  // namespace dualfront
