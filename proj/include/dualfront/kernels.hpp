#pragma once

// Data-parallel kernels with serial twins. The OpenMP and serial paths run
// the same per-item code, so their results agree bit for bit.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace dualfront {

enum class Execution { kSerial, kParallel };

/// Runs body(i) for i in [0, n). The first exception thrown by any item is
/// rethrown after the loop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, Execution ex);

using PlaneFunction = std::function<double(const std::array<double, 2>&)>;

/// f at every point.
std::vector<double> evaluate_points(const PlaneFunction& f, std::span<const std::array<double, 2>> points,
                                    Execution ex);

struct SubcomplexCounts {
  std::int64_t vertices = 0;
  std::int64_t edges = 0;
  std::int64_t faces = 0;
  std::int64_t euler() const { return vertices - edges + faces; }
};

/// V, E, F of the full subcomplex spanned by the vertices whose label equals
/// `label` in a closed triangulated surface (every edge in exactly two
/// triangles). With `all` set, the whole complex is counted.
SubcomplexCounts count_full_subcomplex(std::span<const std::int8_t> labels,
                                       std::span<const std::array<std::int32_t, 3>> triangles, std::int8_t label,
                                       Execution ex, bool all = false);

}  // namespace dualfront
