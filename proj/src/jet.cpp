#include "dualfront/jet.hpp"

#include <map>
#include <mutex>
#include <numeric>
#include <utility>

namespace dualfront {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kSyntax: return "syntax";
    case ErrorCode::kUndeclared: return "undeclared";
    case ErrorCode::kArity: return "arity";
    case ErrorCode::kSpec: return "spec";
    case ErrorCode::kRankDeficient: return "rank-deficient";
    case ErrorCode::kTruncation: return "truncation";
    case ErrorCode::kNondiagnosable: return "nondiagnosable";
    case ErrorCode::kHypothesis: return "hypothesis";
    case ErrorCode::kUnresolved: return "unresolved";
  }
  return "unknown";
}

namespace {

constexpr int kMaxOrder = 16;

void enumerate_degree(int nvars, int degree, MultiIndex& cur, int pos, std::vector<MultiIndex>& out) {
  if (pos == nvars - 1) {
    cur[static_cast<std::size_t>(pos)] = degree;
    out.push_back(cur);
    return;
  }
  for (int e = degree; e >= 0; --e) {
    cur[static_cast<std::size_t>(pos)] = e;
    enumerate_degree(nvars, degree - e, cur, pos + 1, out);
  }
  cur[static_cast<std::size_t>(pos)] = 0;
}

std::uint64_t encode(std::span<const int> alpha, int order) {
  std::uint64_t key = 0;
  for (std::size_t i = alpha.size(); i-- > 0;) key = key * static_cast<std::uint64_t>(order + 1) + static_cast<std::uint64_t>(alpha[i]);
  return key;
}

}  // namespace

class LayoutCache {
 public:
  static std::shared_ptr<const JetLayout> get(int nvars, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<JetLayout>> cache;
    std::lock_guard<std::mutex> lock(mu);
    return get_locked(cache, nvars, order);
  }

 private:
  static std::shared_ptr<const JetLayout> get_locked(
      std::map<std::pair<int, int>, std::shared_ptr<JetLayout>>& cache, int nvars, int order) {
    auto it = cache.find({nvars, order});
    if (it != cache.end()) return it->second;
    std::shared_ptr<const JetLayout> lower = order > 0 ? get_locked(cache, nvars, order - 1) : nullptr;
    auto layout = std::make_shared<JetLayout>(nvars, order, lower);
    layout->self_ = layout;
    layout->lower_.push_back(layout);
    cache.emplace(std::make_pair(nvars, order), layout);
    return layout;
  }
};

std::shared_ptr<const JetLayout> JetLayout::get(int nvars, int order) {
  if (nvars < 1 || nvars > 15 || order < 0 || order > kMaxOrder) {
    throw Error(ErrorCode::kShape, "jet shape out of supported range (1 <= nvars <= 15, 0 <= order <= 16)");
  }
  return LayoutCache::get(nvars, order);
}

const std::shared_ptr<const JetLayout>& JetLayout::at_order(int order) const {
  if (order < 0 || order > order_) throw Error(ErrorCode::kShape, "layout order out of range");
  return lower_[static_cast<std::size_t>(order)];
}

JetLayout::JetLayout(int nvars, int order, std::shared_ptr<const JetLayout> lower)
    : nvars_(nvars), order_(order) {
  if (lower) lower_ = lower->lower_;
  MultiIndex cur(static_cast<std::size_t>(nvars), 0);
  for (int d = 0; d <= order; ++d) enumerate_degree(nvars, d, cur, 0, exponents_);

  const std::size_t n = exponents_.size();
  degrees_.resize(n);
  factorials_.resize(n);
  std::vector<std::uint64_t> keys(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& a = exponents_[k];
    degrees_[k] = std::accumulate(a.begin(), a.end(), 0);
    double f = 1.0;
    for (int e : a) {
      for (int i = 2; i <= e; ++i) f *= i;
    }
    factorials_[k] = f;
    keys[k] = encode(a, order);
  }
  key_pos_.resize(n);
  std::iota(key_pos_.begin(), key_pos_.end(), 0u);
  std::sort(key_pos_.begin(), key_pos_.end(), [&](auto x, auto y) { return keys[x] < keys[y]; });
  keys_.resize(n);
  for (std::size_t i = 0; i < n; ++i) keys_[i] = keys[key_pos_[i]];

  auto lookup = [&](std::uint64_t key) -> std::uint32_t {
    auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    return key_pos_[static_cast<std::size_t>(it - keys_.begin())];
  };

  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (degrees_[a] + degrees_[b] > order) {
        // graded order: every later b has degree >= degrees_[b]
        break;
      }
      products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), lookup(keys[a] + keys[b])});
    }
  }

  derivatives_.resize(static_cast<std::size_t>(nvars));
  for (int var = 0; var < nvars; ++var) {
    for (std::size_t k = 0; k < n; ++k) {
      const auto& a = exponents_[k];
      const int e = a[static_cast<std::size_t>(var)];
      if (e == 0) continue;
      MultiIndex b = a;
      b[static_cast<std::size_t>(var)] -= 1;
      derivatives_[static_cast<std::size_t>(var)].push_back(
          {static_cast<std::uint32_t>(k), lookup(encode(b, order)), static_cast<double>(e)});
    }
  }
}

std::optional<std::size_t> JetLayout::find(std::span<const int> alpha) const {
  if (alpha.size() != static_cast<std::size_t>(nvars_)) throw Error(ErrorCode::kShape, "multi-index length mismatch");
  int total = 0;
  for (int e : alpha) {
    if (e < 0) throw Error(ErrorCode::kShape, "negative exponent in multi-index");
    total += e;
  }
  if (total > order_) return std::nullopt;
  const std::uint64_t key = encode(alpha, order_);
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  return key_pos_[static_cast<std::size_t>(it - keys_.begin())];
}

}  // namespace dualfront
