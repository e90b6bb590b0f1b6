// Copyright 2026 The Frantic Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "frantic/cs_core.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "frantic/errors.hpp"

namespace frantic::cs {

namespace {

double zeta_sum(int R) {
  auto inv_pow = [R](double t) {
    double p = 1.0;
    double base = t;
    for (int e = R; e > 0; e >>= 1) {
      if (e & 1) p *= base;
      base *= base;
    }
    return 1.0 / p;
  };
  double sum = 0.0;
  double t = 1.0;
  // Sum directly at least up to t = R.
  const double r_min = R;
  for (;; t += 1.0) {
    sum += inv_pow(t);
    if (t >= r_min && inv_pow(t + 1.0) < 1e-12) break;
  }
  // Euler-Maclaurin estimate of the dropped tail sum_{u > t} u^-R.
  const double r = R;
  sum += std::pow(t, 1.0 - r) / (r - 1.0) - 0.5 * std::pow(t, -r) + r / 12.0 * std::pow(t, -r - 1.0);
  return sum;
}

constexpr int kZetaTable = 64;

}  // namespace

double riemann_zeta(int R) {
  if (R < 2) throw std::domain_error("riemann_zeta: R must be >= 2, got " + std::to_string(R));
  if (R >= kZetaTable) return zeta_sum(R);
  static const std::array<double, kZetaTable> table = [] {
    std::array<double, kZetaTable> z{};
    for (int r = 2; r < kZetaTable; ++r) z[r] = zeta_sum(r);
    return z;
  }();
  return table[R];
}

int min_group_height(std::int64_t n, int M) {
  if (n < 1) throw ArgumentError("min_group_height: n must be >= 1");
  if (M < 2) throw ArgumentError("min_group_height: M must be >= 2");
  const double target = 3.0 * static_cast<double>(n);
  for (int R = 2;; ++R) {
    if (std::pow(static_cast<double>(M), R) / riemann_zeta(R) >= target) return R;
  }
}

int group_count(std::int64_t k, double mu_factor) {
  const double mu = std::ceil(mu_factor * static_cast<double>(k));
  return std::max(static_cast<int>(mu), 3);
}

std::vector<CoprimeVector> sample_coprime_vectors(std::size_t count, int R, int M,
                                                  std::mt19937_64& rng) {
  if (R < 1) throw ArgumentError("sample_coprime_vectors: R must be >= 1");
  if (M < 1) throw ArgumentError("sample_coprime_vectors: M must be >= 1");
  std::uniform_int_distribution<int> entry(1, M);
  std::set<std::vector<int>> seen;
  std::vector<CoprimeVector> out;
  out.reserve(count);
  const std::size_t budget = 100 * std::max<std::size_t>(count, 1);
  std::vector<int> v(R);
  for (std::size_t draws = 0; out.size() < count; ++draws) {
    if (draws >= budget) {
      throw CapacityError("sample_coprime_vectors: found only " + std::to_string(out.size()) +
                          " of " + std::to_string(count) + " distinct coprime vectors (R=" +
                          std::to_string(R) + ", M=" + std::to_string(M) + ")");
    }
    int g = 0;
    for (auto& x : v) {
      x = entry(rng);
      g = std::gcd(g, x);
    }
    if (g != 1) continue;
    if (!seen.insert(v).second) continue;
    out.push_back(CoprimeVector{v});
  }
  return out;
}

BipartiteGraph::BipartiteGraph(int n_left, int n_right,
                               std::vector<std::array<int, kLeftDegree>> adjacency)
    : n_left_(n_left), n_right_(n_right), adjacency_(std::move(adjacency)) {
  if (n_left < 1) throw ArgumentError("BipartiteGraph: n_left must be >= 1");
  if (n_right < kLeftDegree) throw ArgumentError("BipartiteGraph: n_right (mu) must be >= 3");
  if (adjacency_.size() != static_cast<std::size_t>(n_left)) {
    throw ArgumentError("BipartiteGraph: adjacency size does not match n_left");
  }
  std::vector<std::size_t> degree(n_right, 0);
  for (const auto& nb : adjacency_) {
    for (int s = 0; s < kLeftDegree; ++s) {
      if (nb[s] < 0 || nb[s] >= n_right) throw ArgumentError("BipartiteGraph: neighbour out of range");
      for (int t = 0; t < s; ++t) {
        if (nb[t] == nb[s]) throw ArgumentError("BipartiteGraph: repeated right neighbour");
      }
      ++degree[nb[s]];
    }
  }
  right_offsets_.assign(n_right + 1, 0);
  for (int i = 0; i < n_right; ++i) right_offsets_[i + 1] = right_offsets_[i] + degree[i];
  right_incidence_.resize(right_offsets_.back());
  std::vector<std::size_t> fill(right_offsets_.begin(), right_offsets_.end() - 1);
  for (int j = 0; j < n_left; ++j) {
    for (int s = 0; s < kLeftDegree; ++s) right_incidence_[fill[adjacency_[j][s]]++] = {j, s};
  }
}

BipartiteGraph BipartiteGraph::sample(int n_left, int n_right, std::mt19937_64& rng) {
  if (n_right < kLeftDegree) throw ArgumentError("BipartiteGraph::sample: mu must be >= 3");
  std::uniform_int_distribution<int> pick(0, n_right - 1);
  std::vector<std::array<int, kLeftDegree>> adjacency(n_left);
  for (auto& nb : adjacency) {
    for (int s = 0; s < kLeftDegree; ++s) {
      int i;
      do {
        i = pick(rng);
      } while (std::find(nb.begin(), nb.begin() + s, i) != nb.begin() + s);
      nb[s] = i;
    }
  }
  return BipartiteGraph(n_left, n_right, std::move(adjacency));
}

std::span<const BipartiteGraph::Incidence> BipartiteGraph::left_neighbors(int right) const {
  return std::span<const Incidence>(right_incidence_)
      .subspan(right_offsets_[right], right_offsets_[right + 1] - right_offsets_[right]);
}

MeasurementMatrix::MeasurementMatrix(BipartiteGraph graph, std::vector<CoprimeVector> weights,
                                     int R, int M, std::uint64_t seed)
    : graph_(std::move(graph)), weights_(std::move(weights)), R_(R), M_(M), seed_(seed) {
  if (R < 1) throw ArgumentError("MeasurementMatrix: R must be >= 1");
  if (M < 1) throw ArgumentError("MeasurementMatrix: M must be >= 1");
  const std::size_t edges = static_cast<std::size_t>(graph_.n_left()) * BipartiteGraph::kLeftDegree;
  if (weights_.size() != edges) {
    throw ArgumentError("MeasurementMatrix: expected " + std::to_string(edges) + " weight vectors");
  }
  std::set<std::vector<int>> distinct;
  for (const auto& w : weights_) {
    if (w.entries.size() != static_cast<std::size_t>(R)) {
      throw ArgumentError("MeasurementMatrix: weight vector length differs from R");
    }
    int g = 0;
    for (int x : w.entries) {
      if (x < 1 || x > M) throw ArgumentError("MeasurementMatrix: weight entry outside [1, M]");
      g = std::gcd(g, x);
    }
    if (g != 1) throw ArgumentError("MeasurementMatrix: weight vector is not coprime");
    if (!distinct.insert(w.entries).second) {
      throw ArgumentError("MeasurementMatrix: weight vectors are not pairwise distinct");
    }
  }
}

std::span<const int> MeasurementMatrix::weight_between(int right, int left) const {
  const auto& nb = graph_.neighbors(left);
  for (int s = 0; s < BipartiteGraph::kLeftDegree; ++s) {
    if (nb[s] == right) return weight(left, s);
  }
  return {};
}

int MeasurementMatrix::entry(int row, int col) const {
  const auto w = weight_between(row / R_, col);
  return w.empty() ? 0 : w[row % R_];
}

MeasurementMatrix build_matrix(const MatrixParams& p) {
  if (p.n < 1) throw ArgumentError("build_matrix: n must be >= 1");
  if (p.k < 1 || p.k > p.n) throw ArgumentError("build_matrix: k must satisfy 1 <= k <= n");
  if (p.M < 2) throw ArgumentError("build_matrix: M must be >= 2");
  if (!(p.mu_factor > 0.0)) throw ArgumentError("build_matrix: mu_factor must be > 0");
  const int mu = group_count(p.k, p.mu_factor);
  const int R = min_group_height(p.n, p.M);
  std::mt19937_64 rng(p.seed);
  auto graph = BipartiteGraph::sample(p.n, mu, rng);
  auto weights = sample_coprime_vectors(static_cast<std::size_t>(p.n) * 3, R, p.M, rng);
  return MeasurementMatrix(std::move(graph), std::move(weights), R, p.M, p.seed);
}

template <class T>
std::vector<std::size_t> DelayVector<T>::support() const {
  std::vector<std::size_t> s;
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (values_[j] != T{}) s.push_back(j);
  }
  return s;
}

template <class T>
void DelayVector<T>::validate(std::size_t k, bool nonnegative) const {
  std::size_t nnz = 0;
  for (const T& x : values_) {
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(x)) throw ArgumentError("DelayVector: non-finite entry");
    }
    if (nonnegative && x < T{}) throw ArgumentError("DelayVector: negative delay");
    if (x != T{}) ++nnz;
  }
  if (nnz > k) {
    throw ArgumentError("DelayVector: " + std::to_string(nnz) + " nonzeros exceed k = " +
                        std::to_string(k));
  }
}

template <class T>
GroupedOutput<T> encode(const MeasurementMatrix& A, const DelayVector<T>& d) {
  if (d.size() != static_cast<std::size_t>(A.n())) {
    throw ArgumentError("encode: delay vector length " + std::to_string(d.size()) +
                        " != matrix columns " + std::to_string(A.n()));
  }
  GroupedOutput<T> y{A.R(), A.mu(), std::vector<T>(static_cast<std::size_t>(A.rows()), T{})};
  for (int j = 0; j < A.n(); ++j) {
    const T dj = d[j];
    if (dj == T{}) continue;
    for (int s = 0; s < BipartiteGraph::kLeftDegree; ++s) {
      auto yi = y.group(A.graph().neighbors(j)[s]);
      const auto a = A.weight(j, s);
      for (int r = 0; r < A.R(); ++r) yi[r] += dj * static_cast<T>(a[r]);
    }
  }
  return y;
}

namespace {

template <class T>
T max_abs(std::span<const T> v) {
  T m{};
  for (const T& x : v) m = std::max(m, x < T{} ? -x : x);
  return m;
}

// Returns the proportionality factor when y == value * a (value != 0).
template <class T>
std::optional<T> proportional(std::span<const T> y, std::span<const int> a, double tolerance,
                              T scale) {
  if (y.size() != a.size() || y.empty()) return std::nullopt;
  if constexpr (std::is_integral_v<T>) {
    (void)tolerance;
    (void)scale;
    if (y[0] % a[0] != 0) return std::nullopt;
    const T value = y[0] / a[0];
    if (value == 0) return std::nullopt;
    for (std::size_t r = 1; r < y.size(); ++r) {
      if (y[r] != value * static_cast<T>(a[r])) return std::nullopt;
    }
    return value;
  } else {
    T ya = 0, aa = 0;
    for (std::size_t r = 0; r < y.size(); ++r) {
      ya += y[r] * a[r];
      aa += static_cast<T>(a[r]) * a[r];
    }
    const T value = ya / aa;
    if (value == 0) return std::nullopt;
    const T limit = static_cast<T>(tolerance) * scale;
    for (std::size_t r = 0; r < y.size(); ++r) {
      if (std::abs(y[r] - value * a[r]) > limit) return std::nullopt;
    }
    return value;
  }
}

template <class T>
struct LeafScan {
  std::optional<LeafMatch<T>> match;
  int matches = 0;
};

template <class T>
LeafScan<T> scan_leaf(std::span<const T> y_i, std::span<const LeafCandidate> candidates,
                      double tolerance) {
  LeafScan<T> scan;
  const T scale = max_abs(y_i);
  if (scale == T{}) return scan;
  for (const auto& c : candidates) {
    if (auto v = proportional(y_i, c.weights, tolerance, scale)) {
      if (++scan.matches == 1) scan.match = LeafMatch<T>{c.left, *v};
    }
  }
  if (scan.matches != 1) scan.match.reset();
  return scan;
}

}  // namespace

template <class T>
std::optional<LeafMatch<T>> detect_leaf(std::span<const T> y_i,
                                        std::span<const LeafCandidate> candidates,
                                        double tolerance) {
  return scan_leaf(y_i, candidates, tolerance).match;
}

std::string_view to_string(DecodeStatus status) {
  switch (status) {
    case DecodeStatus::success:
      return "success";
    case DecodeStatus::stalled:
      return "stalled";
    case DecodeStatus::inconsistent:
      return "inconsistent";
  }
  return "unknown";
}

template <class T>
DecodeResult<T> decode(const MeasurementMatrix& A, const GroupedOutput<T>& y,
                       const DecodeOptions& options) {
  if (y.R != A.R() || y.mu != A.mu() || y.values.size() != static_cast<std::size_t>(A.rows())) {
    throw ArgumentError("decode: output dimensions do not match the matrix");
  }
  const int mu = A.mu();
  const auto& graph = A.graph();

  DecodeResult<T> result;
  result.estimate = DelayVector<T>(static_cast<std::size_t>(A.n()));
  GroupedOutput<T> residual = y;

  // Group zero threshold: exact zero for integers, tolerance * |y|_inf for reals.
  T zero_limit{};
  if constexpr (std::is_floating_point_v<T>) {
    zero_limit = static_cast<T>(options.tolerance) * max_abs<T>(y.values);
  }
  auto is_zero = [&](int i) { return max_abs<T>(residual.group(i)) <= zero_limit; };

  std::vector<std::vector<LeafCandidate>> candidates(mu);
  auto candidates_of = [&](int i) -> std::span<const LeafCandidate> {
    auto& c = candidates[i];
    if (c.empty()) {
      for (const auto& inc : graph.left_neighbors(i)) c.push_back({inc.left, A.weight(inc.left, inc.slot)});
    }
    return c;
  };

  std::deque<int> queue;
  std::vector<char> queued(mu, 0);
  std::vector<char> decoded(A.n(), 0);
  for (int i = 0; i < mu; ++i) {
    if (!is_zero(i)) {
      queue.push_back(i);
      queued[i] = 1;
    }
  }

  std::size_t failed_since_peel = 0;
  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    queued[i] = 0;
    if (is_zero(i)) continue;

    ++result.iterations;
    const auto scan = scan_leaf<T>(residual.group(i), candidates_of(i), options.tolerance);
    if (!scan.match) {
      if (scan.matches > 1) ++result.false_leaf_rejections;
      queue.push_back(i);
      queued[i] = 1;
      if (++failed_since_peel >= queue.size()) {
        result.status = DecodeStatus::stalled;
        return result;
      }
      continue;
    }

    failed_since_peel = 0;
    ++result.leaf_picks;
    const auto [j, value] = *scan.match;
    if (decoded[j]) {
      // A coordinate can only be peeled twice after an earlier false leaf.
      result.status = DecodeStatus::inconsistent;
      return result;
    }
    decoded[j] = 1;
    result.estimate[j] = value;
    for (int s = 0; s < BipartiteGraph::kLeftDegree; ++s) {
      const int target = graph.neighbors(j)[s];
      auto group = residual.group(target);
      const auto a = A.weight(j, s);
      for (int r = 0; r < A.R(); ++r) group[r] -= value * static_cast<T>(a[r]);
      ++result.group_updates;
      if (!queued[target] && !is_zero(target)) {
        queue.push_back(target);
        queued[target] = 1;
      }
    }
  }
  result.status = DecodeStatus::success;
  return result;
}

template class DelayVector<std::int64_t>;
template class DelayVector<double>;
template GroupedOutput<std::int64_t> encode(const MeasurementMatrix&, const DelayVector<std::int64_t>&);
template GroupedOutput<double> encode(const MeasurementMatrix&, const DelayVector<double>&);
template std::optional<LeafMatch<std::int64_t>> detect_leaf(std::span<const std::int64_t>,
                                                            std::span<const LeafCandidate>, double);
template std::optional<LeafMatch<double>> detect_leaf(std::span<const double>,
                                                      std::span<const LeafCandidate>, double);
template DecodeResult<std::int64_t> decode(const MeasurementMatrix&, const GroupedOutput<std::int64_t>&,
                                           const DecodeOptions&);
template DecodeResult<double> decode(const MeasurementMatrix&, const GroupedOutput<double>&,
                                     const DecodeOptions&);

}  // namespace frantic::cs
