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

// Integer-weight compressive sensing: a grouped measurement matrix built from
// a left-3-regular random bipartite graph with distinct coprime weight
// vectors on its edges, and the peeling decoder that inverts it for sparse
// inputs.
//
// Indices are zero-based throughout: left vertices (signal coordinates) are
// 0..n-1, right vertices (measurement groups) are 0..mu-1, and row r of
// group i is global row i*R + r.

#ifndef FRANTIC_CS_CORE_HPP
#define FRANTIC_CS_CORE_HPP

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace frantic::cs {

/// Riemann zeta at an integer R >= 2, summed until the next term drops
/// below 1e-12. Throws std::domain_error for R < 2.
double riemann_zeta(int R);

/// Smallest R >= 2 with M^R / zeta(R) >= 3n.
int min_group_height(std::int64_t n, int M);

/// Number of measurement groups for a sparsity budget: max(ceil(f*k), 3).
int group_count(std::int64_t k, double mu_factor);

struct CoprimeVector {
  std::vector<int> entries;

  friend auto operator<=>(const CoprimeVector&, const CoprimeVector&) = default;
};

/// Draws `count` pairwise-distinct vectors from [1, M]^R with gcd 1 by
/// rejection sampling. Throws CapacityError when 100*count draws do not
/// suffice.
std::vector<CoprimeVector> sample_coprime_vectors(std::size_t count, int R, int M,
                                                  std::mt19937_64& rng);

/// Left-regular bipartite graph: every left vertex has exactly three distinct
/// right neighbours. Edge (j, slot) has id 3*j + slot.
class BipartiteGraph {
 public:
  static constexpr int kLeftDegree = 3;

  struct Incidence {
    int left;
    int slot;
  };

  BipartiteGraph(int n_left, int n_right, std::vector<std::array<int, kLeftDegree>> adjacency);

  /// Each left vertex picks three distinct right vertices uniformly.
  static BipartiteGraph sample(int n_left, int n_right, std::mt19937_64& rng);

  int n_left() const { return n_left_; }
  int n_right() const { return n_right_; }
  const std::array<int, kLeftDegree>& neighbors(int left) const { return adjacency_[left]; }
  /// Left neighbours of right vertex i, ordered by left index.
  std::span<const Incidence> left_neighbors(int right) const;

  friend bool operator==(const BipartiteGraph& a, const BipartiteGraph& b) {
    return a.n_left_ == b.n_left_ && a.n_right_ == b.n_right_ && a.adjacency_ == b.adjacency_;
  }

 private:
  int n_left_;
  int n_right_;
  std::vector<std::array<int, kLeftDegree>> adjacency_;
  std::vector<std::size_t> right_offsets_;
  std::vector<Incidence> right_incidence_;
};

struct MatrixParams {
  int n = 1;
  int k = 1;
  int M = 2;
  double mu_factor = 4.0;
  std::uint64_t seed = 0;
};

/// R*mu x n integer matrix. Column j has a nonzero R-block exactly in the
/// three groups adjacent to j, holding that edge's coprime weight vector.
class MeasurementMatrix {
 public:
  /// Validates every invariant; `weights` is indexed by edge id.
  MeasurementMatrix(BipartiteGraph graph, std::vector<CoprimeVector> weights, int R, int M,
                    std::uint64_t seed = 0);

  int n() const { return graph_.n_left(); }
  int mu() const { return graph_.n_right(); }
  int R() const { return R_; }
  int M() const { return M_; }
  int rows() const { return R_ * mu(); }
  std::uint64_t seed() const { return seed_; }
  const BipartiteGraph& graph() const { return graph_; }

  std::span<const int> weight(int left, int slot) const {
    return weights_[static_cast<std::size_t>(left) * BipartiteGraph::kLeftDegree + slot].entries;
  }
  /// Weight vector on edge (right, left), or an empty span if not adjacent.
  std::span<const int> weight_between(int right, int left) const;
  /// Dense entry lookup; O(1).
  int entry(int row, int col) const;

  friend bool operator==(const MeasurementMatrix& a, const MeasurementMatrix& b) {
    return a.R_ == b.R_ && a.M_ == b.M_ && a.seed_ == b.seed_ && a.graph_ == b.graph_ &&
           a.weights_ == b.weights_;
  }

 private:
  BipartiteGraph graph_;
  std::vector<CoprimeVector> weights_;
  int R_;
  int M_;
  std::uint64_t seed_;
};

/// Deterministic in `params`. Throws ArgumentError on a domain violation.
MeasurementMatrix build_matrix(const MatrixParams& params);

/// Length-n vector with real (double) or exact integer (int64) coordinates.
template <class T>
class DelayVector {
 public:
  DelayVector() = default;
  explicit DelayVector(std::size_t n) : values_(n, T{}) {}
  explicit DelayVector(std::vector<T> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  T& operator[](std::size_t j) { return values_[j]; }
  const T& operator[](std::size_t j) const { return values_[j]; }
  std::span<const T> values() const { return values_; }
  std::span<T> values() { return values_; }

  /// Indices of nonzero coordinates, ascending.
  std::vector<std::size_t> support() const;
  std::size_t nonzeros() const { return support().size(); }

  /// Throws ArgumentError unless nnz <= k, entries are finite and, when
  /// `nonnegative`, entries are >= 0.
  void validate(std::size_t k, bool nonnegative = false) const;

  friend bool operator==(const DelayVector&, const DelayVector&) = default;

 private:
  std::vector<T> values_;
};

/// y = A d, stored group-major: group i occupies [i*R, (i+1)*R).
template <class T>
struct GroupedOutput {
  int R = 0;
  int mu = 0;
  std::vector<T> values;

  std::span<const T> group(int i) const {
    return std::span<const T>(values).subspan(static_cast<std::size_t>(i) * R, R);
  }
  std::span<T> group(int i) { return std::span<T>(values).subspan(static_cast<std::size_t>(i) * R, R); }

  friend bool operator==(const GroupedOutput&, const GroupedOutput&) = default;
};

template <class T>
GroupedOutput<T> encode(const MeasurementMatrix& A, const DelayVector<T>& d);

struct LeafCandidate {
  int left;
  std::span<const int> weights;
};

template <class T>
struct LeafMatch {
  int left;
  T value;
};

/// Checks whether y_i equals value * a for exactly one candidate a. With
/// T = int64 the test is exact and value must be an integer; with T = double
/// every residual coordinate must be within tolerance * max|y_i|.
template <class T>
std::optional<LeafMatch<T>> detect_leaf(std::span<const T> y_i,
                                        std::span<const LeafCandidate> candidates,
                                        double tolerance);

enum class DecodeStatus { success, stalled, inconsistent };

std::string_view to_string(DecodeStatus status);

template <class T>
struct DecodeResult {
  DelayVector<T> estimate;
  DecodeStatus status = DecodeStatus::success;
  int iterations = 0;             // picks from the neighbourly set
  int leaf_picks = 0;             // picks that peeled a coordinate
  int false_leaf_rejections = 0;  // picks rejected because several candidates matched
  int group_updates = 0;          // residual group subtractions
};

struct DecodeOptions {
  double tolerance = 1e-9;
};

/// Peeling decoder. Stalled and inconsistent outcomes are reported in the
/// status, never thrown. Throws ArgumentError on a dimension mismatch.
template <class T>
DecodeResult<T> decode(const MeasurementMatrix& A, const GroupedOutput<T>& y,
                       const DecodeOptions& options = {});

}  // namespace frantic::cs

#endif  // FRANTIC_CS_CORE_HPP
