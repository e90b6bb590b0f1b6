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

// Reduction from a grouped integer measurement matrix to network probes.
//
// Every measurement group i gets one spanning walk P(i) that covers the
// group's support, and each of its R sub-rows gets a weighted walk Q(i, r)
// that repeats P(i) with extra local loops, so that
//
//   W(Q, e) = W(P, e) + 2 a_ie^(r)    and    (delay(Q) - delay(P)) / 2 = y_i^(r).

#ifndef FRANTIC_TOMOGRAPHY_HPP
#define FRANTIC_TOMOGRAPHY_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "frantic/cs_core.hpp"
#include "frantic/netmodel.hpp"

namespace frantic::tomo {

using net::LinkId;
using net::Network;
using net::NodeId;
using net::ProbePath;
using net::Target;

/// Integer weights one matrix row places on links (or nodes).
struct RowWeights {
  int group = 0;
  int subrow = 0;
  Target target = Target::links;
  std::map<int, int> weights;  // element id -> weight in [1, M]

  std::vector<int> support() const;
};

/// Sorted element ids with a nonzero block in group i.
std::vector<int> group_support(const cs::MeasurementMatrix& A, int group);

/// Row `subrow` of group `group`, with matrix columns read as element ids.
RowWeights row_weights(const cs::MeasurementMatrix& A, int group, int subrow, Target target);

/// Nearest-neighbour walk covering every support link. Starts at
/// support[start_index]; from the current end it moves along a shortest path
/// to the closest uncovered link and crosses it. Throws ArgumentError on an
/// empty support.
ProbePath build_spanning_path(const Network& net, std::span<const LinkId> support,
                              std::size_t start_index = 0);

/// Nearest-neighbour walk visiting every support node.
ProbePath build_node_spanning_path(const Network& net, std::span<const NodeId> support,
                                   std::size_t start_index = 0);

/// One block of inserted loops.
struct LoopInsertion {
  Target kind = Target::links;
  int element = 0;        // looped link id, or node id in node mode
  int count = 0;          // out-and-back loops: w_e for a link, 2 w_v for a node
  std::size_t position;   // walk index after which the block starts
  NodeId via = -1;        // loop neighbour u in node mode
};

struct WeightedPath {
  ProbePath path;
  std::vector<LoopInsertion> loops;
};

/// At the first crossing of each weighted link, goes back and forth w_e more
/// times. Throws ArgumentError if a weighted link is never crossed.
WeightedPath build_weighted_path(const Network& net, const ProbePath& spanning,
                                 const RowWeights& weights);

/// Picks the loop neighbour u for a weighted node v.
using NeighborChooser = std::function<NodeId(NodeId)>;

enum class LoopNeighborPolicy { first_neighbor, oracle_noncongested };

std::string_view to_string(LoopNeighborPolicy policy);
LoopNeighborPolicy parse_loop_policy(std::string_view text);

/// Lowest-id neighbour.
NeighborChooser first_neighbor(const Network& net);
/// Lowest-id neighbour u with congested[u] == false, else the lowest-id one.
NeighborChooser oracle_noncongested(const Network& net, std::vector<bool> congested);

/// At the first visit of each weighted node v, inserts 2 w_v loops v->u->v.
/// Both v and u gain 2 w_v visits. Throws ArgumentError if a weighted node
/// is never visited.
WeightedPath build_node_weighted_path(const Network& net, const ProbePath& spanning,
                                      const RowWeights& weights, const NeighborChooser& choose);

/// (delay(Q) - delay(P)) / 2.
template <class T>
T subtract_measurements(T delta_q, T delta_p) {
  return (delta_q - delta_p) / 2;
}

/// naive: nearest-neighbour walk from a seeded start link. steiner: open tour
/// over an approximate Steiner tree of the support, or the naive walk when
/// that is shorter.
enum class PathBuilder { naive, steiner };

std::string_view to_string(PathBuilder builder);
PathBuilder parse_path_builder(std::string_view text);

struct GroupProbes {
  int group = 0;
  std::vector<int> support;
  ProbePath spanning{0};
  std::vector<WeightedPath> weighted;  // one per sub-row
};

struct MeasurementPlan {
  Target target = Target::links;
  int R = 0;
  int mu = 0;
  std::vector<GroupProbes> groups;

  /// (1 + R) * mu: one shared spanning walk plus R weighted walks per group.
  std::size_t probe_count() const;
};

struct PlanOptions {
  Target target = Target::links;
  PathBuilder builder = PathBuilder::naive;
  /// Seeds the arbitrary start link of each naive walk.
  std::uint64_t seed = 0;
};

/// Builds every probe for A over `net`. A's column count must equal |E|
/// (links) or |V| (nodes); `choose` is required in node mode.
MeasurementPlan build_plan(const Network& net, const cs::MeasurementMatrix& A,
                           const PlanOptions& options, const NeighborChooser& choose = {});

/// Checks W(Q, e) - W(P, e) = 2 a_e (or the node analogue, counting the loop
/// neighbour) for every probe pair. Returns the first offending group, if any.
std::optional<int> check_multiplicities(const Network& net, const cs::MeasurementMatrix& A,
                                        const MeasurementPlan& plan);

/// Simulates every probe against `truth` and forms y by subtraction.
template <class T>
cs::GroupedOutput<T> simulate(const Network& net, const MeasurementPlan& plan,
                              const cs::DelayVector<T>& truth);

struct IsolationViolation {
  int group;
  int subrow;
  NodeId node;
  NodeId via;
};

/// Node-mode loops whose neighbour u carries a nonzero delay in `truth`.
template <class T>
std::vector<IsolationViolation> isolation_violations(const MeasurementPlan& plan,
                                                     const cs::DelayVector<T>& truth);

struct PlanMetrics {
  std::size_t probes = 0;
  std::size_t max_path_links = 0;  // longest spanning walk
  double mean_path_links = 0.0;
  std::size_t max_path_hops = 0;   // longest probe counting loop traversals
  double mean_path_hops = 0.0;
  double mean_support = 0.0;       // mean nonzero elements per group
  std::size_t isolation_violations = 0;
};

PlanMetrics plan_metrics(const MeasurementPlan& plan);

struct RecoverOptions {
  Target target = Target::links;
  PathBuilder builder = PathBuilder::naive;
  LoopNeighborPolicy policy = LoopNeighborPolicy::first_neighbor;
  double tolerance = 1e-9;
  std::uint64_t seed = 0;
};

template <class T>
struct Recovery {
  cs::DecodeResult<T> decode;
  PlanMetrics metrics;
  std::vector<IsolationViolation> violations;
  MeasurementPlan plan;
};

/// Matrix for n = |E| or |V| with sparsity budget ceil(rho * k) (capped at n).
cs::MeasurementMatrix build_network_matrix(const Network& net, Target target, int k, double rho,
                                           int M, double mu_factor, std::uint64_t seed);

/// Full pipeline: plan, simulate against `truth`, subtract, decode.
template <class T>
Recovery<T> recover(const Network& net, const cs::MeasurementMatrix& A,
                    const cs::DelayVector<T>& truth, const RecoverOptions& options);

/// One JSON object per line per probe: row, subrow, kind, walk, loops.
void write_plan_jsonl(std::ostream& out, const Network& net, const MeasurementPlan& plan);

}  // namespace frantic::tomo

#endif  // FRANTIC_TOMOGRAPHY_HPP
