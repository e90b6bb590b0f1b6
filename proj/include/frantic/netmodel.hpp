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

// Undirected network model: nodes, links, probe walks and their additive
// end-to-end delays.

#ifndef FRANTIC_NETMODEL_HPP
#define FRANTIC_NETMODEL_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace frantic::net {

using NodeId = std::int32_t;
using LinkId = std::int32_t;

/// Which element class carries the unknown delays.
enum class Target { links, nodes };

std::string_view to_string(Target target);
Target parse_target(std::string_view text);

/// Canonical undirected link, u < v.
struct Link {
  NodeId u;
  NodeId v;

  NodeId other(NodeId x) const { return x == u ? v : u; }
  friend bool operator==(const Link&, const Link&) = default;
};

struct Adjacent {
  NodeId node;
  LinkId link;
};

/// Connected simple undirected graph. Immutable after construction.
class Network {
 public:
  /// Link ids follow the order of `edges`. Throws ArgumentError on self-loops,
  /// duplicate links, out-of-range ids or a disconnected graph.
  Network(NodeId node_count, const std::vector<std::pair<NodeId, NodeId>>& edges);

  /// Reads whitespace-separated "u v" pairs; '#' starts a comment. Node ids
  /// are arbitrary non-negative integers, relabelled densely in order of
  /// first appearance (see labels()).
  static Network from_edge_list(std::istream& in);

  NodeId node_count() const { return static_cast<NodeId>(adjacency_.size()); }
  LinkId link_count() const { return static_cast<LinkId>(links_.size()); }
  const Link& link(LinkId e) const { return links_[e]; }
  const std::vector<Link>& links() const { return links_; }
  /// Neighbours sorted by node id.
  std::span<const Adjacent> neighbors(NodeId v) const { return adjacency_[v]; }
  std::size_t degree(NodeId v) const { return adjacency_[v].size(); }
  std::optional<LinkId> find_link(NodeId a, NodeId b) const;
  /// External id of each node (identity unless loaded from an edge list).
  const std::vector<std::int64_t>& labels() const { return labels_; }

 private:
  std::vector<Link> links_;
  std::vector<std::vector<Adjacent>> adjacency_;
  std::vector<std::int64_t> labels_;
};

/// Hop distance from `source` to every node.
std::vector<int> bfs_distances(const Network& net, NodeId source);

struct Diameter {
  int value = 0;
  int lower_bound = 0;
  bool estimate = false;  // value is an upper bound rather than exact
};

/// Exact all-pairs BFS up to `exact_limit` nodes; beyond it a double-sweep
/// estimate with value = an upper bound and lower_bound = the sweep's
/// eccentricity.
Diameter diameter(const Network& net, NodeId exact_limit = 2000);

/// A walk v_1, ..., v_{T+1} over links (v_t, v_{t+1}). Always holds at least
/// one node; a single-node walk is the empty path of length 0.
class ProbePath {
 public:
  explicit ProbePath(NodeId start) : walk_{start} {}
  explicit ProbePath(std::vector<NodeId> walk);

  const std::vector<NodeId>& walk() const { return walk_; }
  std::size_t length() const { return walk_.size() - 1; }
  NodeId front() const { return walk_.front(); }
  NodeId back() const { return walk_.back(); }

  void append(NodeId v) { walk_.push_back(v); }
  /// Concatenates `tail`, which must start where this path ends.
  void extend(const ProbePath& tail);
  ProbePath reversed() const;

  /// Link ids of the traversed links in order. Throws ArgumentError if two
  /// consecutive nodes are not adjacent.
  std::vector<LinkId> link_sequence(const Network& net) const;
  void validate(const Network& net) const { (void)link_sequence(net); }

  friend bool operator==(const ProbePath&, const ProbePath&) = default;

 private:
  std::vector<NodeId> walk_;
};

/// Minimum-hop path from a to b.
ProbePath shortest_path(const Network& net, NodeId a, NodeId b);

/// Direction-blind visit counts. Every walk position counts one node visit,
/// so a walk of length T makes T+1 node visits.
struct MultiplicityMap {
  std::map<LinkId, int> links;
  std::map<NodeId, int> nodes;

  int link_count(LinkId e) const;
  int node_count(NodeId v) const;
};

MultiplicityMap multiplicities(const Network& net, const ProbePath& path);

/// Sum over links (or nodes) of multiplicity times delay. `d` is indexed by
/// link id or node id according to `target`.
template <class T>
T path_delay(const Network& net, const ProbePath& path, std::span<const T> d, Target target);

}  // namespace frantic::net

#endif  // FRANTIC_NETMODEL_HPP
