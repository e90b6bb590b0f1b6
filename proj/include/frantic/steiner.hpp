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

// Steiner-tree shortening of probe walks: the metric-closure 2-approximation,
// depth-first tours over a tree plus required links, and sampled length
// statistics.

#ifndef FRANTIC_STEINER_HPP
#define FRANTIC_STEINER_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "frantic/netmodel.hpp"

namespace frantic::steiner {

using net::LinkId;
using net::Network;
using net::NodeId;
using net::ProbePath;

struct SteinerTree {
  std::vector<NodeId> terminals;  // deduplicated, ascending
  std::vector<LinkId> links;      // ascending

  std::size_t length() const { return links.size(); }
};

/// Metric-closure construction: MST over terminal hop distances, expanded
/// into shortest paths, reduced to a spanning tree and pruned of non-terminal
/// leaves. Length is at most twice the optimum.
SteinerTree steiner_approx(const Network& net, std::span<const NodeId> terminals);

/// True when `tree.links` is acyclic, connected and touches every terminal.
bool is_steiner_tree(const Network& net, const SteinerTree& tree);

enum class TourShape {
  closed,  // depth-first doubling tour returning to its start
  open,    // runs between the ends of a longest tree path, skipping the return leg
};

/// Depth-first walk over tree ∪ support that traverses every support link at
/// least once. Support links that close a cycle are taken as out-and-back
/// detours. Length <= 2 * (|tree| + |support|). Throws ArgumentError when
/// the union is disconnected or empty with no terminal to stand on.
ProbePath tree_tour(const Network& net, const SteinerTree& tree, std::span<const LinkId> support,
                    TourShape shape = TourShape::closed);

struct SteinerLengthStats {
  std::size_t worst = 0;
  double mean = 0.0;
};

/// Approximate Steiner lengths over `trials` uniform terminal sets of size s.
SteinerLengthStats steiner_length_stats(const Network& net, std::size_t s, std::size_t trials,
                                        std::uint64_t seed);

}  // namespace frantic::steiner

#endif  // FRANTIC_STEINER_HPP
