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

#include "frantic/netmodel.hpp"

#include <algorithm>
#include <istream>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_map>

#include "frantic/errors.hpp"

namespace frantic::net {

std::string_view to_string(Target target) {
  return target == Target::links ? "links" : "nodes";
}

Target parse_target(std::string_view text) {
  if (text == "links" || text == "link") return Target::links;
  if (text == "nodes" || text == "node") return Target::nodes;
  throw ArgumentError("mode: expected 'links' or 'nodes', got '" + std::string(text) + "'");
}

Network::Network(NodeId node_count, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  if (node_count < 1) throw ArgumentError("Network: node count must be >= 1");
  adjacency_.resize(node_count);
  labels_.resize(node_count);
  for (NodeId v = 0; v < node_count; ++v) labels_[v] = v;
  links_.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= node_count || b >= node_count) {
      throw ArgumentError("Network: link (" + std::to_string(a) + ", " + std::to_string(b) +
                          ") references a missing node");
    }
    if (a == b) throw ArgumentError("Network: self-loop at node " + std::to_string(a));
    const LinkId e = static_cast<LinkId>(links_.size());
    links_.push_back({std::min(a, b), std::max(a, b)});
    adjacency_[a].push_back({b, e});
    adjacency_[b].push_back({a, e});
  }
  for (auto& adj : adjacency_) {
    std::sort(adj.begin(), adj.end(), [](const Adjacent& x, const Adjacent& y) { return x.node < y.node; });
    for (std::size_t t = 1; t < adj.size(); ++t) {
      if (adj[t].node == adj[t - 1].node) {
        const Link& l = links_[adj[t].link];
        throw ArgumentError("Network: duplicate link (" + std::to_string(l.u) + ", " +
                            std::to_string(l.v) + ")");
      }
    }
  }
  const auto dist = bfs_distances(*this, 0);
  if (std::find(dist.begin(), dist.end(), -1) != dist.end()) {
    throw ArgumentError("Network: graph is not connected");
  }
}

Network Network::from_edge_list(std::istream& in) {
  std::unordered_map<std::int64_t, NodeId> index;
  std::vector<std::int64_t> labels;
  std::vector<std::pair<NodeId, NodeId>> edges;
  auto intern = [&](std::int64_t label) {
    if (label < 0) throw ArgumentError("edge list: negative node id " + std::to_string(label));
    auto [it, inserted] = index.emplace(label, static_cast<NodeId>(labels.size()));
    if (inserted) labels.push_back(label);
    return it->second;
  };
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::int64_t a, b;
    if (!(fields >> a)) continue;
    if (!(fields >> b)) throw ArgumentError("edge list: line " + std::to_string(line_no) + " has one id");
    std::string extra;
    if (fields >> extra) throw ArgumentError("edge list: line " + std::to_string(line_no) + " has extra fields");
    const NodeId u = intern(a);
    const NodeId v = intern(b);
    edges.emplace_back(u, v);
  }
  if (labels.empty()) throw ArgumentError("edge list: no links");
  Network net(static_cast<NodeId>(labels.size()), edges);
  net.labels_ = std::move(labels);
  return net;
}

std::optional<LinkId> Network::find_link(NodeId a, NodeId b) const {
  if (a < 0 || b < 0 || a >= node_count() || b >= node_count()) return std::nullopt;
  const auto& adj = adjacency_[a].size() <= adjacency_[b].size() ? adjacency_[a] : adjacency_[b];
  const NodeId target = adjacency_[a].size() <= adjacency_[b].size() ? b : a;
  auto it = std::lower_bound(adj.begin(), adj.end(), target,
                             [](const Adjacent& x, NodeId v) { return x.node < v; });
  if (it == adj.end() || it->node != target) return std::nullopt;
  return it->link;
}

std::vector<int> bfs_distances(const Network& net, NodeId source) {
  std::vector<int> dist(net.node_count(), -1);
  std::queue<NodeId> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const NodeId v = frontier.front();
    frontier.pop();
    for (const auto& a : net.neighbors(v)) {
      if (dist[a.node] == -1) {
        dist[a.node] = dist[v] + 1;
        frontier.push(a.node);
      }
    }
  }
  return dist;
}

Diameter diameter(const Network& net, NodeId exact_limit) {
  Diameter d;
  if (net.node_count() <= exact_limit) {
    for (NodeId v = 0; v < net.node_count(); ++v) {
      const auto dist = bfs_distances(net, v);
      d.value = std::max(d.value, *std::max_element(dist.begin(), dist.end()));
    }
    d.lower_bound = d.value;
    return d;
  }
  const auto from_start = bfs_distances(net, 0);
  const auto far = static_cast<NodeId>(std::max_element(from_start.begin(), from_start.end()) - from_start.begin());
  const auto from_far = bfs_distances(net, far);
  const int ecc_start = from_start[far];
  const int ecc_far = *std::max_element(from_far.begin(), from_far.end());
  d.lower_bound = ecc_far;
  d.value = std::min(2 * ecc_start, 2 * ecc_far);
  d.estimate = true;
  return d;
}

ProbePath::ProbePath(std::vector<NodeId> walk) : walk_(std::move(walk)) {
  if (walk_.empty()) throw ArgumentError("ProbePath: walk must hold at least one node");
}

void ProbePath::extend(const ProbePath& tail) {
  if (tail.front() != back()) throw ArgumentError("ProbePath::extend: paths do not meet");
  walk_.insert(walk_.end(), tail.walk_.begin() + 1, tail.walk_.end());
}

ProbePath ProbePath::reversed() const {
  return ProbePath(std::vector<NodeId>(walk_.rbegin(), walk_.rend()));
}

std::vector<LinkId> ProbePath::link_sequence(const Network& net) const {
  std::vector<LinkId> seq;
  seq.reserve(length());
  for (std::size_t t = 0; t + 1 < walk_.size(); ++t) {
    auto e = net.find_link(walk_[t], walk_[t + 1]);
    if (!e) {
      throw ArgumentError("ProbePath: nodes " + std::to_string(walk_[t]) + " and " +
                          std::to_string(walk_[t + 1]) + " are not adjacent");
    }
    seq.push_back(*e);
  }
  return seq;
}

ProbePath shortest_path(const Network& net, NodeId a, NodeId b) {
  if (a < 0 || b < 0 || a >= net.node_count() || b >= net.node_count()) {
    throw ArgumentError("shortest_path: node out of range");
  }
  if (a == b) return ProbePath(a);
  // Search backwards from b so the parent chain reads a -> b.
  std::vector<NodeId> parent(net.node_count(), -1);
  std::queue<NodeId> frontier;
  parent[b] = b;
  frontier.push(b);
  while (!frontier.empty() && parent[a] == -1) {
    const NodeId v = frontier.front();
    frontier.pop();
    for (const auto& adj : net.neighbors(v)) {
      if (parent[adj.node] == -1) {
        parent[adj.node] = v;
        frontier.push(adj.node);
      }
    }
  }
  std::vector<NodeId> walk{a};
  for (NodeId v = a; v != b;) {
    v = parent[v];
    walk.push_back(v);
  }
  return ProbePath(std::move(walk));
}

int MultiplicityMap::link_count(LinkId e) const {
  auto it = links.find(e);
  return it == links.end() ? 0 : it->second;
}

int MultiplicityMap::node_count(NodeId v) const {
  auto it = nodes.find(v);
  return it == nodes.end() ? 0 : it->second;
}

MultiplicityMap multiplicities(const Network& net, const ProbePath& path) {
  MultiplicityMap m;
  for (LinkId e : path.link_sequence(net)) ++m.links[e];
  for (NodeId v : path.walk()) ++m.nodes[v];
  return m;
}

template <class T>
T path_delay(const Network& net, const ProbePath& path, std::span<const T> d, Target target) {
  T total{};
  if (target == Target::links) {
    if (d.size() != static_cast<std::size_t>(net.link_count())) {
      throw ArgumentError("path_delay: link delay vector has wrong length");
    }
    for (LinkId e : path.link_sequence(net)) total += d[e];
  } else {
    if (d.size() != static_cast<std::size_t>(net.node_count())) {
      throw ArgumentError("path_delay: node delay vector has wrong length");
    }
    path.validate(net);
    for (NodeId v : path.walk()) total += d[v];
  }
  return total;
}

template std::int64_t path_delay(const Network&, const ProbePath&, std::span<const std::int64_t>, Target);
template double path_delay(const Network&, const ProbePath&, std::span<const double>, Target);

}  // namespace frantic::net
