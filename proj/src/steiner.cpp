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

#include "frantic/steiner.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <string>

#include "frantic/errors.hpp"

namespace frantic::steiner {

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
  std::vector<std::size_t> parent;
};

struct BfsTree {
  std::vector<int> dist;
  std::vector<LinkId> via;  // link to parent
};

BfsTree bfs_tree(const Network& net, NodeId source) {
  BfsTree t{std::vector<int>(net.node_count(), -1), std::vector<LinkId>(net.node_count(), -1)};
  std::queue<NodeId> frontier;
  t.dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const NodeId v = frontier.front();
    frontier.pop();
    for (const auto& a : net.neighbors(v)) {
      if (t.dist[a.node] == -1) {
        t.dist[a.node] = t.dist[v] + 1;
        t.via[a.node] = a.link;
        frontier.push(a.node);
      }
    }
  }
  return t;
}

// Local adjacency over a subset of links.
struct Forest {
  std::vector<std::vector<std::pair<NodeId, LinkId>>> adj;
  explicit Forest(const Network& net) : adj(net.node_count()) {}
  void add(const Network& net, LinkId e) {
    const auto& l = net.link(e);
    adj[l.u].emplace_back(l.v, e);
    adj[l.v].emplace_back(l.u, e);
  }
};

// Removes leaves outside `keep` until none remain; returns surviving links.
std::vector<LinkId> prune_leaves(const Network& net, const std::vector<LinkId>& links,
                                 const std::vector<char>& keep) {
  std::vector<int> degree(net.node_count(), 0);
  std::vector<char> alive_link(net.link_count(), 0);
  for (LinkId e : links) {
    alive_link[e] = 1;
    ++degree[net.link(e).u];
    ++degree[net.link(e).v];
  }
  Forest f(net);
  for (LinkId e : links) f.add(net, e);
  std::vector<NodeId> stack;
  for (NodeId v = 0; v < net.node_count(); ++v) {
    if (degree[v] == 1 && !keep[v]) stack.push_back(v);
  }
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    if (degree[v] != 1 || keep[v]) continue;
    for (const auto& [w, e] : f.adj[v]) {
      if (!alive_link[e]) continue;
      alive_link[e] = 0;
      --degree[v];
      if (--degree[w] == 1 && !keep[w]) stack.push_back(w);
      break;
    }
  }
  std::vector<LinkId> out;
  for (LinkId e : links) {
    if (alive_link[e]) out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

SteinerTree steiner_approx(const Network& net, std::span<const NodeId> terminals) {
  SteinerTree tree;
  tree.terminals.assign(terminals.begin(), terminals.end());
  std::sort(tree.terminals.begin(), tree.terminals.end());
  tree.terminals.erase(std::unique(tree.terminals.begin(), tree.terminals.end()), tree.terminals.end());
  for (NodeId t : tree.terminals) {
    if (t < 0 || t >= net.node_count()) throw ArgumentError("steiner_approx: terminal out of range");
  }
  const std::size_t s = tree.terminals.size();
  if (s <= 1) return tree;

  std::vector<BfsTree> from;
  from.reserve(s);
  for (NodeId t : tree.terminals) from.push_back(bfs_tree(net, t));

  // Prim over the metric closure.
  std::vector<char> in_mst(s, 0);
  std::vector<int> best(s, std::numeric_limits<int>::max());
  std::vector<std::size_t> best_from(s, 0);
  best[0] = 0;
  std::vector<char> in_union(net.link_count(), 0);
  std::vector<LinkId> union_links;
  for (std::size_t round = 0; round < s; ++round) {
    std::size_t pick = s;
    for (std::size_t x = 0; x < s; ++x) {
      if (!in_mst[x] && (pick == s || best[x] < best[pick])) pick = x;
    }
    in_mst[pick] = 1;
    if (round > 0) {
      // Expand closure edge (best_from[pick], pick) into its shortest path.
      const BfsTree& bt = from[best_from[pick]];
      for (NodeId v = tree.terminals[pick]; bt.via[v] != -1;) {
        const LinkId e = bt.via[v];
        if (!in_union[e]) {
          in_union[e] = 1;
          union_links.push_back(e);
        }
        v = net.link(e).other(v);
      }
    }
    for (std::size_t x = 0; x < s; ++x) {
      const int d = from[pick].dist[tree.terminals[x]];
      if (!in_mst[x] && d < best[x]) {
        best[x] = d;
        best_from[x] = pick;
      }
    }
  }

  // Spanning tree of the expanded subgraph, then prune non-terminal leaves.
  std::sort(union_links.begin(), union_links.end());
  DisjointSets sets(net.node_count());
  std::vector<LinkId> spanning;
  for (LinkId e : union_links) {
    if (sets.unite(net.link(e).u, net.link(e).v)) spanning.push_back(e);
  }
  std::vector<char> keep(net.node_count(), 0);
  for (NodeId t : tree.terminals) keep[t] = 1;
  tree.links = prune_leaves(net, spanning, keep);
  return tree;
}

bool is_steiner_tree(const Network& net, const SteinerTree& tree) {
  if (tree.links.empty()) return tree.terminals.size() <= 1;
  DisjointSets sets(net.node_count());
  std::vector<char> touched(net.node_count(), 0);
  for (LinkId e : tree.links) {
    if (e < 0 || e >= net.link_count()) return false;
    const auto& l = net.link(e);
    if (!sets.unite(l.u, l.v)) return false;  // cycle or duplicate
    touched[l.u] = touched[l.v] = 1;
  }
  const auto root = sets.find(net.link(tree.links.front()).u);
  for (LinkId e : tree.links) {
    if (sets.find(net.link(e).u) != root) return false;
  }
  for (NodeId t : tree.terminals) {
    if (!touched[t] || sets.find(t) != root) return false;
  }
  return true;
}

ProbePath tree_tour(const Network& net, const SteinerTree& tree, std::span<const LinkId> support,
                    TourShape shape) {
  std::vector<char> is_support(net.link_count(), 0);
  std::vector<char> required(net.node_count(), 0);
  std::vector<LinkId> candidates;
  for (LinkId e : support) {
    if (e < 0 || e >= net.link_count()) throw ArgumentError("tree_tour: support link out of range");
    if (!is_support[e]) candidates.push_back(e);
    is_support[e] = 1;
    required[net.link(e).u] = required[net.link(e).v] = 1;
  }
  for (NodeId t : tree.terminals) required[t] = 1;
  for (LinkId e : tree.links) {
    if (!is_support[e]) candidates.push_back(e);
  }

  if (candidates.empty()) {
    if (tree.terminals.empty()) throw ArgumentError("tree_tour: nothing to visit");
    if (tree.terminals.size() > 1) throw ArgumentError("tree_tour: terminals are disconnected");
    return ProbePath(tree.terminals.front());
  }

  // Support links enter the spanning forest first; cycle-closing support
  // links become detours.
  DisjointSets sets(net.node_count());
  std::vector<LinkId> forest;
  std::vector<LinkId> detours;
  for (LinkId e : candidates) {
    if (sets.unite(net.link(e).u, net.link(e).v)) {
      forest.push_back(e);
    } else if (is_support[e]) {
      detours.push_back(e);
    }
  }
  const auto root_set = sets.find(net.link(candidates.front()).u);
  for (NodeId v = 0; v < net.node_count(); ++v) {
    if (required[v] && sets.find(v) != root_set) throw ArgumentError("tree_tour: input is disconnected");
  }
  forest = prune_leaves(net, forest, required);

  Forest f(net);
  for (LinkId e : forest) f.add(net, e);
  for (auto& adj : f.adj) std::sort(adj.begin(), adj.end());
  std::vector<std::vector<NodeId>> detour_at(net.node_count());
  for (LinkId e : detours) detour_at[net.link(e).u].push_back(net.link(e).v);

  NodeId start = net.link(forest.empty() ? detours.front() : forest.front()).u;
  std::vector<char> on_final_leg(net.node_count(), 0);
  if (shape == TourShape::open && !forest.empty()) {
    auto farthest = [&](NodeId src, std::vector<NodeId>& parent) {
      std::vector<int> dist(net.node_count(), -1);
      parent.assign(net.node_count(), -1);
      std::queue<NodeId> q;
      dist[src] = 0;
      q.push(src);
      NodeId far = src;
      while (!q.empty()) {
        const NodeId v = q.front();
        q.pop();
        if (dist[v] > dist[far]) far = v;
        for (const auto& [w, e] : f.adj[v]) {
          if (dist[w] == -1) {
            dist[w] = dist[v] + 1;
            parent[w] = v;
            q.push(w);
          }
        }
      }
      return far;
    };
    std::vector<NodeId> parent;
    start = farthest(start, parent);
    const NodeId end = farthest(start, parent);
    for (NodeId v = end; v != -1; v = parent[v]) on_final_leg[v] = 1;
  }

  // Iterative DFS; children on the final leg are visited last and never left.
  struct Frame {
    NodeId node;
    NodeId parent;
    std::vector<NodeId> order;
    std::size_t next = 0;
  };
  std::vector<NodeId> walk{start};
  auto enter = [&](NodeId v, NodeId parent) {
    for (NodeId w : detour_at[v]) {
      walk.push_back(w);
      walk.push_back(v);
    }
    Frame fr{v, parent, {}, 0};
    for (const auto& [w, e] : f.adj[v]) {
      if (w != parent && !on_final_leg[w]) fr.order.push_back(w);
    }
    for (const auto& [w, e] : f.adj[v]) {
      if (w != parent && on_final_leg[w]) fr.order.push_back(w);
    }
    return fr;
  };
  std::vector<Frame> stack;
  stack.push_back(enter(start, -1));
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next < top.order.size()) {
      const NodeId child = top.order[top.next++];
      walk.push_back(child);
      const NodeId here = top.node;
      stack.push_back(enter(child, here));
      continue;
    }
    const NodeId done = top.node;
    const NodeId parent = top.parent;
    stack.pop_back();
    if (parent != -1 && !(on_final_leg[done] && on_final_leg[parent])) walk.push_back(parent);
  }
  return ProbePath(std::move(walk));
}

SteinerLengthStats steiner_length_stats(const Network& net, std::size_t s, std::size_t trials,
                                        std::uint64_t seed) {
  if (s < 1 || s > static_cast<std::size_t>(net.node_count())) {
    throw ArgumentError("steiner_length_stats: s must be in [1, |V|]");
  }
  if (trials < 1) throw ArgumentError("steiner_length_stats: trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<NodeId> all(net.node_count());
  std::iota(all.begin(), all.end(), 0);
  SteinerLengthStats stats;
  double total = 0.0;
  std::vector<NodeId> pick;
  for (std::size_t t = 0; t < trials; ++t) {
    pick.clear();
    std::sample(all.begin(), all.end(), std::back_inserter(pick), s, rng);
    const std::size_t len = steiner_approx(net, pick).length();
    stats.worst = std::max(stats.worst, len);
    total += static_cast<double>(len);
  }
  stats.mean = total / static_cast<double>(trials);
  return stats;
}

}  // namespace frantic::steiner
