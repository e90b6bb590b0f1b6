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

#include "frantic/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <queue>
#include <string>

#include <json.hpp>

#include "frantic/errors.hpp"
#include "frantic/seed.hpp"
#include "frantic/steiner.hpp"

namespace frantic::tomo {

std::vector<int> RowWeights::support() const {
  std::vector<int> s;
  s.reserve(weights.size());
  for (const auto& [element, w] : weights) {
    if (w != 0) s.push_back(element);
  }
  return s;
}

std::vector<int> group_support(const cs::MeasurementMatrix& A, int group) {
  std::vector<int> s;
  for (const auto& inc : A.graph().left_neighbors(group)) s.push_back(inc.left);
  return s;
}

RowWeights row_weights(const cs::MeasurementMatrix& A, int group, int subrow, Target target) {
  if (group < 0 || group >= A.mu()) throw ArgumentError("row_weights: group out of range");
  if (subrow < 0 || subrow >= A.R()) throw ArgumentError("row_weights: subrow out of range");
  RowWeights rw{group, subrow, target, {}};
  for (const auto& inc : A.graph().left_neighbors(group)) {
    rw.weights[inc.left] = A.weight(inc.left, inc.slot)[subrow];
  }
  return rw;
}

namespace {

struct BfsFrom {
  std::vector<int> dist;
  std::vector<NodeId> parent;
};

BfsFrom bfs_from(const Network& net, NodeId source) {
  BfsFrom b{std::vector<int>(net.node_count(), -1), std::vector<NodeId>(net.node_count(), -1)};
  std::queue<NodeId> q;
  b.dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const NodeId v = q.front();
    q.pop();
    for (const auto& a : net.neighbors(v)) {
      if (b.dist[a.node] == -1) {
        b.dist[a.node] = b.dist[v] + 1;
        b.parent[a.node] = v;
        q.push(a.node);
      }
    }
  }
  return b;
}

// BFS trees keyed by source, shared by the walks of one plan. Stops caching
// once about 8M node entries are held.
class BfsCache {
 public:
  explicit BfsCache(const Network& net) : net_(net), trees_(net.node_count()) {}

  const BfsFrom& from(NodeId source) {
    auto& slot = trees_[source];
    if (slot) return *slot;
    if (held_ + trees_.size() > kBudget) {
      scratch_ = bfs_from(net_, source);
      return scratch_;
    }
    held_ += trees_.size();
    slot = bfs_from(net_, source);
    return *slot;
  }

 private:
  static constexpr std::size_t kBudget = std::size_t{1} << 23;
  const Network& net_;
  std::vector<std::optional<BfsFrom>> trees_;
  std::size_t held_ = 0;
  BfsFrom scratch_;
};

// Appends the BFS-tree path from the search source to `target`.
void append_path_to(std::vector<NodeId>& walk, const BfsFrom& b, NodeId target) {
  std::vector<NodeId> back;
  for (NodeId v = target; b.parent[v] != -1; v = b.parent[v]) back.push_back(v);
  walk.insert(walk.end(), back.rbegin(), back.rend());
}


ProbePath spanning_path(const Network& net, std::span<const LinkId> support, std::size_t start_index,
                        BfsCache& cache) {
  if (support.empty()) throw ArgumentError("build_spanning_path: support must be non-empty");
  if (start_index >= support.size()) throw ArgumentError("build_spanning_path: start_index out of range");
  std::vector<char> pending(net.link_count(), 0);
  std::size_t remaining = 0;
  for (LinkId e : support) {
    if (e < 0 || e >= net.link_count()) throw ArgumentError("build_spanning_path: link out of range");
    if (!pending[e]) ++remaining;
    pending[e] = 1;
  }
  const auto& first = net.link(support[start_index]);
  std::vector<NodeId> walk{first.u, first.v};
  pending[support[start_index]] = 0;
  --remaining;

  while (remaining > 0) {
    const BfsFrom& b = cache.from(walk.back());
    LinkId best = -1;
    int best_dist = 0;
    for (LinkId e : support) {
      if (!pending[e]) continue;
      const int d = std::min(b.dist[net.link(e).u], b.dist[net.link(e).v]);
      if (best == -1 || d < best_dist) {
        best = e;
        best_dist = d;
      }
    }
    const auto& l = net.link(best);
    const NodeId near = b.dist[l.u] <= b.dist[l.v] ? l.u : l.v;
    const std::size_t from = walk.size() - 1;
    append_path_to(walk, b, near);
    walk.push_back(l.other(near));
    // Connector walks may cross further support links on the way.
    for (std::size_t t = from; t + 1 < walk.size(); ++t) {
      const LinkId e = *net.find_link(walk[t], walk[t + 1]);
      if (pending[e]) {
        pending[e] = 0;
        --remaining;
      }
    }
  }
  return ProbePath(std::move(walk));
}

ProbePath node_spanning_path(const Network& net, std::span<const NodeId> support, std::size_t start_index,
                             BfsCache& cache) {
  if (support.empty()) throw ArgumentError("build_node_spanning_path: support must be non-empty");
  if (start_index >= support.size()) throw ArgumentError("build_node_spanning_path: start_index out of range");
  std::vector<char> pending(net.node_count(), 0);
  std::size_t remaining = 0;
  for (NodeId v : support) {
    if (v < 0 || v >= net.node_count()) throw ArgumentError("build_node_spanning_path: node out of range");
    if (!pending[v]) ++remaining;
    pending[v] = 1;
  }
  std::vector<NodeId> walk{support[start_index]};
  pending[walk.back()] = 0;
  --remaining;
  while (remaining > 0) {
    const BfsFrom& b = cache.from(walk.back());
    NodeId best = -1;
    for (NodeId v : support) {
      if (pending[v] && (best == -1 || b.dist[v] < b.dist[best])) best = v;
    }
    const std::size_t from = walk.size();
    append_path_to(walk, b, best);
    for (std::size_t t = from; t < walk.size(); ++t) {
      if (pending[walk[t]]) {
        pending[walk[t]] = 0;
        --remaining;
      }
    }
  }
  return ProbePath(std::move(walk));
}

}  // namespace

ProbePath build_spanning_path(const Network& net, std::span<const LinkId> support,
                              std::size_t start_index) {
  BfsCache cache(net);
  return spanning_path(net, support, start_index, cache);
}

ProbePath build_node_spanning_path(const Network& net, std::span<const NodeId> support,
                                   std::size_t start_index) {
  BfsCache cache(net);
  return node_spanning_path(net, support, start_index, cache);
}

WeightedPath build_weighted_path(const Network& net, const ProbePath& spanning,
                                 const RowWeights& weights) {
  const auto& walk = spanning.walk();
  std::vector<char> looped(net.link_count(), 0);
  WeightedPath out{ProbePath(walk.front()), {}};
  std::vector<NodeId> q{walk.front()};
  for (std::size_t t = 0; t + 1 < walk.size(); ++t) {
    const NodeId a = walk[t];
    const NodeId b = walk[t + 1];
    const auto e = net.find_link(a, b);
    if (!e) throw ArgumentError("build_weighted_path: spanning walk is not a path in the network");
    q.push_back(b);
    auto it = weights.weights.find(*e);
    if (it == weights.weights.end() || it->second <= 0 || looped[*e]) continue;
    looped[*e] = 1;
    out.loops.push_back({Target::links, *e, it->second, q.size() - 1, -1});
    for (int rep = 0; rep < it->second; ++rep) {
      q.push_back(a);
      q.push_back(b);
    }
  }
  for (const auto& [element, w] : weights.weights) {
    if (w > 0 && (element < 0 || element >= net.link_count() || !looped[element])) {
      throw ArgumentError("build_weighted_path: weighted link " + std::to_string(element) +
                          " is not on the spanning walk");
    }
  }
  out.path = ProbePath(std::move(q));
  return out;
}

std::string_view to_string(LoopNeighborPolicy policy) {
  return policy == LoopNeighborPolicy::first_neighbor ? "first-neighbor" : "oracle-noncongested";
}

LoopNeighborPolicy parse_loop_policy(std::string_view text) {
  if (text == "first-neighbor" || text == "arbitrary-first-neighbor") return LoopNeighborPolicy::first_neighbor;
  if (text == "oracle-noncongested" || text == "oracle") return LoopNeighborPolicy::oracle_noncongested;
  throw ArgumentError("loop-policy: expected 'first-neighbor' or 'oracle-noncongested', got '" +
                      std::string(text) + "'");
}

NeighborChooser first_neighbor(const Network& net) {
  return [&net](NodeId v) -> NodeId {
    if (net.degree(v) == 0) throw ArgumentError("loop neighbour: node " + std::to_string(v) + " is isolated");
    return net.neighbors(v).front().node;
  };
}

NeighborChooser oracle_noncongested(const Network& net, std::vector<bool> congested) {
  return [&net, congested = std::move(congested)](NodeId v) -> NodeId {
    if (net.degree(v) == 0) throw ArgumentError("loop neighbour: node " + std::to_string(v) + " is isolated");
    for (const auto& a : net.neighbors(v)) {
      if (!congested[a.node]) return a.node;
    }
    return net.neighbors(v).front().node;
  };
}

WeightedPath build_node_weighted_path(const Network& net, const ProbePath& spanning,
                                      const RowWeights& weights, const NeighborChooser& choose) {
  spanning.validate(net);
  std::vector<char> looped(net.node_count(), 0);
  WeightedPath out{ProbePath(spanning.front()), {}};
  std::vector<NodeId> q;
  for (NodeId v : spanning.walk()) {
    q.push_back(v);
    auto it = weights.weights.find(v);
    if (it == weights.weights.end() || it->second <= 0 || looped[v]) continue;
    looped[v] = 1;
    const NodeId u = choose(v);
    if (!net.find_link(v, u)) throw ArgumentError("build_node_weighted_path: loop neighbour is not adjacent");
    const int loops = 2 * it->second;
    out.loops.push_back({Target::nodes, v, loops, q.size() - 1, u});
    for (int rep = 0; rep < loops; ++rep) {
      q.push_back(u);
      q.push_back(v);
    }
  }
  for (const auto& [element, w] : weights.weights) {
    if (w > 0 && (element < 0 || element >= net.node_count() || !looped[element])) {
      throw ArgumentError("build_node_weighted_path: weighted node " + std::to_string(element) +
                          " is not on the spanning walk");
    }
  }
  out.path = ProbePath(std::move(q));
  return out;
}

std::string_view to_string(PathBuilder builder) {
  return builder == PathBuilder::naive ? "naive" : "steiner";
}

PathBuilder parse_path_builder(std::string_view text) {
  if (text == "naive") return PathBuilder::naive;
  if (text == "steiner") return PathBuilder::steiner;
  throw ArgumentError("builder: expected 'naive' or 'steiner', got '" + std::string(text) + "'");
}

std::size_t MeasurementPlan::probe_count() const {
  return static_cast<std::size_t>(1 + R) * static_cast<std::size_t>(mu);
}

namespace {

ProbePath spanning_for(const Network& net, const std::vector<int>& support, const PlanOptions& options,
                       int group, BfsCache& cache) {
  const std::size_t start = derive_seed(options.seed, static_cast<std::uint64_t>(group)) % support.size();
  ProbePath nearest = options.target == Target::links ? spanning_path(net, support, start, cache)
                                                      : node_spanning_path(net, support, start, cache);
  if (options.builder == PathBuilder::naive) return nearest;
  ProbePath tour(0);
  if (options.target == Target::nodes) {
    const auto tree = steiner::steiner_approx(net, support);
    tour = steiner::tree_tour(net, tree, {}, steiner::TourShape::open);
  } else {
    std::vector<NodeId> terminals;
    for (LinkId e : support) {
      terminals.push_back(net.link(e).u);
      terminals.push_back(net.link(e).v);
    }
    const auto tree = steiner::steiner_approx(net, terminals);
    tour = steiner::tree_tour(net, tree, support, steiner::TourShape::open);
  }
  // Shorter of the tree tour and the nearest-neighbour walk.
  return tour.length() <= nearest.length() ? tour : nearest;
}

}  // namespace

MeasurementPlan build_plan(const Network& net, const cs::MeasurementMatrix& A,
                           const PlanOptions& options, const NeighborChooser& choose) {
  const int expected = options.target == Target::links ? net.link_count() : net.node_count();
  if (A.n() != expected) {
    throw ArgumentError("build_plan: matrix has " + std::to_string(A.n()) + " columns but the network has " +
                        std::to_string(expected) + " " + std::string(net::to_string(options.target)));
  }
  if (options.target == Target::nodes && !choose) {
    throw ArgumentError("build_plan: node mode needs a loop neighbour chooser");
  }
  MeasurementPlan plan;
  plan.target = options.target;
  plan.R = A.R();
  plan.mu = A.mu();
  plan.groups.reserve(A.mu());
  BfsCache cache(net);
  for (int i = 0; i < A.mu(); ++i) {
    GroupProbes g;
    g.group = i;
    g.support = group_support(A, i);
    if (g.support.empty()) {
      g.spanning = ProbePath(0);
      g.weighted.assign(A.R(), WeightedPath{g.spanning, {}});
      plan.groups.push_back(std::move(g));
      continue;
    }
    g.spanning = spanning_for(net, g.support, options, i, cache);
    g.weighted.reserve(A.R());
    for (int r = 0; r < A.R(); ++r) {
      const auto rw = row_weights(A, i, r, options.target);
      g.weighted.push_back(options.target == Target::links
                               ? build_weighted_path(net, g.spanning, rw)
                               : build_node_weighted_path(net, g.spanning, rw, choose));
    }
    plan.groups.push_back(std::move(g));
  }
  return plan;
}

std::optional<int> check_multiplicities(const Network& net, const cs::MeasurementMatrix& A,
                                        const MeasurementPlan& plan) {
  for (const auto& g : plan.groups) {
    const auto mp = net::multiplicities(net, g.spanning);
    for (int r = 0; r < plan.R; ++r) {
      const auto& wp = g.weighted[r];
      const auto mq = net::multiplicities(net, wp.path);
      const auto rw = row_weights(A, g.group, r, plan.target);
      std::map<int, int> expected;
      if (plan.target == Target::links) {
        for (const auto& [e, w] : rw.weights) expected[e] += 2 * w;
      } else {
        for (const auto& loop : wp.loops) {
          const int w = rw.weights.count(loop.element) ? rw.weights.at(loop.element) : 0;
          expected[loop.element] += 2 * w;
          expected[loop.via] += 2 * w;
        }
        for (const auto& [v, w] : rw.weights) {
          if (w > 0 && !expected.count(v)) return g.group;
        }
      }
      const auto& q_counts = plan.target == Target::links ? mq.links : mq.nodes;
      const auto& p_counts = plan.target == Target::links ? mp.links : mp.nodes;
      std::map<int, int> diff;
      for (const auto& [x, c] : q_counts) diff[x] += c;
      for (const auto& [x, c] : p_counts) diff[x] -= c;
      std::erase_if(diff, [](const auto& kv) { return kv.second == 0; });
      std::erase_if(expected, [](const auto& kv) { return kv.second == 0; });
      if (diff != expected) return g.group;
    }
  }
  return std::nullopt;
}

template <class T>
cs::GroupedOutput<T> simulate(const Network& net, const MeasurementPlan& plan,
                              const cs::DelayVector<T>& truth) {
  cs::GroupedOutput<T> y{plan.R, plan.mu,
                         std::vector<T>(static_cast<std::size_t>(plan.R) * plan.mu, T{})};
  for (const auto& g : plan.groups) {
    const T delta_p = net::path_delay<T>(net, g.spanning, truth.values(), plan.target);
    auto yi = y.group(g.group);
    for (int r = 0; r < plan.R; ++r) {
      const T delta_q = net::path_delay<T>(net, g.weighted[r].path, truth.values(), plan.target);
      yi[r] = subtract_measurements(delta_q, delta_p);
    }
  }
  return y;
}

template <class T>
std::vector<IsolationViolation> isolation_violations(const MeasurementPlan& plan,
                                                     const cs::DelayVector<T>& truth) {
  std::vector<IsolationViolation> out;
  if (plan.target != Target::nodes) return out;
  for (const auto& g : plan.groups) {
    for (int r = 0; r < plan.R; ++r) {
      for (const auto& loop : g.weighted[r].loops) {
        if (truth[loop.via] != T{}) out.push_back({g.group, r, loop.element, loop.via});
      }
    }
  }
  return out;
}

PlanMetrics plan_metrics(const MeasurementPlan& plan) {
  PlanMetrics m;
  m.probes = plan.probe_count();
  if (plan.groups.empty()) return m;
  double links = 0.0, hops = 0.0, support = 0.0;
  for (const auto& g : plan.groups) {
    const std::size_t len = g.spanning.length();
    m.max_path_links = std::max(m.max_path_links, len);
    m.max_path_hops = std::max(m.max_path_hops, len);
    links += static_cast<double>(len);
    hops += static_cast<double>(len);
    support += static_cast<double>(g.support.size());
    for (const auto& w : g.weighted) {
      m.max_path_hops = std::max(m.max_path_hops, w.path.length());
      hops += static_cast<double>(w.path.length());
    }
  }
  const double groups = static_cast<double>(plan.groups.size());
  m.mean_path_links = links / groups;
  m.mean_path_hops = hops / static_cast<double>(m.probes);
  m.mean_support = support / groups;
  return m;
}

cs::MeasurementMatrix build_network_matrix(const Network& net, Target target, int k, double rho,
                                           int M, double mu_factor, std::uint64_t seed) {
  if (!(rho >= 1.0)) throw ArgumentError("rho must be >= 1");
  if (k < 0) throw ArgumentError("k must be >= 0");
  const int n = target == Target::links ? net.link_count() : net.node_count();
  const int budget = std::clamp(static_cast<int>(std::ceil(rho * std::max(k, 1))), 1, n);
  return cs::build_matrix({n, budget, M, mu_factor, seed});
}

template <class T>
Recovery<T> recover(const Network& net, const cs::MeasurementMatrix& A,
                    const cs::DelayVector<T>& truth, const RecoverOptions& options) {
  const std::size_t n = options.target == Target::links ? net.link_count() : net.node_count();
  if (truth.size() != n) throw ArgumentError("recover: truth length does not match the network");
  NeighborChooser choose;
  if (options.target == Target::nodes) {
    if (options.policy == LoopNeighborPolicy::oracle_noncongested) {
      std::vector<bool> congested(n);
      for (std::size_t v = 0; v < n; ++v) congested[v] = truth[v] != T{};
      choose = oracle_noncongested(net, std::move(congested));
    } else {
      choose = first_neighbor(net);
    }
  }
  Recovery<T> out;
  out.plan = build_plan(net, A, {options.target, options.builder, options.seed}, choose);
  const auto y = simulate(net, out.plan, truth);
  out.decode = cs::decode(A, y, {options.tolerance});
  out.violations = isolation_violations(out.plan, truth);
  out.metrics = plan_metrics(out.plan);
  out.metrics.isolation_violations = out.violations.size();
  return out;
}

void write_plan_jsonl(std::ostream& out, const Network& net, const MeasurementPlan& plan) {
  using nlohmann::json;
  auto walk_json = [&](const ProbePath& p) {
    json w = json::array();
    for (NodeId v : p.walk()) w.push_back(net.labels()[v]);
    return w;
  };
  for (const auto& g : plan.groups) {
    out << json{{"row", g.group}, {"subrow", nullptr}, {"kind", "spanning"},
                {"walk", walk_json(g.spanning)}, {"loops", json::array()}}
               .dump()
        << '\n';
    for (int r = 0; r < plan.R; ++r) {
      json loops = json::array();
      for (const auto& loop : g.weighted[r].loops) {
        if (loop.kind == Target::links) {
          loops.push_back({{"at_link", loop.element}, {"count", loop.count}});
        } else {
          loops.push_back({{"at_node", net.labels()[loop.element]},
                           {"via", net.labels()[loop.via]},
                           {"count", loop.count}});
        }
      }
      out << json{{"row", g.group}, {"subrow", r}, {"kind", "weighted"},
                  {"walk", walk_json(g.weighted[r].path)}, {"loops", std::move(loops)}}
                 .dump()
          << '\n';
    }
  }
}

template cs::GroupedOutput<std::int64_t> simulate(const Network&, const MeasurementPlan&,
                                                  const cs::DelayVector<std::int64_t>&);
template cs::GroupedOutput<double> simulate(const Network&, const MeasurementPlan&,
                                            const cs::DelayVector<double>&);
template std::vector<IsolationViolation> isolation_violations(const MeasurementPlan&,
                                                              const cs::DelayVector<std::int64_t>&);
template std::vector<IsolationViolation> isolation_violations(const MeasurementPlan&,
                                                              const cs::DelayVector<double>&);
template Recovery<std::int64_t> recover(const Network&, const cs::MeasurementMatrix&,
                                        const cs::DelayVector<std::int64_t>&, const RecoverOptions&);
template Recovery<double> recover(const Network&, const cs::MeasurementMatrix&,
                                  const cs::DelayVector<double>&, const RecoverOptions&);

}  // namespace frantic::tomo
