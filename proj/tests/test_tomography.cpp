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

#include <doctest.h>

#include <json.hpp>

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "frantic/errors.hpp"
#include "frantic/tomography.hpp"
#include "oracles.hpp"

using namespace frantic;
using namespace frantic::tomo;

namespace {

Network line(int n) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (int v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
  return Network(n, edges);
}

RowWeights link_weights(std::map<int, int> w) {
  RowWeights r;
  r.weights = std::move(w);
  return r;
}

RowWeights node_weights(std::map<int, int> w) {
  RowWeights r;
  r.target = Target::nodes;
  r.weights = std::move(w);
  return r;
}

std::vector<int> link_counts(const Network& net, const ProbePath& p) {
  const auto m = net::multiplicities(net, p);
  std::vector<int> out(net.link_count());
  for (LinkId e = 0; e < net.link_count(); ++e) out[e] = m.link_count(e);
  return out;
}

std::int64_t delay(const Network& net, const ProbePath& p, const std::vector<std::int64_t>& d, Target t) {
  return net::path_delay<std::int64_t>(net, p, d, t);
}

// Congested set where every node, congested or not, keeps a clean neighbour,
// so any loop can avoid congestion.
cs::DelayVector<std::int64_t> isolated_truth(const Network& net, int k, std::mt19937_64& rng) {
  while (true) {
    auto d = oracle::random_sparse<std::int64_t>(net.node_count(), k, rng);
    bool ok = true;
    for (NodeId v = 0; v < net.node_count() && ok; ++v) {
      bool clean = false;
      for (const auto& a : net.neighbors(v)) clean = clean || d[a.node] == 0;
      ok = clean;
    }
    if (ok) return d;
  }
}

}  // namespace

TEST_SUITE("spanning path") {
  TEST_CASE("single link") {
    const auto net = line(5);
    const std::vector<LinkId> support{2};
    const auto p = build_spanning_path(net, support);
    CHECK(p.length() == 1);
    CHECK(p.link_sequence(net) == std::vector<LinkId>{2});
  }

  TEST_CASE("four-link support on K4") {
    const auto net = oracle::k4_labelled();
    const std::vector<LinkId> support{0, 2, 4, 5};
    const auto p = build_spanning_path(net, support);
    CHECK(p.length() >= 4);
    const auto w = link_counts(net, p);
    for (LinkId e : support) CHECK(w[e] >= 1);
    // The hand-built closed walk e1 e6 e3 e5 is also a valid spanning walk.
    const auto w2 = link_counts(net, ProbePath({0, 1, 2, 3, 0}));
    for (LinkId e : support) CHECK(w2[e] >= 1);
  }

  TEST_CASE("empty support") {
    CHECK_THROWS_AS(build_spanning_path(line(3), {}), ArgumentError);
    CHECK_THROWS_AS(build_node_spanning_path(line(3), {}), ArgumentError);
  }

  TEST_CASE("property: covers the support within the connector bound") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = std::uniform_int_distribution<int>(2, 60)(rng);
      const auto net = oracle::random_network(n, std::uniform_int_distribution<int>(0, 2 * n)(rng), rng);
      const int D = net::diameter(net).value;
      const int s = std::uniform_int_distribution<int>(1, std::min<int>(net.link_count(), 12))(rng);
      std::vector<LinkId> all(net.link_count());
      for (LinkId e = 0; e < net.link_count(); ++e) all[e] = e;
      std::shuffle(all.begin(), all.end(), rng);
      const std::vector<LinkId> support(all.begin(), all.begin() + s);
      const auto p = build_spanning_path(net, support, std::uniform_int_distribution<int>(0, s - 1)(rng));
      CHECK_NOTHROW(p.validate(net));
      const auto w = link_counts(net, p);
      for (LinkId e : support) CHECK(w[e] >= 1);
      CHECK(static_cast<int>(p.length()) <= 2 * s * D + s);

      std::vector<NodeId> nodes(n);
      for (NodeId v = 0; v < n; ++v) nodes[v] = v;
      std::shuffle(nodes.begin(), nodes.end(), rng);
      nodes.resize(std::uniform_int_distribution<int>(1, std::min(n, 8))(rng));
      const auto q = build_node_spanning_path(net, nodes);
      const auto m = net::multiplicities(net, q);
      for (NodeId v : nodes) CHECK(m.node_count(v) >= 1);
    }
  }
}

TEST_SUITE("weighted path") {
  const auto net = oracle::k4_labelled();
  const ProbePath P({0, 1, 2, 3, 0});

  TEST_CASE("no weights leaves the walk unchanged") {
    const auto q = build_weighted_path(net, P, link_weights({}));
    CHECK(q.path == P);
    CHECK(q.loops.empty());
  }

  TEST_CASE("one loop on e1 and e3") {
    const auto q = build_weighted_path(net, P, link_weights({{0, 1}, {2, 1}}));
    CHECK(link_counts(net, q.path) == std::vector<int>{3, 0, 3, 0, 1, 1});
  }

  TEST_CASE("two loops on e1, one on e3") {
    const auto q = build_weighted_path(net, P, link_weights({{0, 2}, {2, 1}}));
    CHECK(link_counts(net, q.path) == std::vector<int>{5, 0, 3, 0, 1, 1});
    const std::vector<std::int64_t> d{3, 5, 7, 11, 13, 17};
    const auto y = subtract_measurements(delay(net, q.path, d, Target::links), delay(net, P, d, Target::links));
    CHECK(y == 2 * 3 + 7);
  }

  TEST_CASE("weight on a link the walk never crosses") {
    CHECK_THROWS_AS(build_weighted_path(net, P, link_weights({{1, 1}})), ArgumentError);
  }

  TEST_CASE("property: multiplicity identity") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = std::uniform_int_distribution<int>(2, 40)(rng);
      const auto g = oracle::random_network(n, n, rng);
      std::vector<LinkId> support;
      for (LinkId e = 0; e < g.link_count(); ++e) {
        if (rng() % 4 == 0) support.push_back(e);
      }
      if (support.empty()) support.push_back(0);
      const auto p = build_spanning_path(g, support);
      std::map<int, int> w;
      int total = 0;
      for (LinkId e : support) total += (w[e] = std::uniform_int_distribution<int>(1, 16)(rng));
      const auto q = build_weighted_path(g, p, link_weights(w));
      const auto wp = link_counts(g, p);
      const auto wq = link_counts(g, q.path);
      for (LinkId e = 0; e < g.link_count(); ++e) CHECK(wq[e] - wp[e] == 2 * (w.count(e) ? w[e] : 0));
      CHECK(q.path.length() == p.length() + 2 * total);
    }
  }
}

TEST_SUITE("subtraction") {
  TEST_CASE("equal delays") { CHECK(subtract_measurements<std::int64_t>(42, 42) == 0); }

  TEST_CASE("looped minus plain isolates e1 and e3") {
    const std::vector<std::int64_t> d{3, 5, 7, 11, 13, 17};
    const std::int64_t p = 3 + 7 + 13 + 17;
    const std::int64_t q = 3 * 3 + 3 * 7 + 13 + 17;
    CHECK(subtract_measurements(q, p) == 3 + 7);
  }

  TEST_CASE("property: equals the dot product") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = std::uniform_int_distribution<int>(3, 30)(rng);
      const auto g = oracle::random_network(n, n, rng);
      std::map<int, int> w;
      std::vector<LinkId> support;
      for (LinkId e = 0; e < g.link_count(); ++e) {
        if (rng() % 3 == 0) {
          w[e] = std::uniform_int_distribution<int>(1, 8)(rng);
          support.push_back(e);
        }
      }
      if (support.empty()) continue;
      std::vector<std::int64_t> d(g.link_count());
      std::int64_t dot = 0;
      for (LinkId e = 0; e < g.link_count(); ++e) {
        d[e] = std::uniform_int_distribution<std::int64_t>(-100, 100)(rng);
        if (w.count(e)) dot += w[e] * d[e];
      }
      const auto p = build_spanning_path(g, support);
      const auto q = build_weighted_path(g, p, link_weights(w));
      CHECK(subtract_measurements(delay(g, q.path, d, Target::links), delay(g, p, d, Target::links)) == dot);
    }
  }
}

TEST_SUITE("node loops") {
  TEST_CASE("no weights") {
    const auto net = line(4);
    const ProbePath p({0, 1, 2});
    CHECK(build_node_weighted_path(net, p, node_weights({}), first_neighbor(net)).path == p);
  }

  TEST_CASE("star centre looped through a clean leaf") {
    const Network star(4, {{0, 1}, {0, 2}, {0, 3}});
    const ProbePath p({1, 0, 2});
    const auto q = build_node_weighted_path(star, p, node_weights({{0, 1}}), first_neighbor(star));
    REQUIRE(q.loops.size() == 1);
    CHECK(q.loops[0].via == 1);
    CHECK(q.loops[0].count == 2);
    const std::vector<std::int64_t> d{9, 0, 4, 0};
    CHECK(subtract_measurements(delay(star, q.path, d, Target::nodes), delay(star, p, d, Target::nodes)) == 9);
  }

  TEST_CASE("congested loop neighbour leaks into the measurement") {
    // v1 - v2 - v3 - v4 - v5, all congested; the only neighbour of v1 is v2.
    const auto net = line(5);
    const ProbePath p({0, 1});
    const auto q = build_node_weighted_path(net, p, node_weights({{0, 3}}), first_neighbor(net));
    REQUIRE(q.loops.size() == 1);
    CHECK(q.loops[0].via == 1);
    const std::vector<std::int64_t> d{5, 7, 1, 1, 1};
    const auto y = subtract_measurements(delay(net, q.path, d, Target::nodes), delay(net, p, d, Target::nodes));
    CHECK(y == 3 * (5 + 7));
    CHECK(y != 3 * 5);

    MeasurementPlan plan;
    plan.target = Target::nodes;
    plan.R = 1;
    plan.mu = 1;
    plan.groups.push_back({0, {0}, p, {q}});
    const auto v = isolation_violations(plan, cs::DelayVector<std::int64_t>(d));
    REQUIRE(v.size() == 1);
    CHECK(v[0].node == 0);
    CHECK(v[0].via == 1);
  }

  TEST_CASE("oracle policy prefers a clean neighbour") {
    const Network net(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}});
    const auto choose = oracle_noncongested(net, {true, true, true, false});
    CHECK(choose(0) == 3);
    CHECK(choose(1) == 0);
    CHECK(first_neighbor(net)(0) == 1);
  }

  TEST_CASE("property: both loop ends gain 2w visits") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 150; ++trial) {
      const int n = std::uniform_int_distribution<int>(2, 30)(rng);
      const auto g = oracle::random_network(n, n, rng);
      std::vector<NodeId> support;
      std::map<int, int> w;
      for (NodeId v = 0; v < n; ++v) {
        if (rng() % 4 == 0) {
          support.push_back(v);
          w[v] = std::uniform_int_distribution<int>(1, 4)(rng);
        }
      }
      if (support.empty()) continue;
      const auto p = build_node_spanning_path(g, support);
      const auto q = build_node_weighted_path(g, p, node_weights(w), first_neighbor(g));
      const auto mp = net::multiplicities(g, p);
      const auto mq = net::multiplicities(g, q.path);
      std::vector<int> expected(n, 0);
      for (const auto& loop : q.loops) {
        expected[loop.element] += loop.count;
        expected[loop.via] += loop.count;
        CHECK(loop.count == 2 * w[loop.element]);
      }
      CHECK(q.loops.size() == support.size());
      for (NodeId v = 0; v < n; ++v) CHECK(mq.node_count(v) - mp.node_count(v) == expected[v]);
    }
  }
}

TEST_SUITE("plan") {
  TEST_CASE("property: simulated outputs equal encode in link mode") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 60; ++trial) {
      const int n = std::uniform_int_distribution<int>(5, 60)(rng);
      const auto g = oracle::random_network(n, std::uniform_int_distribution<int>(0, 3 * n)(rng), rng);
      const int k = std::uniform_int_distribution<int>(1, std::min<int>(5, g.link_count()))(rng);
      const int M = std::uniform_int_distribution<int>(2, 6)(rng);
      const auto A = build_network_matrix(g, Target::links, k, 1.0, M, 4.0, rng());
      const auto d = oracle::random_sparse<std::int64_t>(g.link_count(), k, rng, -20, 80);
      for (auto builder : {PathBuilder::naive, PathBuilder::steiner}) {
        const auto plan = build_plan(g, A, {Target::links, builder, rng()});
        CHECK(plan.probe_count() == static_cast<std::size_t>((1 + A.R()) * A.mu()));
        CHECK_FALSE(check_multiplicities(g, A, plan));
        CHECK(simulate(g, plan, d) == cs::encode(A, d));
      }
    }
  }

  TEST_CASE("property: node mode equals encode when loops avoid congestion") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 40; ++trial) {
      const int n = std::uniform_int_distribution<int>(8, 50)(rng);
      const auto g = oracle::random_network(n, 2 * n, rng);
      const int k = std::uniform_int_distribution<int>(1, 3)(rng);
      const auto A = build_network_matrix(g, Target::nodes, k, 1.0, 4, 4.0, rng());
      const auto d = isolated_truth(g, k, rng);
      std::vector<bool> congested(n);
      for (NodeId v = 0; v < n; ++v) congested[v] = d[v] != 0;
      for (auto builder : {PathBuilder::naive, PathBuilder::steiner}) {
        const auto plan = build_plan(g, A, {Target::nodes, builder, 1}, oracle_noncongested(g, congested));
        CHECK_FALSE(check_multiplicities(g, A, plan));
        CHECK(isolation_violations(plan, d).empty());
        CHECK(simulate(g, plan, d) == cs::encode(A, d));
      }
    }
  }

  TEST_CASE("column count must match the network") {
    const auto net = line(5);
    const auto A = cs::build_matrix({.n = 5, .k = 1, .seed = 1});
    CHECK_THROWS_AS(build_plan(net, A, {Target::links}), ArgumentError);
    CHECK_THROWS_AS(build_plan(net, A, {Target::nodes}), ArgumentError);
  }

  TEST_CASE("JSON lines export") {
    const auto net = oracle::k4_labelled();
    const auto A = build_network_matrix(net, Target::links, 1, 1.0, 2, 4.0, 3);
    const auto plan = build_plan(net, A, {Target::links});
    std::ostringstream out;
    write_plan_jsonl(out, net, plan);
    std::istringstream in(out.str());
    std::string line_text;
    std::size_t records = 0;
    std::size_t spanning = 0;
    while (std::getline(in, line_text)) {
      const auto j = nlohmann::json::parse(line_text);
      ++records;
      if (j.at("kind") == "spanning") {
        ++spanning;
        CHECK(j.at("subrow").is_null());
      } else {
        CHECK(j.at("kind") == "weighted");
        CHECK(j.at("subrow").get<int>() < A.R());
      }
      CHECK(j.at("walk").size() >= 1);
    }
    CHECK(records == plan.probe_count());
    CHECK(spanning == static_cast<std::size_t>(A.mu()));
  }
}

TEST_SUITE("recover") {
  TEST_CASE("zero truth") {
    const auto net = line(10);
    const auto A = build_network_matrix(net, Target::links, 2, 1.0, 4, 4.0, 5);
    const auto r = recover(net, A, cs::DelayVector<std::int64_t>(9), {});
    CHECK(r.decode.status == cs::DecodeStatus::success);
    CHECK(r.decode.estimate.nonzeros() == 0);
  }

  TEST_CASE("one congested link on a 20-link graph") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 20; ++trial) {
      auto g = oracle::random_network(12, 9, rng);
      REQUIRE(g.link_count() == 20);
      const auto A = build_network_matrix(g, Target::links, 1, 1.0, 4, 4.0, rng());
      const auto d = oracle::random_sparse<std::int64_t>(20, 1, rng);
      for (auto builder : {PathBuilder::naive, PathBuilder::steiner}) {
        const auto r = recover(g, A, d, {.builder = builder});
        CHECK(r.decode.status == cs::DecodeStatus::success);
        CHECK(r.decode.estimate == d);
        CHECK(r.metrics.probes <= static_cast<std::size_t>(2 * A.R() * A.mu()));
      }
    }
  }

  TEST_CASE("steiner paths decode exactly like naive ones") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 20; ++trial) {
      auto g = oracle::random_network(40, 60, rng);
      const auto A = build_network_matrix(g, Target::links, 4, 1.0, 4, 4.0, rng());
      const auto d = oracle::random_sparse<std::int64_t>(g.link_count(), 4, rng);
      const auto naive = recover(g, A, d, {.builder = PathBuilder::naive});
      const auto st = recover(g, A, d, {.builder = PathBuilder::steiner});
      CHECK(naive.decode.status == st.decode.status);
      CHECK(naive.decode.estimate == st.decode.estimate);
      CHECK(naive.decode.iterations == st.decode.iterations);
    }
  }

  TEST_CASE("sparsity inflation") {
    const auto net = line(101);
    const auto a1 = build_network_matrix(net, Target::links, 5, 1.0, 4, 4.0, 1);
    const auto a2 = build_network_matrix(net, Target::links, 5, 2.0, 4, 4.0, 1);
    CHECK(a1.mu() == 20);
    CHECK(a2.mu() == 40);
    CHECK_THROWS_AS(build_network_matrix(net, Target::links, 5, 0.5, 4, 4.0, 1), ArgumentError);
  }
}

TEST_CASE("option names") {
  CHECK(parse_loop_policy("first-neighbor") == LoopNeighborPolicy::first_neighbor);
  CHECK(parse_loop_policy("arbitrary-first-neighbor") == LoopNeighborPolicy::first_neighbor);
  CHECK(parse_loop_policy("oracle-noncongested") == LoopNeighborPolicy::oracle_noncongested);
  CHECK(parse_path_builder("steiner") == PathBuilder::steiner);
  CHECK(to_string(PathBuilder::naive) == "naive");
  CHECK_THROWS_AS(parse_path_builder("greedy"), ArgumentError);
  CHECK_THROWS_AS(parse_loop_policy("random"), ArgumentError);
}
