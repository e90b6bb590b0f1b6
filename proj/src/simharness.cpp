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

#include "frantic/simharness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "frantic/errors.hpp"
#include "frantic/seed.hpp"

namespace frantic::sim {

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

int parse_int(const std::string& s, std::string_view what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ArgumentError("topology: bad " + std::string(what) + " '" + s + "'");
  }
}

double parse_double(const std::string& s, std::string_view what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ArgumentError("topology: bad " + std::string(what) + " '" + s + "'");
  }
}

std::string format_double(double x) {
  std::ostringstream out;
  out << std::setprecision(10) << x;
  return out.str();
}

bool connected(NodeId nodes, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  std::vector<NodeId> parent(nodes);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](NodeId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  NodeId components = nodes;
  for (const auto& [a, b] : edges) {
    const NodeId ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components == 1;
}

void add_clique(std::vector<std::pair<NodeId, NodeId>>& edges, NodeId first, NodeId count) {
  for (NodeId a = first; a < first + count; ++a) {
    for (NodeId b = a + 1; b < first + count; ++b) edges.emplace_back(a, b);
  }
}

}  // namespace

TopologySpec TopologySpec::parse(std::string_view text) {
  const auto parts = split(text, ':');
  const std::string& kind = parts[0];
  auto need = [&](std::size_t n) {
    if (parts.size() != n) throw ArgumentError("topology: '" + std::string(text) + "' has the wrong number of fields");
  };
  TopologySpec spec;
  if (kind == "file") {
    if (parts.size() < 2) throw ArgumentError("topology: file needs a path");
    spec.kind = Kind::edge_list;
    spec.path = std::string(text.substr(5));
    return spec;
  }
  if (kind == "complete" || kind == "line") {
    need(2);
    spec.kind = kind == "complete" ? Kind::complete : Kind::line;
    spec.size = parse_int(parts[1], "node count");
  } else if (kind == "er" || kind == "erdos_renyi") {
    need(3);
    spec.kind = Kind::erdos_renyi;
    spec.size = parse_int(parts[1], "node count");
    spec.p = parse_double(parts[2], "edge probability");
    if (!(spec.p > 0.0 && spec.p <= 1.0)) throw ArgumentError("topology: edge probability must be in (0, 1]");
  } else if (kind == "gnm") {
    need(3);
    spec.kind = Kind::gnm;
    spec.size = parse_int(parts[1], "node count");
    spec.links = parse_int(parts[2], "link count");
    const long long max_links = static_cast<long long>(spec.size) * (spec.size - 1) / 2;
    if (spec.links < spec.size - 1 || spec.links > max_links) {
      throw ArgumentError("topology: gnm link count must be in [V-1, V(V-1)/2]");
    }
  } else if (kind == "clique_line" || kind == "clique_plus_line") {
    need(2);
    spec.kind = Kind::clique_plus_line;
    spec.size = parse_int(parts[1], "target link count");
  } else if (kind == "two_cliques" || kind == "two_cliques_line") {
    need(2);
    spec.kind = Kind::two_cliques_line;
    spec.size = parse_int(parts[1], "target link count");
  } else {
    throw ArgumentError("topology: unknown kind '" + kind + "'");
  }
  const int minimum = spec.kind == Kind::clique_plus_line || spec.kind == Kind::two_cliques_line ? 10 : 2;
  if (spec.size < minimum) {
    throw ArgumentError("topology: size must be >= " + std::to_string(minimum));
  }
  return spec;
}

std::string TopologySpec::str() const {
  switch (kind) {
    case Kind::complete:
      return "complete:" + std::to_string(size);
    case Kind::line:
      return "line:" + std::to_string(size);
    case Kind::erdos_renyi:
      return "er:" + std::to_string(size) + ":" + format_double(p);
    case Kind::gnm:
      return "gnm:" + std::to_string(size) + ":" + std::to_string(links);
    case Kind::clique_plus_line:
      return "clique_line:" + std::to_string(size);
    case Kind::two_cliques_line:
      return "two_cliques:" + std::to_string(size);
    case Kind::edge_list:
      return "file:" + path;
  }
  return "";
}

Partition read_partition(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("partition: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ArgumentError("partition: expected an object of part-id -> link ids");
  Partition p;
  for (const auto& [id, links] : j.items()) {
    if (!links.is_array()) throw ArgumentError("partition: part '" + id + "' is not a list");
    p[id] = links.get<std::vector<LinkId>>();
  }
  return p;
}

nlohmann::json partition_to_json(const Partition& partition) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [id, links] : partition) j[id] = links;
  return j;
}

int clique_line_clique_size(int n) {
  const double tail = std::pow(static_cast<double>(n), 0.4);
  return static_cast<int>(std::lround((1.0 + std::sqrt(1.0 + 8.0 * (n - tail))) / 2.0));
}

int clique_line_tail(int n) {
  return std::max(1, static_cast<int>(std::lround(std::pow(static_cast<double>(n), 0.4))));
}

Topology generate_topology(const TopologySpec& spec, std::uint64_t seed) {
  using Kind = TopologySpec::Kind;
  std::vector<std::pair<NodeId, NodeId>> edges;
  switch (spec.kind) {
    case Kind::complete:
      add_clique(edges, 0, spec.size);
      return {Network(spec.size, edges), {}};
    case Kind::line:
      for (NodeId v = 0; v + 1 < spec.size; ++v) edges.emplace_back(v, v + 1);
      return {Network(spec.size, edges), {}};
    case Kind::erdos_renyi:
    case Kind::gnm: {
      std::mt19937_64 rng(seed);
      for (int attempt = 0; attempt < 100; ++attempt) {
        edges.clear();
        if (spec.kind == Kind::erdos_renyi) {
          std::bernoulli_distribution coin(spec.p);
          for (NodeId a = 0; a < spec.size; ++a) {
            for (NodeId b = a + 1; b < spec.size; ++b) {
              if (coin(rng)) edges.emplace_back(a, b);
            }
          }
        } else {
          std::uniform_int_distribution<NodeId> pick(0, spec.size - 1);
          std::set<std::pair<NodeId, NodeId>> chosen;
          while (chosen.size() < static_cast<std::size_t>(spec.links)) {
            NodeId a = pick(rng), b = pick(rng);
            if (a == b) continue;
            if (chosen.emplace(std::min(a, b), std::max(a, b)).second) edges.emplace_back(std::min(a, b), std::max(a, b));
          }
        }
        if (connected(spec.size, edges)) return {Network(spec.size, edges), {}};
      }
      throw GenerationError("topology " + spec.str() + ": no connected sample in 100 attempts");
    }
    case Kind::clique_plus_line: {
      const int c = clique_line_clique_size(spec.size);
      const int tail = clique_line_tail(spec.size);
      add_clique(edges, 0, c);
      // Tail hangs off clique node 0.
      NodeId prev = 0;
      for (int t = 0; t < tail; ++t) {
        edges.emplace_back(prev, c + t);
        prev = c + t;
      }
      return {Network(c + tail, edges), {}};
    }
    case Kind::two_cliques_line: {
      const int line_nodes = std::max(2, static_cast<int>(std::lround(std::pow(spec.size, 0.6))));
      const int clique_links = std::max(3, (spec.size - (line_nodes + 1)) / 2);
      const int c = std::max(3, static_cast<int>(std::lround((1.0 + std::sqrt(1.0 + 8.0 * clique_links)) / 2.0)));
      // Nodes: clique A [0, c), line [c, c + L), clique B [c + L, 2c + L).
      Partition partition;
      auto& part_a = partition["a"];
      auto& part_b = partition["b"];
      add_clique(edges, 0, c);
      for (std::size_t e = 0; e < edges.size(); ++e) part_a.push_back(static_cast<LinkId>(e));
      NodeId prev = 0;
      for (int t = 0; t <= line_nodes; ++t) {
        const NodeId next = t < line_nodes ? c + t : c + line_nodes;
        (t < (line_nodes + 1) / 2 ? part_a : part_b).push_back(static_cast<LinkId>(edges.size()));
        edges.emplace_back(prev, next);
        prev = next;
      }
      const std::size_t before = edges.size();
      add_clique(edges, c + line_nodes, c);
      for (std::size_t e = before; e < edges.size(); ++e) part_b.push_back(static_cast<LinkId>(e));
      return {Network(2 * c + line_nodes, edges), std::move(partition)};
    }
    case Kind::edge_list: {
      std::ifstream in(spec.path);
      if (!in) throw ArgumentError("topology: cannot open edge list '" + spec.path + "'");
      return {Network::from_edge_list(in), {}};
    }
  }
  throw ArgumentError("topology: unsupported kind");
}

std::string_view to_string(Arithmetic arithmetic) {
  return arithmetic == Arithmetic::exact ? "exact" : "float";
}

Arithmetic parse_arithmetic(std::string_view text) {
  if (text == "exact") return Arithmetic::exact;
  if (text == "float") return Arithmetic::floating;
  throw ArgumentError("arithmetic: expected 'exact' or 'float', got '" + std::string(text) + "'");
}

template <class T>
cs::DelayVector<T> sample_truth(std::size_t n, std::size_t k, std::mt19937_64& rng,
                                const DelaySampler& sampler, const Network* isolation_net,
                                int retry_budget) {
  if (k > n) throw ArgumentError("sample_truth: k exceeds n");
  if (sampler.lo < 1 || sampler.hi < sampler.lo) throw ArgumentError("sample_truth: bad delay range");
  cs::DelayVector<T> d(n);
  if (k == 0) return d;
  if (isolation_net && static_cast<std::size_t>(isolation_net->node_count()) != n) {
    throw ArgumentError("sample_truth: isolation requires n = |V|");
  }
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::size_t> support;
  for (int attempt = 0;; ++attempt) {
    if (attempt >= retry_budget) {
      throw SamplingError("sample_truth: no isolated support of size " + std::to_string(k) + " in " +
                          std::to_string(retry_budget) + " attempts");
    }
    support.clear();
    std::sample(all.begin(), all.end(), std::back_inserter(support), k, rng);
    if (!isolation_net) break;
    std::vector<char> congested(n, 0);
    for (std::size_t v : support) congested[v] = 1;
    const bool isolated = std::all_of(support.begin(), support.end(), [&](std::size_t v) {
      const auto nb = isolation_net->neighbors(static_cast<NodeId>(v));
      return std::any_of(nb.begin(), nb.end(), [&](const net::Adjacent& a) { return !congested[a.node]; });
    });
    if (isolated) break;
  }
  for (std::size_t j : support) {
    if constexpr (std::is_integral_v<T>) {
      d[j] = std::uniform_int_distribution<T>(sampler.lo, sampler.hi)(rng);
    } else {
      d[j] = 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    }
  }
  return d;
}

template cs::DelayVector<std::int64_t> sample_truth(std::size_t, std::size_t, std::mt19937_64&,
                                                    const DelaySampler&, const Network*, int);
template cs::DelayVector<double> sample_truth(std::size_t, std::size_t, std::mt19937_64&,
                                              const DelaySampler&, const Network*, int);

void TrialConfig::validate() const {
  if (k < 0) throw ArgumentError("k must be >= 0");
  if (M < 2) throw ArgumentError("M must be >= 2");
  if (!(rho >= 1.0)) throw ArgumentError("rho must be >= 1");
  if (!(mu_factor > 0.0)) throw ArgumentError("mu_factor must be > 0");
  if (trials < 1) throw ArgumentError("trials must be >= 1");
  if (!(tolerance > 0.0)) throw ArgumentError("tolerance must be > 0");
  if (sampler.lo < 1 || sampler.hi < sampler.lo) throw ArgumentError("delay range must satisfy 1 <= lo <= hi");
  if (isolation && mode != net::Target::nodes) throw ArgumentError("isolation applies to node mode only");
}

nlohmann::json to_json(const TrialConfig& c) {
  return {{"topology", c.topology.str()},
          {"k", c.k},
          {"M", c.M},
          {"rho", c.rho},
          {"mu_factor", c.mu_factor},
          {"mode", net::to_string(c.mode)},
          {"builder", tomo::to_string(c.builder)},
          {"loop_policy", tomo::to_string(c.loop_policy)},
          {"isolation", c.isolation},
          {"arithmetic", to_string(c.arithmetic)},
          {"delay_lo", c.sampler.lo},
          {"delay_hi", c.sampler.hi},
          {"trials", c.trials},
          {"seed", c.seed},
          {"tolerance", c.tolerance}};
}

TrialConfig config_from_json(const nlohmann::json& j, TrialConfig c) {
  if (!j.is_object()) throw ArgumentError("config: expected a JSON object");
  static const std::set<std::string> known{"topology", "k",          "M",          "rho",      "mu_factor",
                                           "mode",     "builder",    "loop_policy", "isolation", "arithmetic",
                                           "delay_lo", "delay_hi",   "trials",     "seed",     "tolerance"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ArgumentError("config: unknown key '" + key + "'");
  }
  try {
    if (j.contains("topology")) c.topology = TopologySpec::parse(j.at("topology").get<std::string>());
    if (j.contains("k")) c.k = j.at("k").get<int>();
    if (j.contains("M")) c.M = j.at("M").get<int>();
    if (j.contains("rho")) c.rho = j.at("rho").get<double>();
    if (j.contains("mu_factor")) c.mu_factor = j.at("mu_factor").get<double>();
    if (j.contains("mode")) c.mode = net::parse_target(j.at("mode").get<std::string>());
    if (j.contains("builder")) c.builder = tomo::parse_path_builder(j.at("builder").get<std::string>());
    if (j.contains("loop_policy")) c.loop_policy = tomo::parse_loop_policy(j.at("loop_policy").get<std::string>());
    if (j.contains("isolation")) c.isolation = j.at("isolation").get<bool>();
    if (j.contains("arithmetic")) c.arithmetic = parse_arithmetic(j.at("arithmetic").get<std::string>());
    if (j.contains("delay_lo")) c.sampler.lo = j.at("delay_lo").get<std::int64_t>();
    if (j.contains("delay_hi")) c.sampler.hi = j.at("delay_hi").get<std::int64_t>();
    if (j.contains("trials")) c.trials = j.at("trials").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("tolerance")) c.tolerance = j.at("tolerance").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }
  return c;
}

template <class T>
SingleRun<T> run_single(const TrialConfig& config, int index) {
  config.validate();
  SingleRun<T> run;
  TrialRecord& rec = run.record;
  rec.trial = index;
  rec.seed = derive_seed(config.seed, static_cast<std::uint64_t>(index));
  const auto started = std::chrono::steady_clock::now();

  run.topology = generate_topology(config.topology, derive_seed(rec.seed, 1));
  const Network& net = run.topology->net;
  rec.diameter = net::diameter(net).value;
  const int n = config.mode == net::Target::links ? net.link_count() : net.node_count();
  rec.n = n;
  if (config.k > n) throw ArgumentError("k exceeds the number of " + std::string(net::to_string(config.mode)));
  run.matrix = tomo::build_network_matrix(net, config.mode, config.k, config.rho, config.M, config.mu_factor,
                                          derive_seed(rec.seed, 2));
  const auto& A = *run.matrix;
  std::mt19937_64 truth_rng(derive_seed(rec.seed, 3));
  run.truth = sample_truth<T>(static_cast<std::size_t>(n), static_cast<std::size_t>(config.k), truth_rng,
                              config.sampler, config.isolation ? &net : nullptr);
  const tomo::RecoverOptions opts{config.mode, config.builder, config.loop_policy, config.tolerance,
                                  derive_seed(rec.seed, 4)};
  run.recovery = tomo::recover(net, A, run.truth, opts);
  const auto& result = run.recovery;

  rec.R = A.R();
  rec.mu = A.mu();
  rec.probes = result.metrics.probes;
  rec.iterations = result.decode.iterations;
  rec.leaf_picks = result.decode.leaf_picks;
  rec.group_updates = result.decode.group_updates;
  rec.max_path_links = result.metrics.max_path_links;
  rec.mean_path_links = result.metrics.mean_path_links;
  rec.max_path_hops = result.metrics.max_path_hops;
  rec.mean_path_hops = result.metrics.mean_path_hops;
  rec.mean_support = result.metrics.mean_support;
  rec.isolation_violations = result.metrics.isolation_violations;

  bool exact_match;
  if constexpr (std::is_integral_v<T>) {
    exact_match = result.decode.estimate == run.truth;
  } else {
    double scale = 1.0;
    for (double x : run.truth.values()) scale = std::max(scale, std::abs(x));
    exact_match = true;
    for (std::size_t j = 0; j < run.truth.size(); ++j) {
      if (std::abs(result.decode.estimate[j] - run.truth[j]) > 1e-6 * scale) exact_match = false;
    }
  }
  rec.success = result.decode.status == cs::DecodeStatus::success && exact_match;
  if (!rec.success) {
    if (rec.isolation_violations > 0) {
      rec.failure = "isolation_violation";
    } else if (result.decode.status != cs::DecodeStatus::success) {
      rec.failure = std::string(cs::to_string(result.decode.status));
    } else {
      rec.failure = "wrong_estimate";
    }
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return run;
}

template SingleRun<std::int64_t> run_single(const TrialConfig&, int);
template SingleRun<double> run_single(const TrialConfig&, int);

TrialRecord run_trial(const TrialConfig& config, int index) {
  try {
    return config.arithmetic == Arithmetic::exact ? run_single<std::int64_t>(config, index).record
                                                  : run_single<double>(config, index).record;
  } catch (const std::exception& e) {
    TrialRecord rec;
    rec.trial = index;
    rec.seed = derive_seed(config.seed, static_cast<std::uint64_t>(index));
    rec.failure = "error";
    rec.error = e.what();
    return rec;
  }
}

TrialReport run_experiment(const TrialConfig& config, int jobs) {
  config.validate();
  TrialReport report{config, std::vector<TrialRecord>(config.trials)};
  const int workers = std::clamp(jobs, 1, config.trials);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int t = next++; t < config.trials; t = next++) report.trials[t] = run_trial(config, t);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return report;
}

Aggregate aggregate(const std::vector<TrialRecord>& trials) {
  Aggregate a;
  a.trials = static_cast<int>(trials.size());
  if (trials.empty()) return a;
  double iterations = 0, updates = 0, probes = 0, links = 0, hops = 0, support = 0;
  for (const auto& t : trials) {
    if (t.success) {
      ++a.successes;
      iterations += t.iterations;
      updates += t.group_updates;
    } else {
      ++a.failures[t.failure];
    }
    probes += static_cast<double>(t.probes);
    a.max_path_links = std::max(a.max_path_links, t.max_path_links);
    a.max_path_hops = std::max(a.max_path_hops, t.max_path_hops);
    links += t.mean_path_links;
    hops += t.mean_path_hops;
    support += t.mean_support;
    a.isolation_violations += t.isolation_violations;
  }
  const double n = static_cast<double>(trials.size());
  a.success_rate = a.successes / n;
  if (a.successes > 0) {
    a.mean_iterations = iterations / a.successes;
    a.mean_group_updates = updates / a.successes;
  }
  a.mean_probes = probes / n;
  a.mean_path_links = links / n;
  a.mean_path_hops = hops / n;
  a.mean_support = support / n;
  return a;
}

void TrialReport::write_csv(std::ostream& out, bool timing) const {
  out << "trial,seed,success,failure,n,diameter,R,mu,probes,iterations,leaf_picks,group_updates,"
         "max_path_links,mean_path_links,max_path_hops,mean_path_hops,mean_support,isolation_violations";
  if (timing) out << ",wall_ms";
  out << '\n';
  for (const auto& t : trials) {
    out << t.trial << ',' << t.seed << ',' << (t.success ? 1 : 0) << ',' << t.failure << ',' << t.n << ','
        << t.diameter << ',' << t.R << ',' << t.mu << ',' << t.probes << ',' << t.iterations << ','
        << t.leaf_picks << ',' << t.group_updates << ',' << t.max_path_links << ','
        << format_double(t.mean_path_links) << ',' << t.max_path_hops << ',' << format_double(t.mean_path_hops)
        << ',' << format_double(t.mean_support) << ',' << t.isolation_violations;
    if (timing) out << ',' << format_double(t.wall_ms);
    out << '\n';
  }
}

nlohmann::json TrialReport::summary_json() const {
  const auto a = summary();
  nlohmann::json failures = nlohmann::json::object();
  for (const auto& [kind, count] : a.failures) failures[kind] = count;
  nlohmann::json errors = nlohmann::json::array();
  for (const auto& t : trials) {
    if (!t.error.empty()) errors.push_back({{"trial", t.trial}, {"error", t.error}});
  }
  return {{"config", to_json(config)},
          {"trials", a.trials},
          {"successes", a.successes},
          {"success_rate", a.success_rate},
          {"failures", failures},
          {"errors", errors},
          {"mean_iterations", a.mean_iterations},
          {"mean_group_updates", a.mean_group_updates},
          {"mean_probes", a.mean_probes},
          {"max_path_links", a.max_path_links},
          {"mean_path_links", a.mean_path_links},
          {"max_path_hops", a.max_path_hops},
          {"mean_path_hops", a.mean_path_hops},
          {"mean_support", a.mean_support},
          {"isolation_violations", a.isolation_violations}};
}

template <class T>
PartitionedRecovery<T> recover_partitioned(const Network& net, const Partition& partition,
                                           const cs::DelayVector<T>& truth,
                                           const PartitionedOptions& options) {
  if (truth.size() != static_cast<std::size_t>(net.link_count())) {
    throw ArgumentError("recover_partitioned: truth must be indexed by link");
  }
  std::vector<char> owned(net.link_count(), 0);
  for (const auto& [id, links] : partition) {
    if (links.empty()) throw ArgumentError("partition: part '" + id + "' is empty");
    for (LinkId e : links) {
      if (e < 0 || e >= net.link_count()) throw ArgumentError("partition: link " + std::to_string(e) + " out of range");
      if (owned[e]) throw ArgumentError("partition: link " + std::to_string(e) + " appears twice");
      owned[e] = 1;
    }
  }
  if (std::find(owned.begin(), owned.end(), 0) != owned.end()) {
    throw ArgumentError("partition: parts do not cover every link");
  }

  PartitionedRecovery<T> out;
  out.estimate = cs::DelayVector<T>(truth.size());
  double link_total = 0.0;
  std::size_t group_total = 0;
  std::uint64_t part_index = 0;
  for (const auto& [id, links] : partition) {
    std::map<NodeId, NodeId> local;
    std::vector<std::pair<NodeId, NodeId>> edges;
    auto local_id = [&](NodeId v) {
      auto [it, inserted] = local.emplace(v, static_cast<NodeId>(local.size()));
      return it->second;
    };
    for (LinkId e : links) {
      const NodeId a = local_id(net.link(e).u);
      const NodeId b = local_id(net.link(e).v);
      edges.emplace_back(a, b);
    }
    Network sub(static_cast<NodeId>(local.size()), edges);
    cs::DelayVector<T> part_truth(links.size());
    for (std::size_t t = 0; t < links.size(); ++t) part_truth[t] = truth[links[t]];

    const auto pk = options.part_k.find(id);
    const int k = pk != options.part_k.end() ? pk->second : options.k;
    const std::uint64_t seed = derive_seed(options.seed, part_index++);
    const auto A = tomo::build_network_matrix(sub, net::Target::links, k, options.rho, options.M,
                                              options.mu_factor, derive_seed(seed, 2));
    const auto result = tomo::recover(sub, A, part_truth,
                                      {net::Target::links, options.builder,
                                       tomo::LoopNeighborPolicy::first_neighbor, options.tolerance,
                                       derive_seed(seed, 4)});
    for (std::size_t t = 0; t < links.size(); ++t) out.estimate[links[t]] = result.decode.estimate[t];
    if (result.decode.status != cs::DecodeStatus::success) out.all_decoded = false;
    out.probes += result.metrics.probes;
    out.max_path_links = std::max(out.max_path_links, result.metrics.max_path_links);
    link_total += result.metrics.mean_path_links * result.plan.groups.size();
    group_total += result.plan.groups.size();
    out.parts.push_back({id, static_cast<int>(links.size()), k, result.decode.status, result.metrics});
  }
  out.mean_path_links = group_total ? link_total / static_cast<double>(group_total) : 0.0;
  return out;
}

template PartitionedRecovery<std::int64_t> recover_partitioned(const Network&, const Partition&,
                                                               const cs::DelayVector<std::int64_t>&,
                                                               const PartitionedOptions&);
template PartitionedRecovery<double> recover_partitioned(const Network&, const Partition&,
                                                         const cs::DelayVector<double>&,
                                                         const PartitionedOptions&);

}  // namespace frantic::sim
