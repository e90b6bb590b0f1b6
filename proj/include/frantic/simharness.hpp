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

// Topology generators, ground-truth samplers and the Monte-Carlo trial runner.

#ifndef FRANTIC_SIMHARNESS_HPP
#define FRANTIC_SIMHARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "frantic/cs_core.hpp"
#include "frantic/netmodel.hpp"
#include "frantic/tomography.hpp"

namespace frantic::sim {

using net::LinkId;
using net::Network;
using net::NodeId;

/// Topology grammar:
///   complete:V  line:V  er:V:p  gnm:V:E  clique_line:n  two_cliques:n  file:PATH
/// where n is a target link count.
struct TopologySpec {
  enum class Kind { complete, line, erdos_renyi, gnm, clique_plus_line, two_cliques_line, edge_list };

  Kind kind = Kind::line;
  int size = 0;     // nodes, or target links for the clique families
  double p = 0.0;   // erdos_renyi edge probability
  int links = 0;    // gnm link count
  std::string path;

  static TopologySpec parse(std::string_view text);
  std::string str() const;
  bool randomized() const { return kind == Kind::erdos_renyi || kind == Kind::gnm; }
};

/// Partition of the link set into named parts.
using Partition = std::map<std::string, std::vector<LinkId>>;

Partition read_partition(std::istream& in);
nlohmann::json partition_to_json(const Partition& partition);

struct Topology {
  Network net;
  Partition natural_partition;  // filled for two_cliques_line only
};

/// Throws GenerationError when a random family never yields a connected graph.
Topology generate_topology(const TopologySpec& spec, std::uint64_t seed);

/// Clique order for clique_line with n target links: round((1 + sqrt(1 + 8(n - n^0.4))) / 2).
int clique_line_clique_size(int n);
/// Line length (nodes) for clique_line: round(n^0.4).
int clique_line_tail(int n);

enum class Arithmetic { exact, floating };

std::string_view to_string(Arithmetic arithmetic);
Arithmetic parse_arithmetic(std::string_view text);

struct DelaySampler {
  std::int64_t lo = 1;  // exact mode: uniform integers in [lo, hi]
  std::int64_t hi = 100;
};

/// Uniform support of size k with sampled values; floating mode draws from
/// (0, 1]. With `isolation_net`, resamples until every congested node has a
/// non-congested neighbour, giving up with SamplingError after
/// `retry_budget` attempts.
template <class T>
cs::DelayVector<T> sample_truth(std::size_t n, std::size_t k, std::mt19937_64& rng,
                                const DelaySampler& sampler = {}, const Network* isolation_net = nullptr,
                                int retry_budget = 1000);

struct TrialConfig {
  TopologySpec topology;
  int k = 10;
  int M = 4;
  double rho = 1.0;
  double mu_factor = 4.0;
  net::Target mode = net::Target::links;
  tomo::PathBuilder builder = tomo::PathBuilder::naive;
  tomo::LoopNeighborPolicy loop_policy = tomo::LoopNeighborPolicy::first_neighbor;
  bool isolation = false;
  Arithmetic arithmetic = Arithmetic::exact;
  DelaySampler sampler;
  int trials = 100;
  std::uint64_t seed = 1;
  double tolerance = 1e-9;

  /// Throws ArgumentError naming the first invalid field.
  void validate() const;
};

nlohmann::json to_json(const TrialConfig& config);
/// Overlays the keys present in `j` onto `base`.
TrialConfig config_from_json(const nlohmann::json& j, TrialConfig base = {});

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  bool success = false;
  std::string failure;  // "", stalled, inconsistent, isolation_violation, wrong_estimate, error
  std::string error;
  int n = 0;
  int diameter = 0;
  int R = 0;
  int mu = 0;
  std::size_t probes = 0;
  int iterations = 0;
  int leaf_picks = 0;
  int group_updates = 0;
  std::size_t max_path_links = 0;
  double mean_path_links = 0.0;
  std::size_t max_path_hops = 0;
  double mean_path_hops = 0.0;
  double mean_support = 0.0;
  std::size_t isolation_violations = 0;
  double wall_ms = 0.0;
};

struct Aggregate {
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  std::map<std::string, int> failures;
  double mean_iterations = 0.0;     // over successful trials
  double mean_group_updates = 0.0;  // over successful trials
  double mean_probes = 0.0;
  std::size_t max_path_links = 0;
  double mean_path_links = 0.0;
  std::size_t max_path_hops = 0;
  double mean_path_hops = 0.0;
  double mean_support = 0.0;
  std::size_t isolation_violations = 0;
};

Aggregate aggregate(const std::vector<TrialRecord>& trials);

struct TrialReport {
  TrialConfig config;
  std::vector<TrialRecord> trials;

  Aggregate summary() const { return aggregate(trials); }
  /// One row per trial. Wall time is written only when `timing` is set so
  /// that reruns are byte-identical.
  void write_csv(std::ostream& out, bool timing = false) const;
  nlohmann::json summary_json() const;
};

/// Everything one trial produced.
template <class T>
struct SingleRun {
  std::optional<Topology> topology;
  std::optional<cs::MeasurementMatrix> matrix;
  cs::DelayVector<T> truth;
  tomo::Recovery<T> recovery;
  TrialRecord record;
};

/// Runs trial `index` with seed derive_seed(config.seed, index); throws on
/// errors. T must match config.arithmetic (int64 exact, double float).
template <class T>
SingleRun<T> run_single(const TrialConfig& config, int index);

/// run_single with errors captured as failure records.
TrialRecord run_trial(const TrialConfig& config, int index);

/// Runs all trials on up to `jobs` threads; deterministic in config.seed.
TrialReport run_experiment(const TrialConfig& config, int jobs = 1);

struct PartitionedOptions {
  int k = 1;
  double rho = 1.0;
  int M = 4;
  double mu_factor = 4.0;
  tomo::PathBuilder builder = tomo::PathBuilder::naive;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  std::map<std::string, int> part_k;  // per-part sparsity; defaults to k
};

struct PartResult {
  std::string id;
  int links = 0;
  int k = 0;
  cs::DecodeStatus status = cs::DecodeStatus::success;
  tomo::PlanMetrics metrics;
};

template <class T>
struct PartitionedRecovery {
  cs::DelayVector<T> estimate;
  bool all_decoded = true;
  std::vector<PartResult> parts;
  std::size_t probes = 0;
  std::size_t max_path_links = 0;
  double mean_path_links = 0.0;  // averaged over every group of every part
};

/// Link-mode recovery run independently on each part's subgraph and merged.
/// Parts must be connected, disjoint and cover every link.
template <class T>
PartitionedRecovery<T> recover_partitioned(const Network& net, const Partition& partition,
                                           const cs::DelayVector<T>& truth,
                                           const PartitionedOptions& options);

}  // namespace frantic::sim

#endif  // FRANTIC_SIMHARNESS_HPP
