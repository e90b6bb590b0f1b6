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

#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include <CLI11.hpp>

#include "frantic/errors.hpp"
#include "frantic/netmodel.hpp"
#include "frantic/seed.hpp"
#include "frantic/simharness.hpp"
#include "frantic/steiner.hpp"
#include "frantic/tomography.hpp"

namespace frantic::cli {

namespace {

using nlohmann::json;

/// Bad flags, config values or input files: exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { integer, u64, real, text, boolean };

struct Flag {
  std::string key;
  Kind kind;
  std::string value;
  CLI::Option* option = nullptr;
};

// Flags that overlay config-file keys. Precedence: flag > config > default.
class FlagSet {
 public:
  void add(CLI::App* app, const std::string& name, const std::string& key, Kind kind, const std::string& help) {
    auto flag = std::make_unique<Flag>(Flag{key, kind, {}, nullptr});
    if (kind == Kind::boolean) {
      flag->option = app->add_flag(name, help);
    } else {
      flag->option = app->add_option(name, flag->value, help);
    }
    flags_.push_back(std::move(flag));
  }

  json overlay(json settings) const {
    for (const auto& f : flags_) {
      if (f->option->count() == 0) continue;
      const std::string& v = f->value;
      try {
        std::size_t used = v.size();
        switch (f->kind) {
          case Kind::integer:
            settings[f->key] = std::stoll(v, &used);
            break;
          case Kind::u64:
            if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
            settings[f->key] = std::stoull(v, &used);
            break;
          case Kind::real:
            settings[f->key] = std::stod(v, &used);
            break;
          case Kind::text:
            settings[f->key] = v;
            break;
          case Kind::boolean:
            settings[f->key] = true;
            break;
        }
        if (used != v.size()) throw std::invalid_argument(v);
      } catch (const std::logic_error&) {
        throw UsageError("invalid value '" + v + "' for " + f->option->get_name());
      }
    }
    return settings;
  }

 private:
  std::vector<std::unique_ptr<Flag>> flags_;
};

struct Common {
  std::string config_path;
  std::string out_path;
  bool quiet = false;
};

json read_json_file(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + what + " '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(what + " '" + path + "' is not valid JSON: " + e.what());
  }
}

template <class T>
T setting(const json& s, const std::string& key, T fallback) {
  if (!s.contains(key)) return fallback;
  try {
    return s.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError("setting '" + key + "' has the wrong type");
  }
}

// Writes to a sibling temp file and renames it into place.
void write_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + tmp + "'");
    f << content;
    if (!f.flush()) throw std::runtime_error("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename into '" + path + "': " + ec.message());
  }
}

class Context {
 public:
  Context(const Common& common, std::ostream& out, std::ostream& err) : common_(common), out_(out), err_(err) {}

  void log(const std::string& msg) const {
    if (!common_.quiet) err_ << "frantic: " << msg << '\n';
  }

  void emit(const std::string& content, const std::string& suffix = "") const {
    if (common_.out_path.empty()) {
      out_ << content;
    } else {
      write_atomically(common_.out_path + suffix, content);
      log("wrote " + common_.out_path + suffix);
    }
  }

  bool has_out() const { return !common_.out_path.empty(); }

  /// Fills in an entropy seed when none was given, and reports it.
  json with_seed(json settings) const {
    if (!settings.contains("seed")) {
      std::random_device rd;
      const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
      settings["seed"] = seed;
      err_ << "frantic: seed " << seed << '\n';
    }
    return settings;
  }

 private:
  const Common& common_;
  std::ostream& out_;
  std::ostream& err_;
};

cs::MatrixParams matrix_params(const json& s) {
  cs::MatrixParams p;
  p.n = setting<int>(s, "n", 0);
  p.k = setting<int>(s, "k", 1);
  p.M = setting<int>(s, "M", 4);
  p.mu_factor = setting<double>(s, "mu_factor", 4.0);
  p.seed = setting<std::uint64_t>(s, "seed", 0);
  if (p.n < 1) throw UsageError("--n must be >= 1");
  if (p.k < 1 || p.k > p.n) throw UsageError("--k must satisfy 1 <= k <= n");
  if (p.M < 2) throw UsageError("--M must be >= 2");
  if (!(p.mu_factor > 0)) throw UsageError("--mu-factor must be > 0");
  return p;
}

sim::TrialConfig trial_config(json s) {
  s.erase("n");
  s.erase("s");
  s.erase("matrix");
  s.erase("partition");
  s.erase("part_k");
  try {
    auto c = sim::config_from_json(s);
    if (!s.contains("topology")) throw UsageError("--topology is required");
    c.validate();
    return c;
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
}

template <class T>
json sparse_json(const cs::DelayVector<T>& d) {
  json j = json::object();
  for (std::size_t idx : d.support()) j[std::to_string(idx)] = d[idx];
  return j;
}

template <class T>
cs::DelayVector<T> delays_from_json(const json& j, std::size_t n) {
  cs::DelayVector<T> d(n);
  try {
    const json& values = j.is_object() && j.contains("values") ? j.at("values") : j;
    if (values.is_array()) {
      if (values.size() != n) throw UsageError("delays: expected " + std::to_string(n) + " values");
      for (std::size_t idx = 0; idx < n; ++idx) d[idx] = values[idx].template get<T>();
    } else if (values.is_object()) {
      for (const auto& [key, v] : values.items()) {
        const std::size_t idx = std::stoul(key);
        if (idx >= n) throw UsageError("delays: index " + key + " out of range");
        d[idx] = v.template get<T>();
      }
    } else {
      throw UsageError("delays: expected an array or an object of index -> value");
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("delays: ") + e.what());
  } catch (const std::logic_error& e) {
    throw UsageError(std::string("delays: bad index: ") + e.what());
  }
  return d;
}

cs::MeasurementMatrix load_or_build_matrix(const json& s) {
  if (s.contains("matrix")) {
    try {
      return matrix_from_json(read_json_file(s.at("matrix").get<std::string>(), "matrix"));
    } catch (const ArgumentError& e) {
      throw UsageError(std::string("matrix: ") + e.what());
    }
  }
  return cs::build_matrix(matrix_params(s));
}

bool exact_mode(const json& s) {
  try {
    return sim::parse_arithmetic(setting<std::string>(s, "arithmetic", "exact")) == sim::Arithmetic::exact;
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
}

template <class T>
json decode_json(const cs::DecodeResult<T>& r) {
  return {{"status", cs::to_string(r.status)},
          {"estimate", sparse_json(r.estimate)},
          {"iterations", r.iterations},
          {"leaf_picks", r.leaf_picks},
          {"false_leaf_rejections", r.false_leaf_rejections},
          {"group_updates", r.group_updates}};
}

int cmd_gen_matrix(const Context& ctx, json s) {
  s = ctx.with_seed(std::move(s));
  const auto p = matrix_params(s);
  const auto A = cs::build_matrix(p);
  ctx.log("matrix " + std::to_string(A.rows()) + "x" + std::to_string(A.n()) + " (R=" + std::to_string(A.R()) +
          ", mu=" + std::to_string(A.mu()) + ")");
  ctx.emit(matrix_to_json(A, p.k, p.mu_factor).dump(1) + "\n");
  return kOk;
}

template <class T>
int encode_typed(const Context& ctx, const json& s) {
  if (!s.contains("delays")) throw UsageError("--delays is required");
  const auto A = load_or_build_matrix(s);
  const auto d = delays_from_json<T>(read_json_file(s.at("delays").get<std::string>(), "delays"), A.n());
  const auto y = cs::encode(A, d);
  ctx.emit(json{{"R", y.R}, {"mu", y.mu}, {"y", y.values}}.dump() + "\n");
  return kOk;
}

template <class T>
int decode_typed(const Context& ctx, const json& s) {
  if (!s.contains("y")) throw UsageError("--y is required");
  const auto A = load_or_build_matrix(s);
  const json yj = read_json_file(s.at("y").get<std::string>(), "measurements");
  cs::GroupedOutput<T> y;
  try {
    y.R = yj.at("R").get<int>();
    y.mu = yj.at("mu").get<int>();
    y.values = yj.at("y").get<std::vector<T>>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("measurements: ") + e.what());
  }
  if (y.R != A.R() || y.mu != A.mu() || y.values.size() != static_cast<std::size_t>(A.rows())) {
    throw UsageError("measurements: dimensions do not match the matrix");
  }
  const auto r = cs::decode(A, y, {setting<double>(s, "tolerance", 1e-9)});
  ctx.log(std::string("decode ") + std::string(cs::to_string(r.status)));
  ctx.emit(decode_json(r).dump() + "\n");
  return kOk;
}

template <class T>
int recover_typed(const Context& ctx, const sim::TrialConfig& config) {
  const auto run = sim::run_single<T>(config, 0);
  const auto& rec = run.record;
  const auto& result = run.recovery;
  json j = decode_json(result.decode);
  j["success"] = rec.success;
  j["failure"] = rec.failure;
  j["truth"] = sparse_json(run.truth);
  j["n"] = rec.n;
  j["R"] = rec.R;
  j["mu"] = rec.mu;
  j["diameter"] = rec.diameter;
  j["probes"] = result.metrics.probes;
  j["max_path_links"] = result.metrics.max_path_links;
  j["mean_path_links"] = result.metrics.mean_path_links;
  j["max_path_hops"] = result.metrics.max_path_hops;
  j["mean_path_hops"] = result.metrics.mean_path_hops;
  j["isolation_violations"] = result.metrics.isolation_violations;
  j["config"] = sim::to_json(config);
  ctx.log("recover " + std::string(cs::to_string(result.decode.status)) + ", " + std::to_string(rec.probes) +
          " probes");
  ctx.emit(j.dump(1) + "\n");
  return kOk;
}

template <class T>
bool same_delays(const cs::DelayVector<T>& a, const cs::DelayVector<T>& b) {
  if constexpr (std::is_integral_v<T>) {
    return a == b;
  } else {
    double scale = 1.0;
    for (double x : b.values()) scale = std::max(scale, std::abs(x));
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (std::abs(a[j] - b[j]) > 1e-6 * scale) return false;
    }
    return a.size() == b.size();
  }
}

// Link-mode recovery run separately on each part of a link partition.
// "natural" takes the partition the topology generator provides.
template <class T>
int recover_parts_typed(const Context& ctx, const sim::TrialConfig& config, const json& s) {
  if (config.mode != net::Target::links) throw UsageError("--partition works in link mode only");
  const auto trial_seed = derive_seed(config.seed, 0);
  const auto topo = sim::generate_topology(config.topology, derive_seed(trial_seed, 1));
  const auto source = setting<std::string>(s, "partition", "");
  sim::Partition partition;
  if (source == "natural") {
    if (topo.natural_partition.empty()) throw UsageError("--partition natural: topology has no natural partition");
    partition = topo.natural_partition;
  } else {
    std::ifstream in(source);
    if (!in) throw UsageError("cannot open partition '" + source + "'");
    try {
      partition = sim::read_partition(in);
    } catch (const ArgumentError& e) {
      throw UsageError(e.what());
    }
  }
  sim::PartitionedOptions opt;
  opt.k = config.k;
  opt.rho = config.rho;
  opt.M = config.M;
  opt.mu_factor = config.mu_factor;
  opt.builder = config.builder;
  opt.seed = derive_seed(trial_seed, 4);
  opt.tolerance = config.tolerance;
  opt.part_k = setting<std::map<std::string, int>>(s, "part_k", {});
  if (config.k > topo.net.link_count()) throw UsageError("--k exceeds the number of links");

  std::mt19937_64 truth_rng(derive_seed(trial_seed, 3));
  const auto truth = sim::sample_truth<T>(static_cast<std::size_t>(topo.net.link_count()),
                                          static_cast<std::size_t>(config.k), truth_rng, config.sampler);
  const auto r = sim::recover_partitioned(topo.net, partition, truth, opt);
  json parts = json::array();
  for (const auto& p : r.parts) {
    parts.push_back({{"id", p.id},
                     {"links", p.links},
                     {"k", p.k},
                     {"status", cs::to_string(p.status)},
                     {"probes", p.metrics.probes},
                     {"max_path_links", p.metrics.max_path_links}});
  }
  const json j{{"status", r.all_decoded ? "success" : "stalled"},
               {"success", r.all_decoded && same_delays(r.estimate, truth)},
               {"estimate", sparse_json(r.estimate)},
               {"truth", sparse_json(truth)},
               {"probes", r.probes},
               {"max_path_links", r.max_path_links},
               {"mean_path_links", r.mean_path_links},
               {"parts", parts},
               {"config", sim::to_json(config)}};
  ctx.log("recover over " + std::to_string(r.parts.size()) + " parts, " + std::to_string(r.probes) + " probes");
  ctx.emit(j.dump(1) + "\n");
  return kOk;
}

template <class T>
int plan_typed(const Context& ctx, const sim::TrialConfig& config) {
  const auto run = sim::run_single<T>(config, 0);
  std::ostringstream lines;
  tomo::write_plan_jsonl(lines, run.topology->net, run.recovery.plan);
  ctx.log("plan with " + std::to_string(run.recovery.plan.probe_count()) + " probes");
  ctx.emit(lines.str());
  return kOk;
}

int cmd_sweep(const Context& ctx, const sim::TrialConfig& config, int jobs, bool timing) {
  const auto report = sim::run_experiment(config, jobs);
  const auto a = report.summary();
  ctx.log("sweep " + std::to_string(a.successes) + "/" + std::to_string(a.trials) + " successful");
  if (ctx.has_out()) {
    std::ostringstream csv;
    report.write_csv(csv, timing);
    ctx.emit(csv.str(), ".csv");
    ctx.emit(report.summary_json().dump(1) + "\n", ".json");
  } else {
    ctx.emit(report.summary_json().dump(1) + "\n");
  }
  return kOk;
}

int cmd_steiner_stats(const Context& ctx, json s) {
  s = ctx.with_seed(std::move(s));
  sim::TopologySpec spec;
  try {
    if (!s.contains("topology")) throw UsageError("--topology is required");
    spec = sim::TopologySpec::parse(setting<std::string>(s, "topology", ""));
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  const int size = setting<int>(s, "s", 2);
  const int trials = setting<int>(s, "trials", 100);
  const auto seed = setting<std::uint64_t>(s, "seed", 0);
  if (size < 1) throw UsageError("--s must be >= 1");
  if (trials < 1) throw UsageError("--trials must be >= 1");
  const auto topo = sim::generate_topology(spec, seed);
  if (size > topo.net.node_count()) throw UsageError("--s exceeds the number of nodes");
  const auto stats = steiner::steiner_length_stats(topo.net, size, trials, seed);
  ctx.emit(json{{"topology", spec.str()},
                {"nodes", topo.net.node_count()},
                {"links", topo.net.link_count()},
                {"s", size},
                {"trials", trials},
                {"seed", seed},
                {"worst", stats.worst},
                {"mean", stats.mean}}
               .dump() +
           "\n");
  return kOk;
}

}  // namespace

json matrix_to_json(const cs::MeasurementMatrix& A, int k, double mu_factor) {
  json edges = json::array();
  for (int j = 0; j < A.n(); ++j) {
    for (int s = 0; s < cs::BipartiteGraph::kLeftDegree; ++s) {
      const auto w = A.weight(j, s);
      edges.push_back({{"j", j}, {"i", A.graph().neighbors(j)[s]}, {"weights", std::vector<int>(w.begin(), w.end())}});
    }
  }
  return {{"n", A.n()}, {"k", k},           {"mu", A.mu()},         {"R", A.R()},
          {"M", A.M()}, {"mu_factor", mu_factor}, {"seed", A.seed()}, {"edges", std::move(edges)}};
}

cs::MeasurementMatrix matrix_from_json(const json& j) {
  try {
    const int n = j.at("n").get<int>();
    const int mu = j.at("mu").get<int>();
    const int R = j.at("R").get<int>();
    const int M = j.at("M").get<int>();
    const auto seed = j.value("seed", std::uint64_t{0});
    if (n < 1) throw ArgumentError("n must be >= 1");
    const auto& edges = j.at("edges");
    if (edges.size() != static_cast<std::size_t>(n) * 3) throw ArgumentError("expected 3n edges");
    std::vector<std::array<int, 3>> adjacency(n);
    std::vector<int> filled(n, 0);
    std::vector<cs::CoprimeVector> weights(static_cast<std::size_t>(n) * 3);
    for (const auto& e : edges) {
      const int left = e.at("j").get<int>();
      if (left < 0 || left >= n) throw ArgumentError("edge j out of range");
      if (filled[left] >= 3) throw ArgumentError("column " + std::to_string(left) + " has more than 3 edges");
      const int slot = filled[left]++;
      adjacency[left][slot] = e.at("i").get<int>();
      weights[static_cast<std::size_t>(left) * 3 + slot].entries = e.at("weights").get<std::vector<int>>();
    }
    return cs::MeasurementMatrix(cs::BipartiteGraph(n, mu, std::move(adjacency)), std::move(weights), R, M, seed);
  } catch (const json::exception& e) {
    throw ArgumentError(e.what());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"frantic: sparse link/node delay tomography via integer compressive sensing"};
  app.require_subcommand(1);
  app.footer("Settings precedence: command-line flag > --config file > built-in default.\n"
             "Exit codes: 0 success, 1 usage error, 2 runtime error.");
  Common common;
  int jobs = 1;
  bool timing = false;

  struct Sub {
    CLI::App* app;
    FlagSet flags;
  };
  std::map<std::string, std::unique_ptr<Sub>> subs;
  auto make = [&](const std::string& name, const std::string& help) -> Sub& {
    auto sub = std::make_unique<Sub>();
    sub->app = app.add_subcommand(name, help);
    sub->app->add_option("--config", common.config_path, "JSON file whose keys mirror the flags");
    sub->app->add_option("--out", common.out_path, "Output path (written atomically); stdout if absent");
    sub->app->add_flag("--quiet", common.quiet, "Suppress log messages on stderr");
    auto& ref = *sub;
    subs[name] = std::move(sub);
    return ref;
  };
  auto matrix_flags = [](Sub& s) {
    s.flags.add(s.app, "--n", "n", Kind::integer, "Signal length (matrix columns)");
    s.flags.add(s.app, "--k", "k", Kind::integer, "Sparsity budget");
    s.flags.add(s.app, "--M", "M", Kind::integer, "Largest matrix entry (default 4)");
    s.flags.add(s.app, "--mu-factor", "mu_factor", Kind::real, "Groups per unit sparsity (default 4)");
    s.flags.add(s.app, "--seed", "seed", Kind::u64, "RNG seed (drawn from entropy and printed if absent)");
  };
  auto trial_flags = [](Sub& s, bool sweep) {
    s.flags.add(s.app, "--topology", "topology", Kind::text,
                "complete:V | line:V | er:V:p | gnm:V:E | clique_line:n | two_cliques:n | file:PATH");
    s.flags.add(s.app, "--k", "k", Kind::integer, "Number of congested elements (default 10)");
    s.flags.add(s.app, "--M", "M", Kind::integer, "Loop cap / largest weight (default 4)");
    s.flags.add(s.app, "--rho", "rho", Kind::real, "Sparsity inflation (default 1)");
    s.flags.add(s.app, "--mu-factor", "mu_factor", Kind::real, "Groups per unit sparsity (default 4)");
    s.flags.add(s.app, "--mode", "mode", Kind::text, "links | nodes (default links)");
    s.flags.add(s.app, "--builder", "builder", Kind::text, "naive | steiner (default naive)");
    s.flags.add(s.app, "--loop-policy", "loop_policy", Kind::text,
                "first-neighbor | oracle-noncongested (node mode)");
    s.flags.add(s.app, "--isolation", "isolation", Kind::boolean, "Sample isolated congested nodes only");
    s.flags.add(s.app, "--arithmetic", "arithmetic", Kind::text, "exact | float (default exact)");
    s.flags.add(s.app, "--delay-lo", "delay_lo", Kind::integer, "Smallest exact delay (default 1)");
    s.flags.add(s.app, "--delay-hi", "delay_hi", Kind::integer, "Largest exact delay (default 100)");
    s.flags.add(s.app, "--tolerance", "tolerance", Kind::real, "Float-mode relative tolerance (default 1e-9)");
    s.flags.add(s.app, "--seed", "seed", Kind::u64, "RNG seed (drawn from entropy and printed if absent)");
    if (sweep) s.flags.add(s.app, "--trials", "trials", Kind::integer, "Number of trials (default 100)");
  };

  auto& gen = make("gen-matrix", "Generate a measurement matrix (JSON)");
  matrix_flags(gen);
  auto& enc = make("encode", "Compute y = A d");
  matrix_flags(enc);
  enc.flags.add(enc.app, "--matrix", "matrix", Kind::text, "Matrix JSON (instead of generation flags)");
  enc.flags.add(enc.app, "--delays", "delays", Kind::text, "Delay JSON: array or {\"values\": {index: value}}");
  enc.flags.add(enc.app, "--arithmetic", "arithmetic", Kind::text, "exact | float (default exact)");
  auto& dec = make("decode", "Peeling-decode a measurement vector");
  matrix_flags(dec);
  dec.flags.add(dec.app, "--matrix", "matrix", Kind::text, "Matrix JSON (instead of generation flags)");
  dec.flags.add(dec.app, "--y", "y", Kind::text, "Measurement JSON {R, mu, y}");
  dec.flags.add(dec.app, "--arithmetic", "arithmetic", Kind::text, "exact | float (default exact)");
  dec.flags.add(dec.app, "--tolerance", "tolerance", Kind::real, "Float-mode relative tolerance (default 1e-9)");
  auto& rec = make("recover", "Simulate probes on a topology and recover the delays");
  trial_flags(rec, false);
  rec.flags.add(rec.app, "--partition", "partition", Kind::text,
                "Recover part by part: JSON {part: [link ids]} file, or 'natural' (two_cliques)");
  auto& plan = make("plan", "Export the probe plan as JSON lines");
  trial_flags(plan, false);
  auto& sweep = make("sweep", "Run a Monte-Carlo experiment (CSV + JSON with --out PREFIX)");
  trial_flags(sweep, true);
  sweep.app->add_option("--jobs", jobs, "Parallel trials (default 1)")->check(CLI::PositiveNumber);
  sweep.app->add_flag("--timing", timing, "Add wall-clock times to the CSV");
  auto& st = make("steiner-stats", "Worst and mean approximate Steiner lengths");
  st.flags.add(st.app, "--topology", "topology", Kind::text, "Topology (same grammar as recover)");
  st.flags.add(st.app, "--s", "s", Kind::integer, "Terminal set size");
  st.flags.add(st.app, "--trials", "trials", Kind::integer, "Sampled terminal sets (default 100)");
  st.flags.add(st.app, "--seed", "seed", Kind::u64, "RNG seed");

  std::vector<std::string> argv_store{"frantic"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "frantic: " << e.what() << "\n\n";
    const auto picked = app.get_subcommands();
    err << (picked.empty() ? app.help() : picked.front()->help());
    return kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  Context ctx(common, out, err);
  try {
    json settings = json::object();
    if (!common.config_path.empty()) {
      settings = read_json_file(common.config_path, "config");
      if (!settings.is_object()) throw UsageError("config must be a JSON object");
    }
    settings = subs.at(name)->flags.overlay(std::move(settings));

    if (name == "gen-matrix") return cmd_gen_matrix(ctx, settings);
    if (name == "encode") return exact_mode(settings) ? encode_typed<std::int64_t>(ctx, settings)
                                                      : encode_typed<double>(ctx, settings);
    if (name == "decode") return exact_mode(settings) ? decode_typed<std::int64_t>(ctx, settings)
                                                      : decode_typed<double>(ctx, settings);
    if (name == "steiner-stats") return cmd_steiner_stats(ctx, settings);

    settings = ctx.with_seed(std::move(settings));
    if (name == "sweep") return cmd_sweep(ctx, trial_config(settings), jobs, timing);
    auto config = trial_config(settings);
    const bool exact = config.arithmetic == sim::Arithmetic::exact;
    if (name == "recover" && settings.contains("partition")) {
      return exact ? recover_parts_typed<std::int64_t>(ctx, config, settings)
                   : recover_parts_typed<double>(ctx, config, settings);
    }
    if (name == "recover") return exact ? recover_typed<std::int64_t>(ctx, config) : recover_typed<double>(ctx, config);
    if (name == "plan") return exact ? plan_typed<std::int64_t>(ctx, config) : plan_typed<double>(ctx, config);
  } catch (const UsageError& e) {
    err << "frantic " << name << ": " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "frantic " << name << ": " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}

}  // namespace frantic::cli
