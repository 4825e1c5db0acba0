#include "bequec/experiment.hpp"

#include "bequec/errors.hpp"
#include "bequec/metrics.hpp"
#include "bequec/rng.hpp"
#include "bequec/ssmf.hpp"
#include "bequec/stitching.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

namespace bequec {

using nlohmann::json;

std::vector<double> ExperimentConfig::effective_nu() const {
  if (!nu.empty()) return nu;
  return std::vector<double>(static_cast<std::size_t>(std::max(k, 0)), 1.0 / k);
}

namespace {

bool is_diagonal(const std::string& plan) { return plan == "diagonal"; }

QueryPlan resolve_plan(const ExperimentConfig& c) {
  if (is_diagonal(c.plan)) return diagonal_plan(c.n, c.l);
  auto plan = load_plan(c.plan);
  if (plan.num_nodes() != c.n) {
    throw PlanError("plan file " + c.plan + " covers " + std::to_string(plan.num_nodes()) +
                    " nodes, config has n = " + std::to_string(c.n));
  }
  return plan;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 2) throw ParameterError("n must be at least 2");
  if (k < 1) throw ParameterError("k must be at least 1");
  if (trials < 1) throw ParameterError("trials must be at least 1");
  if (!(eta >= 0.0 && eta <= 1.0)) throw ParameterError("eta must lie in [0,1]");
  if (!(b_diag_min >= 0.0 && b_diag_min <= 1.0)) throw ParameterError("b_diag_min must lie in [0,1]");
  if (!nu.empty() && static_cast<int>(nu.size()) != k) {
    throw ParameterError("nu has " + std::to_string(nu.size()) + " entries, expected k = " + std::to_string(k));
  }
  DirichletParams{effective_nu()}.validate();
  if (is_diagonal(plan) && (l < 2 || l > n)) throw PlanError("l must lie in [2, n]");
  const auto report = validate_plan(resolve_plan(*this), k);
  if (!report.ok()) throw PlanError("invalid query plan: " + report.summary());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j = {
      {"n", c.n},
      {"k", c.k},
      {"l", c.l},
      {"nu", c.effective_nu()},
      {"eta", c.eta},
      {"trials", c.trials},
      {"seed", c.seed},
      {"mode", c.mode == ObservationMode::ideal ? "ideal" : "binary"},
      {"plan", c.plan},
      {"extraction", c.extraction == Extraction::direct ? "direct" : "constrained"},
      {"membership", c.membership == MembershipModel::hard ? "hard" : "dirichlet"},
      {"b_diag_min", c.b_diag_min},
  };
  return j.dump();
}

ExperimentConfig config_from_json(const std::string& text, ExperimentConfig base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config: expected a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n") base.n = value.get<Index>();
      else if (key == "k") base.k = value.get<int>();
      else if (key == "l") base.l = value.get<int>();
      else if (key == "nu") base.nu = value.get<std::vector<double>>();
      else if (key == "eta") base.eta = value.get<double>();
      else if (key == "trials") base.trials = value.get<int>();
      else if (key == "seed") base.seed = value.get<std::uint64_t>();
      else if (key == "mode") base.mode = parse_mode(value.get<std::string>());
      else if (key == "plan") base.plan = value.get<std::string>();
      else if (key == "extraction") base.extraction = parse_extraction(value.get<std::string>());
      else if (key == "membership") base.membership = parse_membership(value.get<std::string>());
      else if (key == "b_diag_min") base.b_diag_min = value.get<double>();
      else throw ParseError("config: unknown field '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return base;
}

ObservationMode parse_mode(const std::string& s) {
  if (s == "ideal") return ObservationMode::ideal;
  if (s == "binary") return ObservationMode::binary;
  throw ParameterError("unknown mode '" + s + "' (expected ideal or binary)");
}

Extraction parse_extraction(const std::string& s) {
  if (s == "direct") return Extraction::direct;
  if (s == "constrained") return Extraction::constrained;
  throw ParameterError("unknown extraction '" + s + "' (expected direct or constrained)");
}

MembershipModel parse_membership(const std::string& s) {
  if (s == "dirichlet") return MembershipModel::dirichlet;
  if (s == "hard") return MembershipModel::hard;
  throw ParameterError("unknown membership model '" + s + "' (expected dirichlet or hard)");
}

std::optional<Aggregate> RunResult::aggregate(const std::string& metric) const {
  for (const auto& a : aggregates)
    if (a.metric == metric) return a;
  return std::nullopt;
}

std::vector<Aggregate> aggregate_records(const std::vector<ResultRecord>& records) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> values;
  for (const auto& r : records) {
    auto& v = values[r.metric];
    if (v.empty()) order.push_back(r.metric);
    v.push_back(r.value);
  }
  std::vector<Aggregate> out;
  for (const auto& name : order) {
    const auto& v = values[name];
    Aggregate a{name, 0.0, 0.0, static_cast<int>(v.size())};
    a.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - a.mean) * (x - a.mean);
      a.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    out.push_back(a);
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  return rng::derive(seed, static_cast<std::uint64_t>(trial));
}

namespace {

// Stage streams within one trial.
enum Stream : std::uint64_t { kMembership = 1, kInteraction = 2, kAdjacency = 3, kFlips = 4 };

struct Instance {
  MembershipMatrix m;
  InteractionMatrix b;
  std::vector<int> labels;  // hard membership only
};

Instance sample_instance(const ExperimentConfig& c, std::uint64_t ts) {
  const auto mseed = rng::derive(ts, kMembership);
  const auto bseed = rng::derive(ts, kInteraction);
  auto b = sample_interaction_matrix(c.k, c.eta, c.b_diag_min, 1.0, bseed);
  if (c.membership == MembershipModel::dirichlet) {
    return {sample_dirichlet_memberships(DirichletParams{c.effective_nu()}, c.n, mseed), std::move(b), {}};
  }
  // balanced labels in random order
  std::vector<int> labels(static_cast<std::size_t>(c.n));
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % static_cast<std::size_t>(c.k));
  rng::Engine eng(mseed);
  std::shuffle(labels.begin(), labels.end(), eng);
  auto m = MembershipMatrix::from_labels(labels, c.k);
  return {std::move(m), std::move(b), std::move(labels)};
}

struct PipelineOutput {
  Matrix u_hat;
  Matrix m_hat;
  double runtime_s = 0.0;
};

PipelineOutput run_pipeline(const BlockSet& blocks, const QueryPlan& plan, int k, Extraction extraction) {
  const auto start = std::chrono::steady_clock::now();
  auto est = estimate_range(blocks, plan, k);
  const auto anchors = spa(est.assembled, k);
  Matrix m_hat = extraction == Extraction::direct
                     ? membership_direct(est.assembled, anchors.g_hat)
                     : membership_constrained(est.assembled, anchors.g_hat).m_hat;
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  return {std::move(est.assembled), std::move(m_hat), elapsed.count()};
}

std::vector<std::pair<std::string, double>> score(const PipelineOutput& out, const Instance& inst,
                                                  bool with_labels) {
  const Matrix& m = inst.m.matrix();
  std::vector<std::pair<std::string, double>> s = {
      {"Dist", subspace_distance(out.u_hat, m)},
      {"MSE", mse(out.m_hat, m)},
      {"RE", relative_error(out.m_hat, m)},
      {"SRC", spearman_src(out.m_hat, m)},
  };
  if (with_labels) {
    const auto truth = inst.labels.empty() ? round_to_labels(m) : inst.labels;
    const auto guess = round_to_labels(out.m_hat);
    s.emplace_back("ACC", clustering_accuracy(guess, truth));
    s.emplace_back("NMI", nmi(guess, truth));
  }
  return s;
}

ResultRecord base_record(const ExperimentConfig& c, const QueryPlan& plan, std::uint64_t ts) {
  ResultRecord r;
  r.seed = ts;
  r.n = c.n;
  r.k = c.k;
  r.l = plan.num_groups();
  r.eta = c.eta;
  r.nu = c.effective_nu();
  return r;
}

std::string rate_label(double rate) {
  std::ostringstream s;
  s << rate;
  return s.str();
}

// Runs every trial (in parallel) and collects per-trial record lists in trial order.
template <class TrialFn>
RunResult run_trials(const ExperimentConfig& config, TrialFn&& trial_fn) {
  const int trials = config.trials;
  std::vector<std::vector<ResultRecord>> per_trial(static_cast<std::size_t>(trials));
  std::vector<std::string> errors(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic, 1)
  for (int t = 0; t < trials; ++t) {
    try {
      per_trial[static_cast<std::size_t>(t)] = trial_fn(t);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(t)] = e.what();
      per_trial[static_cast<std::size_t>(t)].clear();
    }
  }
  RunResult out;
  out.trials_requested = trials;
  for (int t = 0; t < trials; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    if (!errors[ti].empty()) {
      out.failures.push_back({t, errors[ti]});
      continue;
    }
    out.records.insert(out.records.end(), per_trial[ti].begin(), per_trial[ti].end());
  }
  out.aggregates = aggregate_records(out.records);
  return out;
}

}  // namespace

RunResult run_synth(const ExperimentConfig& config) {
  config.validate();
  const auto plan = resolve_plan(config);
  const bool labels = config.membership == MembershipModel::hard;
  return run_trials(config, [&](int t) {
    const auto ts = trial_seed(config.seed, t);
    const auto inst = sample_instance(config, ts);
    const auto blocks = config.mode == ObservationMode::ideal
                            ? build_probability_blocks(inst.m, inst.b, plan, DiagonalPolicy::keep)
                            : sample_observed_blocks(inst.m, inst.b, plan, rng::derive(ts, kAdjacency));
    const auto out = run_pipeline(blocks, plan, config.k, config.extraction);
    std::vector<ResultRecord> recs;
    for (const auto& [name, value] : score(out, inst, labels)) {
      auto r = base_record(config, plan, ts);
      r.metric = name;
      r.value = value;
      r.runtime_s = out.runtime_s;
      recs.push_back(std::move(r));
    }
    return recs;
  });
}

RunResult run_error_sweep(const ExperimentConfig& config, std::span<const double> rates) {
  if (config.mode != ObservationMode::binary) throw ParameterError("error sweep requires binary mode");
  if (rates.empty()) throw ParameterError("error sweep needs at least one rate");
  for (double r : rates)
    if (!(r >= 0.0 && r <= 1.0)) throw ParameterError("error rates must lie in [0,1]");
  config.validate();
  const auto plan = resolve_plan(config);
  return run_trials(config, [&](int t) {
    const auto ts = trial_seed(config.seed, t);
    const auto inst = sample_instance(config, ts);
    const auto clean = sample_observed_blocks(inst.m, inst.b, plan, rng::derive(ts, kAdjacency));
    std::vector<ResultRecord> recs;
    for (double rate : rates) {
      // one flip stream for all rates: the flipped pairs at a lower rate are a subset
      const auto blocks = inject_annotation_errors(clean, rate, rng::derive(ts, kFlips));
      const auto out = run_pipeline(blocks, plan, config.k, config.extraction);
      for (const auto& [name, value] : score(out, inst, true)) {
        auto r = base_record(config, plan, ts);
        r.metric = name + "@" + rate_label(rate);
        r.value = value;
        r.runtime_s = out.runtime_s;
        recs.push_back(std::move(r));
      }
    }
    return recs;
  });
}

ClusterResult run_cluster(const ClusterOptions& options) {
  if (options.k < 1) throw ParameterError("k must be at least 1");
  const auto graph = load_edge_list(options.graph_path);
  std::optional<QueryPlan> plan;
  if (is_diagonal(options.plan)) {
    std::vector<Index> order;
    if (options.shuffle_seed) {
      order.resize(static_cast<std::size_t>(graph.n()));
      std::iota(order.begin(), order.end(), Index{0});
      rng::Engine eng(*options.shuffle_seed);
      std::shuffle(order.begin(), order.end(), eng);
    }
    plan.emplace(diagonal_plan(graph.n(), options.l, order));
  } else {
    plan.emplace(load_plan(options.plan));
  }
  if (plan->num_nodes() != graph.n()) {
    throw PlanError("plan covers " + std::to_string(plan->num_nodes()) + " nodes but the graph has " +
                    std::to_string(graph.n()));
  }
  const auto report = validate_plan(*plan, options.k);
  if (!report.ok()) throw PlanError("invalid query plan: " + report.summary());

  std::optional<GroundTruth> truth;
  if (options.truth_path) {
    truth = load_ground_truth(*options.truth_path);
    const Index rows = truth->memberships ? truth->memberships->cols()
                                          : static_cast<Index>(truth->labels->size());
    if (rows != graph.n()) {
      throw DimensionError("ground truth has " + std::to_string(rows) + " rows, graph has " +
                           std::to_string(graph.n()) + " nodes");
    }
  }

  const auto blocks = extract_blocks(graph, *plan);
  auto out = run_pipeline(blocks, *plan, options.k, options.extraction);

  ClusterResult result;
  result.labels = round_to_labels(out.m_hat);
  result.runtime_s = out.runtime_s;
  result.queried_fraction = queried_fraction(*plan);
  if (truth) {
    if (truth->memberships) {
      const Matrix& m = *truth->memberships;
      if (m.rows() != options.k) {
        throw DimensionError("ground truth has " + std::to_string(m.rows()) + " clusters, k = " +
                             std::to_string(options.k));
      }
      result.metrics["MSE"] = mse(out.m_hat, m);
      result.metrics["RE"] = relative_error(out.m_hat, m);
      result.metrics["SRC"] = spearman_src(out.m_hat, m);
    } else {
      result.metrics["ACC"] = clustering_accuracy(result.labels, *truth->labels);
      result.metrics["NMI"] = nmi(result.labels, *truth->labels);
    }
  }
  result.m_hat = std::move(out.m_hat);
  return result;
}

std::vector<GRow> g_table(double eps, const std::vector<std::vector<double>>& nus) {
  std::vector<GRow> rows;
  for (const auto& nu : nus) rows.push_back({nu, g_function(eps, DirichletParams{nu})});
  return rows;
}

QueryPlan plan_from_pattern(Index n, int l, const std::string& pattern) {
  if (pattern == "diagonal") return diagonal_plan(n, l);
  const std::string prefix = "chain:";
  if (pattern.rfind(prefix, 0) != 0) {
    throw PlanError("unknown plan pattern '" + pattern + "' (expected diagonal or chain:l1-m1,l2-m2,...)");
  }
  if (l < 1 || l > n) throw PlanError("l must lie in [1, n]");
  std::vector<BlockPair> anchors;
  std::istringstream in(pattern.substr(prefix.size()));
  for (std::string item; std::getline(in, item, ',');) {
    const auto dash = item.find('-');
    int a = 0, b = 0;
    try {
      if (dash == std::string::npos) throw std::invalid_argument("missing '-'");
      std::size_t pa = 0, pb = 0;
      a = std::stoi(item.substr(0, dash), &pa);
      b = std::stoi(item.substr(dash + 1), &pb);
      if (pa != dash || pb != item.size() - dash - 1) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw PlanError("malformed anchor '" + item + "' in plan pattern (expected l-m, 1-based)");
    }
    if (a < 1 || a > l || b < 1 || b > l) {
      throw PlanError("anchor '" + item + "' names a group outside [1, " + std::to_string(l) + "]");
    }
    anchors.push_back({a - 1, b - 1});
  }
  return chain_plan_from_pairs(Partition::contiguous(n, l), std::move(anchors));
}

}  // namespace bequec
