#pragma once

#include "bequec/data_io.hpp"
#include "bequec/graph_model.hpp"
#include "bequec/query_plan.hpp"
#include "bequec/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bequec {

enum class ObservationMode { ideal, binary };
enum class Extraction { direct, constrained };
enum class MembershipModel { dirichlet, hard };

struct ExperimentConfig {
  Index n = 2000;
  int k = 5;
  int l = 10;
  std::vector<double> nu;  // empty: 1/K for every cluster
  double eta = 0.1;
  int trials = 20;
  std::uint64_t seed = 1;
  ObservationMode mode = ObservationMode::binary;
  std::string plan = "diagonal";  // "diagonal" or a plan JSON path
  Extraction extraction = Extraction::constrained;
  MembershipModel membership = MembershipModel::dirichlet;
  double b_diag_min = 0.8;

  std::vector<double> effective_nu() const;
  /// Throws ParameterError / PlanError.
  void validate() const;
};

std::string config_to_json(const ExperimentConfig& config);
/// Fields present in `text` override `base`.
ExperimentConfig config_from_json(const std::string& text, ExperimentConfig base = {});

ObservationMode parse_mode(const std::string& s);
Extraction parse_extraction(const std::string& s);
MembershipModel parse_membership(const std::string& s);

struct Aggregate {
  std::string metric;
  double mean = 0.0;
  double stddev = 0.0;
  int count = 0;
};

struct TrialFailure {
  int trial = 0;
  std::string message;
};

struct RunResult {
  std::vector<ResultRecord> records;
  std::vector<TrialFailure> failures;
  std::vector<Aggregate> aggregates;
  int trials_requested = 0;

  bool all_ok() const { return failures.empty(); }
  std::optional<Aggregate> aggregate(const std::string& metric) const;
};

/// Per-(trial, metric) mean and sample standard deviation, in first-seen metric order.
std::vector<Aggregate> aggregate_records(const std::vector<ResultRecord>& records);

/// Seed of trial t, independent of how trials are scheduled.
std::uint64_t trial_seed(std::uint64_t seed, int trial);

/// Synthetic experiment: sample M and B, observe blocks, run the pipeline, score.
RunResult run_synth(const ExperimentConfig& config);

/// Same as run_synth in binary mode with annotation flips at each rate. Metric
/// names carry the rate, e.g. "ACC@0.15".
RunResult run_error_sweep(const ExperimentConfig& config, std::span<const double> rates);

struct ClusterOptions {
  std::string graph_path;
  std::string plan = "diagonal";  // "diagonal" or a plan JSON path
  int l = 10;
  int k = 0;
  Extraction extraction = Extraction::constrained;
  std::optional<std::string> truth_path;
  std::optional<std::uint64_t> shuffle_seed;  // randomize node order for the diagonal plan
};

struct ClusterResult {
  Matrix m_hat;  // K x N
  std::vector<int> labels;
  std::map<std::string, double> metrics;  // empty without ground truth
  double runtime_s = 0.0;
  double queried_fraction = 0.0;
};

ClusterResult run_cluster(const ClusterOptions& options);

struct GRow {
  std::vector<double> nu;
  double value = 0.0;
};

std::vector<GRow> g_table(double eps, const std::vector<std::vector<double>>& nus);

/// Builds a plan from a pattern spec: "diagonal" or "chain:l1-m1,l2-m2,..." (1-based).
QueryPlan plan_from_pattern(Index n, int l, const std::string& pattern);

}  // namespace bequec
