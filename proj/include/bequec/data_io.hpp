#pragma once

#include "bequec/block_set.hpp"
#include "bequec/query_plan.hpp"
#include "bequec/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bequec {

/// Undirected simple graph, 0-based, pairs stored with first < second, sorted.
class EdgeList {
 public:
  EdgeList(Index n, std::vector<std::pair<Index, Index>> edges);

  Index n() const { return n_; }
  const std::vector<std::pair<Index, Index>>& edges() const { return edges_; }
  bool has_edge(Index i, Index j) const;

 private:
  Index n_;
  std::vector<std::pair<Index, Index>> edges_;
  std::vector<std::vector<Index>> neighbors_;
};

/// Edge lookups with a query counter, standing in for an annotator or survey.
class EdgeOracle {
 public:
  explicit EdgeOracle(const EdgeList& graph) : graph_(graph) {}
  bool query(Index i, Index j) {
    ++queries_;
    return graph_.has_edge(i, j);
  }
  std::uint64_t queries() const { return queries_; }

 private:
  const EdgeList& graph_;
  std::uint64_t queries_ = 0;
};

struct GroundTruth {
  std::optional<Matrix> memberships;     // K x N soft truth
  std::optional<std::vector<int>> labels;  // 0-based hard truth
  int k = 0;
  bool renormalized = false;  // some row sum was off by more than 1e-6
};

EdgeList load_edge_list(const std::string& path);
void save_edge_list(const EdgeList& graph, const std::string& path);

/// CSV with one row per node: K nonnegative columns (soft) or one integer label in [1..K].
GroundTruth load_ground_truth(const std::string& path);

/// Writes M_hat as CSV, one row per node.
void save_membership_csv(const Matrix& m_hat, const std::string& path);

/// Dense 0/1 blocks for the plan's queried pairs; only covered pairs are queried.
BlockSet extract_blocks(EdgeOracle& oracle, const QueryPlan& plan);
BlockSet extract_blocks(const EdgeList& graph, const QueryPlan& plan);

BlockSet inject_annotation_errors(const BlockSet& blocks, double rate, std::uint64_t seed);

struct ResultRecord {
  std::uint64_t seed = 0;
  Index n = 0;
  int k = 0;
  int l = 0;
  double eta = 0.0;
  std::vector<double> nu;
  std::string metric;
  double value = 0.0;
  double runtime_s = 0.0;

  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

enum class ResultFormat { csv, json };

ResultFormat parse_result_format(const std::string& name);

/// Header comment (CSV) or "config" member (JSON) carries `config_json` when nonempty.
void write_results(const std::vector<ResultRecord>& records, const std::string& path,
                   ResultFormat format, const std::string& config_json = {});
std::string format_results(const std::vector<ResultRecord>& records, ResultFormat format,
                           const std::string& config_json = {});
std::vector<ResultRecord> read_results(const std::string& path, ResultFormat format);

}  // namespace bequec
