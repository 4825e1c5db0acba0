#pragma once

#include "bequec/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bequec {

/// Ordered pair of group ids (0-based) naming one block A(S_row, S_col).
struct BlockPair {
  int row = 0;
  int col = 0;
  friend bool operator==(const BlockPair&, const BlockPair&) = default;
  friend auto operator<=>(const BlockPair&, const BlockPair&) = default;
};

/// Node partition into L disjoint, nonempty groups.
class Partition {
 public:
  Partition() = default;

  /// `assignment[i]` is the 0-based group of node i.
  Partition(std::vector<int> assignment, int num_groups);

  /// Contiguous groups of near-equal size; the first (n mod l) groups get one extra node.
  /// When `node_order` is given, position p of the contiguous layout holds node node_order[p].
  static Partition contiguous(Index n, int l, std::span<const Index> node_order = {});

  int num_groups() const { return static_cast<int>(groups_.size()); }
  Index num_nodes() const { return static_cast<Index>(assignment_.size()); }
  const std::vector<int>& assignment() const { return assignment_; }
  const std::vector<Index>& group(int g) const { return groups_.at(static_cast<std::size_t>(g)); }
  Index group_size(int g) const { return static_cast<Index>(group(g).size()); }

 private:
  std::vector<int> assignment_;
  std::vector<std::vector<Index>> groups_;
};

struct ValidationReport {
  bool coverage = true;    // {l_r} is a permutation of the groups
  bool chain = true;       // l_{r+1} != l_r and anchor count == L
  bool group_size = true;  // every |S_l| >= K
  std::vector<std::string> messages;

  bool ok() const { return coverage && chain && group_size; }
  std::string summary() const;
};

/// Block edge-query pattern: anchors (l_r, m_r), r = 1..L, and the implied
/// stitch blocks (l_{r+1}, m_r), r = 1..L-1.
class QueryPlan {
 public:
  QueryPlan(Partition partition, std::vector<BlockPair> anchors);

  const Partition& partition() const { return partition_; }
  int num_groups() const { return partition_.num_groups(); }
  Index num_nodes() const { return partition_.num_nodes(); }
  const std::vector<BlockPair>& anchors() const { return anchors_; }
  std::vector<BlockPair> stitches() const;

  /// Distinct queried blocks as unordered group pairs, stored with row <= col.
  std::vector<BlockPair> queried_blocks() const;

 private:
  Partition partition_;
  std::vector<BlockPair> anchors_;
};

/// Diagonal blocks plus the first superdiagonal: anchors (r,r), stitches (r+1,r).
QueryPlan diagonal_plan(Index n, int l, std::span<const Index> node_order = {});

/// Builds a plan from an explicit anchor chain; throws PlanError unless the
/// structural conditions (coverage, chain) hold.
QueryPlan chain_plan_from_pairs(Partition partition, std::vector<BlockPair> anchors);

ValidationReport validate_plan(const QueryPlan& plan, int k);

/// Number of distinct unordered node pairs covered by the queried blocks.
std::uint64_t queried_pair_count(const QueryPlan& plan);

/// queried_pair_count / (N(N-1)/2).
double queried_fraction(const QueryPlan& plan);

/// JSON text {"L":..,"assignment":[..],"anchors":[[l,m],..]} with 1-based group ids.
std::string plan_to_json(const QueryPlan& plan);
QueryPlan plan_from_json(const std::string& text);
void save_plan(const QueryPlan& plan, const std::string& path);
QueryPlan load_plan(const std::string& path);

}  // namespace bequec
