#pragma once

#include "bequec/query_plan.hpp"
#include "bequec/types.hpp"

#include <map>

namespace bequec {

/// One observed block A(S_row_group, S_col_group).
struct AdjacencyBlock {
  int row_group = 0;
  int col_group = 0;
  Matrix entries;

  bool same_group() const { return row_group == col_group; }
  bool is_binary() const;
  AdjacencyBlock transposed() const;
};

/// Blocks keyed by unordered group pair. A block inserted as (l,m) with l > m is
/// stored transposed, so each unordered pair has a single source of truth.
class BlockSet {
 public:
  void insert(AdjacencyBlock block);
  bool contains(int row_group, int col_group) const;

  /// Block oriented as (row_group, col_group); transposes the stored copy if needed.
  AdjacencyBlock get(int row_group, int col_group) const;

  std::size_t size() const { return blocks_.size(); }
  auto begin() const { return blocks_.begin(); }
  auto end() const { return blocks_.end(); }
  auto begin() { return blocks_.begin(); }
  auto end() { return blocks_.end(); }

 private:
  std::map<BlockPair, AdjacencyBlock> blocks_;
};

}  // namespace bequec
