#include "bequec/block_set.hpp"

#include "bequec/errors.hpp"

#include <string>

namespace bequec {

bool AdjacencyBlock::is_binary() const {
  return entries.unaryExpr([](double v) { return (v == 0.0 || v == 1.0) ? 0.0 : 1.0; }).sum() == 0.0;
}

AdjacencyBlock AdjacencyBlock::transposed() const {
  return {col_group, row_group, entries.transpose()};
}

void BlockSet::insert(AdjacencyBlock block) {
  if (block.same_group() && block.entries.rows() != block.entries.cols()) {
    throw DimensionError("same-group block (" + std::to_string(block.row_group + 1) +
                         "," + std::to_string(block.col_group + 1) + ") is not square");
  }
  if (block.row_group > block.col_group) block = block.transposed();
  const BlockPair key{block.row_group, block.col_group};
  blocks_.insert_or_assign(key, std::move(block));
}

bool BlockSet::contains(int row_group, int col_group) const {
  return blocks_.contains({std::min(row_group, col_group), std::max(row_group, col_group)});
}

AdjacencyBlock BlockSet::get(int row_group, int col_group) const {
  const auto it = blocks_.find({std::min(row_group, col_group), std::max(row_group, col_group)});
  if (it == blocks_.end()) {
    throw PlanError("block (" + std::to_string(row_group + 1) + "," +
                    std::to_string(col_group + 1) + ") was not queried");
  }
  if (it->second.row_group == row_group) return it->second;
  return it->second.transposed();
}

}  // namespace bequec
