#pragma once

#include "bequec/block_set.hpp"
#include "bequec/linalg.hpp"
#include "bequec/query_plan.hpp"
#include "bequec/types.hpp"

#include <vector>

namespace bequec {

/// Estimated basis of range(M^T): one |S_l| x K slab per group, and the N x K
/// stack with row i holding node i.
struct SubspaceEstimate {
  std::vector<Matrix> slabs;
  Matrix assembled;
};

/// sigma_K(C) < kRankTolerance * sigma_1(C) marks a stacked pair as degenerate.
inline constexpr double kRankTolerance = 1e-10;

/// Transfers the basis of block `lower`'s row group into the frame of u_ref.
///
/// C = [lower; upper] (both share the column group), top-k SVD of C split into
/// (Ubar_l, Ubar_l'), result Ubar_l * pinv(Ubar_l') * u_ref where u_ref spans
/// the rows of `upper`'s group.
Matrix pair_stitch(const AdjacencyBlock& lower, const AdjacencyBlock& upper, const Matrix& u_ref,
                   int k, SvdMethod method = SvdMethod::automatic);

/// Range estimation by seeding at the middle pair T = floor(L/2) and stitching
/// forward to l_L and backward to l_1.
SubspaceEstimate estimate_range(const BlockSet& blocks, const QueryPlan& plan, int k,
                                SvdMethod method = SvdMethod::automatic);

}  // namespace bequec
