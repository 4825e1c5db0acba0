#include "bequec/stitching.hpp"

#include "bequec/errors.hpp"

#include <string>

namespace bequec {
namespace {

std::string name(const AdjacencyBlock& b) {
  return "(" + std::to_string(b.row_group + 1) + "," + std::to_string(b.col_group + 1) + ")";
}

Matrix stack_rows(const Matrix& top, const Matrix& bottom) {
  Matrix c(top.rows() + bottom.rows(), top.cols());
  c << top, bottom;
  return c;
}

TruncatedSvd checked_svd(const AdjacencyBlock& top, const AdjacencyBlock& bottom, int k,
                         SvdMethod method) {
  if (top.entries.cols() != bottom.entries.cols()) {
    throw DimensionError("blocks " + name(top) + " and " + name(bottom) +
                         " do not share a column group");
  }
  auto svd = truncated_svd_k(stack_rows(top.entries, bottom.entries), k, method);
  const double s1 = svd.sigma[0];
  const double sk = svd.sigma[k - 1];
  if (!(s1 > 0.0) || sk < kRankTolerance * s1) {
    throw DegenerateBlockError("stacked blocks " + name(top) + "/" + name(bottom) +
                               " have numerical rank below K = " + std::to_string(k) +
                               " (sigma_K/sigma_1 = " + std::to_string(s1 > 0 ? sk / s1 : 0.0) +
                               ")");
  }
  return svd;
}

}  // namespace

Matrix pair_stitch(const AdjacencyBlock& lower, const AdjacencyBlock& upper, const Matrix& u_ref,
                   int k, SvdMethod method) {
  if (lower.col_group != upper.col_group) {
    throw DimensionError("pair_stitch: blocks " + name(lower) + " and " + name(upper) +
                         " must share the column group");
  }
  if (u_ref.rows() != upper.entries.rows()) {
    throw DimensionError("pair_stitch: reference basis has " + std::to_string(u_ref.rows()) +
                         " rows, block " + name(upper) + " has " +
                         std::to_string(upper.entries.rows()));
  }
  const auto svd = checked_svd(lower, upper, k, method);
  const Index n_lower = lower.entries.rows();
  const Matrix ubar_lower = svd.u.topRows(n_lower);
  const Matrix ubar_upper = svd.u.bottomRows(upper.entries.rows());
  return ubar_lower * (pseudo_inverse(ubar_upper) * u_ref);
}

SubspaceEstimate estimate_range(const BlockSet& blocks, const QueryPlan& plan, int k,
                                SvdMethod method) {
  const auto report = validate_plan(plan, k);
  if (!report.ok()) throw PlanError("query plan rejected: " + report.summary());

  const int l = plan.num_groups();
  const auto& anchors = plan.anchors();
  auto group_of = [&](int r) { return anchors[static_cast<std::size_t>(r)].row; };
  auto column_of = [&](int r) { return anchors[static_cast<std::size_t>(r)].col; };

  std::vector<Matrix> slabs(static_cast<std::size_t>(l));
  auto slab = [&](int group) -> Matrix& { return slabs[static_cast<std::size_t>(group)]; };

  // Seed pair r = T (1-based T = floor(L/2), 0-based t = T - 1).
  const int t = l / 2 - 1;
  {
    const auto top = blocks.get(group_of(t), column_of(t));
    const auto bottom = blocks.get(group_of(t + 1), column_of(t));
    const auto svd = checked_svd(top, bottom, k, method);
    slab(group_of(t)) = svd.u.topRows(top.entries.rows());
    slab(group_of(t + 1)) = svd.u.bottomRows(bottom.entries.rows());
  }

  // Forward: U_{l_{r+1}} from blocks (l_{r+1}, m_r), (l_r, m_r) and U_{l_r}.
  for (int r = t + 1; r <= l - 2; ++r) {
    slab(group_of(r + 1)) = pair_stitch(blocks.get(group_of(r + 1), column_of(r)),
                                        blocks.get(group_of(r), column_of(r)), slab(group_of(r)),
                                        k, method);
  }
  // Backward: U_{l_{r-1}} from blocks (l_{r-1}, m_{r-1}), (l_r, m_{r-1}) and U_{l_r}.
  for (int r = t; r >= 1; --r) {
    slab(group_of(r - 1)) = pair_stitch(blocks.get(group_of(r - 1), column_of(r - 1)),
                                        blocks.get(group_of(r), column_of(r - 1)),
                                        slab(group_of(r)), k, method);
  }

  SubspaceEstimate est;
  est.assembled.resize(plan.num_nodes(), k);
  for (int g = 0; g < l; ++g) {
    const auto& members = plan.partition().group(g);
    const Matrix& s = slab(g);
    for (std::size_t i = 0; i < members.size(); ++i) est.assembled.row(members[i]) = s.row(static_cast<Index>(i));
  }
  est.slabs = std::move(slabs);
  return est;
}

}  // namespace bequec
