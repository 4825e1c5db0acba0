#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an OpenMP
// variant with identical signatures; the two must agree bit for bit.

#include "bequec/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace bequec::kernels {

struct SimplexLsOptions {
  int max_iterations = 2000;
  double tolerance = 1e-10;  // stop when the iterate moves less than this (l2)
};

struct SimplexLsResult {
  Matrix solutions;                 // K x N, columns on the simplex
  std::vector<Index> unconverged;  // columns that hit max_iterations
};

struct ProbabilityScan {
  double rho = 0.0;            // max_{i != j} m_i^T B m_j
  double max_expected_degree = 0.0;
};

namespace serial {

/// A(i,j) = [u(i,j) < prob(i,j)] with u addressed by the global pair {row_ids[i], col_ids[j]}.
/// same_group: only i < j is drawn and mirrored; the diagonal is zero.
Matrix bernoulli_block(const Matrix& prob, std::span<const Index> row_ids,
                       std::span<const Index> col_ids, bool same_group, std::uint64_t seed);

/// Flips entries of a binary block with probability `rate`; one coin per
/// unordered pair for same-group blocks, diagonal untouched.
void flip_block(Matrix& entries, bool same_group, double rate, std::uint64_t seed);

/// Per column n: argmin_{m in simplex} 0.5 ||targets(:,n) - gt * m||^2 by accelerated
/// projected gradient with step 1/sigma_max(gt)^2.
SimplexLsResult simplex_ls_columns(const Matrix& targets, const Matrix& gt,
                                   const SimplexLsOptions& options = {});

/// Squared row norms of u; returns the first index attaining the maximum.
Index argmax_row_norm(const Matrix& u, Vector& norms);

/// Dense scan of P = M^T B M without materializing P.
ProbabilityScan scan_probabilities(const Matrix& m, const Matrix& b);

}  // namespace serial

namespace parallel {

Matrix bernoulli_block(const Matrix& prob, std::span<const Index> row_ids,
                       std::span<const Index> col_ids, bool same_group, std::uint64_t seed);
void flip_block(Matrix& entries, bool same_group, double rate, std::uint64_t seed);
SimplexLsResult simplex_ls_columns(const Matrix& targets, const Matrix& gt,
                                   const SimplexLsOptions& options = {});
Index argmax_row_norm(const Matrix& u, Vector& norms);
ProbabilityScan scan_probabilities(const Matrix& m, const Matrix& b);

}  // namespace parallel

/// Euclidean projection onto {x >= 0, sum x = 1} (sort and threshold).
Vector simplex_project(const Eigen::Ref<const Vector>& v);

}  // namespace bequec::kernels
