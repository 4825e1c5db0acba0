#pragma once

#include "bequec/types.hpp"

#include <span>
#include <vector>

namespace bequec {

struct AlignmentResult {
  std::vector<int> permutation;  // row i assigned to column permutation[i]
  double cost = 0.0;
};

/// Minimum-cost assignment on a square cost matrix (O(K^3)).
AlignmentResult hungarian(const Matrix& cost);

/// ||(I - P_M) Q_U||_2 with P_M the projector onto range(M^T), Q_U an orthonormal basis of range(u_hat).
double subspace_distance(const Matrix& u_hat, const Matrix& m);

/// Cost matrix C(i,j) = || M(i,:)/||M(i,:)|| - M_hat(j,:)/||M_hat(j,:)|| ||^2.
Matrix normalized_row_cost(const Matrix& m_hat, const Matrix& m);

double mse(const Matrix& m_hat, const Matrix& m);
double relative_error(const Matrix& m_hat, const Matrix& m);

/// Spearman correlation with average ranks for ties; 0 when either side is constant.
double spearman(std::span<const double> a, std::span<const double> b);

/// Mean row-wise Spearman correlation after MSE-optimal row alignment.
double spearman_src(const Matrix& m_hat, const Matrix& m);

/// Column argmax, 0-based, ties to the lowest index.
std::vector<int> round_to_labels(const Matrix& m_hat);

/// Best-permutation accuracy in percent; labels are 0-based and may use different alphabets.
double clustering_accuracy(std::span<const int> labels_hat, std::span<const int> labels);

/// I(X;Y) / sqrt(H(X) H(Y)); 0 when either entropy vanishes.
double nmi(std::span<const int> labels_hat, std::span<const int> labels);

}  // namespace bequec
