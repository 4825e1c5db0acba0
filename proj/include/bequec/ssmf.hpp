#pragma once

#include "bequec/kernels.hpp"
#include "bequec/types.hpp"

#include <vector>

namespace bequec {

struct AnchorSet {
  std::vector<Index> indices;  // selection order
  Matrix g_hat;                // K x K, row k = u_hat(indices[k], :)
};

/// Successive projection: pick the largest remaining row, project every row onto
/// its orthogonal complement, repeat k times. Ties go to the lowest index.
AnchorSet spa(const Matrix& u_hat, int k);

/// M_hat = G^{-T} U^T, no constraints.
Matrix membership_direct(const Matrix& u_hat, const Matrix& g_hat);

struct ConstrainedMembership {
  Matrix m_hat;                    // K x N, columns on the simplex
  std::vector<Index> unconverged;  // flagged columns (best iterate kept)
};

/// Per node: min ||u_hat(n,:)^T - g_hat^T m||^2 s.t. m >= 0, 1^T m = 1.
ConstrainedMembership membership_constrained(const Matrix& u_hat, const Matrix& g_hat,
                                             const kernels::SimplexLsOptions& options = {});

inline Vector simplex_project(const Eigen::Ref<const Vector>& v) {
  return kernels::simplex_project(v);
}

}  // namespace bequec
