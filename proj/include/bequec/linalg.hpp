#pragma once

#include "bequec/types.hpp"

namespace bequec {

struct TruncatedSvd {
  Matrix u;      // rows x k, orthonormal columns
  Vector sigma;  // k, nonincreasing
  Matrix v;      // cols x k
};

enum class SvdMethod {
  automatic,  // dense for small inputs, subspace iteration otherwise
  dense,
  subspace_iteration,
};

/// Top-k singular triplets. Each left singular vector is sign-normalized so its
/// largest-magnitude entry is positive.
TruncatedSvd truncated_svd_k(const Matrix& a, int k, SvdMethod method = SvdMethod::automatic);

/// Thin-SVD pseudo-inverse; singular values below rel_tol * sigma_1 are dropped.
Matrix pseudo_inverse(const Matrix& a, double rel_tol = 1e-12);

/// Orthonormal basis of range(a); throws RankError when rank(a) < cols.
Matrix orthonormal_basis(const Matrix& a);

double spectral_norm(const Matrix& a);

/// sigma_max / sigma_min over the min(rows, cols) singular values; +inf when singular.
double condition_number(const Matrix& a);

}  // namespace bequec
