#include "bequec/linalg.hpp"

#include "bequec/errors.hpp"
#include "bequec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace bequec {
namespace {

constexpr Index kDenseCutoff = 256;
constexpr int kOversample = 10;
constexpr int kMaxIterations = 300;
constexpr double kResidualTol = 1e-10;
constexpr std::uint64_t kStartSeed = 0x5eed5eedULL;

void normalize_signs(TruncatedSvd& s) {
  for (Index c = 0; c < s.u.cols(); ++c) {
    Index arg = 0;
    s.u.col(c).cwiseAbs().maxCoeff(&arg);
    if (s.u(arg, c) < 0.0) {
      s.u.col(c) *= -1.0;
      s.v.col(c) *= -1.0;
    }
  }
}

Matrix orth(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

TruncatedSvd dense_svd(const Matrix& a, int k) {
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU().leftCols(k), svd.singularValues().head(k), svd.matrixV().leftCols(k)};
}

// Block subspace iteration with Rayleigh-Ritz extraction, run until every
// wanted triplet satisfies ||A v - sigma u|| <= tol * sigma_1.
bool subspace_svd(const Matrix& a, int k, TruncatedSvd& out) {
  const Index p = std::min<Index>(k + kOversample, std::min(a.rows(), a.cols()));
  rng::Engine engine(kStartSeed);
  std::normal_distribution<double> normal;
  Matrix start(a.cols(), p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < a.cols(); ++i) start(i, j) = normal(engine);

  Matrix q = orth(a * start);
  for (int it = 0; it < kMaxIterations; ++it) {
    const Matrix bt = a.transpose() * q;  // cols x p, A^T Q = W S X^T
    Eigen::JacobiSVD<Matrix> small(bt, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Matrix& w = small.matrixU();
    const Vector& s = small.singularValues();
    const Matrix aw = a * w;
    const Matrix u = q * small.matrixV();
    const double scale = std::max(s[0], std::numeric_limits<double>::min());
    double worst = 0.0;
    for (int c = 0; c < k; ++c) worst = std::max(worst, (aw.col(c) - s[c] * u.col(c)).norm());
    if (worst <= kResidualTol * scale) {
      out = {u.leftCols(k), s.head(k), w.leftCols(k)};
      return true;
    }
    q = orth(aw);
  }
  return false;
}

}  // namespace

TruncatedSvd truncated_svd_k(const Matrix& a, int k, SvdMethod method) {
  if (k < 1 || k > std::min(a.rows(), a.cols())) {
    throw DimensionError("truncated SVD: k = " + std::to_string(k) + " exceeds the dimensions " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  if (method == SvdMethod::automatic) {
    method = std::min(a.rows(), a.cols()) <= kDenseCutoff ? SvdMethod::dense
                                                           : SvdMethod::subspace_iteration;
  }
  TruncatedSvd result;
  if (method == SvdMethod::dense || !subspace_svd(a, k, result)) result = dense_svd(a, k);
  normalize_signs(result);
  return result;
}

Matrix pseudo_inverse(const Matrix& a, double rel_tol) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = s.size() ? rel_tol * s[0] : 0.0;
  Vector inv = Vector::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i)
    if (s[i] > cutoff) inv[i] = 1.0 / s[i];
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix orthonormal_basis(const Matrix& a) {
  if (a.cols() > a.rows()) throw RankError("more columns than rows; range cannot be full rank");
  Eigen::HouseholderQR<Matrix> qr(a);
  const Matrix r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
  const Vector s = Eigen::JacobiSVD<Matrix>(r).singularValues();
  if (s.size() == 0 || !(s[s.size() - 1] > 1e-12 * s[0])) {
    throw RankError("matrix is rank deficient (sigma_min/sigma_max <= 1e-12)");
  }
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(a).singularValues()[0];
}

double condition_number(const Matrix& a) {
  const Vector s = Eigen::JacobiSVD<Matrix>(a).singularValues();
  if (s.size() == 0) return std::numeric_limits<double>::infinity();
  const double smin = s[s.size() - 1];
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return s[0] / smin;
}

}  // namespace bequec
