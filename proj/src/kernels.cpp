#include "bequec/kernels.hpp"

#include "bequec/errors.hpp"
#include "bequec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace bequec::kernels {

Vector simplex_project(const Eigen::Ref<const Vector>& v) {
  const Index k = v.size();
  if (k == 0) return Vector();
  std::vector<double> u(v.data(), v.data() + k);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Index j = 0; j < k; ++j) {
    cumulative += u[static_cast<std::size_t>(j)];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<std::size_t>(j)] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

namespace {

void check_block_shape(const Matrix& prob, std::span<const Index> row_ids,
                       std::span<const Index> col_ids, bool same_group) {
  if (static_cast<Index>(row_ids.size()) != prob.rows() ||
      static_cast<Index>(col_ids.size()) != prob.cols()) {
    throw DimensionError("node id lists do not match the probability block shape");
  }
  if (same_group && prob.rows() != prob.cols()) {
    throw DimensionError("same-group block must be square");
  }
}

// Fills row i of a Bernoulli block. Same-group rows only draw j > i.
inline void bernoulli_row(Matrix& a, const Matrix& prob, std::span<const Index> row_ids,
                          std::span<const Index> col_ids, bool same_group, std::uint64_t seed,
                          Index i) {
  const auto gi = static_cast<std::uint64_t>(row_ids[static_cast<std::size_t>(i)]);
  const Index first = same_group ? i + 1 : 0;
  for (Index j = first; j < prob.cols(); ++j) {
    const auto gj = static_cast<std::uint64_t>(col_ids[static_cast<std::size_t>(j)]);
    a(i, j) = rng::pair_uniform(seed, gi, gj) < prob(i, j) ? 1.0 : 0.0;
  }
}

inline void mirror_upper(Matrix& a) {
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = j + 1; i < a.rows(); ++i) a(i, j) = a(j, i);
}

inline void flip_row(Matrix& a, bool same_group, double rate, std::uint64_t seed, Index i) {
  const Index first = same_group ? i + 1 : 0;
  for (Index j = first; j < a.cols(); ++j) {
    if (rng::uniform_at(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)) < rate) {
      a(i, j) = 1.0 - a(i, j);
    }
  }
}

struct ColumnProblem {
  Matrix h;      // gt^T gt
  Matrix gt_t;   // gt^T
  double step;   // 1 / sigma_max(gt)^2
  Eigen::ColPivHouseholderQR<Matrix> qr;
};

ColumnProblem prepare(const Matrix& targets, const Matrix& gt) {
  if (gt.rows() != targets.rows()) {
    throw DimensionError("targets have " + std::to_string(targets.rows()) +
                         " rows but the basis has " + std::to_string(gt.rows()));
  }
  ColumnProblem p{gt.transpose() * gt, gt.transpose(), 0.0, Eigen::ColPivHouseholderQR<Matrix>(gt)};
  const double lmax = Eigen::SelfAdjointEigenSolver<Matrix>(p.h, Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .maxCoeff();
  if (!(lmax > 0.0)) throw RankError("simplex least squares: basis is zero");
  p.step = 1.0 / lmax;
  return p;
}

// Accelerated projected gradient with adaptive restart; keeps the best objective seen.
bool solve_column(const ColumnProblem& p, const Eigen::Ref<const Vector>& target,
                  const SimplexLsOptions& options, Eigen::Ref<Vector> out) {
  const Vector c = p.gt_t * target;
  auto objective = [&](const Vector& x) { return 0.5 * x.dot(p.h * x) - c.dot(x); };

  Vector x = simplex_project(p.qr.solve(target));
  if (!x.allFinite()) x = Vector::Constant(c.size(), 1.0 / static_cast<double>(c.size()));
  Vector y = x;
  Vector best = x;
  double best_obj = objective(x);
  double prev_obj = best_obj;
  double t = 1.0;
  bool converged = false;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Vector x_next = simplex_project(y - p.step * (p.h * y - c));
    const double obj = objective(x_next);
    if (obj < best_obj) {
      best_obj = obj;
      best = x_next;
    }
    const double moved = (x_next - x).norm();
    if (obj > prev_obj) {
      t = 1.0;
      y = x_next;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = x_next + ((t - 1.0) / t_next) * (x_next - x);
      t = t_next;
    }
    x = x_next;
    prev_obj = obj;
    if (moved < options.tolerance) {
      converged = true;
      break;
    }
  }
  out = best;
  return converged;
}

}  // namespace

namespace serial {

Matrix bernoulli_block(const Matrix& prob, std::span<const Index> row_ids,
                       std::span<const Index> col_ids, bool same_group, std::uint64_t seed) {
  check_block_shape(prob, row_ids, col_ids, same_group);
  Matrix a = Matrix::Zero(prob.rows(), prob.cols());
  for (Index i = 0; i < prob.rows(); ++i) bernoulli_row(a, prob, row_ids, col_ids, same_group, seed, i);
  if (same_group) mirror_upper(a);
  return a;
}

void flip_block(Matrix& entries, bool same_group, double rate, std::uint64_t seed) {
  for (Index i = 0; i < entries.rows(); ++i) flip_row(entries, same_group, rate, seed, i);
  if (same_group) mirror_upper(entries);
}

SimplexLsResult simplex_ls_columns(const Matrix& targets, const Matrix& gt,
                                   const SimplexLsOptions& options) {
  const ColumnProblem p = prepare(targets, gt);
  SimplexLsResult result{Matrix(gt.cols(), targets.cols()), {}};
  for (Index n = 0; n < targets.cols(); ++n) {
    Vector col(gt.cols());
    if (!solve_column(p, targets.col(n), options, col)) result.unconverged.push_back(n);
    result.solutions.col(n) = col;
  }
  return result;
}

Index argmax_row_norm(const Matrix& u, Vector& norms) {
  norms = u.rowwise().squaredNorm();
  Index best = 0;
  for (Index i = 1; i < norms.size(); ++i)
    if (norms[i] > norms[best]) best = i;
  return best;
}

ProbabilityScan scan_probabilities(const Matrix& m, const Matrix& b) {
  const Matrix w = b * m;
  ProbabilityScan scan;
  for (Index i = 0; i < m.cols(); ++i) {
    const Eigen::RowVectorXd row = m.col(i).transpose() * w;
    double degree = 0.0;
    for (Index j = 0; j < m.cols(); ++j) {
      if (j == i) continue;
      degree += row[j];
      scan.rho = std::max(scan.rho, row[j]);
    }
    scan.max_expected_degree = std::max(scan.max_expected_degree, degree);
  }
  return scan;
}

}  // namespace serial

namespace parallel {

Matrix bernoulli_block(const Matrix& prob, std::span<const Index> row_ids,
                       std::span<const Index> col_ids, bool same_group, std::uint64_t seed) {
  check_block_shape(prob, row_ids, col_ids, same_group);
  Matrix a = Matrix::Zero(prob.rows(), prob.cols());
#pragma omp parallel for schedule(dynamic, 16)
  for (Index i = 0; i < prob.rows(); ++i) bernoulli_row(a, prob, row_ids, col_ids, same_group, seed, i);
  if (same_group) mirror_upper(a);
  return a;
}

void flip_block(Matrix& entries, bool same_group, double rate, std::uint64_t seed) {
#pragma omp parallel for schedule(dynamic, 16)
  for (Index i = 0; i < entries.rows(); ++i) flip_row(entries, same_group, rate, seed, i);
  if (same_group) mirror_upper(entries);
}

SimplexLsResult simplex_ls_columns(const Matrix& targets, const Matrix& gt,
                                   const SimplexLsOptions& options) {
  const ColumnProblem p = prepare(targets, gt);
  SimplexLsResult result{Matrix(gt.cols(), targets.cols()), {}};
  std::vector<char> converged(static_cast<std::size_t>(targets.cols()), 1);
#pragma omp parallel for schedule(dynamic, 64)
  for (Index n = 0; n < targets.cols(); ++n) {
    Vector col(gt.cols());
    converged[static_cast<std::size_t>(n)] = solve_column(p, targets.col(n), options, col);
    result.solutions.col(n) = col;
  }
  for (Index n = 0; n < targets.cols(); ++n)
    if (!converged[static_cast<std::size_t>(n)]) result.unconverged.push_back(n);
  return result;
}

Index argmax_row_norm(const Matrix& u, Vector& norms) {
  norms.resize(u.rows());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < u.rows(); ++i) norms[i] = u.row(i).squaredNorm();
  Index best = 0;
  for (Index i = 1; i < norms.size(); ++i)
    if (norms[i] > norms[best]) best = i;
  return best;
}

ProbabilityScan scan_probabilities(const Matrix& m, const Matrix& b) {
  const Matrix w = b * m;
  const Index n = m.cols();
  Vector row_max = Vector::Zero(n);
  Vector degree = Vector::Zero(n);
#pragma omp parallel for schedule(dynamic, 32)
  for (Index i = 0; i < n; ++i) {
    const Eigen::RowVectorXd row = m.col(i).transpose() * w;
    double d = 0.0;
    double mx = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      d += row[j];
      mx = std::max(mx, row[j]);
    }
    row_max[i] = mx;
    degree[i] = d;
  }
  ProbabilityScan scan;
  if (n > 0) {
    scan.rho = row_max.maxCoeff();
    scan.max_expected_degree = degree.maxCoeff();
  }
  return scan;
}

}  // namespace parallel

}  // namespace bequec::kernels
