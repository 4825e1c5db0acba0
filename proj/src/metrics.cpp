#include "bequec/metrics.hpp"

#include "bequec/errors.hpp"
#include "bequec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace bequec {

AlignmentResult hungarian(const Matrix& cost) {
  if (cost.rows() != cost.cols()) throw DimensionError("hungarian: cost matrix must be square");
  const Index n = cost.rows();
  AlignmentResult result;
  if (n == 0) return result;

  // Shortest augmenting path with row/column potentials, 1-based internally.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0), v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<Index> match(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
  for (Index i = 1; i <= n; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Index i0 = match[static_cast<std::size_t>(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  result.permutation.assign(static_cast<std::size_t>(n), -1);
  for (Index j = 1; j <= n; ++j) {
    result.permutation[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1)] =
        static_cast<int>(j - 1);
  }
  for (Index i = 0; i < n; ++i) result.cost += cost(i, result.permutation[static_cast<std::size_t>(i)]);
  return result;
}

double subspace_distance(const Matrix& u_hat, const Matrix& m) {
  if (u_hat.rows() != m.cols()) {
    throw DimensionError("subspace_distance: u_hat has " + std::to_string(u_hat.rows()) +
                         " rows, M has " + std::to_string(m.cols()) + " columns");
  }
  const Matrix qu = orthonormal_basis(u_hat);
  const Matrix qm = orthonormal_basis(m.transpose());
  const Matrix residual = qu - qm * (qm.transpose() * qu);
  return std::clamp(spectral_norm(residual), 0.0, 1.0);
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shapes " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + " differ");
  }
}

Matrix normalize_rows(const Matrix& a, const char* which) {
  Matrix out = a;
  for (Index i = 0; i < a.rows(); ++i) {
    const double nrm = a.row(i).norm();
    if (!(nrm > 0.0)) {
      throw MetricError(std::string("MSE undefined: row ") + std::to_string(i + 1) + " of " + which +
                        " has zero norm");
    }
    out.row(i) /= nrm;
  }
  return out;
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

Matrix normalized_row_cost(const Matrix& m_hat, const Matrix& m) {
  require_same_shape(m_hat, m, "normalized_row_cost");
  const Matrix a = normalize_rows(m, "M");
  const Matrix b = normalize_rows(m_hat, "M_hat");
  Matrix cost(m.rows(), m.rows());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.rows(); ++j) cost(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  return cost;
}

double mse(const Matrix& m_hat, const Matrix& m) {
  const Matrix cost = normalized_row_cost(m_hat, m);
  return hungarian(cost).cost / static_cast<double>(m.rows());
}

double relative_error(const Matrix& m_hat, const Matrix& m) {
  require_same_shape(m_hat, m, "relative_error");
  Matrix cost(m.rows(), m.rows());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.rows(); ++j) cost(i, j) = (m.row(i) - m_hat.row(j)).squaredNorm();
  const double best = std::max(0.0, hungarian(cost).cost);
  return std::sqrt(best) / m.norm();
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("spearman: length mismatch");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double spearman_src(const Matrix& m_hat, const Matrix& m) {
  const auto align = hungarian(normalized_row_cost(m_hat, m));
  double total = 0.0;
  for (Index i = 0; i < m.rows(); ++i) {
    const Eigen::RowVectorXd truth = m.row(i);
    const Eigen::RowVectorXd est = m_hat.row(align.permutation[static_cast<std::size_t>(i)]);
    if (truth.maxCoeff() == truth.minCoeff() || est.maxCoeff() == est.minCoeff()) {
      warn("SRC: constant membership row " + std::to_string(i + 1) + " contributes 0");
      continue;
    }
    total += spearman({est.data(), static_cast<std::size_t>(est.size())},
                      {truth.data(), static_cast<std::size_t>(truth.size())});
  }
  return total / static_cast<double>(m.rows());
}

std::vector<int> round_to_labels(const Matrix& m_hat) {
  std::vector<int> labels(static_cast<std::size_t>(m_hat.cols()), 0);
  for (Index n = 0; n < m_hat.cols(); ++n) {
    Index best = 0;
    for (Index k = 1; k < m_hat.rows(); ++k)
      if (m_hat(k, n) > m_hat(best, n)) best = k;
    labels[static_cast<std::size_t>(n)] = static_cast<int>(best);
  }
  return labels;
}

namespace {

Matrix contingency(std::span<const int> a, std::span<const int> b, Index size) {
  Matrix table = Matrix::Zero(size, size);
  for (std::size_t i = 0; i < a.size(); ++i) table(a[i], b[i]) += 1.0;
  return table;
}

Index alphabet(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw DimensionError("label vectors differ in length");
  int top = -1;
  for (int x : a) {
    if (x < 0) throw ParameterError("labels must be nonnegative");
    top = std::max(top, x);
  }
  for (int x : b) {
    if (x < 0) throw ParameterError("labels must be nonnegative");
    top = std::max(top, x);
  }
  return top + 1;
}

}  // namespace

double clustering_accuracy(std::span<const int> labels_hat, std::span<const int> labels) {
  const Index size = alphabet(labels_hat, labels);
  if (labels.empty()) return 100.0;
  const Matrix table = contingency(labels_hat, labels, size);
  const Matrix cost = Matrix::Constant(size, size, table.maxCoeff()) - table;
  const auto assignment = hungarian(cost);
  double matched = 0.0;
  for (Index i = 0; i < size; ++i) matched += table(i, assignment.permutation[static_cast<std::size_t>(i)]);
  return 100.0 * matched / static_cast<double>(labels.size());
}

double nmi(std::span<const int> labels_hat, std::span<const int> labels) {
  const Index size = alphabet(labels_hat, labels);
  if (labels.empty()) return 0.0;
  const double n = static_cast<double>(labels.size());
  const Matrix p = contingency(labels_hat, labels, size) / n;
  const Vector pa = p.rowwise().sum();
  const Vector pb = p.colwise().sum().transpose();
  auto entropy = [](const Vector& q) {
    double h = 0.0;
    for (Index i = 0; i < q.size(); ++i)
      if (q[i] > 0.0) h -= q[i] * std::log(q[i]);
    return h;
  };
  const double ha = entropy(pa);
  const double hb = entropy(pb);
  if (!(ha > 0.0) || !(hb > 0.0)) return 0.0;
  double mi = 0.0;
  for (Index i = 0; i < size; ++i)
    for (Index j = 0; j < size; ++j)
      if (p(i, j) > 0.0) mi += p(i, j) * std::log(p(i, j) / (pa[i] * pb[j]));
  return std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0);
}

}  // namespace bequec
