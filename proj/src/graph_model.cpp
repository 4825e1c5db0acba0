#include "bequec/graph_model.hpp"

#include "bequec/errors.hpp"
#include "bequec/kernels.hpp"
#include "bequec/linalg.hpp"
#include "bequec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace bequec {

void DirichletParams::validate() const {
  if (nu.empty()) throw ParameterError("Dirichlet parameter vector is empty");
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (!(nu[i] > 0.0) || !std::isfinite(nu[i])) {
      throw ParameterError("Dirichlet parameter nu[" + std::to_string(i) +
                           "] = " + std::to_string(nu[i]) + " must be positive");
    }
  }
}

MembershipMatrix::MembershipMatrix(Matrix entries) : m_(std::move(entries)) {
  if (m_.rows() < 1) throw DimensionError("membership matrix needs K >= 1 rows");
  if ((m_.array() < 0.0).any()) throw ParameterError("membership matrix has a negative entry");
  for (Index i = 0; i < m_.cols(); ++i) {
    const double s = m_.col(i).sum();
    if (std::abs(s - 1.0) > kColumnSumTol) {
      throw ParameterError("membership column " + std::to_string(i) + " sums to " +
                           std::to_string(s));
    }
  }
}

MembershipMatrix MembershipMatrix::from_labels(std::span<const int> labels, int k) {
  Matrix m = Matrix::Zero(k, static_cast<Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k) {
      throw ParameterError("label " + std::to_string(labels[i] + 1) + " of node " +
                           std::to_string(i) + " outside [1.." + std::to_string(k) + "]");
    }
    m(labels[i], static_cast<Index>(i)) = 1.0;
  }
  return MembershipMatrix(std::move(m));
}

Matrix MembershipMatrix::columns(std::span<const Index> nodes) const {
  Matrix out(m_.rows(), static_cast<Index>(nodes.size()));
  for (std::size_t j = 0; j < nodes.size(); ++j) out.col(static_cast<Index>(j)) = m_.col(nodes[j]);
  return out;
}

InteractionMatrix::InteractionMatrix(Matrix entries) : b_(std::move(entries)) {
  if (b_.rows() != b_.cols() || b_.rows() < 1) throw DimensionError("B must be square and nonempty");
  if ((b_ - b_.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ParameterError("B is not symmetric");
  if ((b_.array() < 0.0).any() || (b_.array() > 1.0).any()) {
    throw ParameterError("B has an entry outside [0,1]");
  }
}

MembershipMatrix sample_dirichlet_memberships(const DirichletParams& params, Index n,
                                              std::uint64_t seed) {
  params.validate();
  if (n < 1) throw ParameterError("node count must be >= 1");
  const int k = params.k();
  rng::Engine engine(seed);
  std::vector<std::gamma_distribution<double>> gammas;
  for (double a : params.nu) gammas.emplace_back(a, 1.0);
  Matrix m(k, n);
  for (Index i = 0; i < n; ++i) {
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
      m(c, i) = gammas[static_cast<std::size_t>(c)](engine);
      total += m(c, i);
    }
    if (total > 0.0) {
      m.col(i) /= total;
    } else {
      // all K gamma draws underflowed (tiny nu); the mass sits at a vertex
      m.col(i).setZero();
      m(static_cast<Index>(std::uniform_int_distribution<int>(0, k - 1)(engine)), i) = 1.0;
    }
  }
  return MembershipMatrix(std::move(m));
}

InteractionMatrix sample_interaction_matrix(int k, double eta, std::uint64_t seed) {
  return sample_interaction_matrix(k, eta, 0.8, 1.0, seed);
}

InteractionMatrix sample_interaction_matrix(int k, double eta, double diag_lo, double diag_hi,
                                            std::uint64_t seed) {
  if (k < 1) throw ParameterError("cluster count must be >= 1");
  if (!(eta >= 0.0 && eta <= 1.0)) throw ParameterError("eta must lie in [0,1]");
  if (!(diag_lo >= 0.0 && diag_lo <= diag_hi && diag_hi <= 1.0)) {
    throw ParameterError("diagonal range must satisfy 0 <= lo <= hi <= 1");
  }
  rng::Engine engine(seed);
  std::uniform_real_distribution<double> diag(diag_lo, diag_hi);
  std::uniform_real_distribution<double> off(0.0, eta);
  Matrix b(k, k);
  for (int i = 0; i < k; ++i) {
    b(i, i) = diag_lo == diag_hi ? diag_lo : diag(engine);
    for (int j = i + 1; j < k; ++j) {
      b(i, j) = eta == 0.0 ? 0.0 : off(engine);
      b(j, i) = b(i, j);
    }
  }
  return InteractionMatrix(std::move(b));
}

double edge_probability(const Eigen::Ref<const Vector>& m_i, const Eigen::Ref<const Vector>& m_j,
                        const InteractionMatrix& b) {
  if (m_i.size() != b.k() || m_j.size() != b.k()) {
    throw DimensionError("membership vectors of length " + std::to_string(m_i.size()) + "/" +
                         std::to_string(m_j.size()) + " do not match K = " + std::to_string(b.k()));
  }
  return m_i.dot(b.matrix() * m_j);
}

namespace {

std::vector<Index> iota_ids(Index n) {
  std::vector<Index> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), Index{0});
  return ids;
}

void check_plan_fits(const MembershipMatrix& m, const QueryPlan& plan) {
  if (plan.num_nodes() != m.n()) {
    throw PlanError("plan covers " + std::to_string(plan.num_nodes()) + " nodes but M has " +
                    std::to_string(m.n()) + " columns");
  }
}

}  // namespace

AdjacencyBlock sample_adjacency_block(const Matrix& m_rows, const Matrix& m_cols,
                                      const InteractionMatrix& b, bool same_group,
                                      std::uint64_t seed) {
  const auto rows = iota_ids(m_rows.cols());
  const auto cols = iota_ids(m_cols.cols());
  return sample_adjacency_block(m_rows, m_cols, b, same_group, rows, cols, seed);
}

AdjacencyBlock sample_adjacency_block(const Matrix& m_rows, const Matrix& m_cols,
                                      const InteractionMatrix& b, bool same_group,
                                      std::span<const Index> row_nodes,
                                      std::span<const Index> col_nodes, std::uint64_t seed) {
  if (m_rows.rows() != b.k() || m_cols.rows() != b.k()) {
    throw DimensionError("membership sub-matrices do not match K of B");
  }
  if (same_group && (m_rows.cols() != m_cols.cols() || !(m_rows.array() == m_cols.array()).all())) {
    throw DimensionError("same-group block requires identical row and column memberships");
  }
  const Matrix prob = m_rows.transpose() * b.matrix() * m_cols;
  return {0, 0, kernels::parallel::bernoulli_block(prob, row_nodes, col_nodes, same_group, seed)};
}

BlockSet sample_observed_blocks(const MembershipMatrix& m, const InteractionMatrix& b,
                                const QueryPlan& plan, std::uint64_t seed) {
  check_plan_fits(m, plan);
  const auto& part = plan.partition();
  BlockSet out;
  for (const auto& q : plan.queried_blocks()) {
    const auto& rows = part.group(q.row);
    const auto& cols = part.group(q.col);
    auto block = sample_adjacency_block(m.columns(rows), m.columns(cols), b, q.row == q.col, rows,
                                        cols, seed);
    block.row_group = q.row;
    block.col_group = q.col;
    out.insert(std::move(block));
  }
  return out;
}

BlockSet build_probability_blocks(const MembershipMatrix& m, const InteractionMatrix& b,
                                  const QueryPlan& plan, DiagonalPolicy diagonal) {
  check_plan_fits(m, plan);
  if (m.k() != b.k()) throw DimensionError("M and B disagree on K");
  const auto& part = plan.partition();
  BlockSet out;
  for (const auto& q : plan.queried_blocks()) {
    Matrix p = m.columns(part.group(q.row)).transpose() * b.matrix() * m.columns(part.group(q.col));
    if (q.row == q.col) {
      p = (0.5 * (p + p.transpose())).eval();  // exact symmetry despite rounding
      if (diagonal == DiagonalPolicy::zero) p.diagonal().setZero();
    }
    out.insert({q.row, q.col, std::move(p)});
  }
  return out;
}

double g_function(double eps, const DirichletParams& params) {
  params.validate();
  if (!(eps > 0.0)) throw ParameterError("separability radius eps must be positive");
  const auto& nu = params.nu;
  const double total = std::accumulate(nu.begin(), nu.end(), 0.0);
  double log_prefactor = std::lgamma(total);
  for (double a : nu) log_prefactor -= std::lgamma(a);
  const double log_radius = std::log(eps / std::sqrt(2.0));

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < nu.size(); ++k) {
    double log_term = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
      if (i == k) continue;
      log_term += nu[i] * log_radius - std::log(nu[i]);
    }
    best = std::min(best, log_term);
  }
  return std::exp(log_prefactor + best);
}

std::optional<std::uint64_t> min_nodes_for_separability(double eps, const DirichletParams& params,
                                                        double mu) {
  if (!(mu > 0.0)) throw ParameterError("failure probability mu must be positive");
  const double g = g_function(eps, params);
  const double k = static_cast<double>(params.k());
  const double two_g2 = 2.0 * g * g;
  if (!(two_g2 > 0.0)) return std::nullopt;
  auto satisfied = [&](double n) { return k * std::exp(-n * two_g2) <= mu; };
  const double estimate = std::ceil(std::log(k / mu) / two_g2);
  if (!std::isfinite(estimate) || estimate > 1e18) return std::nullopt;
  auto n = static_cast<std::uint64_t>(std::max(1.0, estimate));
  // the closed form can be off by one ulp-induced step either way
  while (n > 1 && satisfied(static_cast<double>(n - 1))) --n;
  while (!satisfied(static_cast<double>(n))) ++n;
  return n;
}

TheoryDiagnostics theory_diagnostics(const MembershipMatrix& m, const InteractionMatrix& b,
                                     const QueryPlan& plan, const Matrix* adjacency) {
  check_plan_fits(m, plan);
  if (m.k() != b.k()) throw DimensionError("M and B disagree on K");
  TheoryDiagnostics d;
  const auto scan = kernels::parallel::scan_probabilities(m.matrix(), b.matrix());
  d.rho = scan.rho;
  d.max_degree = scan.max_expected_degree;
  if (adjacency) {
    if (adjacency->rows() != m.n() || adjacency->cols() != m.n()) {
      throw DimensionError("adjacency must be N x N");
    }
    d.max_degree = adjacency->rowwise().sum().maxCoeff();
  }
  d.gamma = 1.0;
  for (int g = 0; g < plan.num_groups(); ++g) {
    const double kappa = condition_number(m.columns(plan.partition().group(g)));
    const bool deficient = plan.partition().group_size(g) < m.k() || !std::isfinite(kappa) ||
                           kappa > 1e14;
    if (deficient) {
      d.gamma = std::numeric_limits<double>::infinity();
      if (!d.rank_deficient_group) d.rank_deficient_group = g;
    } else if (std::isfinite(d.gamma)) {
      d.gamma = std::max(d.gamma, kappa);
    }
  }
  const Vector s = Eigen::JacobiSVD<Matrix>(b.matrix()).singularValues();
  d.sigma_min_b = s[s.size() - 1];
  d.kappa_b = d.sigma_min_b > 0.0 ? s[0] / d.sigma_min_b : std::numeric_limits<double>::infinity();
  return d;
}

}  // namespace bequec
