#pragma once

#include "bequec/block_set.hpp"
#include "bequec/query_plan.hpp"
#include "bequec/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace bequec {

/// Dirichlet concentration vector; every entry > 0.
struct DirichletParams {
  std::vector<double> nu;

  int k() const { return static_cast<int>(nu.size()); }
  void validate() const;
};

/// K x N column-stochastic membership matrix.
class MembershipMatrix {
 public:
  static constexpr double kColumnSumTol = 1e-10;

  explicit MembershipMatrix(Matrix entries);

  /// Memberships from hard 0-based labels (unit-vector columns).
  static MembershipMatrix from_labels(std::span<const int> labels, int k);

  int k() const { return static_cast<int>(m_.rows()); }
  Index n() const { return m_.cols(); }
  const Matrix& matrix() const { return m_; }
  auto column(Index i) const { return m_.col(i); }

  /// K x |nodes| submatrix M(:, nodes).
  Matrix columns(std::span<const Index> nodes) const;

 private:
  Matrix m_;
};

/// Symmetric K x K cluster-cluster edge probabilities in [0,1].
class InteractionMatrix {
 public:
  explicit InteractionMatrix(Matrix entries);

  int k() const { return static_cast<int>(b_.rows()); }
  const Matrix& matrix() const { return b_; }

 private:
  Matrix b_;
};

struct TheoryDiagnostics {
  double rho = 0.0;         // max_{i != j} P(i,j)
  double max_degree = 0.0;  // observed or expected
  double gamma = 1.0;       // max_l cond(M_l)
  double kappa_b = 1.0;
  double sigma_min_b = 0.0;
  std::optional<int> rank_deficient_group;  // set when gamma is infinite
};

enum class DiagonalPolicy {
  zero,  // same-group blocks get A(i,i) = 0, the observation support of the Bernoulli model
  keep,  // A = P exactly, including the diagonal
};

MembershipMatrix sample_dirichlet_memberships(const DirichletParams& params, Index n,
                                              std::uint64_t seed);

/// Diagonal ~ U[0.8, 1], off-diagonal ~ U[0, eta], upper triangle mirrored.
InteractionMatrix sample_interaction_matrix(int k, double eta, std::uint64_t seed);

/// Same with an explicit diagonal range [diag_lo, diag_hi] within [0,1].
InteractionMatrix sample_interaction_matrix(int k, double eta, double diag_lo, double diag_hi,
                                            std::uint64_t seed);

double edge_probability(const Eigen::Ref<const Vector>& m_i, const Eigen::Ref<const Vector>& m_j,
                        const InteractionMatrix& b);

/// Bernoulli block with local positions as node ids.
AdjacencyBlock sample_adjacency_block(const Matrix& m_rows, const Matrix& m_cols,
                                      const InteractionMatrix& b, bool same_group,
                                      std::uint64_t seed);

/// Bernoulli block whose coins are addressed by global node ids, so a given
/// unordered pair gets the same draw in every block and every plan.
AdjacencyBlock sample_adjacency_block(const Matrix& m_rows, const Matrix& m_cols,
                                      const InteractionMatrix& b, bool same_group,
                                      std::span<const Index> row_nodes,
                                      std::span<const Index> col_nodes, std::uint64_t seed);

/// Binary blocks for every queried pair of the plan.
BlockSet sample_observed_blocks(const MembershipMatrix& m, const InteractionMatrix& b,
                                const QueryPlan& plan, std::uint64_t seed);

/// Real-valued blocks P_{l,m} = M_l^T B M_m for every queried pair of the plan.
BlockSet build_probability_blocks(const MembershipMatrix& m, const InteractionMatrix& b,
                                  const QueryPlan& plan,
                                  DiagonalPolicy diagonal = DiagonalPolicy::zero);

/// Lower bound on the probability mass near the simplex vertices:
/// Gamma(sum nu)/prod Gamma(nu) * min_k (eps/sqrt2)^{sum_{i!=k} nu_i} / prod_{i!=k} nu_i.
double g_function(double eps, const DirichletParams& params);

/// Smallest N with K exp(-2 N G^2) <= mu; nullopt when the requirement is unbounded.
std::optional<std::uint64_t> min_nodes_for_separability(double eps, const DirichletParams& params,
                                                        double mu);

TheoryDiagnostics theory_diagnostics(const MembershipMatrix& m, const InteractionMatrix& b,
                                     const QueryPlan& plan, const Matrix* adjacency = nullptr);

}  // namespace bequec
