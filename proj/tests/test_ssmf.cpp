#include "bequec/errors.hpp"
#include "bequec/metrics.hpp"
#include "bequec/ssmf.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <iostream>
#include <numeric>
#include <set>

using namespace bequec;

namespace {

// K x N memberships with e_k planted at the given positions.
Matrix planted(int k, Index n, const std::vector<Index>& where, std::uint64_t seed) {
  // interior points: Dirichlet(2) keeps them away from the vertices
  Matrix m = testing::dirichlet(k, n, 2.0, seed);
  for (int i = 0; i < k; ++i) m.col(where[i]) = Vector::Unit(k, i);
  return m;
}

Matrix nonsingular(int k, std::uint64_t seed) {
  return testing::gaussian(k, k, seed) + 2.0 * Matrix::Identity(k, k);
}

}  // namespace

TEST_CASE("SPA on pure nodes") {
  const Matrix g = nonsingular(4, 1);
  const auto a = spa(g, 4);  // M = I, U = G
  std::vector<Index> sorted = a.indices;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<Index>{0, 1, 2, 3});
}

TEST_CASE("SPA recovers planted anchors") {
  const std::vector<Index> where = {17, 143, 88, 5};
  const Matrix m = planted(4, 200, where, 2);
  const Matrix u = m.transpose() * nonsingular(4, 3);
  const auto a = spa(u, 4);
  CHECK(std::set<Index>(a.indices.begin(), a.indices.end()) == std::set<Index>(where.begin(), where.end()));
}

TEST_CASE("SPA property suite: 100 noiseless separable instances") {
  int misses = 0;
  for (int t = 0; t < 100; ++t) {
    const int k = 2 + t % 5;
    const Index n = 50 + 7 * t;
    rng::Engine eng(static_cast<std::uint64_t>(t));
    std::vector<Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Index{0});
    std::shuffle(all.begin(), all.end(), eng);
    const std::vector<Index> where(all.begin(), all.begin() + k);
    const Matrix m = planted(k, n, where, 500 + t);
    const Matrix u = m.transpose() * nonsingular(k, 900 + t);
    const auto a = spa(u, k);
    if (std::set<Index>(a.indices.begin(), a.indices.end()) != std::set<Index>(where.begin(), where.end())) ++misses;
  }
  CHECK(misses == 0);
}

TEST_CASE("SPA error grows with noise") {
  const int k = 4;
  std::vector<double> errors;
  for (double noise : {0.0, 0.01, 0.03, 0.1}) {
    double total = 0.0;
    for (int t = 0; t < 30; ++t) {
      const std::vector<Index> where = {3, 40, 77, 120};
      const Matrix m = planted(k, 150, where, 2000 + t);
      const Matrix g = nonsingular(k, 3000 + t);
      const Matrix u = m.transpose() * g + noise * testing::gaussian(150, k, 4000 + t);
      const auto a = spa(u, k);
      const Matrix m_hat = membership_direct(u, a.g_hat);
      total += mse(m_hat, m);
    }
    errors.push_back(total / 30);
  }
  CHECK(errors[0] <= 1e-20);
  for (std::size_t i = 1; i < errors.size(); ++i) CHECK(errors[i] > errors[i - 1]);
}

TEST_CASE("SPA ties and rank checks") {
  Matrix u(3, 2);
  u << 0.0, 1.0, 0.0, 1.0, 0.5, 0.0;
  CHECK(spa(u, 1).indices == std::vector<Index>{0});
  CHECK_THROWS_AS(spa(Matrix::Ones(6, 2), 2), RankError);
  CHECK_THROWS_AS(spa(Matrix::Ones(6, 2), 3), DimensionError);
}

TEST_CASE("membership extraction") {
  const int k = 4;
  const Matrix m = planted(k, 80, {0, 1, 2, 3}, 7);
  const Matrix g = nonsingular(k, 8);
  const Matrix u = m.transpose() * g;

  CHECK((membership_direct(u, g) - m).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((membership_direct(Matrix::Ones(9, 1), Matrix::Ones(1, 1)) - Matrix::Ones(1, 9)).norm() <= 1e-15);

  const auto c = membership_constrained(u, g);
  CHECK(c.unconverged.empty());
  CHECK((c.m_hat - membership_direct(u, g)).cwiseAbs().maxCoeff() <= 1e-6);

  const Matrix mix = 0.3 * g.row(0) + 0.7 * g.row(1);
  const auto single = membership_constrained(mix, g);
  CHECK((single.m_hat.col(0) - (Vector(4) << 0.3, 0.7, 0, 0).finished()).cwiseAbs().maxCoeff() <= 1e-6);

  const Matrix noisy = u + 0.05 * testing::gaussian(80, k, 9);
  const Matrix direct = membership_direct(noisy, g);
  const Matrix oracle = g.transpose().fullPivLu().solve(noisy.transpose());
  CHECK((direct - oracle).cwiseAbs().maxCoeff() <= 1e-10);
  const auto cn = membership_constrained(noisy, g);
  for (Index i = 0; i < cn.m_hat.cols(); ++i) {
    CHECK(std::abs(cn.m_hat.col(i).sum() - 1.0) <= 1e-12);
    CHECK(cn.m_hat.col(i).minCoeff() >= 0.0);
  }

  Matrix singular = g;
  singular.row(3) = singular.row(2);
  CHECK_THROWS_AS(membership_direct(u, singular), RankError);
}

TEST_CASE("warning hook") {
  std::vector<std::string> seen;
  set_warning_handler([&](const std::string& msg) { seen.push_back(msg); });
  Matrix g = Matrix::Identity(2, 2);
  g(1, 1) = 1e-12;
  membership_direct(Matrix::Ones(3, 2), g);
  set_warning_handler(nullptr);
  CHECK(seen.size() == 1);
  set_warning_handler([](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; });
}
