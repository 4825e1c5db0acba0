#pragma once

#include "bequec/graph_model.hpp"
#include "bequec/rng.hpp"
#include "bequec/types.hpp"

#include <random>
#include <string>

namespace testing {

using bequec::Index;
using bequec::Matrix;
using bequec::Vector;

inline Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
  bequec::rng::Engine eng(seed);
  std::normal_distribution<double> g;
  Matrix a(rows, cols);
  for (Index i = 0; i < a.size(); ++i) a(i) = g(eng);
  return a;
}

inline Matrix dirichlet(int k, Index n, double nu, std::uint64_t seed) {
  return bequec::sample_dirichlet_memberships(bequec::DirichletParams{std::vector<double>(k, nu)}, n, seed)
      .matrix();
}

inline std::string tmp_path(const std::string& name) { return std::string(BEQUEC_TEST_TMP) + "/" + name; }

}  // namespace testing
