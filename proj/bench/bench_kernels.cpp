// Serial vs OpenMP timings of the data-parallel kernels.

#include "bequec/graph_model.hpp"
#include "bequec/kernels.hpp"
#include "bequec/rng.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <numeric>

using namespace bequec;

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    best = std::min(best, dt.count());
  }
  return best;
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-22s serial %9.4f s   parallel %9.4f s   speedup %5.2fx\n", name, serial, parallel,
              serial / parallel);
}

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  const int k = 5;
  const Index n = 2000;
  const auto m = sample_dirichlet_memberships(DirichletParams{std::vector<double>(k, 0.2)}, n, 7);
  const auto b = sample_interaction_matrix(k, 0.1, 8);

  const Matrix prob = m.matrix().transpose() * b.matrix() * m.matrix();
  std::vector<Index> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), Index{0});
  volatile double sink = 0.0;

  row("bernoulli_block",
      best_of(3, [&] { sink = sink + kernels::serial::bernoulli_block(prob, ids, ids, true, 1).sum(); }),
      best_of(3, [&] { sink = sink + kernels::parallel::bernoulli_block(prob, ids, ids, true, 1).sum(); }));

  Matrix adj = kernels::serial::bernoulli_block(prob, ids, ids, true, 1);
  row("flip_block",
      best_of(3, [&] { Matrix a = adj; kernels::serial::flip_block(a, true, 0.1, 2); sink = sink + a(0, 1); }),
      best_of(3, [&] { Matrix a = adj; kernels::parallel::flip_block(a, true, 0.1, 2); sink = sink + a(0, 1); }));

  rng::Engine eng(3);
  std::normal_distribution<double> gauss;
  Matrix gt(k, k);
  for (Index i = 0; i < gt.size(); ++i) gt(i) = gauss(eng);
  gt += 3.0 * Matrix::Identity(k, k);
  Matrix targets = gt * m.matrix();
  for (Index i = 0; i < targets.size(); ++i) targets(i) += 0.05 * gauss(eng);
  row("simplex_ls_columns",
      best_of(3, [&] { sink = sink + kernels::serial::simplex_ls_columns(targets, gt, {}).solutions.sum(); }),
      best_of(3, [&] { sink = sink + kernels::parallel::simplex_ls_columns(targets, gt, {}).solutions.sum(); }));

  Matrix u = m.matrix().transpose();
  Vector norms;
  row("argmax_row_norm",
      best_of(20, [&] { sink = sink + static_cast<double>(kernels::serial::argmax_row_norm(u, norms)); }),
      best_of(20, [&] { sink = sink + static_cast<double>(kernels::parallel::argmax_row_norm(u, norms)); }));

  row("scan_probabilities",
      best_of(3, [&] { sink = sink + kernels::serial::scan_probabilities(m.matrix(), b.matrix()).rho; }),
      best_of(3, [&] { sink = sink + kernels::parallel::scan_probabilities(m.matrix(), b.matrix()).rho; }));
  return 0;
}
