#include "bequec/ssmf.hpp"

#include "bequec/errors.hpp"
#include "bequec/linalg.hpp"

#include <cmath>
#include <iostream>
#include <mutex>
#include <string>

namespace bequec {

namespace {

std::mutex& warning_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& warning_handler() {
  static WarningHandler handler = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
  return handler;
}

constexpr double kNearSingular = 1e10;

void check_anchor_basis(const Matrix& u_hat, const Matrix& g_hat) {
  if (g_hat.rows() != g_hat.cols() || g_hat.cols() != u_hat.cols()) {
    throw DimensionError("anchor matrix must be K x K with K = columns of u_hat");
  }
  const double kappa = condition_number(g_hat);
  if (!std::isfinite(kappa) || kappa > 1e15) throw RankError("anchor matrix G is singular");
  if (kappa > kNearSingular) warn("anchor matrix G is near singular (cond = " + std::to_string(kappa) + ")");
}

}  // namespace

void set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(warning_mutex());
  warning_handler() = std::move(handler);
}

void warn(const std::string& message) {
  std::lock_guard lock(warning_mutex());
  if (warning_handler()) warning_handler()(message);
}

AnchorSet spa(const Matrix& u_hat, int k) {
  if (k < 1 || k > u_hat.cols()) throw DimensionError("SPA: k must lie in [1, columns of u_hat]");
  if (u_hat.rows() < k) throw DimensionError("SPA: fewer rows than anchors requested");

  Matrix residual = u_hat;
  Vector norms;
  AnchorSet out;
  double scale = 0.0;
  for (int step = 0; step < k; ++step) {
    const Index pick = kernels::parallel::argmax_row_norm(residual, norms);
    if (step == 0) scale = norms[pick];
    if (!(norms[pick] > 1e-20 * scale) || !(scale > 0.0)) {
      throw RankError("SPA: remaining rows vanish after " + std::to_string(step) +
                      " anchors; u_hat has rank below K");
    }
    out.indices.push_back(pick);
    const Eigen::RowVectorXd u = residual.row(pick);
    // rows <- rows (I - u^T u / ||u||^2)
    residual -= (residual * u.transpose()) * (u / u.squaredNorm());
  }
  out.g_hat.resize(k, u_hat.cols());
  for (int i = 0; i < k; ++i) out.g_hat.row(i) = u_hat.row(out.indices[static_cast<std::size_t>(i)]);
  return out;
}

Matrix membership_direct(const Matrix& u_hat, const Matrix& g_hat) {
  check_anchor_basis(u_hat, g_hat);
  return g_hat.transpose().colPivHouseholderQr().solve(u_hat.transpose());
}

ConstrainedMembership membership_constrained(const Matrix& u_hat, const Matrix& g_hat,
                                             const kernels::SimplexLsOptions& options) {
  check_anchor_basis(u_hat, g_hat);
  auto solved = kernels::parallel::simplex_ls_columns(u_hat.transpose(), g_hat.transpose(), options);
  if (!solved.unconverged.empty()) {
    warn(std::to_string(solved.unconverged.size()) +
         " membership columns hit the iteration cap; best iterates kept");
  }
  return {std::move(solved.solutions), std::move(solved.unconverged)};
}

}  // namespace bequec
