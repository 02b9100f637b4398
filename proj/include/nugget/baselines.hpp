#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "nugget/dataset.hpp"
#include "nugget/linalg.hpp"
#include "nugget/metrics.hpp"
#include "nugget/parallel.hpp"

namespace nugget {

/// Symmetric N x N edge scores; the diagonal is ignored (kept at 0).
using EdgeScores = Matrix;

/// Pearson correlation between rows (players) across columns (games).
/// A constant row scores 0 against everything and logs a warning.
EdgeScores correlation(const Matrix& x);
EdgeScores anticorrelation(const Matrix& x);

/// Row covariance with 1/(K-1) normalisation. When S is rank deficient
/// (K <= N, a constant row, or smallest eigenvalue <= 1e-10 tr(S)),
/// 1e-6 * tr(S) / N is added to the diagonal.
Matrix empirical_covariance(const Matrix& x);

struct GlassoOptions {
  double tol = 1e-6;            // max |change| of a precision entry per sweep, relative to max(1, max|Theta|)
  std::size_t max_sweeps = 500;
  double inner_tol = 1e-12;
  std::size_t max_inner = 1000;  // coordinate-descent fallback when the exact block solve fails
  bool warn = true;              // log non-convergence
};

struct GlassoResult {
  Matrix precision;
  EdgeScores scores;               // |Theta_ij|, zero diagonal
  std::vector<double> objective;   // after initialisation and after every sweep
  std::size_t sweeps = 0;
  bool converged = false;
};

/// -log det T + tr(S T) + lambda * sum_{i != j} |T_ij|.
double glasso_objective(const Matrix& precision, const Matrix& covariance, double lambda);

/// Minimises the objective above by block coordinate descent over
/// rows/columns of the precision matrix; each block is an exact minimisation
/// whose off-diagonal part is a lasso solved by coordinate descent, so the
/// objective never increases between sweeps.
GlassoResult graphical_lasso_cov(const Matrix& covariance, double lambda, const GlassoOptions& opts = {});
GlassoResult graphical_lasso(const Matrix& x, double lambda, const GlassoOptions& opts = {});

enum class BaselineMethod { Correlation, Anticorrelation, GraphicalLasso };

std::string_view to_string(BaselineMethod m);
BaselineMethod parse_baseline(std::string_view s);

EdgeScores baseline_scores(BaselineMethod method, const Matrix& x, double lambda);
/// As above; sets *converged to false when glasso stops at its sweep limit.
EdgeScores baseline_scores(BaselineMethod method, const Matrix& x, double lambda, const GlassoOptions& opts,
                           bool* converged);

/// {10^k : k = -5..5}.
std::vector<double> default_lambda_grid();

struct TuneResult {
  double best_lambda = 0.0;
  std::vector<double> grid;
  std::vector<double> val_auc;   // mean validation AUC per grid point
  std::size_t evaluations = 0;   // grid points scored
  std::size_t unconverged = 0;   // glasso fits that hit the sweep limit
  MetricReport test;             // AUC only; accuracy is NaN (scores are not probabilities)
};

/// Scores every validation sample at every grid point, picks the grid value
/// with the highest mean AUC (ties -> smaller lambda) and reports test AUC at
/// that value. Correlation methods ignore lambda and use a single grid point.
TuneResult tune_regularization(BaselineMethod method, std::span<const GameSample* const> val,
                               std::span<const GameSample* const> test, std::span<const double> grid,
                               Exec exec = Exec::Parallel);
TuneResult tune_regularization(BaselineMethod method, const Dataset& ds, std::span<const double> grid,
                               Exec exec = Exec::Parallel);

}  // namespace nugget
