#include "nugget/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nugget/errors.hpp"
#include "nugget/log.hpp"

namespace nugget {

EdgeScores correlation(const Matrix& x) {
  const std::size_t n = x.rows(), k = x.cols();
  if (k < 2) throw ArgumentError("correlation: need at least two games");
  Matrix centered(n, k);
  Vector norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mu = 0.0;
    for (double v : x.row(i)) mu += v;
    mu /= static_cast<double>(k);
    for (std::size_t g = 0; g < k; ++g) centered(i, g) = x(i, g) - mu;
    norms[i] = norm2(centered.row(i));
    if (norms[i] == 0.0) log::warn("correlation: row " + std::to_string(i) + " is constant; its scores are 0");
  }
  EdgeScores s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (norms[i] == 0.0 || norms[j] == 0.0) continue;
      const double r = std::clamp(dot(centered.row(i), centered.row(j)) / (norms[i] * norms[j]), -1.0, 1.0);
      s(i, j) = s(j, i) = r;
    }
  }
  return s;
}

EdgeScores anticorrelation(const Matrix& x) {
  EdgeScores s = correlation(x);
  for (double& v : s.values()) v = -v;
  return s;
}

Matrix empirical_covariance(const Matrix& x) {
  const std::size_t n = x.rows(), k = x.cols();
  if (k < 2) throw ArgumentError("empirical_covariance: need at least two games");
  Matrix centered(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    double mu = 0.0;
    for (double v : x.row(i)) mu += v;
    mu /= static_cast<double>(k);
    for (std::size_t g = 0; g < k; ++g) centered(i, g) = x(i, g) - mu;
  }
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      s(i, j) = s(j, i) = dot(centered.row(i), centered.row(j)) / static_cast<double>(k - 1);
  double trace = 0.0;
  bool constant_row = false;
  for (std::size_t i = 0; i < n; ++i) {
    trace += s(i, i);
    constant_row = constant_row || s(i, i) <= 0.0;
  }
  if (!(trace > 0.0)) throw NumericalError("empirical_covariance: all rows are constant");
  const bool rank_deficient = k <= n || constant_row || sym_eig(s).values.back() <= 1e-10 * trace;
  if (rank_deficient) {
    const double ridge = 1e-6 * trace / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) s(i, i) += ridge;
  }
  return s;
}

double glasso_objective(const Matrix& precision, const Matrix& covariance, double lambda) {
  const std::size_t n = precision.rows();
  const EigenDecomposition e = sym_eig(precision);
  double logdet = 0.0;
  for (double v : e.values) {
    if (v <= 0.0) return std::numeric_limits<double>::infinity();
    logdet += std::log(v);
  }
  double trace = 0.0, penalty = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      trace += covariance(i, j) * precision(j, i);
      if (i != j) penalty += std::abs(precision(i, j));
    }
  return -logdet + trace + lambda * penalty;
}

namespace {

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

namespace {
double lasso_value(const Matrix& q, const Vector& c, double lambda, const Vector& x) {
  double v = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (x[a] == 0.0) continue;
    v += x[a] * (0.5 * dot(q.row(a), x) + c[a]) + lambda * std::abs(x[a]);
  }
  return v;
}

// Feature-sign search: exact lasso solution by solving on a sign pattern,
// line-searching over zero crossings and adding the worst KKT violator.
// Returns false if it runs out of steps or hits a singular block.
bool feature_sign(const Matrix& q, const Vector& c, double lambda, Vector& x) {
  const std::size_t m = x.size();
  auto grad = [&](std::size_t a) { return c[a] + dot(q.row(a), x); };
  for (std::size_t step = 0; step < 8 * m + 16; ++step) {
    bool optimal = true;
    for (std::size_t a = 0; a < m && optimal; ++a)
      if (x[a] != 0.0 && std::abs(grad(a) + lambda * (x[a] > 0.0 ? 1.0 : -1.0)) > 1e-10 * (1.0 + lambda)) optimal = false;
    Vector sign(m, 0.0);
    for (std::size_t a = 0; a < m; ++a) sign[a] = x[a] > 0.0 ? 1.0 : x[a] < 0.0 ? -1.0 : 0.0;
    if (optimal) {
      std::size_t worst = m;
      double worst_viol = lambda * (1.0 + 1e-9) + 1e-14;
      for (std::size_t a = 0; a < m; ++a) {
        if (x[a] != 0.0) continue;
        const double g = std::abs(grad(a));
        if (g > worst_viol) worst_viol = g, worst = a;
      }
      if (worst == m) return true;
      sign[worst] = grad(worst) > 0.0 ? -1.0 : 1.0;
    }
    std::vector<std::size_t> act;
    for (std::size_t a = 0; a < m; ++a)
      if (sign[a] != 0.0) act.push_back(a);
    Matrix qa(act.size(), act.size());
    Vector rhs(act.size());
    for (std::size_t i = 0; i < act.size(); ++i) {
      for (std::size_t k = 0; k < act.size(); ++k) qa(i, k) = q(act[i], act[k]);
      rhs[i] = -(c[act[i]] + lambda * sign[act[i]]);
    }
    const LuDecomposition lu(qa);
    if (lu.singular()) return false;
    const Vector sol = lu.solve(rhs);
    Vector target(m, 0.0);
    for (std::size_t i = 0; i < act.size(); ++i) {
      if (!std::isfinite(sol[i])) return false;
      target[act[i]] = sol[i];
    }
    // candidates: the target and every point where a coordinate crosses zero
    Vector best = target;
    double best_value = lasso_value(q, c, lambda, target);
    for (std::size_t a : act) {
      if (x[a] == 0.0 || (x[a] > 0.0) == (target[a] > 0.0)) continue;
      const double t = x[a] / (x[a] - target[a]);
      Vector p(m);
      for (std::size_t b = 0; b < m; ++b) p[b] = x[b] + t * (target[b] - x[b]);
      p[a] = 0.0;
      const double v = lasso_value(q, c, lambda, p);
      if (v < best_value) best_value = v, best = std::move(p);
    }
    x = std::move(best);
  }
  return false;
}

// min 1/2 g^T (s22 inv11) g + s12^T g + lambda |g|_1, warm-started from gamma.
void block_lasso(const Matrix& inv11, double s22, const Vector& s12, double lambda, Vector& gamma,
                 const GlassoOptions& opts) {
  const std::size_t m = gamma.size();
  Matrix q(m, m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) q(a, b) = s22 * inv11(a, b);
  Vector exact = gamma;
  if (feature_sign(q, s12, lambda, exact)) {
    gamma = std::move(exact);
    return;
  }
  for (std::size_t pass = 0; pass < opts.max_inner; ++pass) {
    double delta = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      double partial = s12[a];
      for (std::size_t b = 0; b < m; ++b)
        if (b != a) partial += q(a, b) * gamma[b];
      const double updated = -soft_threshold(partial, lambda) / q(a, a);
      delta = std::max(delta, std::abs(updated - gamma[a]));
      gamma[a] = updated;
    }
    if (delta < opts.inner_tol) return;
  }
}
}  // namespace

GlassoResult graphical_lasso_cov(const Matrix& s, double lambda, const GlassoOptions& opts) {
  if (!(lambda >= 0.0)) throw ArgumentError("graphical_lasso: lambda must be non-negative");
  if (!s.is_symmetric()) throw ArgumentError("graphical_lasso: covariance is not symmetric");
  const std::size_t n = s.rows();
  const EigenDecomposition se = sym_eig(s);
  if (se.values.back() < -1e-12 * std::abs(se.values.front()))
    throw NumericalError("graphical_lasso: covariance is not positive semidefinite");
  for (std::size_t i = 0; i < n; ++i)
    if (!(s(i, i) > 0.0)) throw NumericalError("graphical_lasso: covariance has a non-positive diagonal entry");

  GlassoResult r;
  r.precision = Matrix(n, n);
  Matrix w(n, n);  // inverse of the current precision
  for (std::size_t i = 0; i < n; ++i) {
    r.precision(i, i) = 1.0 / s(i, i);
    w(i, i) = s(i, i);
  }
  r.objective.push_back(glasso_objective(r.precision, s, lambda));

  const std::size_t m = n - 1;
  Matrix inv11(m, m);
  Vector gamma(m), s12(m), u(m);
  std::vector<std::size_t> rest(m);

  for (std::size_t sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t a = 0, t = 0; a < n; ++a)
        if (a != j) rest[t++] = a;
      const double s22 = s(j, j);
      // Theta11^-1 = W11 - w12 w12^T / w22
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b)
          inv11(a, b) = w(rest[a], rest[b]) - w(rest[a], j) * w(rest[b], j) / w(j, j);
        gamma[a] = r.precision(rest[a], j);
        s12[a] = s(rest[a], j);
      }
      block_lasso(inv11, s22, s12, lambda, gamma, opts);
      for (std::size_t a = 0; a < m; ++a) u[a] = dot(inv11.row(a), gamma);
      const double theta22 = 1.0 / s22 + dot(gamma, u);

      max_change = std::max(max_change, std::abs(theta22 - r.precision(j, j)));
      r.precision(j, j) = theta22;
      for (std::size_t a = 0; a < m; ++a) {
        max_change = std::max(max_change, std::abs(gamma[a] - r.precision(rest[a], j)));
        r.precision(rest[a], j) = r.precision(j, rest[a]) = gamma[a];
      }
      // W from the block inverse of the updated precision
      w(j, j) = s22;
      for (std::size_t a = 0; a < m; ++a) {
        w(rest[a], j) = w(j, rest[a]) = -s22 * u[a];
        for (std::size_t b = 0; b < m; ++b) w(rest[a], rest[b]) = inv11(a, b) + s22 * u[a] * u[b];
      }
    }
    ++r.sweeps;
    w = inverse(r.precision);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) w(a, b) = w(b, a) = 0.5 * (w(a, b) + w(b, a));
    r.objective.push_back(glasso_objective(r.precision, s, lambda));
    if (max_change < opts.tol * std::max(1.0, r.precision.max_abs())) {
      r.converged = true;
      break;
    }
  }
  if (!r.converged && opts.warn) {
    log::warn("graphical_lasso: no convergence after " + std::to_string(opts.max_sweeps) +
              " sweeps; returning the last iterate");
  }
  r.scores = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) r.scores(i, j) = std::abs(r.precision(i, j));
  return r;
}

GlassoResult graphical_lasso(const Matrix& x, double lambda, const GlassoOptions& opts) {
  return graphical_lasso_cov(empirical_covariance(x), lambda, opts);
}

std::string_view to_string(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::Correlation: return "correlation";
    case BaselineMethod::Anticorrelation: return "anticorrelation";
    case BaselineMethod::GraphicalLasso: return "glasso";
  }
  return "?";
}

BaselineMethod parse_baseline(std::string_view s) {
  if (s == "correlation") return BaselineMethod::Correlation;
  if (s == "anticorrelation") return BaselineMethod::Anticorrelation;
  if (s == "glasso") return BaselineMethod::GraphicalLasso;
  throw ConfigError("unknown baseline '" + std::string(s) + "' (expected correlation, anticorrelation or glasso)");
}

EdgeScores baseline_scores(BaselineMethod method, const Matrix& x, double lambda, const GlassoOptions& opts,
                           bool* converged) {
  if (converged) *converged = true;
  switch (method) {
    case BaselineMethod::Correlation: return correlation(x);
    case BaselineMethod::Anticorrelation: return anticorrelation(x);
    case BaselineMethod::GraphicalLasso: {
      GlassoResult r = graphical_lasso(x, lambda, opts);
      if (converged) *converged = r.converged;
      return std::move(r.scores);
    }
  }
  throw ArgumentError("unknown baseline");
}

EdgeScores baseline_scores(BaselineMethod method, const Matrix& x, double lambda) {
  return baseline_scores(method, x, lambda, GlassoOptions{}, nullptr);
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int k = -5; k <= 5; ++k) grid.push_back(std::pow(10.0, k));
  return grid;
}

namespace {
const GlassoOptions kQuiet{.warn = false};

// Mean AUC over samples; adds the number of unconverged glasso fits to *unconverged.
double mean_auc(BaselineMethod method, std::span<const GameSample* const> samples, double lambda, Exec exec,
                std::size_t* unconverged) {
  Vector aucs(samples.size());
  std::vector<char> ok(samples.size(), 1);
  for_each_index(exec, samples.size(), [&](std::size_t i) {
    bool conv = true;
    aucs[i] = roc_auc(baseline_scores(method, samples[i]->actions, lambda, kQuiet, &conv), samples[i]->adjacency);
    ok[i] = conv;
  });
  double sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    sum += aucs[i];
    if (!ok[i]) ++*unconverged;
  }
  return sum / static_cast<double>(samples.size());
}
}  // namespace

TuneResult tune_regularization(BaselineMethod method, std::span<const GameSample* const> val,
                               std::span<const GameSample* const> test, std::span<const double> grid, Exec exec) {
  if (val.empty()) throw ConfigError("tune_regularization: empty validation split");
  if (test.empty()) throw ConfigError("tune_regularization: empty test split");
  if (grid.empty()) throw ConfigError("tune_regularization: empty lambda grid");
  TuneResult r;
  const std::size_t points = method == BaselineMethod::GraphicalLasso ? grid.size() : 1;
  r.grid.assign(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(points));
  std::size_t best = 0;
  for (std::size_t g = 0; g < points; ++g) {
    r.val_auc.push_back(mean_auc(method, val, r.grid[g], exec, &r.unconverged));
    ++r.evaluations;
    const bool better = r.val_auc[g] > r.val_auc[best];
    const bool tie_smaller = r.val_auc[g] == r.val_auc[best] && r.grid[g] < r.grid[best];
    if (better || tie_smaller) best = g;
  }
  r.best_lambda = r.grid[best];

  std::vector<GraphMetric> metrics(test.size());
  std::vector<char> ok(test.size(), 1);
  for_each_index(exec, test.size(), [&](std::size_t i) {
    bool conv = true;
    const EdgeScores s = baseline_scores(method, test[i]->actions, r.best_lambda, kQuiet, &conv);
    metrics[i] = GraphMetric{roc_auc(s, test[i]->adjacency), std::numeric_limits<double>::quiet_NaN()};
    ok[i] = conv;
  });
  for (char c : ok) r.unconverged += c ? 0 : 1;
  r.test = aggregate(metrics);
  if (r.unconverged > 0)
    log::warn("tune_regularization: " + std::to_string(r.unconverged) +
              " glasso fits hit the sweep limit; their last iterates were used");
  return r;
}

TuneResult tune_regularization(BaselineMethod method, const Dataset& ds, std::span<const double> grid, Exec exec) {
  std::vector<const GameSample*> val, test;
  for (std::size_t i : ds.indices(Split::Val)) val.push_back(&ds.samples[i]);
  for (std::size_t i : ds.indices(Split::Test)) test.push_back(&ds.samples[i]);
  return tune_regularization(method, val, test, grid, exec);
}

}  // namespace nugget
