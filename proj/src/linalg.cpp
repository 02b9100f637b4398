#include "nugget/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "nugget/errors.hpp"

namespace nugget {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw ArgumentError("Matrix: " + std::to_string(values_.size()) + " values for a " +
                        std::to_string(rows_) + "x" + std::to_string(cols_) + " matrix");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::frobenius() const { return norm2(values_); }

double Matrix::norm_inf() const {
  double best = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (double v : row(i)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

bool Matrix::is_symmetric(double rel_tol) const {
  if (!square()) return false;
  const double tol = rel_tol * max_abs();
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
  return true;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ArgumentError("matrix product: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ArgumentError("matrix sum: shapes differ");
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.values()[i] += b.values()[i];
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ArgumentError("matrix difference: shapes differ");
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.values()[i] -= b.values()[i];
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (double& v : c.values()) v *= s;
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw ArgumentError("matrix-vector product: dimensions differ");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

Matrix EigenDecomposition::reconstruct() const {
  const std::size_t n = size();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += vectors(i, k) * values[k] * vectors(j, k);
      m(i, j) = s;
    }
  return m;
}

EigenDecomposition sym_eig(const Matrix& m, int max_sweeps) {
  if (!m.is_symmetric()) throw ArgumentError("sym_eig: matrix is not symmetric");
  const std::size_t n = m.rows();
  Matrix a = m;
  Matrix v = Matrix::identity(n);
  const double scale = m.frobenius();

  bool converged = (n <= 1 || scale == 0.0);
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= 1e-15 * scale) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r != p && r != q) {
            const double arp = a(r, p);
            const double arq = a(r, q);
            a(r, p) = a(p, r) = c * arp - s * arq;
            a(r, q) = a(q, r) = s * arp + c * arq;
          }
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }
  if (!converged) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) > 1e-13 * scale) {
      throw NumericalError("sym_eig: Jacobi iteration did not converge in " +
                           std::to_string(max_sweeps) + " sweeps");
    }
  }

  EigenDecomposition unsorted{Vector(n), std::move(v)};
  for (std::size_t i = 0; i < n; ++i) unsorted.values[i] = a(i, i);
  return map_spectrum(unsorted, [](double x) { return x; });
}

LuDecomposition::LuDecomposition(const Matrix& m) : lu_(m), perm_(m.rows()) {
  if (!m.square()) throw ArgumentError("LU: matrix is not square");
  const std::size_t n = m.rows();
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::abs(m(i, j));
    norm1_ = std::max(norm1_, s);
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu_(i, k)) > std::abs(lu_(piv, k))) piv = i;
    if (lu_(piv, k) == 0.0) {
      singular_ = true;
      continue;
    }
    if (piv != k) {
      std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(piv).begin());
      std::swap(perm_[k], perm_[piv]);
    }
    const double pivot = lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu_(i, k) / pivot;
      lu_(i, k) = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
    }
  }
}

Vector LuDecomposition::solve(std::span<const double> rhs) const {
  const std::size_t n = size();
  if (rhs.size() != n) throw ArgumentError("LU solve: right-hand side has wrong length");
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
    x[i] = s / lu_(i, i);
  }
  return x;
}

Vector LuDecomposition::solve_transposed(std::span<const double> rhs) const {
  const std::size_t n = size();
  if (rhs.size() != n) throw ArgumentError("LU solve: right-hand side has wrong length");
  // A^T = U^T L^T P
  Vector w(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[i];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(j, i) * w[j];
    w[i] = s / lu_(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = w[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu_(j, i) * w[j];
    w[i] = s;
  }
  Vector z(n);
  for (std::size_t i = 0; i < n; ++i) z[perm_[i]] = w[i];
  return z;
}

double LuDecomposition::condition_estimate() const {
  if (singular_) return std::numeric_limits<double>::infinity();
  const std::size_t n = size();
  if (n == 0) return 0.0;
  Vector x(n, 1.0 / static_cast<double>(n));
  double estimate = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    const Vector y = solve(x);
    estimate = 0.0;
    for (double v : y) estimate += std::abs(v);
    Vector sign(n);
    for (std::size_t i = 0; i < n; ++i) sign[i] = y[i] >= 0.0 ? 1.0 : -1.0;
    const Vector z = solve_transposed(sign);
    std::size_t jmax = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(z[i]) > std::abs(z[jmax])) jmax = i;
    if (std::abs(z[jmax]) <= dot(z, x)) break;
    std::fill(x.begin(), x.end(), 0.0);
    x[jmax] = 1.0;
  }
  if (!std::isfinite(estimate)) return std::numeric_limits<double>::infinity();
  return estimate * norm1_;
}

Vector solve(const Matrix& m, std::span<const double> rhs) {
  const LuDecomposition lu(m);
  const double cond = lu.condition_estimate();
  if (!(cond < kMaxCondition)) {
    throw SingularityError("solve: matrix is singular or near-singular (condition estimate " +
                               std::to_string(cond) + ")",
                           cond);
  }
  return lu.solve(rhs);
}

Matrix inverse(const Matrix& m) {
  const LuDecomposition lu(m);
  const double cond = lu.condition_estimate();
  if (!(cond < kMaxCondition)) {
    throw SingularityError("inverse: matrix is singular or near-singular (condition estimate " +
                               std::to_string(cond) + ")",
                           cond);
  }
  const std::size_t n = m.rows();
  Matrix inv(n, n);
  Vector e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const Vector col = lu.solve(e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    e[j] = 0.0;
  }
  return inv;
}

double default_pinv_tol(const EigenDecomposition& e) { return 1e-10 * spectral_radius(e); }

Vector pinv_apply(const EigenDecomposition& e, std::span<const double> rhs, double tol) {
  const std::size_t n = e.size();
  if (rhs.size() != n) throw ArgumentError("pinv_apply: right-hand side has wrong length");
  Vector coeff(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = e.values[k];
    if (std::abs(lambda) <= tol) continue;
    double proj = 0.0;
    for (std::size_t i = 0; i < n; ++i) proj += e.vectors(i, k) * rhs[i];
    coeff[k] = proj / lambda;
  }
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += e.vectors(i, k) * coeff[k];
    x[i] = s;
  }
  return x;
}

Vector pinv_apply(const EigenDecomposition& e, std::span<const double> rhs) {
  return pinv_apply(e, rhs, default_pinv_tol(e));
}

Vector mvn_sample(const EigenDecomposition& precision, Rng& rng) {
  const std::size_t n = precision.size();
  for (double lambda : precision.values) {
    if (lambda < -1e-10) {
      throw ArgumentError("mvn_sample: precision has negative eigenvalue " + std::to_string(lambda));
    }
  }
  const double tol = default_pinv_tol(precision);
  Vector scaled(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double eps = rng.normal();
    const double lambda = precision.values[k];
    scaled[k] = lambda > tol ? eps / std::sqrt(lambda) : 0.0;
  }
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += precision.vectors(i, k) * scaled[k];
    x[i] = s;
  }
  return x;
}

double spectral_radius(const EigenDecomposition& e) {
  double r = 0.0;
  for (double v : e.values) r = std::max(r, std::abs(v));
  return r;
}

}  // namespace nugget
