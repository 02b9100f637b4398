#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nugget/rng.hpp"

namespace nugget {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }
  Vector column(std::size_t j) const;

  std::vector<double>& values() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  Matrix transposed() const;
  double max_abs() const;
  double frobenius() const;
  double norm_inf() const;  // max row sum of absolute values
  // |m_ij - m_ji| <= rel_tol * max|m| for all i, j.
  bool is_symmetric(double rel_tol = 1e-12) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Vector operator*(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> x);
double norm_inf(std::span<const double> x);

/// Eigenvalues in descending order; column i of `vectors` pairs with value i.
struct EigenDecomposition {
  Vector values;
  Matrix vectors;

  std::size_t size() const noexcept { return values.size(); }
  Vector eigenvector(std::size_t i) const { return vectors.column(i); }
  // U diag(values) U^T
  Matrix reconstruct() const;
};

/// Cyclic Jacobi eigensolver for symmetric matrices.
/// Throws ArgumentError for non-symmetric input and NumericalError when the
/// sweep budget is exhausted.
EigenDecomposition sym_eig(const Matrix& m, int max_sweeps = 100);

/// Same eigenvectors, eigenvalues mapped through f and re-sorted descending.
template <class F>
EigenDecomposition map_spectrum(const EigenDecomposition& e, F&& f);

/// LU factorisation with partial pivoting (PA = LU).
class LuDecomposition {
 public:
  explicit LuDecomposition(const Matrix& m);

  std::size_t size() const noexcept { return lu_.rows(); }
  bool singular() const noexcept { return singular_; }
  Vector solve(std::span<const double> rhs) const;
  Vector solve_transposed(std::span<const double> rhs) const;
  // Hager's estimate of the 1-norm condition number; +inf when singular.
  double condition_estimate() const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  double norm1_ = 0.0;
  bool singular_ = false;
};

inline constexpr double kMaxCondition = 1e12;

/// Solves m x = rhs. Throws SingularityError when the condition estimate
/// reaches kMaxCondition.
Vector solve(const Matrix& m, std::span<const double> rhs);
Matrix inverse(const Matrix& m);

double default_pinv_tol(const EigenDecomposition& e);

/// U diag(g(lambda)) U^T rhs with g(l) = 1/l for |l| > tol, else 0.
Vector pinv_apply(const EigenDecomposition& e, std::span<const double> rhs, double tol);
Vector pinv_apply(const EigenDecomposition& e, std::span<const double> rhs);

/// Draws from N(0, P^+) given the eigendecomposition of the precision P.
/// Eigenvalues below -1e-10 are rejected with ArgumentError.
Vector mvn_sample(const EigenDecomposition& precision, Rng& rng);

double spectral_radius(const EigenDecomposition& e);

template <class F>
EigenDecomposition map_spectrum(const EigenDecomposition& e, F&& f) {
  const std::size_t n = e.size();
  std::vector<std::size_t> order(n);
  Vector mapped(n);
  for (std::size_t i = 0; i < n; ++i) {
    order[i] = i;
    mapped[i] = f(e.values[i]);
  }
  // stable insertion sort keeps ties in original order
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = i; j > 0 && mapped[order[j]] > mapped[order[j - 1]]; --j) {
      std::swap(order[j], order[j - 1]);
    }
  }
  EigenDecomposition out{Vector(n), Matrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = mapped[order[c]];
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = e.vectors(r, order[c]);
  }
  return out;
}

}  // namespace nugget
