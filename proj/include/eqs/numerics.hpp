#pragma once

// Dense complex linear algebra used throughout the pipeline: a small row-major
// matrix type, Hermitian eigendecomposition by cyclic Jacobi rotations, square
// SVD in the F = X D Y convention, and rank-revealing Gram-Schmidt.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "eqs/state_vector.hpp"

namespace eqs::num {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }

  Matrix adjoint() const;
  cplx trace() const;
  double frobenius_norm() const;
  bool all_finite() const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(cplx s);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, cplx s) { return a *= s; }
  friend Matrix operator*(cplx s, Matrix a) { return a *= s; }
  friend Matrix operator*(const Matrix& a, const Matrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

/// Kronecker product a (x) b; a's index is the more significant one.
Matrix kron(const Matrix& a, const Matrix& b);

/// y = A x
std::vector<cplx> matvec(const Matrix& a, std::span<const cplx> x);

/// ||A A^dagger - I||_F
double unitarity_error(const Matrix& u);

/// Hermitian matrix. Construction checks ||A - A^dagger||_F against
/// `tol * max(1, ||A||_F)` and stores the symmetrized (A + A^dagger) / 2.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const Matrix& a, double tol = 1e-8);

  std::size_t dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

 private:
  Matrix m_;
};

struct EighResult {
  std::vector<double> values;  // descending
  Matrix vectors;              // column k pairs with values[k]
};

/// Cyclic complex Jacobi. Converges when the off-diagonal Frobenius norm drops
/// to `rel_tol * ||A||_F`.
EighResult eigh(const HermitianMatrix& a, double rel_tol = 1e-12);

/// F = X diag(D) Y with X, Y unitary and D descending, non-negative.
struct SvdResult {
  Matrix x;
  std::vector<double> d;
  Matrix y;
};

/// Square matrices only. Throws std::invalid_argument on non-finite entries.
SvdResult svd(const Matrix& f);

/// exp(i H) for Hermitian H.
Matrix expi_hermitian(const HermitianMatrix& h);

/// Hermitian H with exp(i H) == U, eigenphases taken in (-pi, pi].
/// Throws std::runtime_error if U is not unitary to 1e-8.
Matrix log_unitary(const Matrix& u);

struct GramSchmidtResult {
  std::vector<StateVector> basis;
  /// coeffs(i, m) = <e_i|v_m>; the column of input m is zero below the row of
  /// the basis vector it introduced (or below `rank` at its time if dependent).
  Matrix coeffs;
  std::size_t rank = 0;
  /// kept_indices[i] is the input index that produced basis[i].
  std::vector<std::size_t> kept_indices;
};

/// Modified Gram-Schmidt with one re-orthogonalization pass. Inputs whose
/// residual norm after projection is <= tol are recorded as dependent.
GramSchmidtResult gram_schmidt(std::span<const StateVector> vectors, double tol = 1e-8);

}  // namespace eqs::num
