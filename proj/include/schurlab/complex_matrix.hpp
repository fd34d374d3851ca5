#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace schurlab {

using cplx = std::complex<double>;

// Dense complex matrix, row-major.  Sized for desk-scale experiments
// (dimensions up to 64); no attempt at cache blocking or BLAS dispatch.
class ComplexMatrix {
public:
  ComplexMatrix() : rows_(0), cols_(0) {}
  ComplexMatrix(std::size_t rows, std::size_t cols);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows);
  static ComplexMatrix diagonal(const std::vector<cplx>& d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<cplx>& data() const noexcept { return data_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const ComplexMatrix& b);
  std::vector<cplx> column(std::size_t j) const;
  void set_column(std::size_t j, const std::vector<cplx>& v);

  // Largest entry magnitude; zero for an empty matrix.
  double max_abs() const;
  // Throws InvalidInputError when any entry is NaN or infinite.
  void require_finite(const char* what) const;
  // Throws InvalidInputError unless the matrix is square with 1 <= n <= max_dim.
  void require_square(const char* what, std::size_t max_dim = 64) const;

  bool same_shape(const ComplexMatrix& o) const noexcept {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

private:
  std::size_t rows_, cols_;
  std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);
std::vector<cplx> operator*(const ComplexMatrix& a, const std::vector<cplx>& x);

// Euclidean norm of a complex vector.
double vec_norm(const std::vector<cplx>& v);
// Inner product conj(a).b, conjugate-linear in the first argument.
cplx vec_dot(const std::vector<cplx>& a, const std::vector<cplx>& b);
void vec_scale(std::vector<cplx>& v, cplx s);
// v -= s * w
void vec_axpy(std::vector<cplx>& v, cplx s, const std::vector<cplx>& w);

// Largest entry magnitude of a - b; shapes must match.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace schurlab
