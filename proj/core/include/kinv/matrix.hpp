#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace kinv {

class Rng;

using Vector = std::vector<double>;

/// Dense row-major matrix of 64-bit floats.
///
/// Element (r, c) lives at data()[r * cols() + c]. Weight matrices follow the
/// convention that row j holds the incoming weights of neuron j.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool all_finite() const noexcept;
  std::string shape_string() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Products accumulate each output entry over the inner index in ascending
// order, so results do not depend on loop tiling or on which variant is used.

/// a · b. Throws ShapeError when a.cols() != b.rows().
Matrix matmul(const Matrix& a, const Matrix& b);
/// a · bᵀ. Throws ShapeError when a.cols() != b.cols().
Matrix matmul_nt(const Matrix& a, const Matrix& b);
/// aᵀ · b. Throws ShapeError when a.rows() != b.rows().
Matrix matmul_tn(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
/// a · x for a column vector x.
Vector matvec(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> x);
/// x / ‖x‖. Throws DegenerateInputError for a zero vector.
Vector unit_normalize(std::span<const double> x);

/// IID draws from the generalized Gaussian with density
/// β / (2αΓ(1/β)) · exp(-|w/α|^β), as sign · α · G^(1/β), G ~ Gamma(1/β, 1).
Matrix sample_gen_gaussian(std::size_t rows, std::size_t cols, double alpha, double beta, Rng& rng);
/// IID N(0, stddev²) draws.
Matrix sample_gaussian(std::size_t rows, std::size_t cols, double stddev, Rng& rng);

}  // namespace kinv
