#include "kinv/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "kinv/error.hpp"
#include "kinv/rng.hpp"

namespace kinv {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("Matrix: data length " + std::to_string(data_.size()) +
                     " does not match shape " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) {
      throw ShapeError("Matrix::from_rows: ragged rows");
    }
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(data));
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
  }
  return m;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::string Matrix::shape_string() const {
  return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

namespace {

void require_finite(const Matrix& m, const char* op) {
  if (!m.all_finite()) {
    throw NumericError(std::string(op) + ": result contains non-finite entries");
  }
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: cannot multiply " + a.shape_string() + " by " + b.shape_string());
  }
  const std::size_t n = a.rows();
  const std::size_t inner = a.cols();
  const std::size_t m = b.cols();
  Matrix c(n, m);
  auto cd = c.data();
  auto ad = a.data();
  auto bd = b.data();
  // i-k-j order: every c(i, j) still sums over k in ascending order.
  for (std::size_t i = 0; i < n; ++i) {
    double* crow = cd.data() + i * m;
    for (std::size_t k = 0; k < inner; ++k) {
      const double aik = ad[i * inner + k];
      const double* brow = bd.data() + k * m;
      for (std::size_t j = 0; j < m; ++j) {
        crow[j] += aik * brow[j];
      }
    }
  }
  require_finite(c, "matmul");
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  constexpr std::size_t kBlock = 32;
  for (std::size_t r0 = 0; r0 < a.rows(); r0 += kBlock) {
    const std::size_t r1 = std::min(r0 + kBlock, a.rows());
    for (std::size_t c0 = 0; c0 < a.cols(); c0 += kBlock) {
      const std::size_t c1 = std::min(c0 + kBlock, a.cols());
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) {
          t(c, r) = a(r, c);
        }
      }
    }
  }
  return t;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_nt: cannot multiply " + a.shape_string() + " by transpose of " +
                     b.shape_string());
  }
  return matmul(a, transpose(b));
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_tn: cannot multiply transpose of " + a.shape_string() + " by " +
                     b.shape_string());
  }
  const std::size_t inner = a.rows();
  const std::size_t n = a.cols();
  const std::size_t m = b.cols();
  Matrix c(n, m);
  auto cd = c.data();
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t k = 0; k < inner; ++k) {
    const double* brow = bd.data() + k * m;
    for (std::size_t i = 0; i < n; ++i) {
      const double aki = ad[k * n + i];
      double* crow = cd.data() + i * m;
      for (std::size_t j = 0; j < m; ++j) {
        crow[j] += aki * brow[j];
      }
    }
  }
  require_finite(c, "matmul_tn");
  return c;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) {
    throw ShapeError("matvec: cannot multiply " + a.shape_string() + " by vector of length " +
                     std::to_string(x.size()));
  }
  Vector y(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    y[r] = dot(a.row(r), x);
  }
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("dot: length " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i] * b[i];
  }
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

Vector unit_normalize(std::span<const double> x) {
  const double n = norm2(x);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DegenerateInputError("unit_normalize: vector has zero or non-finite norm");
  }
  Vector out(x.begin(), x.end());
  for (double& v : out) {
    v /= n;
  }
  return out;
}

Matrix sample_gen_gaussian(std::size_t rows, std::size_t cols, double alpha, double beta, Rng& rng) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw ParameterError("sample_gen_gaussian: alpha and beta must be positive");
  }
  Matrix w(rows, cols);
  const double shape = 1.0 / beta;
  for (double& v : w.data()) {
    const double g = rng.gamma(shape);
    const double s = rng.sign();
    v = s * alpha * std::pow(g, 1.0 / beta);
  }
  return w;
}

Matrix sample_gaussian(std::size_t rows, std::size_t cols, double stddev, Rng& rng) {
  if (!(stddev >= 0.0)) {
    throw ParameterError("sample_gaussian: stddev must be nonnegative");
  }
  Matrix w(rows, cols);
  for (double& v : w.data()) {
    v = stddev * rng.normal();
  }
  return w;
}

}  // namespace kinv
