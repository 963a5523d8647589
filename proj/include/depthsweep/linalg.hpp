// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef DEPTHSWEEP_LINALG_HPP
#define DEPTHSWEEP_LINALG_HPP

#include "depthsweep/error.hpp"

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace depthsweep {

/// Dense row-major matrix of doubles. A default-constructed matrix is the
/// empty 0x0 placeholder; every other matrix has positive dimensions.
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

  double operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }
  double &operator()(std::size_t r, std::size_t c) noexcept {
    return data_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  std::string shape_string() const;

  bool operator==(const Matrix &) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// a[m x k] * b[k x n].
Matrix matmul(const Matrix &a, const Matrix &b);
/// a[m x k] * transpose(b[n x k]); both operands walked along rows.
Matrix matmul_nt(const Matrix &a, const Matrix &b);
/// transpose(a[k x m]) * b[k x n].
Matrix matmul_tn(const Matrix &a, const Matrix &b);

Matrix transpose(const Matrix &a);

/// Adds the 1 x n `bias` to every row of `a`.
Matrix add_row_broadcast(const Matrix &a, const Matrix &bias);

/// Elementwise product of equal-shaped matrices.
Matrix hadamard(const Matrix &a, const Matrix &b);

/// 1 x n row of column sums.
Matrix column_sums(const Matrix &a);

double frobenius_norm(const Matrix &a);

/// Throws NumericError naming the first non-finite element.
void ensure_finite(const Matrix &m, const std::string &what);

/// out(i, j) = f(a(i, j)). Throws NumericError with the index of the first
/// non-finite result.
template <class F> Matrix map_elementwise(const Matrix &a, F &&f) {
  Matrix out = a;
  auto values = out.data();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = f(values[i]);
    if (!std::isfinite(v)) {
      throw NumericError("map_elementwise produced a non-finite value at (" +
                         std::to_string(i / a.cols()) + ", " +
                         std::to_string(i % a.cols()) + ")");
    }
    values[i] = v;
  }
  return out;
}

} // namespace depthsweep

#endif // DEPTHSWEEP_LINALG_HPP
