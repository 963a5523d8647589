// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "depthsweep/linalg.hpp"

#include <algorithm>

namespace depthsweep {

namespace {

void require_positive(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("matrix dimensions must be positive, got " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

[[noreturn]] void shape_mismatch(const char *op, const Matrix &a,
                                 const Matrix &b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " +
                   a.shape_string() + " and " + b.shape_string());
}

} // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols) {
  require_positive(rows, cols);
  data_.assign(rows * cols, fill);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require_positive(rows, cols);
  if (data_.size() != rows * cols) {
    throw ShapeError("matrix " + shape_string() + " given " +
                     std::to_string(data_.size()) + " elements");
  }
}

Matrix Matrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto &row : rows) {
    if (row.size() != c) {
      throw ShapeError("ragged row in matrix literal");
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

std::string Matrix::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix matmul(const Matrix &a, const Matrix &b) {
  if (a.cols() != b.rows()) {
    shape_mismatch("matmul", a, b);
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Matrix out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    double *out_row = out.row(i).data();
    const double *a_row = a.row(i).data();
    for (std::size_t p = 0; p < k; ++p) {
      const double scale = a_row[p];
      if (scale == 0.0) {
        continue;
      }
      const double *b_row = b.row(p).data();
      for (std::size_t j = 0; j < n; ++j) {
        out_row[j] += scale * b_row[j];
      }
    }
  }
  ensure_finite(out, "matmul");
  return out;
}

Matrix matmul_nt(const Matrix &a, const Matrix &b) {
  if (a.cols() != b.cols()) {
    shape_mismatch("matmul_nt", a, b);
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  Matrix out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    const double *a_row = a.row(i).data();
    double *out_row = out.row(i).data();
    for (std::size_t j = 0; j < n; ++j) {
      const double *b_row = b.row(j).data();
      // Four fixed partial sums: vectorizes without reassociation flags and
      // keeps the summation order identical on every run.
      double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
      std::size_t p = 0;
      for (; p + 4 <= k; p += 4) {
        s0 += a_row[p] * b_row[p];
        s1 += a_row[p + 1] * b_row[p + 1];
        s2 += a_row[p + 2] * b_row[p + 2];
        s3 += a_row[p + 3] * b_row[p + 3];
      }
      for (; p < k; ++p) {
        s0 += a_row[p] * b_row[p];
      }
      out_row[j] = (s0 + s1) + (s2 + s3);
    }
  }
  ensure_finite(out, "matmul_nt");
  return out;
}

Matrix matmul_tn(const Matrix &a, const Matrix &b) {
  if (a.rows() != b.rows()) {
    shape_mismatch("matmul_tn", a, b);
  }
  const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
  Matrix out(m, n);
  for (std::size_t p = 0; p < k; ++p) {
    const double *a_row = a.row(p).data();
    const double *b_row = b.row(p).data();
    for (std::size_t i = 0; i < m; ++i) {
      const double scale = a_row[i];
      if (scale == 0.0) {
        continue;
      }
      double *out_row = out.row(i).data();
      for (std::size_t j = 0; j < n; ++j) {
        out_row[j] += scale * b_row[j];
      }
    }
  }
  ensure_finite(out, "matmul_tn");
  return out;
}

Matrix transpose(const Matrix &a) {
  if (a.empty()) {
    return {};
  }
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      out(j, i) = a(i, j);
    }
  }
  return out;
}

Matrix add_row_broadcast(const Matrix &a, const Matrix &bias) {
  if (bias.rows() != 1 || bias.cols() != a.cols()) {
    shape_mismatch("add_row_broadcast", a, bias);
  }
  Matrix out = a;
  const double *b = bias.data().data();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    double *row = out.row(i).data();
    for (std::size_t j = 0; j < out.cols(); ++j) {
      row[j] += b[j];
    }
  }
  ensure_finite(out, "add_row_broadcast");
  return out;
}

Matrix hadamard(const Matrix &a, const Matrix &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    shape_mismatch("hadamard", a, b);
  }
  Matrix out = a;
  auto o = out.data();
  auto bv = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] *= bv[i];
  }
  ensure_finite(out, "hadamard");
  return out;
}

Matrix column_sums(const Matrix &a) {
  Matrix out(1, a.cols());
  double *o = out.data().data();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double *row = a.row(i).data();
    for (std::size_t j = 0; j < a.cols(); ++j) {
      o[j] += row[j];
    }
  }
  ensure_finite(out, "column_sums");
  return out;
}

double frobenius_norm(const Matrix &a) {
  // Scaled accumulation; tiny norms stay representable.
  double scale = 0.0;
  for (double v : a.data()) {
    scale = std::max(scale, std::abs(v));
  }
  if (scale == 0.0) {
    return 0.0;
  }
  double sum = 0.0;
  for (double v : a.data()) {
    const double r = v / scale;
    sum += r * r;
  }
  return scale * std::sqrt(sum);
}

void ensure_finite(const Matrix &m, const std::string &what) {
  const auto values = m.data();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NumericError(what + ": non-finite value at (" +
                         std::to_string(i / m.cols()) + ", " +
                         std::to_string(i % m.cols()) + ")");
    }
  }
}

} // namespace depthsweep
