#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "fcmgap/error.hpp"

namespace fcmgap {

/// Dense row-major matrix. Small by construction (tens of rows), so no
/// expression templates or BLAS.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) throw DimensionMismatch("ragged matrix row", cols_, row.size());
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix from_rows(const std::vector<std::vector<T>>& rows) {
    Matrix m;
    m.rows_ = rows.size();
    m.cols_ = rows.empty() ? 0 : rows.front().size();
    m.data_.reserve(m.rows_ * m.cols_);
    for (const auto& row : rows) {
      if (row.size() != m.cols_) throw DimensionMismatch("ragged matrix row", m.cols_, row.size());
      m.data_.insert(m.data_.end(), row.begin(), row.end());
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> values() const noexcept { return data_; }

  std::vector<std::vector<T>> to_rows() const {
    std::vector<std::vector<T>> out;
    out.reserve(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out.emplace_back(row(r).begin(), row(r).end());
    return out;
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  template <typename F>
  Matrix& transform(F&& f) {
    std::transform(data_.begin(), data_.end(), data_.begin(), std::forward<F>(f));
    return *this;
  }

  Matrix& operator+=(const Matrix& other) {
    if (other.rows_ != rows_ || other.cols_ != cols_)
      throw DimensionMismatch("matrix sum", rows_ * cols_, other.rows_ * other.cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Row vector times matrix: out_j = sum_i v_i * m(i, j).
template <typename T>
std::vector<T> row_times(std::span<const T> v, const Matrix<T>& m) {
  if (v.size() != m.rows()) throw DimensionMismatch("vector length vs matrix rows", m.rows(), v.size());
  std::vector<T> out(m.cols(), T{});
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (v[i] == T{}) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += v[i] * m(i, j);
  }
  return out;
}

}  // namespace fcmgap
