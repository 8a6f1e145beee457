#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "efunc/bigfloat.hpp"
#include "efunc/error.hpp"

namespace efunc {

// Field-element protocol used by the generic algorithms below. Types other
// than BigRational provide the same three functions in namespace efunc.
inline bool is_zero(const BigRational& x) { return sgn(x) == 0; }
inline BigRational zero_like(const BigRational&) { return BigRational(0); }
inline BigRational one_like(const BigRational&) { return BigRational(1); }

/// Dense row-major matrix. Entries of a non-empty matrix double as the
/// prototype for zero/one (they carry the field for NFElement).
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n, const T& prototype) {
    Matrix m(n, n, zero_like(prototype));
    for (std::size_t i = 0; i < n; ++i) m(i, i) = one_like(prototype);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<T> row(std::size_t i) const {
    return std::vector<T>(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                          data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
  }
  std::vector<T> column(std::size_t j) const {
    std::vector<T> out;
    out.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out.push_back((*this)(i, j));
    return out;
  }

  bool is_zero_matrix() const {
    for (const auto& x : data_)
      if (!is_zero(x)) return false;
    return true;
  }

  Matrix transpose() const {
    Matrix t;
    t.rows_ = cols_;
    t.cols_ = rows_;
    t.data_.reserve(data_.size());
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = 0; i < rows_; ++i) t.data_.push_back((*this)(i, j));
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    require(a.cols_ == b.rows_, ErrorCode::InvalidInput, "matrix product: dimension mismatch");
    require(!a.data_.empty() || !b.data_.empty(), ErrorCode::InvalidInput, "matrix product: empty");
    const T& proto = a.data_.empty() ? b.data_.front() : a.data_.front();
    Matrix c(a.rows_, b.cols_, zero_like(proto));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (is_zero(aik)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) = c(i, j) + aik * b(k, j);
      }
    return c;
  }
  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    require(a.rows_ == b.rows_ && a.cols_ == b.cols_, ErrorCode::InvalidInput, "matrix sum: dimension mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] = a.data_[i] + b.data_[i];
    return c;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    require(a.rows_ == b.rows_ && a.cols_ == b.cols_, ErrorCode::InvalidInput, "matrix difference: dimension mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] = a.data_[i] - b.data_[i];
    return c;
  }
  friend std::vector<T> operator*(const Matrix& a, const std::vector<T>& v) {
    require(a.cols_ == v.size() && !v.empty(), ErrorCode::InvalidInput, "matrix-vector product: dimension mismatch");
    std::vector<T> out(a.rows_, zero_like(v.front()));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j)
        if (!is_zero(a(i, j))) out[i] = out[i] + a(i, j) * v[j];
    return out;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  template <class F>
  auto map(F&& f) const {
    using U = decltype(f(std::declval<const T&>()));
    Matrix<U> out;
    out.rows_ = rows_;
    out.cols_ = cols_;
    out.data_.reserve(data_.size());
    for (const auto& x : data_) out.data_.push_back(f(x));
    return out;
  }

  const std::vector<T>& data() const { return data_; }

 private:
  template <class>
  friend class Matrix;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Reduced row echelon form in place; returns pivot columns.
template <class T>
std::vector<std::size_t> row_reduce(Matrix<T>& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && is_zero(m(p, c))) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    T inv = one_like(m(r, c)) / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) = m(r, j) * inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || is_zero(m(i, c))) continue;
      T factor = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) = m(i, j) - factor * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <class T>
std::size_t rank(Matrix<T> m) {
  return row_reduce(m).size();
}

/// Basis of the right kernel {x : m x = 0}.
template <class T>
std::vector<std::vector<T>> kernel(Matrix<T> m) {
  const std::size_t n = m.cols();
  if (n == 0) return {};
  T proto = m(0, 0);
  auto pivots = row_reduce(m);
  std::vector<bool> is_pivot(n, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::vector<T>> basis;
  for (std::size_t free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    std::vector<T> v(n, zero_like(proto));
    v[free] = one_like(proto);
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = zero_like(proto) - m(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Unique solution of a square system, or nullopt when singular.
template <class T>
std::optional<std::vector<T>> solve(const Matrix<T>& a, const std::vector<T>& b) {
  require(a.square() && a.rows() == b.size(), ErrorCode::InvalidInput, "solve: dimension mismatch");
  const std::size_t n = a.rows();
  if (n == 0) return std::vector<T>{};
  Matrix<T> aug(n, n + 1, zero_like(b.front()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n) = b[i];
  }
  auto pivots = row_reduce(aug);
  if (pivots.size() < n || pivots.back() >= n) return std::nullopt;
  std::vector<T> x;
  x.reserve(n);
  for (std::size_t i = 0; i < n; ++i) x.push_back(aug(i, n));
  return x;
}

/// Some solution of a (possibly singular) system, or nullopt when inconsistent.
template <class T>
std::optional<std::vector<T>> solve_any(const Matrix<T>& a, const std::vector<T>& b) {
  const std::size_t n = a.cols();
  Matrix<T> aug(a.rows(), n + 1, zero_like(b.front()));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n) = b[i];
  }
  auto pivots = row_reduce(aug);
  if (!pivots.empty() && pivots.back() == n) return std::nullopt;
  std::vector<T> x(n, zero_like(b.front()));
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, n);
  return x;
}

template <class T>
T determinant(Matrix<T> m) {
  require(m.square() && m.rows() > 0, ErrorCode::InvalidInput, "determinant: need a non-empty square matrix");
  const std::size_t n = m.rows();
  T det = one_like(m(0, 0));
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && is_zero(m(p, c))) ++p;
    if (p == n) return zero_like(det);
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
      det = zero_like(det) - det;
    }
    det = det * m(c, c);
    T inv = one_like(det) / m(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (is_zero(m(i, c))) continue;
      T factor = m(i, c) * inv;
      for (std::size_t j = c; j < n; ++j) m(i, j) = m(i, j) - factor * m(c, j);
    }
  }
  return det;
}

template <class T>
std::optional<Matrix<T>> inverse(const Matrix<T>& a) {
  require(a.square() && a.rows() > 0, ErrorCode::InvalidInput, "inverse: need a non-empty square matrix");
  const std::size_t n = a.rows();
  Matrix<T> aug(n, 2 * n, zero_like(a(0, 0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = one_like(a(0, 0));
  }
  auto pivots = row_reduce(aug);
  if (pivots.size() < n || pivots[n - 1] >= n) return std::nullopt;
  Matrix<T> inv(n, n, zero_like(a(0, 0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

}  // namespace efunc
