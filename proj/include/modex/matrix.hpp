#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace modex {

// Dense row-major matrix of doubles. Just enough linear algebra for the
// model and the spectral estimator; no views, no expression templates.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  Matrix(std::size_t r, std::size_t c, std::vector<double> d);

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  bool all_finite() const;
};

// y = W x
void matvec(const Matrix& w, std::span<const double> x, std::span<double> y);
// y = W^T x
void matvec_t(const Matrix& w, std::span<const double> x, std::span<double> y);
// W += scale * a b^T
void add_outer(Matrix& w, std::span<const double> a, std::span<const double> b,
               double scale = 1.0);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
// v /= ||v||; returns the norm (0 leaves v untouched)
double normalize(std::span<double> v);

}  // namespace modex
