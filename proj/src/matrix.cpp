#include "modex/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace modex {

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<double> d)
    : rows(r), cols(c), data(std::move(d)) {
  if (data.size() != rows * cols) {
    throw std::invalid_argument("Matrix: data length does not match rows*cols");
  }
}

bool Matrix::all_finite() const {
  for (double x : data) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void matvec(const Matrix& w, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < w.rows; ++i) {
    double acc = 0.0;
    const double* row = w.data.data() + i * w.cols;
    for (std::size_t j = 0; j < w.cols; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void matvec_t(const Matrix& w, std::span<const double> x, std::span<double> y) {
  for (std::size_t j = 0; j < w.cols; ++j) y[j] = 0.0;
  for (std::size_t i = 0; i < w.rows; ++i) {
    const double xi = x[i];
    const double* row = w.data.data() + i * w.cols;
    for (std::size_t j = 0; j < w.cols; ++j) y[j] += row[j] * xi;
  }
}

void add_outer(Matrix& w, std::span<const double> a, std::span<const double> b,
               double scale) {
  for (std::size_t i = 0; i < w.rows; ++i) {
    double* row = w.data.data() + i * w.cols;
    const double ai = scale * a[i];
    for (std::size_t j = 0; j < w.cols; ++j) row[j] += ai * b[j];
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double normalize(std::span<double> v) {
  const double n = norm2(v);
  if (n > 0.0) {
    for (double& x : v) x /= n;
  }
  return n;
}

}  // namespace modex
