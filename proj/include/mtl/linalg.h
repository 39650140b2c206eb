// Copyright 2026 The mtl Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MTL_LINALG_H_
#define MTL_LINALG_H_

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mtl {

// Small dense row-major matrix. Sized for the n <= ~16 systems used here.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix Identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<const double> data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

double MaxAbsDiff(const Matrix& a, const Matrix& b);
double MaxNorm(std::span<const double> x);
double MaxNormDiff(std::span<const double> a, std::span<const double> b);

// Gaussian elimination with partial pivoting. Throws kSingularSystem when a
// pivot vanishes relative to the matrix scale.
std::vector<double> Solve(const Matrix& a, std::span<const double> b);

// Inverse of a nonsingular square matrix (column-by-column Solve).
Matrix Inverse(const Matrix& a);

// All eigenvalues of a real square matrix: balancing, reduction to upper
// Hessenberg form by stabilized elimination, then Francis double-shift QR.
// Throws kNumerical if the QR sweep fails to deflate within its budget.
std::vector<std::complex<double>> Eigenvalues(const Matrix& a);

// Maximum eigenvalue modulus.
double SpectralRadius(const Matrix& a);

}  // namespace mtl

#endif  // MTL_LINALG_H_
