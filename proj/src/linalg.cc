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

#include "mtl/linalg.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "mtl/error.h"

namespace mtl {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) {
      throw Error(ErrorKind::kInvalidProblem, "ragged matrix literal");
    }
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::Identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  }
  return y;
}

double MaxAbsDiff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

double MaxNorm(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double MaxNormDiff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (std::isnan(d)) return d;
    m = std::max(m, d);
  }
  return m;
}

std::vector<double> Solve(const Matrix& a, std::span<const double> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) {
    throw Error(ErrorKind::kInvalidProblem, "Solve: dimension mismatch");
  }
  Matrix lu = a;
  std::vector<double> x(b.begin(), b.end());
  double scale = 0.0;
  for (double v : a.data()) scale = std::max(scale, std::abs(v));
  const double tiny = 1e-14 * std::max(scale, 1e-300);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(lu(r, col)) > std::abs(lu(pivot, col))) pivot = r;
    }
    if (!(std::abs(lu(pivot, col)) > tiny)) {
      throw Error(ErrorKind::kSingularSystem,
                  "Solve: singular matrix at column " + std::to_string(col));
    }
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(pivot, j), lu(col, j));
      std::swap(x[pivot], x[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = lu(r, col) / lu(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) lu(r, j) -= f * lu(col, j);
      x[r] -= f * x[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu(i, j) * x[j];
    x[i] = s / lu(i, i);
  }
  return x;
}

Matrix Inverse(const Matrix& a) {
  const std::size_t n = a.rows();
  Matrix inv(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    const auto col = Solve(a, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

namespace {

// 1-based view over a square matrix; the Hessenberg/QR routines below are
// written against the classical 1-based formulation.
class OneBased {
 public:
  explicit OneBased(Matrix& m) : m_(m) {}
  double& operator()(int i, int j) { return m_(i - 1, j - 1); }

 private:
  Matrix& m_;
};

double SignOf(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

void Balance(Matrix& m) {
  constexpr double kRadix = 2.0;
  constexpr double kSqrdx = kRadix * kRadix;
  const int n = static_cast<int>(m.rows());
  OneBased a(m);
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 1; i <= n; ++i) {
      double r = 0.0, c = 0.0;
      for (int j = 1; j <= n; ++j) {
        if (j != i) {
          c += std::abs(a(j, i));
          r += std::abs(a(i, j));
        }
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / kRadix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= kRadix;
        c *= kSqrdx;
      }
      g = r * kRadix;
      while (c > g) {
        f /= kRadix;
        c /= kSqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (int j = 1; j <= n; ++j) a(i, j) *= g;
        for (int j = 1; j <= n; ++j) a(j, i) *= f;
      }
    }
  }
}

void ReduceToHessenberg(Matrix& m) {
  const int n = static_cast<int>(m.rows());
  OneBased a(m);
  for (int k = 2; k < n; ++k) {
    double x = 0.0;
    int i = k;
    for (int j = k; j <= n; ++j) {
      if (std::abs(a(j, k - 1)) > std::abs(x)) {
        x = a(j, k - 1);
        i = j;
      }
    }
    if (i != k) {
      for (int j = k - 1; j <= n; ++j) std::swap(a(i, j), a(k, j));
      for (int j = 1; j <= n; ++j) std::swap(a(j, i), a(j, k));
    }
    if (x != 0.0) {
      for (i = k + 1; i <= n; ++i) {
        double y = a(i, k - 1);
        if (y == 0.0) continue;
        y /= x;
        a(i, k - 1) = y;
        for (int j = k; j <= n; ++j) a(i, j) -= y * a(k, j);
        for (int j = 1; j <= n; ++j) a(j, k) += y * a(j, i);
      }
    }
  }
  for (int i = 3; i <= n; ++i) {
    for (int j = 1; j < i - 1; ++j) a(i, j) = 0.0;
  }
}

std::vector<std::complex<double>> HessenbergQr(Matrix& m) {
  constexpr int kMaxIterationsPerEigenvalue = 60;
  const int n = static_cast<int>(m.rows());
  OneBased a(m);
  std::vector<double> wr(n + 1, 0.0), wi(n + 1, 0.0);

  double anorm = 0.0;
  for (int i = 1; i <= n; ++i) {
    for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += std::abs(a(i, j));
  }
  int nn = n;
  double t = 0.0;
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0, w = 0.0, x = 0.0, y = 0.0,
         z = 0.0;
  while (nn >= 1) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l >= 2; --l) {
        s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) + s == s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      x = a(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn--] = 0.0;
      } else {
        y = a(nn - 1, nn - 1);
        w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + w;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + SignOf(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn - 1] = -(wi[nn] = z);
          }
          nn -= 2;
        } else {
          if (its == kMaxIterationsPerEigenvalue) {
            std::ostringstream msg;
            msg << "Eigenvalues: QR iteration did not deflate after " << its
                << " sweeps (active block " << l << ".." << nn << " of " << n
                << ", subdiagonal " << a(nn, nn - 1) << ")";
            throw Error(ErrorKind::kNumerical, msg.str());
          }
          if (its == 10 || its == 20 || its == 40) {
            // Exceptional shift.
            t += x;
            for (int i = 1; i <= nn; ++i) a(i, i) -= x;
            s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int mm = nn - 2;
          for (; mm >= l; --mm) {
            z = a(mm, mm);
            r = x - z;
            s = y - z;
            p = (r * s - w) / a(mm + 1, mm) + a(mm, mm + 1);
            q = a(mm + 1, mm + 1) - z - r - s;
            r = a(mm + 2, mm + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (mm == l) break;
            const double u = std::abs(a(mm, mm - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a(mm - 1, mm - 1)) +
                                            std::abs(z) +
                                            std::abs(a(mm + 1, mm + 1)));
            if (u + v == v) break;
          }
          for (int i = mm + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != mm + 2) a(i, i - 3) = 0.0;
          }
          for (int k = mm; k <= nn - 1; ++k) {
            if (k != mm) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = a(k + 2, k - 1);
              if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            if ((s = SignOf(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
              if (k == mm) {
                if (l != mm) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k != nn - 1) {
                  p += r * a(k + 2, j);
                  a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k != nn - 1) {
                  p += z * a(i, k + 2);
                  a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l < nn - 1);
  }

  std::vector<std::complex<double>> out;
  out.reserve(n);
  for (int i = 1; i <= n; ++i) out.emplace_back(wr[i], wi[i]);
  return out;
}

}  // namespace

std::vector<std::complex<double>> Eigenvalues(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::kNumerical, "Eigenvalues: matrix is not square");
  }
  for (double v : a.data()) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kNumerical, "Eigenvalues: non-finite entry");
    }
  }
  if (a.rows() == 0) return {};
  if (a.rows() == 1) return {std::complex<double>(a(0, 0), 0.0)};
  Matrix h = a;
  Balance(h);
  ReduceToHessenberg(h);
  return HessenbergQr(h);
}

double SpectralRadius(const Matrix& a) {
  double rho = 0.0;
  for (const auto& lambda : Eigenvalues(a)) rho = std::max(rho, std::abs(lambda));
  return rho;
}

}  // namespace mtl
