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

#ifndef MTL_TEAM_ESTIMATION_H_
#define MTL_TEAM_ESTIMATION_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "mtl/linalg.h"

namespace mtl {

// Which iterative best-response scheme drives an update: all agents at once
// (Jacobi splitting) or one at a time in index order (Gauss-Seidel).
enum class BrMode { kIibr, kSibr };

std::string_view BrModeName(BrMode mode);

// Linear-quadratic team estimation instance. Agent i observes y_i = x + v_i
// with x ~ N(0, 1) and v_i ~ N(0, sigma2), and estimates z_i = K_i y_i. The
// team-optimal gains solve gamma * K = eta.
struct TeamEstimationProblem {
  double p = 0.0;
  double q = 0.0;
  double sigma2 = 0.0;
  std::size_t n = 0;
  Matrix gamma;
  std::vector<double> eta;
};

// Linear estimator gains, one per agent.
struct GainVector {
  std::vector<double> k;

  friend bool operator==(const GainVector&, const GainVector&) = default;
};

enum class IterationStatus { kConverged, kDiverged, kMaxSweeps };

std::string_view IterationStatusName(IterationStatus status);

struct IterationTrace {
  BrMode mode = BrMode::kIibr;
  // iterates[t] and errors[t] describe the state after t sweeps; index 0 is
  // the initial point.
  std::vector<GainVector> iterates;
  std::vector<double> errors;
  IterationStatus status = IterationStatus::kMaxSweeps;
  // Sweeps performed when the status was decided.
  std::size_t sweeps = 0;
  // Set when an iterate overflowed to inf/nan.
  bool overflow = false;

  // Geometric mean of the last `window` error ratios e[t+1]/e[t], skipping
  // ratios whose denominator is zero. Returns 0 when no ratio is available.
  double AsymptoticRatio(std::size_t window = 10) const;
};

// Throws kInvalidProblem for sigma2 <= 0, n < 2, or p * (1 + sigma2) == 0.
TeamEstimationProblem BuildProblem(double p, double q, double sigma2,
                                   std::size_t n);

// Throws kSingularSystem when gamma is singular.
GainVector SolveExact(const TeamEstimationProblem& problem);

// Jacobi (-D^-1 (L + U)) or Gauss-Seidel (-(D + L)^-1 U) iteration matrix
// for gamma = D + L + U. Throws kSplitting on a zero diagonal entry.
Matrix IterationMatrix(const TeamEstimationProblem& problem, BrMode mode);

// Diagonal, strictly lower and strictly upper parts of gamma.
struct Splitting {
  Matrix d;
  Matrix l;
  Matrix u;
};
Splitting Split(const Matrix& gamma);

// One best-response sweep. IIBR reads only `k`; SIBR updates coordinates in
// index order using the freshest values.
GainVector BrSweep(const TeamEstimationProblem& problem, BrMode mode,
                   const GainVector& k);

// Best response of a single agent holding the others fixed.
double BestResponseGain(const TeamEstimationProblem& problem,
                        std::span<const double> k, std::size_t agent);

// Divergence threshold multiplier applied to 1 + ||k0 - K*||_inf.
inline constexpr double kDivergenceFactor = 1e6;

IterationTrace RunBrIteration(const TeamEstimationProblem& problem,
                              BrMode mode, const GainVector& k0,
                              std::size_t max_sweeps, double tol);

// Team cost (1/n^2) E[(x 1 - z)^T S (x 1 - z)] with S = (p - q) I + q 1 1^T.
// For p = q = 1 this is exactly E[(x - (1/n) sum_i K_i y_i)^2]. Its gradient
// is (2/n^2) (gamma K - eta).
double TeamMse(const TeamEstimationProblem& problem, const GainVector& k);

// Analytic gradient of TeamMse.
std::vector<double> TeamMseGradient(const TeamEstimationProblem& problem,
                                    std::span<const double> k);

}  // namespace mtl

#endif  // MTL_TEAM_ESTIMATION_H_
