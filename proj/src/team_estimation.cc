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

#include "mtl/team_estimation.h"

#include <cmath>
#include <string>

#include "mtl/error.h"

namespace mtl {

std::string_view BrModeName(BrMode mode) {
  return mode == BrMode::kIibr ? "IIBR" : "SIBR";
}

std::string_view IterationStatusName(IterationStatus status) {
  switch (status) {
    case IterationStatus::kConverged: return "Converged";
    case IterationStatus::kDiverged: return "Diverged";
    case IterationStatus::kMaxSweeps: return "MaxSweeps";
  }
  return "Unknown";
}

double IterationTrace::AsymptoticRatio(std::size_t window) const {
  double log_sum = 0.0;
  std::size_t used = 0;
  for (std::size_t t = errors.size(); t-- > 1 && used < window;) {
    if (errors[t - 1] == 0.0 || !std::isfinite(errors[t])) continue;
    log_sum += std::log(errors[t] / errors[t - 1]);
    ++used;
  }
  return used == 0 ? 0.0 : std::exp(log_sum / static_cast<double>(used));
}

TeamEstimationProblem BuildProblem(double p, double q, double sigma2,
                                   std::size_t n) {
  if (!(sigma2 > 0.0)) {
    throw Error(ErrorKind::kInvalidProblem, "sigma2 must be positive");
  }
  if (n < 2) throw Error(ErrorKind::kInvalidProblem, "need at least 2 agents");
  const double diag = p * (1.0 + sigma2);
  if (diag == 0.0 || !std::isfinite(diag) || !std::isfinite(q)) {
    throw Error(ErrorKind::kInvalidProblem,
                "diagonal p(1 + sigma2) must be finite and nonzero");
  }
  TeamEstimationProblem problem{p, q, sigma2, n, Matrix(n, n, q), {}};
  for (std::size_t i = 0; i < n; ++i) problem.gamma(i, i) = diag;
  problem.eta.assign(n, p + static_cast<double>(n - 1) * q);
  return problem;
}

GainVector SolveExact(const TeamEstimationProblem& problem) {
  return GainVector{Solve(problem.gamma, problem.eta)};
}

Splitting Split(const Matrix& gamma) {
  const std::size_t n = gamma.rows();
  Splitting s{Matrix(n, n), Matrix(n, n), Matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        s.d(i, j) = gamma(i, j);
      } else if (i > j) {
        s.l(i, j) = gamma(i, j);
      } else {
        s.u(i, j) = gamma(i, j);
      }
    }
  }
  return s;
}

Matrix IterationMatrix(const TeamEstimationProblem& problem, BrMode mode) {
  const std::size_t n = problem.n;
  for (std::size_t i = 0; i < n; ++i) {
    if (problem.gamma(i, i) == 0.0) {
      throw Error(ErrorKind::kSplitting,
                  "zero diagonal entry at row " + std::to_string(i));
    }
  }
  const Splitting s = Split(problem.gamma);
  Matrix a(n, n);
  if (mode == BrMode::kIibr) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) a(i, j) = -problem.gamma(i, j) / problem.gamma(i, i);
      }
    }
    return a;
  }
  // -(D + L)^-1 U by forward substitution on each column of U.
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t i = 0; i < n; ++i) {
      double v = -s.u(i, col);
      for (std::size_t j = 0; j < i; ++j) v -= s.l(i, j) * a(j, col);
      a(i, col) = v / s.d(i, i);
    }
  }
  return a;
}

double BestResponseGain(const TeamEstimationProblem& problem,
                        std::span<const double> k, std::size_t agent) {
  double rhs = problem.eta[agent];
  for (std::size_t j = 0; j < problem.n; ++j) {
    if (j != agent) rhs -= problem.gamma(agent, j) * k[j];
  }
  return rhs / problem.gamma(agent, agent);
}

GainVector BrSweep(const TeamEstimationProblem& problem, BrMode mode,
                   const GainVector& k) {
  GainVector next = k;
  for (std::size_t i = 0; i < problem.n; ++i) {
    next.k[i] = BestResponseGain(
        problem, mode == BrMode::kIibr ? std::span<const double>(k.k)
                                       : std::span<const double>(next.k),
        i);
  }
  return next;
}

IterationTrace RunBrIteration(const TeamEstimationProblem& problem,
                              BrMode mode, const GainVector& k0,
                              std::size_t max_sweeps, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::kInvalidProblem, "tol must be > 0");
  if (k0.k.size() != problem.n) {
    throw Error(ErrorKind::kInvalidProblem, "k0 has wrong length");
  }
  for (double v : k0.k) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kInvalidProblem, "k0 must be finite");
    }
  }
  const GainVector exact = SolveExact(problem);
  IterationTrace trace;
  trace.mode = mode;
  const double e0 = MaxNormDiff(k0.k, exact.k);
  const double blowup = kDivergenceFactor * (1.0 + e0);
  trace.iterates.push_back(k0);
  trace.errors.push_back(e0);
  if (e0 <= tol) {
    trace.status = IterationStatus::kConverged;
    return trace;
  }
  GainVector k = k0;
  for (std::size_t sweep = 1; sweep <= max_sweeps; ++sweep) {
    k = BrSweep(problem, mode, k);
    const double err = MaxNormDiff(k.k, exact.k);
    trace.iterates.push_back(k);
    trace.errors.push_back(err);
    trace.sweeps = sweep;
    if (!std::isfinite(err)) {
      trace.overflow = true;
      trace.status = IterationStatus::kDiverged;
      return trace;
    }
    if (err <= tol) {
      trace.status = IterationStatus::kConverged;
      return trace;
    }
    if (err > blowup) {
      trace.status = IterationStatus::kDiverged;
      return trace;
    }
  }
  trace.status = IterationStatus::kMaxSweeps;
  return trace;
}

double TeamMse(const TeamEstimationProblem& problem, const GainVector& k) {
  const std::size_t n = problem.n;
  double cross = 0.0;
  double self = 0.0;
  double sum_miss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(k.k[i])) {
      throw Error(ErrorKind::kNumerical, "TeamMse: non-finite gain");
    }
    const double miss = 1.0 - k.k[i];
    sum_miss += miss;
    self += miss * miss;
    cross += k.k[i] * k.k[i];
  }
  // sum_ij S_ij (1 - K_i)(1 - K_j) = (p - q) sum (1 - K_i)^2 + q (sum (1 - K_i))^2
  const double bias = (problem.p - problem.q) * self + problem.q * sum_miss * sum_miss;
  const double noise = problem.p * problem.sigma2 * cross;
  const double nn = static_cast<double>(n * n);
  return (bias + noise) / nn;
}

std::vector<double> TeamMseGradient(const TeamEstimationProblem& problem,
                                    std::span<const double> k) {
  std::vector<double> g = problem.gamma * k;
  const double scale = 2.0 / static_cast<double>(problem.n * problem.n);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = scale * (g[i] - problem.eta[i]);
  return g;
}

}  // namespace mtl
