#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "eigcollide/errors.hpp"
#include "eigcollide/model.hpp"

namespace eigcollide {

/// Eigenvalues in solver output order ("raw" order).
using Spectrum = std::vector<Complex>;

/// Reusable dense complex eigensolver (Schur based, eigenvalues only).
class EigenvalueSolver {
 public:
  explicit EigenvalueSolver(int n = 0) : solver_(n) {}

  Spectrum operator()(const ComplexMatrix& m, const char* context = "eigenvalues") {
    if (m.rows() != m.cols()) throw NumericalError(std::string(context) + ": matrix is not square");
    if (!m.allFinite()) throw NumericalError(std::string(context) + ": matrix has non-finite entries");
    solver_.compute(m, false);
    if (solver_.info() != Eigen::Success)
      throw NumericalError(std::string(context) + ": eigensolver did not converge (dimension " +
                           std::to_string(m.rows()) + ")");
    const auto& ev = solver_.eigenvalues();
    return Spectrum(ev.data(), ev.data() + ev.size());
  }

 private:
  Eigen::ComplexEigenSolver<ComplexMatrix> solver_;
};

inline Spectrum eigenvalues(const ComplexMatrix& m) {
  EigenvalueSolver solver(static_cast<int>(m.rows()));
  return solver(m);
}

/// Smallest pairwise distance; +inf for fewer than two points.
inline double min_gap(std::span<const Complex> pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, std::abs(pts[i] - pts[j]));
  return best;
}

/// Distance from each point to its nearest other point.
inline std::vector<double> nearest_neighbor_gaps(std::span<const Complex> pts) {
  std::vector<double> out(pts.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (i != j) out[i] = std::min(out[i], std::abs(pts[i] - pts[j]));
  return out;
}

inline constexpr double kDegenerateGap = 1e-9;

/// True when the matrix has a repeated eigenvalue.
///
/// A computed gap below kDegenerateGap always counts. Defective eigenvalues
/// split by roughly eps^(1/k) under rounding, so clusters of k computed
/// eigenvalues within kClusterRadius are also tested directly: the cluster is
/// a repeated eigenvalue when (A - mu I)^k, mu the cluster mean, has k
/// singular values at rounding level.
inline bool has_repeated_eigenvalue(const ComplexMatrix& a, std::span<const Complex> spectrum) {
  constexpr double kClusterRadius = 1e-4;
  constexpr double kRankTol = 1e-15;
  if (min_gap(spectrum) < kDegenerateGap) return true;

  const std::size_t n = spectrum.size();
  std::vector<int> label(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] >= 0) continue;
    label[i] = next;
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v)
        if (label[v] < 0 && std::abs(spectrum[u] - spectrum[v]) < kClusterRadius) {
          label[v] = next;
          stack.push_back(v);
        }
    }
    ++next;
  }

  const double scale = std::max(1.0, a.norm());
  for (int c = 0; c < next; ++c) {
    Complex mu = 0.0;
    int k = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (label[i] == c) {
        mu += spectrum[i];
        ++k;
      }
    if (k < 2) continue;
    mu /= static_cast<double>(k);
    ComplexMatrix shifted = a;
    shifted.diagonal().array() -= mu;
    ComplexMatrix power = shifted;
    for (int p = 1; p < k; ++p) power = power * shifted;
    Eigen::JacobiSVD<ComplexMatrix> svd(power);
    const auto& sv = svd.singularValues();  // descending
    if (sv(sv.size() - k) <= kRankTol * std::pow(scale, k)) return true;
  }
  return false;
}

inline bool has_repeated_eigenvalue(const ComplexMatrix& a) {
  const Spectrum ev = eigenvalues(a);
  return has_repeated_eigenvalue(a, ev);
}

}  // namespace eigcollide
