#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "eigcollide/curves.hpp"
#include "eigcollide/errors.hpp"
#include "eigcollide/rng.hpp"

namespace eigcollide {

using ComplexMatrix = Eigen::MatrixXcd;

enum class EnsembleKind { ComplexGaussian, SymmetricBernoulli, TracelessBernoulli, TracelessComplexGaussian };

enum class InitKind { PlainGinibre, MeanderRotated, SectorsRotated };

inline std::string_view to_string(EnsembleKind e) {
  switch (e) {
    case EnsembleKind::ComplexGaussian: return "complex_gaussian";
    case EnsembleKind::SymmetricBernoulli: return "symmetric_bernoulli";
    case EnsembleKind::TracelessBernoulli: return "traceless_bernoulli";
    case EnsembleKind::TracelessComplexGaussian: return "traceless_complex_gaussian";
  }
  return "?";
}

inline std::string_view to_string(InitKind i) {
  switch (i) {
    case InitKind::PlainGinibre: return "plain_ginibre";
    case InitKind::MeanderRotated: return "meander_rotated";
    case InitKind::SectorsRotated: return "sectors_rotated";
  }
  return "?";
}

inline EnsembleKind parse_ensemble(std::string_view s) {
  if (s == "complex_gaussian") return EnsembleKind::ComplexGaussian;
  if (s == "symmetric_bernoulli") return EnsembleKind::SymmetricBernoulli;
  if (s == "traceless_bernoulli") return EnsembleKind::TracelessBernoulli;
  if (s == "traceless_complex_gaussian") return EnsembleKind::TracelessComplexGaussian;
  throw ConfigError("ensemble: unknown value '" + std::string(s) + "'");
}

inline InitKind parse_init(std::string_view s) {
  if (s == "plain_ginibre") return InitKind::PlainGinibre;
  if (s == "meander_rotated") return InitKind::MeanderRotated;
  if (s == "sectors_rotated") return InitKind::SectorsRotated;
  throw ConfigError("init: unknown value '" + std::string(s) + "'");
}

/// One experiment: which random matrix, which curve, which seed.
struct ModelSpec {
  int n = 10;
  EnsembleKind ensemble = EnsembleKind::ComplexGaussian;
  CurveKind curve = CurveKind::Circle;
  std::uint64_t seed = 0;
  InitKind init = InitKind::PlainGinibre;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Throws ConfigError naming the offending field.
inline void validate(const ModelSpec& spec) {
  if (spec.n < 2) throw ConfigError("n: dimension must be at least 2, got " + std::to_string(spec.n));
  if (spec.curve == CurveKind::Crossing && spec.n % 2 == 0)
    throw ConfigError("n: the crossing curve requires odd n (even n puts two curve points on the crossing at once), got " +
                      std::to_string(spec.n));
  if (spec.init == InitKind::MeanderRotated && spec.curve != CurveKind::Circuit)
    throw ConfigError("init: meander_rotated requires curve = circuit");
  if (spec.init == InitKind::SectorsRotated && spec.curve != CurveKind::Crossing)
    throw ConfigError("init: sectors_rotated requires curve = crossing");
}

struct InterpolationWeights {
  double alpha;
  double beta;
};

inline InterpolationWeights interpolation_weights(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("interpolation_weights: s must lie in [0,1]");
  const double a = s * std::numbers::pi / 2;
  return {std::cos(a), std::sin(a)};
}

/// I.i.d. entries of variance 1/n. Pure function of its arguments.
inline ComplexMatrix sample_ginibre(int n, EnsembleKind ensemble, std::uint64_t seed) {
  if (n < 2) throw ConfigError("sample_ginibre: dimension must be at least 2");
  Engine eng(seed);
  ComplexMatrix m(n, n);
  const bool gaussian =
      ensemble == EnsembleKind::ComplexGaussian || ensemble == EnsembleKind::TracelessComplexGaussian;
  if (gaussian) {
    std::normal_distribution<double> nd(0.0, std::sqrt(1.0 / (2.0 * n)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double re = nd(eng);
        const double im = nd(eng);
        m(i, j) = {re, im};
      }
  } else {
    const double v = 1.0 / std::sqrt(static_cast<double>(n));
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = coin(eng) ? v : -v;
  }
  if (ensemble == EnsembleKind::TracelessBernoulli || ensemble == EnsembleKind::TracelessComplexGaussian) {
    const Complex shift = m.trace() / static_cast<double>(n);
    for (int i = 0; i < n; ++i) m(i, i) -= shift;
  }
  return m;
}

/// Diagonal of U(t): entry k is gamma(frac(t) + k/n), wrapped into [0,1).
inline Eigen::VectorXcd curve_diagonal(CurveKind curve, int n, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("curve_matrix: t must lie in [0,1]");
  const double base = t - std::floor(t);
  Eigen::VectorXcd d(n);
  for (int k = 0; k < n; ++k) {
    double u = base + static_cast<double>(k) / n;
    if (u >= 1.0) u -= 1.0;
    d(k) = curve_point(curve, u);
  }
  return d;
}

inline ComplexMatrix curve_matrix(CurveKind curve, int n, double t) {
  return curve_diagonal(curve, n, t).asDiagonal();
}

/// alpha(s) * base + beta(s) * U(t).
inline ComplexMatrix assemble(const ModelSpec& spec, const ComplexMatrix& base, double s, double t) {
  if (base.rows() != spec.n || base.cols() != spec.n)
    throw ConfigError("assemble: base matrix is " + std::to_string(base.rows()) + "x" + std::to_string(base.cols()) +
                      ", expected dimension " + std::to_string(spec.n));
  const auto w = interpolation_weights(s);
  ComplexMatrix r = w.alpha * base;
  r.diagonal() += w.beta * curve_diagonal(spec.curve, spec.n, t);
  return r;
}

/// Haar unitary: QR of a complex Gaussian matrix with the phases of R's
/// diagonal pushed into Q.
inline ComplexMatrix sample_haar_unitary(int n, std::uint64_t seed) {
  if (n < 2) throw ConfigError("sample_haar_unitary: dimension must be at least 2");
  const ComplexMatrix g = sample_ginibre(n, EnsembleKind::ComplexGaussian, seed);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    const double mag = std::abs(d);
    q.col(k) *= mag > 0 ? d / mag : Complex(1.0);
  }
  return q;
}

/// Size of the auxiliary Ginibre matrix for rotated initializations:
/// ceil(n / area fraction), computed in exact integer arithmetic.
inline int auxiliary_dimension(CurveKind curve, int n) {
  switch (curve) {
    case CurveKind::Circle: return n;
    case CurveKind::Circuit: return (9 * n + 4) / 5;
    case CurveKind::Crossing: return 2 * n;
  }
  return n;
}

inline constexpr int kRotatedInitMaxAttempts = 1000;

/// Ginibre eigenvalues inside the curve region, put back in general position
/// by a Haar rotation: V D V*.
inline ComplexMatrix build_rotated_initial(const ModelSpec& spec) {
  if (spec.init == InitKind::PlainGinibre)
    throw ConfigError("build_rotated_initial: spec.init must be meander_rotated or sectors_rotated");
  const int aux = auxiliary_dimension(spec.curve, spec.n);
  for (int attempt = 0; attempt < kRotatedInitMaxAttempts; ++attempt) {
    const ComplexMatrix g =
        sample_ginibre(aux, spec.ensemble, derive_seed(spec.seed, stream::kRotatedAttempt + attempt));
    Eigen::ComplexEigenSolver<ComplexMatrix> es(g, false);
    if (es.info() != Eigen::Success) continue;
    std::vector<Complex> kept;
    for (int k = 0; k < aux; ++k)
      if (contains(spec.curve, es.eigenvalues()(k))) kept.push_back(es.eigenvalues()(k));
    if (static_cast<int>(kept.size()) != spec.n) continue;
    Eigen::VectorXcd d(spec.n);
    for (int k = 0; k < spec.n; ++k) d(k) = kept[k];
    const ComplexMatrix v = sample_haar_unitary(spec.n, derive_seed(spec.seed, stream::kHaarRotation));
    return v * d.asDiagonal() * v.adjoint();
  }
  throw NumericalError("build_rotated_initial: no draw kept exactly " + std::to_string(spec.n) +
                       " eigenvalues after " + std::to_string(kRotatedInitMaxAttempts) + " attempts");
}

/// The matrix C of the experiment described by spec.
inline ComplexMatrix base_matrix(const ModelSpec& spec) {
  validate(spec);
  if (spec.init == InitKind::PlainGinibre)
    return sample_ginibre(spec.n, spec.ensemble, derive_seed(spec.seed, stream::kBaseMatrix));
  return build_rotated_initial(spec);
}

}  // namespace eigcollide
