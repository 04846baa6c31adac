#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eigcollide/eigensolve.hpp"
#include "eigcollide/model.hpp"

using namespace eigcollide;

TEST(InterpolationWeights, UnitCircleOverSampledS) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 10000; ++k) {
    const auto w = interpolation_weights(u(rng));
    EXPECT_NEAR(w.alpha * w.alpha + w.beta * w.beta, 1.0, 1e-15);
    EXPECT_GE(w.alpha, 0.0);
    EXPECT_GE(w.beta, 0.0);
  }
}

TEST(InterpolationWeights, Endpoints) {
  EXPECT_EQ(interpolation_weights(0.0).alpha, 1.0);
  EXPECT_EQ(interpolation_weights(0.0).beta, 0.0);
  EXPECT_NEAR(interpolation_weights(1.0).alpha, 0.0, 1e-16);
  EXPECT_EQ(interpolation_weights(1.0).beta, 1.0);
  EXPECT_NEAR(interpolation_weights(0.5).alpha, std::sqrt(0.5), 1e-15);
}

TEST(InterpolationWeights, RejectsOutOfRange) {
  EXPECT_THROW(interpolation_weights(-0.01), std::domain_error);
  EXPECT_THROW(interpolation_weights(1.01), std::domain_error);
  EXPECT_THROW(interpolation_weights(std::nan("")), std::domain_error);
}

TEST(Ginibre, DeterministicPerSeed) {
  EXPECT_EQ(sample_ginibre(6, EnsembleKind::ComplexGaussian, 42), sample_ginibre(6, EnsembleKind::ComplexGaussian, 42));
  EXPECT_NE(sample_ginibre(6, EnsembleKind::ComplexGaussian, 42), sample_ginibre(6, EnsembleKind::ComplexGaussian, 43));
}

TEST(Ginibre, FrobeniusNormSquaredIsAboutN) {
  // Each entry has variance 1/n, so E ||C||_F^2 = n.
  for (auto ens : {EnsembleKind::ComplexGaussian, EnsembleKind::SymmetricBernoulli}) {
    const int n = 10;
    double acc = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) acc += sample_ginibre(n, ens, seed).squaredNorm();
    EXPECT_NEAR(acc / 200 / n, 1.0, 0.05) << to_string(ens);
  }
}

TEST(Ginibre, GaussianRealAndImaginaryPartsBalanced) {
  double re2 = 0, im2 = 0, mean_re = 0;
  const int n = 8, seeds = 200;
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    const auto m = sample_ginibre(n, EnsembleKind::ComplexGaussian, seed);
    re2 += m.real().squaredNorm();
    im2 += m.imag().squaredNorm();
    mean_re += m.real().sum();
  }
  const double cells = static_cast<double>(n) * n * seeds;
  EXPECT_NEAR(re2 / cells, 0.5 / n, 0.05 / n);
  EXPECT_NEAR(im2 / cells, 0.5 / n, 0.05 / n);
  EXPECT_NEAR(mean_re / cells, 0.0, 0.01);
}

TEST(Ginibre, BernoulliEntriesAreSigns) {
  const int n = 9;
  const auto m = sample_ginibre(n, EnsembleKind::SymmetricBernoulli, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      EXPECT_EQ(m(i, j).imag(), 0.0);
      EXPECT_NEAR(std::abs(m(i, j).real()), 1.0 / 3.0, 1e-15);
    }
}

TEST(Ginibre, TracelessVariantsHaveZeroTrace) {
  for (auto ens : {EnsembleKind::TracelessBernoulli, EnsembleKind::TracelessComplexGaussian})
    for (std::uint64_t seed = 0; seed < 20; ++seed) EXPECT_LT(std::abs(sample_ginibre(7, ens, seed).trace()), 1e-13);
}

TEST(Ginibre, RejectsTinyDimension) { EXPECT_THROW(sample_ginibre(1, EnsembleKind::ComplexGaussian, 0), ConfigError); }

TEST(CurveMatrix, CircleIsRotatedRootsOfUnity) {
  const int n = 7;
  for (double t : {0.0, 0.13, 0.5, 0.999}) {
    const auto d = curve_diagonal(CurveKind::Circle, n, t);
    for (int k = 0; k < n; ++k) {
      const Complex omega = std::polar(1.0, 2 * std::numbers::pi / n);
      EXPECT_NEAR(std::abs(d(k) - std::pow(omega, t * n + k)), 0.0, 1e-12);
    }
  }
}

TEST(CurveMatrix, PeriodicInTBitwise) {
  for (auto c : {CurveKind::Circle, CurveKind::Circuit, CurveKind::Crossing})
    for (int n : {2, 5, 10, 11}) EXPECT_EQ(curve_matrix(c, n, 0.0), curve_matrix(c, n, 1.0));
}

TEST(Assemble, PeriodicInT) {
  ModelSpec spec;
  spec.n = 9;
  spec.curve = CurveKind::Crossing;
  const auto base = base_matrix(spec);
  for (double s : {0.0, 0.3, 0.77, 1.0}) EXPECT_EQ(assemble(spec, base, s, 0.0), assemble(spec, base, s, 1.0));
}

TEST(Assemble, EndpointsAreBaseAndCurve) {
  ModelSpec spec;
  spec.n = 5;
  const auto base = base_matrix(spec);
  EXPECT_EQ(assemble(spec, base, 0.0, 0.4), base);
  EXPECT_LT((assemble(spec, base, 1.0, 0.4) - curve_matrix(spec.curve, 5, 0.4)).norm(), 1e-15);
}

TEST(Assemble, DimensionMismatchIsConfigError) {
  ModelSpec spec;
  spec.n = 5;
  EXPECT_THROW(assemble(spec, ComplexMatrix::Zero(4, 4), 0.5, 0.5), ConfigError);
}

TEST(Validate, CrossingNeedsOddN) {
  ModelSpec spec;
  spec.curve = CurveKind::Crossing;
  spec.n = 10;
  try {
    validate(spec);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("odd"), std::string::npos);
  }
  spec.n = 11;
  EXPECT_NO_THROW(validate(spec));
}

TEST(Validate, RotatedInitPairsWithItsCurve) {
  ModelSpec spec;
  spec.init = InitKind::MeanderRotated;
  EXPECT_THROW(validate(spec), ConfigError);
  spec.curve = CurveKind::Circuit;
  EXPECT_NO_THROW(validate(spec));
  spec.init = InitKind::SectorsRotated;
  EXPECT_THROW(validate(spec), ConfigError);
}

TEST(Parse, EnumNamesRoundTrip) {
  for (auto e : {EnsembleKind::ComplexGaussian, EnsembleKind::SymmetricBernoulli, EnsembleKind::TracelessBernoulli,
                 EnsembleKind::TracelessComplexGaussian})
    EXPECT_EQ(parse_ensemble(to_string(e)), e);
  for (auto i : {InitKind::PlainGinibre, InitKind::MeanderRotated, InitKind::SectorsRotated})
    EXPECT_EQ(parse_init(to_string(i)), i);
  EXPECT_THROW(parse_ensemble("gaussian"), ConfigError);
}

TEST(Haar, IsUnitary) {
  for (int n : {2, 5, 12}) {
    const auto u = sample_haar_unitary(n, 99);
    EXPECT_LT((u.adjoint() * u - ComplexMatrix::Identity(n, n)).norm(), 1e-12);
  }
}

TEST(Haar, FirstEntryHasNoPhaseBias) {
  // Haar: E u_11 = 0 and E |u_11|^2 = 1/n. A QR without the phase fix is biased.
  const int n = 3, seeds = 4000;
  Complex mean = 0;
  double second = 0;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    const auto u = sample_haar_unitary(n, s);
    mean += u(0, 0);
    second += std::norm(u(0, 0));
  }
  EXPECT_LT(std::abs(mean / double(seeds)), 0.03);
  EXPECT_NEAR(second / seeds, 1.0 / n, 0.02);
}

TEST(AuxiliaryDimension, CeilOfNOverAreaFraction) {
  for (int n = 2; n < 40; ++n) {
    EXPECT_EQ(auxiliary_dimension(CurveKind::Circle, n), n);
    EXPECT_EQ(auxiliary_dimension(CurveKind::Circuit, n), static_cast<int>(std::ceil(n * 9.0 / 5.0 - 1e-12)));
    EXPECT_EQ(auxiliary_dimension(CurveKind::Crossing, n), 2 * n);
  }
}

TEST(RotatedInitial, EigenvaluesInsideRegion) {
  for (auto [curve, init, n] : {std::tuple{CurveKind::Circuit, InitKind::MeanderRotated, 10},
                                std::tuple{CurveKind::Crossing, InitKind::SectorsRotated, 11}})
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      ModelSpec spec;
      spec.n = n;
      spec.curve = curve;
      spec.init = init;
      spec.seed = seed;
      const auto c = build_rotated_initial(spec);
      EXPECT_EQ(c, build_rotated_initial(spec));
      const auto ev = eigenvalues(c);
      ASSERT_EQ(static_cast<int>(ev.size()), n);
      for (auto z : ev) EXPECT_TRUE(contains(curve, z)) << z;
      // A unitary rotation of a diagonal matrix is normal.
      EXPECT_LT((c * c.adjoint() - c.adjoint() * c).norm(), 1e-10);
    }
}

TEST(RotatedInitial, PlainInitRejected) {
  ModelSpec spec;
  EXPECT_THROW(build_rotated_initial(spec), ConfigError);
}

TEST(BaseMatrix, DependsOnlyOnSpec) {
  ModelSpec a;
  a.n = 6;
  a.seed = 5;
  ModelSpec b = a;
  EXPECT_EQ(base_matrix(a), base_matrix(b));
  b.seed = 6;
  EXPECT_NE(base_matrix(a), base_matrix(b));
}
