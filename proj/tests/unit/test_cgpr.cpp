// Copyright 2026 The iml Authors
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
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "iml/cgpr.hpp"
#include "iml/error.hpp"
#include "oracles.hpp"

namespace iml {
namespace {

const Complex kI(0.0, 1.0);

KernelParams se(double sf2, std::vector<double> ell, double noise = 0.0) {
  return KernelParams{sf2, std::move(ell), noise};
}

std::vector<double> random_location(std::mt19937_64& rng, double span) {
  std::uniform_real_distribution<double> u(0.0, span);
  return {u(rng), u(rng), u(rng)};
}

Complex random_complex(std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  return {d(rng), d(rng)};
}

TEST(KernelTest, ClosedFormValues) {
  const std::vector<double> x{1.0, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(kernel_eval(x, x, se(2.0, {1.0, 1.0, 1.0})), 2.0);
  const std::vector<double> far{1e6, 2.0, 3.0};
  EXPECT_LT(kernel_eval(x, far, se(1.0, {1.0, 1.0, 1.0})), 1e-300);
  const std::vector<double> shifted{1.0 + 5.0, 2.0, 3.0};
  EXPECT_NEAR(kernel_eval(x, shifted, se(1.0, {5.0, 0.3, 0.3})),
              std::exp(-0.5), 1e-15);
}

TEST(KernelTest, ValidateRejectsBadParams) {
  EXPECT_THROW(se(0.0, {1.0}).validate(), InvalidInput);
  EXPECT_THROW(se(1.0, {0.0}).validate(), InvalidInput);
  EXPECT_THROW(se(1.0, {1.0}, -1.0).validate(), InvalidInput);
  EXPECT_NO_THROW(se(1.0, {1.0}).validate());
}

TEST(WeightedKernelTest, HandEvaluatedCases) {
  const std::vector<KernelParams> one{se(1.5, {1.0})};
  const TrainingPoint a{{0.0}, {1.0}, 0.0};
  const TrainingPoint b{{0.7}, {1.0}, 0.0};
  EXPECT_NEAR(std::abs(weighted_kernel_eval(a, b, one) -
                       kernel_eval(a.location, b.location, one[0])),
              0.0, 1e-15);

  const TrainingPoint zero{{0.0}, {0.0}, 0.0};
  EXPECT_EQ(weighted_kernel_eval(zero, b, one), Complex(0.0));

  // Both base kernels equal 1 at zero distance with unit variance.
  const std::vector<KernelParams> two{se(1.0, {1.0}), se(1.0, {1.0})};
  const TrainingPoint p1{{0.0}, {1.0, kI}, 0.0};
  const TrainingPoint p2{{0.0}, {kI, 1.0}, 0.0};
  EXPECT_LT(std::abs(weighted_kernel_eval(p1, p2, two)), 1e-15);
}

TEST(CovarianceTest, UnitWeightsGiveBaseKernel) {
  std::mt19937_64 rng(2);
  std::vector<TrainingPoint> pts;
  for (int i = 0; i < 8; ++i) pts.push_back({random_location(rng, 3.0), {1.0}, 0.0});
  const std::vector<KernelParams> params{se(2.0, {1.0, 0.5, 2.0})};
  const Eigen::MatrixXcd k = build_covariance(pts, params);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      EXPECT_NEAR(std::abs(k(r, c) - oracle::se_kernel(pts[r].location,
                                                       pts[c].location, 2.0,
                                                       {1.0, 0.5, 2.0})),
                  0.0, 1e-14);
    }
  }
}

TEST(CovarianceTest, HermitianAndPositiveSemidefinite) {
  std::mt19937_64 rng(3);
  const std::vector<KernelParams> params{se(1.0, {2.0, 1.0, 1.0}),
                                         se(3.0, {1.0, 0.5, 1.5})};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TrainingPoint> pts;
    for (int i = 0; i < 20; ++i) {
      pts.push_back({random_location(rng, 4.0),
                     {random_complex(rng), random_complex(rng)},
                     0.0});
    }
    const Eigen::MatrixXcd k = build_covariance(pts, params);
    EXPECT_LT((k - k.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(k).eigenvalues();
    EXPECT_GE(ev.minCoeff(), -1e-10 * ev.maxCoeff());
  }
}

TEST(CovarianceTest, DuplicatePointsNeedNoiseOrJitter) {
  std::mt19937_64 rng(4);
  std::vector<TrainingPoint> pts;
  for (int i = 0; i < 5; ++i) pts.push_back({random_location(rng, 4.0), {1.0}, 1.0});
  pts.push_back(pts[2]);
  const std::vector<KernelParams> params{se(1.0, {1.0, 1.0, 1.0})};
  const Eigen::MatrixXcd k = build_covariance(pts, params);
  const Eigen::VectorXd ev =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(k).eigenvalues();
  EXPECT_LT(ev.minCoeff(), 1e-12);
  Eigen::MatrixXcd noisy = k;
  noisy.diagonal().array() += 1e-4;
  EXPECT_EQ(Eigen::FullPivLU<Eigen::MatrixXcd>(noisy).rank(), 6);

  GpRow row({se(1.0, {1.0, 1.0, 1.0}, 0.0)});
  row.set_points(pts);
  EXPECT_NO_THROW(row.train());
  EXPECT_GT(row.jitter(), 0.0);
}

TEST(GpRowTest, RequiresTraining) {
  GpRow row({se(1.0, {1.0})});
  const std::vector<std::vector<double>> x{{0.0}};
  const std::vector<Complex> w{1.0};
  EXPECT_THROW(row.predict(x, w), StateError);
  GpRow empty;
  EXPECT_THROW(empty.train(), StateError);
}

TEST(GpRowTest, EmptyTrainingSetReturnsPrior) {
  GpRow row({se(2.5, {1.0, 1.0, 1.0})});
  row.train();
  const std::vector<std::vector<double>> x{{0.0, 1.0, 2.0}, {3.0, 4.0, 5.0}};
  const auto p = row.predict_entry(0, x);
  for (std::size_t s = 0; s < 2; ++s) {
    EXPECT_EQ(p.mean[s], Complex(0.0));
    EXPECT_DOUBLE_EQ(p.variance[s], 2.5);
  }
}

TEST(GpRowTest, NoiseFreeInterpolation) {
  std::mt19937_64 rng(5);
  std::vector<TrainingPoint> pts;
  std::vector<std::vector<double>> locs;
  for (int i = 0; i < 15; ++i) {
    locs.push_back(random_location(rng, 10.0));
    pts.push_back({locs.back(), {1.0}, random_complex(rng)});
  }
  GpRow row({se(1.0, {1.0, 1.0, 1.0}, 0.0)});
  row.set_points(pts);
  row.train();
  const auto p = row.predict_entry(0, locs);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_LT(std::abs(p.mean[i] - pts[i].target), 1e-8);
    EXPECT_LT(p.variance[i], 1e-10);
  }
}

TEST(GpRowTest, VarianceNeverExceedsPrior) {
  std::mt19937_64 rng(6);
  std::vector<TrainingPoint> pts;
  for (int i = 0; i < 25; ++i) {
    pts.push_back({random_location(rng, 5.0), {random_complex(rng)},
                   random_complex(rng)});
  }
  GpRow row({se(1.7, {1.0, 2.0, 0.5}, 1e-2)});
  row.set_points(pts);
  row.train();
  std::vector<std::vector<double>> xs;
  for (int i = 0; i < 50; ++i) xs.push_back(random_location(rng, 7.0));
  for (double v : row.predict_entry(0, xs).variance) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.7 + 1e-10);
  }
}

TEST(GpRowTest, WeightedMatchesUnweightedForSingleInput) {
  std::mt19937_64 rng(7);
  const double noise = 0.05;
  const std::vector<double> ell{1.5, 0.8, 1.2};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TrainingPoint> pts;
    std::vector<std::vector<double>> x;
    std::vector<Complex> ratio;
    std::vector<double> point_noise;
    for (int i = 0; i < 30; ++i) {
      Complex u = random_complex(rng);
      if (std::abs(u) < 0.2) u += 0.5;
      const Complex y = random_complex(rng);
      x.push_back(random_location(rng, 4.0));
      pts.push_back({x.back(), {u}, y});
      ratio.push_back(y / u);
      point_noise.push_back(noise / std::norm(u));
    }
    GpRow row({se(1.3, ell, noise)});
    row.set_points(pts);
    row.train();
    std::vector<std::vector<double>> xs;
    for (int i = 0; i < 10; ++i) xs.push_back(random_location(rng, 4.0));
    const std::vector<Complex> w{1.0};
    const auto got = row.predict(xs, w);
    const auto ref = oracle::unweighted_gp(x, ratio, point_noise, 1.3, ell, xs);
    for (std::size_t s = 0; s < xs.size(); ++s) {
      EXPECT_LE(std::abs(got.mean[s] - ref.mean[s]),
                1e-8 * std::max(1.0, std::abs(ref.mean[s])));
      EXPECT_NEAR(got.variance[s], ref.variance[s], 1e-8);
    }
  }
}

TEST(GpRowTest, LogLikelihoodMatchesDeterminantForm) {
  std::mt19937_64 rng(8);
  std::vector<TrainingPoint> pts;
  for (int i = 0; i < 12; ++i) {
    pts.push_back({random_location(rng, 3.0),
                   {random_complex(rng), random_complex(rng)},
                   random_complex(rng)});
  }
  const std::vector<KernelParams> params{se(1.0, {1.0, 1.0, 1.0}, 0.1),
                                         se(0.5, {2.0, 0.7, 1.0}, 0.1)};
  GpRow row(params);
  row.set_points(pts);
  row.train();
  Eigen::MatrixXcd k = build_covariance(pts, params);
  k.diagonal().array() += 0.1;
  Eigen::VectorXcd y(12);
  for (int i = 0; i < 12; ++i) y(i) = pts[i].target;
  EXPECT_NEAR(row.log_marginal_likelihood(),
              oracle::complex_log_likelihood(k, y), 1e-9);
}

TEST(GpRowTest, DecoupledInputsRecoverEachEntry) {
  // Y = 2 U1 + (1 - i) U2 with each point exciting one input.
  std::vector<TrainingPoint> pts;
  for (int i = 0; i < 10; ++i) {
    const double w = 0.5 * i;
    pts.push_back({{w}, {1.0, 0.0}, 2.0});
    pts.push_back({{w + 0.25}, {0.0, 1.0}, Complex(1.0, -1.0)});
  }
  GpRow row({se(4.0, {2.0}, 1e-8), se(4.0, {2.0}, 1e-8)});
  row.set_points(pts);
  row.train();
  const std::vector<std::vector<double>> xs{{1.1}, {2.6}};
  for (const auto& m : row.predict_entry(0, xs).mean) {
    EXPECT_NEAR(std::abs(m - 2.0), 0.0, 1e-3);
  }
  for (const auto& m : row.predict_entry(1, xs).mean) {
    EXPECT_NEAR(std::abs(m - Complex(1.0, -1.0)), 0.0, 1e-3);
  }
}

TEST(GpRowTest, PermutationInvariance) {
  std::mt19937_64 rng(9);
  std::vector<TrainingPoint> pts;
  for (int i = 0; i < 10; ++i) {
    pts.push_back({random_location(rng, 3.0), {random_complex(rng)},
                   random_complex(rng)});
  }
  const std::vector<std::vector<double>> xs{{1.0, 1.0, 1.0}, {2.0, 0.5, 0.1}};
  GpRow a({se(1.0, {1.0, 1.0, 1.0}, 0.01)});
  a.set_points(pts);
  a.train();
  std::reverse(pts.begin(), pts.end());
  GpRow b({se(1.0, {1.0, 1.0, 1.0}, 0.01)});
  b.set_points(pts);
  b.train();
  const auto pa = a.predict_entry(0, xs);
  const auto pb = b.predict_entry(0, xs);
  for (std::size_t s = 0; s < xs.size(); ++s) {
    EXPECT_LT(std::abs(pa.mean[s] - pb.mean[s]), 1e-10);
    EXPECT_NEAR(pa.variance[s], pb.variance[s], 1e-10);
  }
}

TEST(MimoGpTest, EstimateShapes) {
  MimoGp gp(2, 2, 2);
  for (std::size_t i = 0; i < 2; ++i) {
    gp.row(i).set_hyperparameters({se(1.0, {1.0, 1.0}), se(1.0, {1.0, 1.0})});
  }
  EXPECT_FALSE(gp.trained());
  gp.train();
  EXPECT_TRUE(gp.trained());
  EXPECT_EQ(gp.total_points(), 0u);
  const std::vector<double> params{0.3};
  const std::vector<double> freqs{0.0, 1.0, 2.0};
  const ModelEstimate e = gp.estimate(params, freqs);
  EXPECT_EQ(e.n_frequencies(), 3u);
  EXPECT_EQ(e.n_outputs(), 2u);
  EXPECT_EQ(e.n_inputs(), 2u);
  EXPECT_DOUBLE_EQ(e.variance[1](1, 0), 1.0);
  const std::vector<double> wrong{0.3, 0.4};
  EXPECT_THROW(gp.estimate(wrong, freqs), InvalidInput);
}

TEST(SamplesFromSpectraTest, OnePointPerKeptBin) {
  const std::vector<double> f{0.0, 1.0, 2.0};
  const std::vector<Spectrum> in{Spectrum(f, {1.0, 2.0, 3.0}),
                                 Spectrum(f, {0.0, 1.0, 0.0})};
  const Spectrum out(f, {5.0, 4.0, 6.0});
  const Window w{0, 10, {0.314}};
  EXPECT_TRUE(samples_from_spectra(in, out, w, {}).empty());
  const std::vector<std::size_t> kept{1};
  const auto pts = samples_from_spectra(in, out, w, kept);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].location, (std::vector<double>{1.0, 0.314}));
  EXPECT_EQ(pts[0].weights, (std::vector<Complex>{2.0, 1.0}));
  EXPECT_EQ(pts[0].target, Complex(4.0));
}

TEST(SamplesFromSpectraTest, ImpliedTransferValue) {
  const std::vector<double> f{0.0, 3.0};
  const std::vector<Spectrum> in{Spectrum(f, {0.0, 2.0})};
  const Spectrum out(f, {0.0, 4.0});
  const std::vector<std::size_t> kept{1};
  const auto pts = samples_from_spectra(in, out, Window{0, 4, {}}, kept);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].target / pts[0].weights[0], Complex(2.0));
  EXPECT_EQ(pts[0].location, std::vector<double>{3.0});
}

}  // namespace
}  // namespace iml
