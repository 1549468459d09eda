#include <cmath>

#include "doctest.h"
#include "sns/errors.hpp"
#include "sns/rng.hpp"
#include "sns/toy_model.hpp"

using namespace sns;

TEST_CASE("kernel positivity and normalisation") {
  const ToyChainSpec spec;
  RngStream rng(1, "toy_norm");
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> past(static_cast<std::size_t>(trial % 7));
    for (double& v : past) v = rng.uniform();
    CHECK(kernel_normalization(spec, past) == doctest::Approx(1.0).epsilon(1e-10));
    for (double x : {0.0, 0.1, 0.5, 0.99, 1.0}) CHECK(kernel_density(spec, x, past) >= 0.0);
  }
  CHECK(kernel_density(spec, 1.5, {}) == 0.0);
}

TEST_CASE("memory mean") {
  ToyChainSpec spec;
  spec.C = 0.0;
  const double past[] = {1.0, 1.0};
  CHECK(memory_mean(spec, past) == 0.5);

  spec = ToyChainSpec{};
  // A zero past: -1/2 C sum_j e^{-m j}.
  const double q = std::exp(-spec.m);
  CHECK(memory_mean(spec, {}) == doctest::Approx(0.5 - 0.5 * spec.C * q / (1.0 - q)).epsilon(1e-14));
  const double zeros[] = {0.0, 0.0, 0.0};
  CHECK(memory_mean(spec, zeros) == doctest::Approx(memory_mean(spec, {})).epsilon(1e-14));
  spec.C = 5.0;
  const double ones[] = {1.0, 1.0, 1.0, 1.0};
  CHECK(memory_mean(spec, ones) == 0.75);
  CHECK(memory_mean(spec, {}) == 0.25);

  ToyChainSpec h;
  h.horizon = 2;
  const double long_past[] = {0.3, 0.9, 0.0, 1.0, 1.0};
  const double short_past[] = {0.3, 0.9};
  CHECK(memory_mean(h, long_past) == memory_mean(h, short_past));
}

TEST_CASE("kernel delta") {
  ToyChainSpec spec;
  const double seg[] = {1.0, 0.2, 0.4, 0.7, 0.5};
  CHECK_THROWS_AS(kernel_delta(spec, 0, 2, std::span(seg, 3)), ConfigError);
  CHECK(std::abs(kernel_delta(spec, 0, 4, seg)) > 0.0);
  spec.horizon = 3;
  CHECK(kernel_delta(spec, 0, 4, seg) == 0.0);

  const int distances[] = {3, 5, 7, 9, 11, 13};
  const DeltaSweep sweep = delta_sweep(ToyChainSpec{}, distances);
  CHECK(std::isfinite(sweep.constant));
  for (std::size_t i = 0; i < sweep.distance.size(); ++i)
    CHECK(sweep.sup_delta[i] <= sweep.constant * std::exp(-0.4 * sweep.distance[i]) * (1 + 1e-12));
  CHECK(-sweep.fit.slope >= 0.9 * 0.4);
}

TEST_CASE("truncated chain") {
  ToyChainSpec spec;
  spec.grid_cells = 6;
  const TruncatedChain a = build_truncated(spec);
  const TruncatedChain b = build_truncated(spec);
  CHECK(a.states() == 36);
  CHECK((a.P.array() >= 0.0).all());
  CHECK(((a.P.rowwise().sum().array() - 1.0).abs() < 1e-10).all());
  CHECK(a.P == b.P);

  ToyChainSpec g8;
  g8.grid_cells = 8;
  const TruncatedChain c = build_truncated(g8);
  CHECK(c.P == build_truncated(g8).P);

  ToyChainSpec memoryless;
  memoryless.C = 0.0;
  memoryless.grid_cells = 5;
  const TruncatedChain flat = build_truncated(memoryless);
  for (Eigen::Index i = 1; i < flat.P.rows(); ++i) CHECK((flat.P.row(i) - flat.P.row(0)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(doob_delta(flat.P) == doctest::Approx(1.0).epsilon(1e-12));
  const TvReport tv = tv_contraction_check(flat.P, 5);
  for (double v : tv.tv) CHECK(v < 1e-12);

  ToyChainSpec big;
  big.grid_cells = 100;
  big.truncation = 3;
  CHECK_THROWS_AS(build_truncated(big), ConfigError);
  CHECK(TruncatedChain::decode(7, 3, 2) == std::vector<int>{2, 1});
}

TEST_CASE("two-state chain") {
  Eigen::MatrixXd P(2, 2);
  P << 0.9, 0.1, 0.2, 0.8;
  CHECK(doob_delta(P) == doctest::Approx(0.3).epsilon(1e-15));
  const Eigen::VectorXd pi = stationary_distribution(P);
  CHECK(pi(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  const TvReport rep = tv_contraction_check(P, 20);
  CHECK(rep.envelope_holds);
  CHECK(rep.monotone);
  for (std::size_t n = 1; n <= rep.tv.size(); ++n) {
    CHECK(std::abs(rep.tv[n - 1] - (2.0 / 3.0) * std::pow(0.7, n)) <= 1e-12);
    CHECK(std::abs(rep.envelope[n - 1] - std::pow(0.7, n)) <= 1e-12);
  }
}

TEST_CASE("random chains obey the envelope") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Eigen::MatrixXd P = random_stochastic(30, seed);
    const double d = doob_delta(P);
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
    const TvReport rep = tv_contraction_check(P, 30, seed);
    CHECK(rep.envelope_holds);
    CHECK(rep.monotone);
  }
  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 0.6, 0.5, 0.5;
  CHECK_THROWS_AS(doob_delta(bad), ConfigError);
}

TEST_CASE("truncated chain of the shipped family") {
  ToyChainSpec spec;
  spec.grid_cells = 8;
  const TvReport rep = tv_contraction_check(build_truncated(spec).P, 30);
  CHECK(rep.envelope_holds);
  CHECK(rep.monotone);
  CHECK(rep.delta > 0.5);
}

TEST_CASE("kernel sampler") {
  RngStream rng(2, "sampler");
  const double beta = 8.0, mu = 0.3;
  const int n = 200000;
  double mean = 0.0;
  bool in_range = true;
  for (int i = 0; i < n; ++i) {
    const double x = sample_kernel(beta, mu, rng.uniform());
    in_range = in_range && x >= 0.0 && x <= 1.0;
    mean += x / n;
  }
  CHECK(in_range);
  // Mean of the truncated density by midpoint quadrature.
  double ref = 0.0;
  const int cells = 100000;
  for (int i = 0; i < cells; ++i) {
    const double x = (i + 0.5) / cells;
    ref += x * kernel_density_at_mean(beta, x, mu) / cells;
  }
  CHECK(mean == doctest::Approx(ref).epsilon(0.005));
}

TEST_CASE("memory mixing experiment") {
  const ToyChainSpec spec;
  MixingSettings same;
  same.h1.assign(10, 0.4);
  same.h2 = same.h1;
  same.samples = 20000;
  same.T_max = 4;
  same.bootstrap = 50;
  same.seed = 5;
  const MixingReport r = memory_mixing_experiment(spec, same);
  for (std::size_t i = 0; i < r.tv.size(); ++i) CHECK(r.tv[i] <= r.null_level[i]);
  CHECK_FALSE(r.pass);

  ToyChainSpec memoryless;
  memoryless.C = 0.0;
  MixingSettings diff = same;
  diff.h1.assign(10, 0.0);
  diff.h2.assign(10, 1.0);
  const MixingReport flat = memory_mixing_experiment(memoryless, diff);
  CHECK(flat.tv[0] <= flat.null_level[0]);

  diff.samples = 30000;
  diff.T_max = 8;
  const MixingReport decay = memory_mixing_experiment(spec, diff);
  CHECK(decay.slope < 0.0);
  diff.workers = 3;
  const MixingReport threaded = memory_mixing_experiment(spec, diff);
  CHECK(threaded.tv == decay.tv);
}
