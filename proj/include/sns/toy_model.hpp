#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "sns/stats.hpp"

namespace sns {

/// Chain on [0,1] with exponentially fading memory:
///   p(x | past) = exp(-beta (x - mu)^2) / Z(mu) on [0,1],
///   mu = clamp(1/2 + sum_{j>=1} C e^{-m j} (x_{t-j} - 1/2), 1/4, 3/4).
/// A past given as a finite segment is padded with zeros further back.
struct ToyChainSpec {
  double m = 0.4;              ///< memory rate
  double C = 0.2;              ///< memory amplitude
  double beta = 8.0;           ///< kernel sharpness
  int grid_cells = 12;         ///< G
  int truncation = 2;          ///< N
  int horizon = 0;             ///< > 0 drops x_{t-j} for j > horizon
  std::size_t max_states = 4096;

  void validate() const;
  std::size_t state_count() const;  ///< G^N, saturating
  nlohmann::json to_json() const;
};

/// past[0] = x_{t-1}, past[1] = x_{t-2}, ...; older values are zero.
double memory_mean(const ToyChainSpec& spec, std::span<const double> past);
double kernel_density(const ToyChainSpec& spec, double x, std::span<const double> past);
/// Density for a given mean, normalised analytically.
double kernel_density_at_mean(double beta, double x, double mu);
/// Integral of the density over [0,1] by adaptive Gauss-Kronrod quadrature.
double kernel_normalization(const ToyChainSpec& spec, std::span<const double> past);

/// delta_{s,t} = p(x_t | x_[s,t-1] v 0) - p(x_t | x_[s+1,t-1] v 0), where
/// segment = (x_s, ..., x_t). Requires s < t - 2 and values in [0,1].
double kernel_delta(const ToyChainSpec& spec, int s, int t, std::span<const double> segment);

struct DeltaSweep {
  std::vector<int> distance;
  std::vector<double> sup_delta;
  double constant = 0.0;  ///< max_d sup_delta(d) e^{m d}
  LinearFit fit;          ///< log sup_delta against distance
  nlohmann::json to_json() const;
};
/// sup over a grid of segment values of |delta_{s,t}| for |t - s| in `distances`.
DeltaSweep delta_sweep(const ToyChainSpec& spec, std::span<const int> distances, int grid_points = 5);

/// Block chain on G^N midpoint cells. Row x is the previous block
/// (x_{-N+1}, ..., x_0), column z the next block (x_1, ..., x_N); each factor
/// is the kernel at cell midpoints normalised over the G cells.
struct TruncatedChain {
  ToyChainSpec spec;
  Eigen::MatrixXd P;

  std::size_t states() const { return static_cast<std::size_t>(P.rows()); }
  /// Cell index of x_{-N+1+i} in `state`.
  static std::vector<int> decode(std::size_t state, int G, int N);
};

/// Throws ConfigError when G^N exceeds spec.max_states.
TruncatedChain build_truncated(const ToyChainSpec& spec);

/// Throws ConfigError unless P is square, nonnegative and row-stochastic
/// within 1e-10.
void validate_stochastic(const Eigen::MatrixXd& P);

/// min over state pairs of sum_z min(P(z|x), P(z|x')).
double doob_delta(const Eigen::MatrixXd& P);
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P);

struct TvReport {
  double delta = 0.0;
  std::vector<double> tv;        ///< tv[n-1] = max_x 1/2 sum_z |P^n(z|x) - pi(z)|
  std::vector<double> envelope;  ///< (1 - delta)^n
  bool envelope_holds = false;
  bool monotone = false;         ///< sup_x P^n(B|x) nonincreasing, inf nondecreasing on the panel
  std::size_t panel_sets = 0;
  nlohmann::json to_json() const;
};

/// Exact TV curve for n = 1..n_max against the (1 - delta)^n envelope,
/// plus the monotonicity of sup/inf P^n(B|.) on a panel of sets B.
TvReport tv_contraction_check(const Eigen::MatrixXd& P, int n_max, std::uint64_t panel_seed = 0);

/// Random row-stochastic matrix with i.i.d. uniform entries, rows normalised.
Eigen::MatrixXd random_stochastic(std::size_t n, std::uint64_t seed);

struct ResolutionCheck {
  double delta_coarse = 0.0;
  double delta_fine = 0.0;
  double delta_rel = 0.0;
  double tv_rel = 0.0;  ///< max_n |tv_fine - tv_coarse| / tv_fine over n with tv_fine >= tv_floor
  double tv_floor = 1e-6;
  bool stable = false;  ///< both relative changes <= tolerance
  double tolerance = 0.05;
  nlohmann::json to_json() const;
};
/// Compares the chain at G and 2G.
ResolutionCheck resolution_check(const ToyChainSpec& spec, int n_max, double tolerance = 0.05);

struct MixingSettings {
  std::vector<double> h1;  ///< h[0] = x_0, h[1] = x_{-1}, ...; zero beyond
  std::vector<double> h2;
  int T_max = 12;
  std::size_t samples = 100000;
  int bins = 10;
  int bootstrap = 200;
  std::uint64_t seed = 0;
  int workers = 1;
  double factor = 3.0;  ///< accepted band [m / factor, m factor] for |slope|
  nlohmann::json to_json() const;
};

struct MixingReport {
  std::vector<int> T;
  std::vector<double> tv;
  std::vector<double> tv_se;       ///< bootstrap standard error
  std::vector<double> null_level;  ///< null mean + 3 sd of TV between two samples of one law
  std::vector<bool> fitted;
  LinearFit fit;
  double slope = 0.0;
  double m = 0.0;
  bool pass = false;  ///< slope < 0, |slope| within the band, at least three fitted points
  nlohmann::json to_json() const;
};

/// Forward simulation of the full-memory chain from two pasts; histogram TV
/// of x_T between them with multinomial bootstrap errors, and a fit of
/// log TV against T over the points above the null level.
MixingReport memory_mixing_experiment(const ToyChainSpec& spec, const MixingSettings& settings);

/// One draw from the kernel density with mean mu, by inverse CDF.
double sample_kernel(double beta, double mu, double u);

}  // namespace sns
