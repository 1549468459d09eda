#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "sns/forcing.hpp"
#include "sns/integrator.hpp"
#include "sns/nonlinear.hpp"

namespace sns {

class RngStream;

/// Low-mode history s(t) sampled on a uniform grid t0 + i dt, i = 0..n.
struct SPath {
  SPath(Lattice lattice, double t0, double dt) : lattice(lattice), t0(t0), dt(dt) {}

  Lattice lattice;
  double t0;
  double dt;
  std::vector<SpectralField> values;

  std::size_t intervals() const { return values.empty() ? 0 : values.size() - 1; }
  double t1() const { return t0 + static_cast<double>(intervals()) * dt; }
  double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }

  /// Piecewise-linear interpolation; t is clamped to [t0, t1].
  SpectralField at(double t) const;
  /// Sub-path on grid indices [i0, i1].
  SPath slice(std::size_t i0, std::size_t i1) const;
  /// Throws ConfigError unless dt > 0, there are at least two samples, and
  /// every sample is finite and supported on |k|^2 <= N.
  void validate() const;

  /// Low-mode part of every recorded snapshot.
  static SPath from_trajectory(const TrajectoryRecord& rec, const Lattice& lattice);
};

/// Smooth random low-mode path s(t) = a + b cos(w1 t + p1) + c sin(w2 t + p2)
/// with ||s(t)|| <= amplitude.
SPath random_smooth_spath(const Lattice& lattice, RngStream& rng, double t_end, double dt, double amplitude);

/// Wiener path s(t_{i+1}) = s(t_i) + db_i with db drawn from `spec`. The
/// increments are stored in `increments` when it is non-null.
SPath wiener_spath(const ForcingSpec& spec, const SpectralField& s0, double t_end, double dt, RngStream& rng,
                   std::vector<NoiseIncrement>* increments = nullptr);

struct LSolveOptions {
  /// Number of steps over the whole path; 0 means one per grid interval.
  std::size_t steps = 0;
  KernelKind kernel = KernelKind::fft;
};

struct LTrajectory {
  std::vector<double> times;
  std::vector<SpectralField> values;
};

/// High-mode equation dl/dt = (1 - P) F(s(t) + l) with s interpolated
/// linearly, advanced by the exponential Euler step
///   l' = (1 - P) exp(-|k|^2 h) (l + h B(s + l)).
/// Throws BlowUpError on non-finite output.
LTrajectory solve_l(const SPath& spath, const SpectralField& l_init, const LSolveOptions& options = {});

/// a = (2 pi)^-2 sum_k |k|^-4 over the retained lattice.
double contraction_constant_a(const Lattice& lattice);

struct ContractionReport {
  double a = 0.0;
  int n_forced = 0;
  int gap = 0;
  std::vector<double> times;
  std::vector<double> lhs;        ///< ||l(t, s, l1) - l(t, s, l2)||
  std::vector<double> rhs;        ///< exp(-N t + a int ||grad w1||^2) ||l1 - l2||
  std::vector<double> rhs_gap;    ///< same with -gap t
  double exponent = 0.0;          ///< final-time exponent of `rhs`
  double exponent_gap = 0.0;
  bool vacuous = false;           ///< exponent >= 0: rhs no better than ||l1 - l2||
  bool holds = false;             ///< lhs <= rhs at every grid time
  bool holds_gap = false;
  bool pass = false;              ///< holds || vacuous
  double decay_rate = 0.0;        ///< -slope of log lhs against t
  double decay_r2 = 0.0;
};

ContractionReport contraction_check(const SPath& spath, const SpectralField& l1, const SpectralField& l2,
                                    const LSolveOptions& options = {});

struct SemigroupReport {
  double defect = 0.0;     ///< max |one-shot - restarted| at the final time
  double tolerance = 0.0;  ///< 2 max |l_n - l_2n| of the one-shot solve
  std::size_t split_index = 0;
};

/// Compares one solve over the whole path with a solve restarted at
/// grid index `split_index`. Each solve uses options.steps steps regardless
/// of its length, so the restarted segments run at different step sizes.
SemigroupReport semigroup_check(const SPath& spath, const SpectralField& l0, std::size_t split_index,
                                const LSolveOptions& options);

/// f(t) = P F(s(t) + l(t)) at the final time of the path.
SpectralField reduced_drift(const SPath& spath, const SpectralField& l_init, KernelKind kernel = KernelKind::fft);
/// f at every grid time, from one solve on the path grid.
std::vector<SpectralField> reduced_drift_path(const SPath& spath, const SpectralField& l_init,
                                              KernelKind kernel = KernelKind::fft);

struct GirsanovLedger {
  double log_density = 0.0;
  double stoch_term = 0.0;  ///< sum_i (f_i, gamma^-1 (s_{i+1} - s_i))
  double quad_term = 0.0;   ///< 1/2 sum_i (f_i, gamma^-1 f_i) dt

  bool consistent() const { return log_density == stoch_term - quad_term; }
};

/// Discrete Girsanov log-density of the reduced low-mode process against
/// the Wiener measure with covariance gamma. Requires spec.rho() > 0.
GirsanovLedger girsanov_log_density(const SPath& spath, const SpectralField& l_init, const ForcingSpec& spec,
                                    KernelKind kernel = KernelKind::fft);

/// C = sqrt(N) sqrt(#{k : |k|^2 <= N}).
double delta_f_constant(const Lattice& lattice);

struct DeltaFReport {
  double lhs = 0.0;  ///< ||f(s + l) - f(s + l')||
  double rhs = 0.0;  ///< C (2 ||s + l|| ||l - l'|| + ||l - l'||^2)
  double c = 0.0;
  double slack = 0.0;  ///< rhs / lhs (infinite when lhs = 0)
  bool pass = false;
};

DeltaFReport delta_f_bound_check(const SpectralField& s, const SpectralField& l, const SpectralField& lp);

/// log H = sum_i (df_i, gamma^-1 db_i) - 1/2 sum_i (df_i, gamma^-1 df_i) dt
/// with df = f_2 - f_1 along the path. `noise` has one increment per interval.
double log_density_ratio(const SPath& spath, const SpectralField& l_init_1, const SpectralField& l_init_2,
                         const ForcingSpec& spec, const std::vector<NoiseIncrement>& noise,
                         KernelKind kernel = KernelKind::fft);

/// Increments db_i = (s_{i+1} - s_i) - f_i dt under which the path is the
/// Euler image of the reduced equation started from l_init.
std::vector<NoiseIncrement> consistent_noise(const SPath& spath, const SpectralField& l_init, const ForcingSpec& spec,
                                             KernelKind kernel = KernelKind::fft);

struct GirsanovComparison {
  double direct_mean = 0.0;
  double direct_se = 0.0;
  double weighted_mean = 0.0;
  double weighted_se = 0.0;
  double mean_weight = 0.0;
  double z = 0.0;  ///< |difference| / combined standard error
  bool pass = false;
};

/// E[G(s(t))] from M direct simulations of the full system started at
/// s0 + l0 versus M Wiener paths from s0 weighted by the Girsanov density.
GirsanovComparison girsanov_comparison(const ForcingSpec& spec, const SpectralField& s0, const SpectralField& l0,
                                       double t, double dt, std::size_t samples, std::uint64_t seed,
                                       const std::function<double(const SpectralField&)>& observable,
                                       int workers = 1, double k_se = 3.0);

}  // namespace sns
