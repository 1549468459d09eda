#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sns/forcing.hpp"
#include "sns/integrator.hpp"
#include "sns/reduction.hpp"
#include "sns/stats.hpp"

namespace sns {

struct EnsembleSettings {
  IntegratorConfig integrator;  ///< dt and scheme; t_end is set per check
  KernelKind kernel = KernelKind::fft;
  std::size_t samples = 1000;
  std::size_t min_samples = 100;
  std::uint64_t seed = 0;
  std::string stream = "ensemble";
  int workers = 1;
  double k_se = 3.0;

  void validate() const;
  nlohmann::json to_json() const;
};

/// Per-path functionals gathered while integrating one ensemble member.
struct PathSummary {
  bool blew_up = false;
  double blowup_time = 0.0;
  std::vector<double> enstrophy;  ///< ||w||^2 at the requested sample times
  std::vector<double> dn;         ///< D_1, ..., D_T
  double sup_d_first = 0.0;       ///< max over grid times t in [0, 1] of D_t
};

/// Runs settings.samples independent paths from w0 up to t_end. Sample i
/// draws its noise from RngStream(seed, stream, i), so results do not depend
/// on the worker count. `sample_times` must lie on the step grid.
std::vector<PathSummary> run_ensemble(const SpectralField& w0, const ForcingSpec& spec,
                                      const EnsembleSettings& settings, double t_end,
                                      std::span<const double> sample_times);

struct McReport {
  std::string name;
  std::size_t samples = 0;
  std::size_t blowups = 0;
  double empirical = 0.0;
  double se = 0.0;
  double bound = 0.0;
  double k_se = 3.0;
  bool blowups_fail = false;  ///< mean-type checks fail on any blow-up
  bool pass = false;
  nlohmann::json params;  ///< check parameters and the ensemble settings (seed, stream)
  nlohmann::json extra;

  /// empirical <= bound + k_se * se, and no blow-ups for mean-type checks.
  bool recompute_pass() const;
  nlohmann::json to_json() const;
};

/// Slope of log frequency against a control variable.
struct SlopeReport {
  std::string name;
  std::string variable;
  std::size_t samples = 0;
  std::size_t blowups = 0;
  std::vector<double> x;
  std::vector<double> frequency;
  std::vector<double> se;
  std::vector<std::size_t> counts;
  LinearFit fit;
  double min_r2 = 0.8;
  std::size_t fitted_points = 0;  ///< grid points with a nonzero count
  bool pass = false;              ///< slope < 0, r2 >= min_r2, at least three fitted points
  nlohmann::json params;

  nlohmann::json to_json() const;
};

/// E[exp(||w(t)||^2 / 4R)] against 3 exp(e^-t ||w0||^2 / 4R).
McReport check_exp_moment(const SpectralField& w0, double t, const ForcingSpec& spec,
                          const EnsembleSettings& settings);
double exp_moment_bound(double t, double w0_enstrophy, double R);

/// P(||w(t)||^2 >= D) against 3 exp(-D / 4R) exp(e^-t ||w0||^2 / 4R).
McReport check_tail(const SpectralField& w0, double t, double D, const ForcingSpec& spec,
                    const EnsembleSettings& settings);
double tail_bound(double t, double D, double w0_enstrophy, double R);

/// Tail frequencies on a D-grid, all from one ensemble. `monotone` records
/// that the empirical tail is nonincreasing in D.
struct TailCurve {
  std::vector<McReport> points;
  bool monotone = false;
};
TailCurve tail_curve(const SpectralField& w0, double t, std::span<const double> d_grid, const ForcingSpec& spec,
                     const EnsembleSettings& settings);

/// P(sup_{t in [0,1]} D_t >= A) on an A-grid, fitted against A / R.
/// Every A must satisfy A >= 3 D_0 = 1.5 ||w0||^2.
SlopeReport check_sup_tail(const SpectralField& w0, std::span<const double> a_grid, const ForcingSpec& spec,
                           const EnsembleSettings& settings);

/// P(sum_{n=t}^{t'-1} D_n >= beta R (t' - t)). The constants in the bound
/// are not explicit, so `bound` is the trivial value 1; the contract lives in
/// the two sweeps below.
McReport check_block_tail(const SpectralField& w0, int t, int t_prime, double beta, const ForcingSpec& spec,
                          const EnsembleSettings& settings);

struct BlockSweeps {
  SlopeReport beta;    ///< fixed length, varying beta
  SlopeReport length;  ///< fixed beta, varying length
};
/// Both sweeps from one ensemble run to t_start + max length - 1.
BlockSweeps block_tail_sweeps(const SpectralField& w0, int t_start, int fixed_length, std::span<const double> betas,
                              double fixed_beta, std::span<const int> lengths, const ForcingSpec& spec,
                              const EnsembleSettings& settings);

/// E exp(int (zeta, gamma^-1 db) + lambda int (zeta, gamma^-1 zeta) dt) over
/// the grid of `zeta` against exp(2 (1 + lambda) sup ||zeta||^2 / rho).
McReport check_novikov(const SPath& zeta, const ForcingSpec& spec, double lambda, const EnsembleSettings& settings);
double novikov_bound(double zeta_sq, double rho, double lambda);

struct CouplingReport {
  std::vector<double> times;
  std::vector<double> median_distance;
  double rate = 0.0;  ///< -slope of log median distance against t
  double r2 = 0.0;
  std::size_t samples = 0;
  std::size_t blowups = 0;

  nlohmann::json to_json() const;
};

/// Synchronous coupling: both copies are driven by the same increments.
CouplingReport coupling_decay(const SpectralField& w0_a, const SpectralField& w0_b, const ForcingSpec& spec,
                              const EnsembleSettings& settings, double T);

struct ItoStudy {
  std::vector<double> dts;
  std::vector<double> rms;        ///< RMS residual with the calibrated constant
  std::vector<double> mean;       ///< mean residual with the calibrated constant
  std::vector<double> mean_unit;  ///< mean residual with c = 1
  double c_ito = kItoCorrection;
  bool decreasing = false;

  nlohmann::json to_json() const;
};

/// RMS over settings.samples paths of ito_residual(t) for each dt.
ItoStudy ito_study(const SpectralField& w0, const ForcingSpec& spec, const EnsembleSettings& settings,
                   std::span<const double> dts, double t);

}  // namespace sns
